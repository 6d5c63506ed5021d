"""
Module A: Snapshot Format
Plain-text dump and load of configurations.

Format::

    arw d=<d> L=<L1,...,Ld> boundary=<torus|absorbing>
    <token> <token> ...        # one token per site, raster order: 0, s or n
"""

import logging
from pathlib import Path
from typing import Dict

from .schema import Boundary, Configuration, Domain, SiteState

logger = logging.getLogger(__name__)

HEADER_MAGIC = "arw"
TOKENS_PER_LINE = 32


def dump_snapshot(config: Configuration) -> str:
    """Serialise a configuration to the snapshot text format."""
    lines = [f"{HEADER_MAGIC} {config.domain.describe()}"]
    tokens = [s.token() for s in config.states()]
    for start in range(0, len(tokens), TOKENS_PER_LINE):
        lines.append(" ".join(tokens[start:start + TOKENS_PER_LINE]))
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> Domain:
    parts = line.split()
    if not parts or parts[0] != HEADER_MAGIC:
        raise ValueError(f"Snapshot header must start with '{HEADER_MAGIC}': {line!r}")

    fields: Dict[str, str] = {}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"Malformed header field {part!r}")
        fields[key] = value

    missing = {"d", "L", "boundary"} - set(fields)
    if missing:
        raise ValueError(f"Snapshot header lacks {sorted(missing)}")

    shape = tuple(int(s) for s in fields["L"].split(","))
    if len(shape) != int(fields["d"]):
        raise ValueError(f"Header d={fields['d']} does not match L={fields['L']}")
    try:
        boundary = Boundary(fields["boundary"])
    except ValueError:
        raise ValueError(f"Unknown boundary '{fields['boundary']}'")
    return Domain(shape, boundary)


def load_snapshot(text: str) -> Configuration:
    """Parse the snapshot text format."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("Empty snapshot")
    domain = _parse_header(lines[0])
    tokens = " ".join(lines[1:]).split()
    if len(tokens) != domain.n_sites:
        raise ValueError(f"Snapshot has {len(tokens)} site tokens, domain needs {domain.n_sites}")
    return Configuration.from_states(domain, [SiteState.from_token(t) for t in tokens])


def write_snapshot(config: Configuration, path: str):
    Path(path).write_text(dump_snapshot(config))
    logger.info(f"Snapshot written to {path}")


def read_snapshot(path: str) -> Configuration:
    logger.info(f"Loading snapshot from {path}")
    return load_snapshot(Path(path).read_text())
