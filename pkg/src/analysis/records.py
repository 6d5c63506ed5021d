"""
Result Emission
NDJSON records, CSV curves and run manifests.

Records are written with sorted keys and fixed separators so that the same
configuration reproduces the same bytes; the manifest keeps its timestamp on
a line of its own.
"""

import csv
import json
import logging
import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from src import __version__

logger = logging.getLogger(__name__)

BUILD_ID = f"arw-lab {__version__}"


def to_jsonable(value: Any) -> Any:
    """Plain JSON value: numpy scalars unwrapped, non-finite floats as null, enums by value."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Enum):
        return value.value
    return value


def dumps_record(record: Dict[str, Any]) -> str:
    """One NDJSON line (without newline)."""
    return json.dumps(to_jsonable(record), sort_keys=True, separators=(',', ':'))


class RecordWriter:
    """
    Single writer for an NDJSON record stream.

    Every record is written as one line and flushed, so an interrupted run
    leaves only complete records behind.
    """

    def __init__(self, path: Union[str, Path], append: bool = False):
        """
        Initialize the writer.

        Args:
            path: Output file
            append: Append instead of truncating
        """
        self.path = Path(path)
        self.append = append
        self.count = 0
        self._file = None

    def __enter__(self) -> 'RecordWriter':
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, 'a' if self.append else 'w', encoding='utf-8', newline='\n')
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._file is not None:
            self._file.close()
            self._file = None
        logger.info(f"Wrote {self.count} records to {self.path}")

    def write(self, record: Dict[str, Any]):
        if self._file is None:
            raise RuntimeError("RecordWriter used outside of its context")
        self._file.write(dumps_record(record) + '\n')
        self._file.flush()
        self.count += 1

    def write_all(self, records: Iterable[Dict[str, Any]]):
        for record in records:
            self.write(record)


def read_records(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """Parse an NDJSON file, skipping blank lines."""
    with open(path, 'r', encoding='utf-8') as f:
        return [json.loads(line) for line in f if line.strip()]


def write_csv(rows: List[Dict[str, Any]], path: Union[str, Path]):
    """Write a curve as CSV with the keys of the first row as header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not rows:
        path.write_text('', encoding='utf-8')
        return
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()), lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ('' if v is None else v) for k, v in to_jsonable(row).items()})
    logger.info(f"Wrote {len(rows)} rows to {path}")


def read_curve_csv(path: Union[str, Path]) -> Dict[str, List[float]]:
    """Columns u and zeta of a curve CSV (other columns are ignored)."""
    u: List[float] = []
    zeta: List[float] = []
    with open(path, 'r', encoding='utf-8', newline='') as f:
        for row in csv.DictReader(f):
            if row.get('zeta', '') == '':
                continue
            u.append(float(row['u']))
            zeta.append(float(row['zeta']))
    return {'u': u, 'zeta': zeta}


def write_manifest(path: Union[str, Path], config: Dict[str, Any],
                   table: Optional[Dict[str, Any]] = None,
                   extra: Optional[Dict[str, Any]] = None,
                   timestamp: Optional[str] = None) -> Path:
    """
    Write the run manifest.

    Args:
        path: Output file
        config: Full configuration echo
        table: Normative cumulative-table description of the instruction field
        extra: Further fields (artifact names, summary)
        timestamp: ISO timestamp (default: now, UTC)

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        'build': BUILD_ID,
        'config': config,
        'instruction_table': table,
        'timestamp': timestamp or datetime.now(timezone.utc).isoformat(timespec='seconds'),
    }
    if extra:
        manifest['artifacts'] = extra
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(to_jsonable(manifest), f, indent=2, sort_keys=True)
        f.write('\n')
    logger.info(f"Manifest written to {path}")
    return path
