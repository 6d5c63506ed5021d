"""
Configuration Management
Handles run configuration from YAML files and environment variables.

Files are parsed from the YAML node tree so that every diagnostic carries a
line and column; unknown keys are errors with a nearest-key suggestion.
"""

import difflib
import math
import os
import yaml
from pathlib import Path
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import logging

from src.module_a.kernels import JumpKernel, KernelValidationError, resolve_kernel
from src.module_a.schema import Boundary, Domain
from src.module_c.schedulers import SCHEDULERS
from src.module_d.schema import InitialFamily, InitialStateSpec

# Load .env file if it exists
try:
    from dotenv import load_dotenv
    # Look for .env in project root
    env_path = Path(__file__).parent.parent / '.env'
    if env_path.exists():
        load_dotenv(env_path, override=False)
except ImportError:
    pass  # python-dotenv not installed, use existing environment

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = 'ARW_OUTPUT_DIR'

EXPERIMENTS = ('drive', 'scan', 'gillespie', 'couple', 'selftest', 'estimate', 'universality')

# Allowed keys per section; None marks a scalar or list-valued top-level key.
SCHEMA: Dict[str, Optional[Tuple[str, ...]]] = {
    'experiment': None,
    'families': None,
    'domain': ('dimension', 'size', 'boundary'),
    'model': ('lambda', 'kernel'),
    'initial': ('family', 'zeta', 'params'),
    'grid': ('u', 'zeta', 'replicas', 'double'),
    'engine': ('seed', 'scheduler', 'cap', 'workers', 'horizon'),
    'coupling': ('zeta1', 'zeta2', 'family', 'round_cap', 'runs'),
    'selftest': ('abelian', 'least_action', 'monotonicity', 'gillespie', 'coupling',
                 'pigeonhole', 'max_size'),
    'estimate': ('curve', 'bootstrap'),
    'output': ('directory', 'records', 'curve', 'manifest'),
}
FAMILY_KEYS = ('family', 'zeta', 'params')
GRID_RANGE_KEYS = ('start', 'stop', 'step')


@dataclass
class Diagnostic:
    """One problem found in a configuration file (line and column are 1-based, 0 if unknown)."""
    line: int
    column: int
    key: str
    message: str
    suggestion: Optional[str] = None

    def __str__(self) -> str:
        where = f"line {self.line}, column {self.column}: " if self.line else ""
        hint = f" (did you mean '{self.suggestion}'?)" if self.suggestion else ""
        return f"{where}{self.key}: {self.message}{hint}"


class ConfigError(ValueError):
    """Invalid configuration with one diagnostic per problem."""

    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass
class DomainConfig:
    """Lattice geometry."""
    dimension: int = 1
    size: int = 64
    boundary: str = "torus"


@dataclass
class ModelConfig:
    """Dynamics parameters."""
    lam: float = 1.0
    kernel: str = "nn"


@dataclass
class InitialStateConfig:
    """Initial-state family and target density."""
    family: str = "poisson"
    zeta: float = 0.5
    params: Dict[str, Any] = field(default_factory=dict)

    def spec(self, seed: int = 0, zeta: Optional[float] = None) -> InitialStateSpec:
        return InitialStateSpec(InitialFamily.parse(self.family),
                                self.zeta if zeta is None else zeta, dict(self.params), seed)


@dataclass
class GridConfig:
    """Density grids and replica count."""
    u: List[float] = field(default_factory=lambda: grid_range(0.0, 1.2, 0.05))
    zeta: List[float] = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    replicas: int = 4
    double: bool = False


@dataclass
class EngineConfig:
    """Seeds, scheduling and budgets."""
    seed: int = 0
    scheduler: str = "fifo"
    cap: Optional[int] = None
    workers: int = 1
    horizon: float = math.inf


@dataclass
class CouplingConfig:
    """Two-density coupling runs."""
    zeta1: float = 0.2
    zeta2: float = 0.5
    family: str = "poisson"
    round_cap: int = 10 ** 5
    runs: int = 10


@dataclass
class SelftestConfig:
    """Instance counts of the property suites."""
    abelian: int = 100
    least_action: int = 50
    monotonicity: int = 50
    gillespie: int = 20
    coupling: int = 5
    pigeonhole: int = 10
    max_size: int = 12


@dataclass
class EstimateConfig:
    """Breakpoint fit of an existing curve file."""
    curve: Optional[str] = None
    bootstrap: int = 200


@dataclass
class OutputConfig:
    """Where artifacts go."""
    directory: str = "results"
    records: str = "records.ndjson"
    curve: str = "curve.csv"
    manifest: str = "manifest.json"

    @property
    def path(self) -> Path:
        return Path(self.directory)


@dataclass
class RunConfig:
    """Main configuration object; fully determines the output of a run."""
    experiment: str = "drive"
    domain: DomainConfig = field(default_factory=DomainConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    initial: InitialStateConfig = field(default_factory=InitialStateConfig)
    families: List[InitialStateConfig] = field(default_factory=list)
    grid: GridConfig = field(default_factory=GridConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    coupling: CouplingConfig = field(default_factory=CouplingConfig)
    selftest: SelftestConfig = field(default_factory=SelftestConfig)
    estimate: EstimateConfig = field(default_factory=EstimateConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def from_yaml(cls, yaml_path: str) -> 'RunConfig':
        """
        Load configuration from YAML file.

        Args:
            yaml_path: Path to YAML configuration file

        Returns:
            RunConfig object
        """
        with open(yaml_path, 'r') as f:
            return parse_config(f.read())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        """
        Load configuration from dictionary.

        Args:
            data: Configuration dictionary

        Returns:
            RunConfig object
        """
        return parse_config(yaml.safe_dump(data, sort_keys=False))

    @classmethod
    def from_defaults(cls, experiment: str = "drive") -> 'RunConfig':
        """
        Create configuration with default values.

        Args:
            experiment: Experiment kind

        Returns:
            RunConfig object with defaults
        """
        config = cls(experiment=experiment)
        config.output.directory = os.getenv(OUTPUT_DIR_ENV, config.output.directory)
        return config

    def make_domain(self, boundary: Optional[str] = None) -> Domain:
        """Domain of this run, optionally with another boundary."""
        return Domain.cube(self.domain.dimension, self.domain.size,
                           Boundary(boundary or self.domain.boundary))

    def make_kernel(self) -> JumpKernel:
        return resolve_kernel(self.model.kernel, self.domain.dimension)

    def family_specs(self) -> List[InitialStateSpec]:
        """Templates of the compared families (the primary family when none are listed)."""
        families = self.families or [self.initial]
        return [f.spec(self.engine.seed) for f in families]

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert configuration to dictionary.

        Returns:
            Configuration as dictionary
        """
        return {
            'experiment': self.experiment,
            'domain': {
                'dimension': self.domain.dimension,
                'size': self.domain.size,
                'boundary': self.domain.boundary,
            },
            'model': {
                'lambda': self.model.lam,
                'kernel': self.model.kernel,
            },
            'initial': _family_dict(self.initial),
            'families': [_family_dict(f) for f in self.families],
            'grid': {
                'u': list(self.grid.u),
                'zeta': list(self.grid.zeta),
                'replicas': self.grid.replicas,
                'double': self.grid.double,
            },
            'engine': {
                'seed': self.engine.seed,
                'scheduler': self.engine.scheduler,
                'cap': self.engine.cap,
                'workers': self.engine.workers,
                'horizon': None if math.isinf(self.engine.horizon) else self.engine.horizon,
            },
            'coupling': {
                'zeta1': self.coupling.zeta1,
                'zeta2': self.coupling.zeta2,
                'family': self.coupling.family,
                'round_cap': self.coupling.round_cap,
                'runs': self.coupling.runs,
            },
            'selftest': dict(vars(self.selftest)),
            'estimate': {
                'curve': self.estimate.curve,
                'bootstrap': self.estimate.bootstrap,
            },
            'output': {
                'directory': self.output.directory,
                'records': self.output.records,
                'curve': self.output.curve,
                'manifest': self.output.manifest,
            },
        }

    def save_yaml(self, yaml_path: str):
        """
        Save configuration to YAML file.

        Args:
            yaml_path: Path to save YAML file
        """
        with open(yaml_path, 'w') as f:
            yaml.safe_dump(self.to_dict(), f, default_flow_style=False, sort_keys=False)

        logger.info(f"Configuration saved to {yaml_path}")


def _family_dict(f: InitialStateConfig) -> Dict[str, Any]:
    return {'family': f.family, 'zeta': f.zeta, 'params': dict(f.params)}


def grid_range(start: float, stop: float, step: float) -> List[float]:
    """Inclusive arithmetic grid, rounded to 10 decimals."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(max(n, 0))]


class _Parser:
    """Walks the composed YAML tree, collecting diagnostics."""

    def __init__(self):
        self.diagnostics: List[Diagnostic] = []

    def error(self, node: Any, key: str, message: str, suggestion: Optional[str] = None):
        line = node.start_mark.line + 1 if node is not None else 0
        column = node.start_mark.column + 1 if node is not None else 0
        self.diagnostics.append(Diagnostic(line, column, key, message, suggestion))

    def mapping(self, node: Any, path: str, allowed: Tuple[str, ...]) -> Dict[str, Tuple[Any, Any]]:
        """Key -> (key node, value node), reporting unknown keys."""
        if not isinstance(node, yaml.MappingNode):
            self.error(node, path, "expected a mapping")
            return {}
        items: Dict[str, Tuple[Any, Any]] = {}
        for key_node, value_node in node.value:
            key = str(key_node.value)
            name = f"{path}.{key}" if path else key
            if key not in allowed:
                close = difflib.get_close_matches(key, allowed, n=1)
                self.error(key_node, name, "unknown key", close[0] if close else None)
                continue
            if key in items:
                self.error(key_node, name, "duplicate key")
            items[key] = (key_node, value_node)
        return items

    def scalar(self, node: Any, path: str, kind: type, default: Any,
               low: Optional[float] = None, strict: bool = False, allow_none: bool = False) -> Any:
        if node is None:
            return default
        value = yaml.safe_load(yaml.serialize(node))
        if value is None and allow_none:
            return None
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
            self.error(node, path, f"expected {kind.__name__}, got {value!r}")
            return default
        if low is not None and (value <= low if strict else value < low):
            bound = f"> {low:g}" if strict else f">= {low:g}"
            self.error(node, path, f"must be {bound}, got {value}")
            return default
        return value

    def number_list(self, node: Any, path: str, default: List[float]) -> List[float]:
        if node is None:
            return default
        if isinstance(node, yaml.MappingNode):
            items = self.mapping(node, path, GRID_RANGE_KEYS)
            missing = [k for k in GRID_RANGE_KEYS if k not in items]
            if missing:
                self.error(node, path, f"range needs {', '.join(missing)}")
                return default
            start, stop, step = (self.scalar(items[k][1], f"{path}.{k}", float, 0.0)
                                 for k in GRID_RANGE_KEYS)
            if step <= 0:
                self.error(items['step'][1], f"{path}.step", f"must be > 0, got {step}")
                return default
            values = grid_range(start, stop, step)
        elif isinstance(node, yaml.SequenceNode):
            values = [self.scalar(item, path, float, 0.0) for item in node.value]
        else:
            self.error(node, path, "expected a list or a start/stop/step mapping")
            return default
        nodes = node.value if isinstance(node, yaml.SequenceNode) else [node] * len(values)
        for item, v in zip(nodes, values):
            if v < 0:
                self.error(item, path, f"densities must be >= 0, got {v}")
        return values

    def family(self, node: Any, path: str, default: InitialStateConfig) -> InitialStateConfig:
        items = self.mapping(node, path, FAMILY_KEYS)

        def value(key: str) -> Any:
            return items.get(key, (None, None))[1]

        family = self.scalar(value('family'), f"{path}.family", str, default.family)
        try:
            InitialFamily.parse(family)
        except ValueError as e:
            self.error(value('family'), f"{path}.family", str(e))
        zeta = self.scalar(value('zeta'), f"{path}.zeta", float, default.zeta, low=0.0)
        params: Dict[str, Any] = dict(default.params)
        if value('params') is not None:
            loaded = yaml.safe_load(yaml.serialize(value('params')))
            if not isinstance(loaded, dict):
                self.error(value('params'), f"{path}.params", "expected a mapping")
            else:
                params = loaded
        return InitialStateConfig(family, zeta, params)


def parse_config(text: str) -> RunConfig:
    """
    Parse a YAML run configuration.

    Args:
        text: Configuration text

    Returns:
        RunConfig

    Raises:
        ConfigError: syntax errors, unknown keys, type or range violations and
            kernel validation failures, each with line and column
    """
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise ConfigError([Diagnostic(mark.line + 1 if mark else 0,
                                      mark.column + 1 if mark else 0,
                                      '<syntax>', str(getattr(e, 'problem', e)))])

    p = _Parser()
    config = RunConfig.from_defaults()
    if root is None:
        return config
    top = p.mapping(root, "", tuple(SCHEMA))

    def section(name: str) -> Dict[str, Tuple[Any, Any]]:
        if name not in top:
            return {}
        allowed = SCHEMA[name] or ()
        return p.mapping(top[name][1], name, allowed)

    def val(items: Dict[str, Tuple[Any, Any]], key: str) -> Any:
        return items.get(key, (None, None))[1]

    if 'experiment' in top:
        node = top['experiment'][1]
        experiment = p.scalar(node, 'experiment', str, config.experiment)
        if experiment not in EXPERIMENTS:
            close = difflib.get_close_matches(experiment, EXPERIMENTS, n=1)
            p.error(node, 'experiment', f"unknown experiment '{experiment}'",
                    close[0] if close else None)
        else:
            config.experiment = experiment

    d = section('domain')
    config.domain = DomainConfig(
        dimension=p.scalar(val(d, 'dimension'), 'domain.dimension', int, 1, low=1),
        size=p.scalar(val(d, 'size'), 'domain.size', int, 64, low=1),
        boundary=p.scalar(val(d, 'boundary'), 'domain.boundary', str, 'torus'),
    )
    if config.domain.boundary not in [b.value for b in Boundary]:
        p.error(val(d, 'boundary'), 'domain.boundary',
                f"must be torus or absorbing, got '{config.domain.boundary}'")
        config.domain.boundary = 'torus'

    m = section('model')
    config.model = ModelConfig(
        lam=p.scalar(val(m, 'lambda'), 'model.lambda', float, 1.0, low=0.0, strict=True),
        kernel=str(p.scalar(val(m, 'kernel'), 'model.kernel', str, 'nn')),
    )
    try:
        resolve_kernel(config.model.kernel, config.domain.dimension)
    except KernelValidationError as e:
        p.error(val(m, 'kernel'), 'model.kernel', f"kernel validation failed: {e}")
    except (ValueError, OSError) as e:
        p.error(val(m, 'kernel'), 'model.kernel', str(e))

    if 'initial' in top:
        config.initial = p.family(top['initial'][1], 'initial', config.initial)
    if 'families' in top:
        node = top['families'][1]
        if not isinstance(node, yaml.SequenceNode):
            p.error(node, 'families', "expected a list of families")
        else:
            config.families = [p.family(item, f"families[{i}]", InitialStateConfig())
                               for i, item in enumerate(node.value)]

    g = section('grid')
    config.grid = GridConfig(
        u=p.number_list(val(g, 'u'), 'grid.u', config.grid.u),
        zeta=p.number_list(val(g, 'zeta'), 'grid.zeta', config.grid.zeta),
        replicas=p.scalar(val(g, 'replicas'), 'grid.replicas', int, config.grid.replicas, low=1),
        double=p.scalar(val(g, 'double'), 'grid.double', bool, False),
    )

    e = section('engine')
    scheduler = p.scalar(val(e, 'scheduler'), 'engine.scheduler', str, 'fifo')
    if scheduler not in SCHEDULERS:
        close = difflib.get_close_matches(scheduler, list(SCHEDULERS), n=1)
        p.error(val(e, 'scheduler'), 'engine.scheduler', f"unknown scheduler '{scheduler}'",
                close[0] if close else None)
        scheduler = 'fifo'
    horizon = p.scalar(val(e, 'horizon'), 'engine.horizon', float, math.inf,
                       low=0.0, strict=True, allow_none=True)
    config.engine = EngineConfig(
        seed=p.scalar(val(e, 'seed'), 'engine.seed', int, 0, low=0),
        scheduler=scheduler,
        cap=p.scalar(val(e, 'cap'), 'engine.cap', int, None, low=1, allow_none=True),
        workers=p.scalar(val(e, 'workers'), 'engine.workers', int, 1, low=1),
        horizon=math.inf if horizon is None else horizon,
    )

    c = section('coupling')
    config.coupling = CouplingConfig(
        zeta1=p.scalar(val(c, 'zeta1'), 'coupling.zeta1', float, 0.2, low=0.0),
        zeta2=p.scalar(val(c, 'zeta2'), 'coupling.zeta2', float, 0.5, low=0.0),
        family=p.scalar(val(c, 'family'), 'coupling.family', str, 'poisson'),
        round_cap=p.scalar(val(c, 'round_cap'), 'coupling.round_cap', int, 10 ** 5, low=1),
        runs=p.scalar(val(c, 'runs'), 'coupling.runs', int, 10, low=1),
    )

    s = section('selftest')
    defaults = SelftestConfig()
    config.selftest = SelftestConfig(**{
        key: p.scalar(val(s, key), f'selftest.{key}', int, getattr(defaults, key), low=0)
        for key in SCHEMA['selftest'] or ()
    })

    est = section('estimate')
    config.estimate = EstimateConfig(
        curve=p.scalar(val(est, 'curve'), 'estimate.curve', str, None, allow_none=True),
        bootstrap=p.scalar(val(est, 'bootstrap'), 'estimate.bootstrap', int, 200, low=0),
    )

    o = section('output')
    config.output = OutputConfig(**{
        key: p.scalar(val(o, key), f'output.{key}', str, getattr(OutputConfig(), key))
        for key in SCHEMA['output'] or ()
    })
    env_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_dir:
        config.output.directory = env_dir

    if p.diagnostics:
        raise ConfigError(p.diagnostics)
    return config


def load_config(config_path: Optional[str] = None,
                experiment: Optional[str] = None) -> RunConfig:
    """
    Load configuration from file or create with defaults.

    Args:
        config_path: Path to YAML configuration file (optional)
        experiment: Override the experiment kind

    Returns:
        RunConfig object
    """
    if config_path and Path(config_path).exists():
        logger.info(f"Loading configuration from {config_path}")
        config = RunConfig.from_yaml(config_path)
    else:
        logger.info("Using default configuration")
        config = RunConfig.from_defaults()
    if experiment:
        config.experiment = experiment
    return config


def apply_overrides(config: RunConfig, **overrides: Any) -> RunConfig:
    """
    Apply command-line overrides (None values are ignored).

    Recognised keys: dim, size, boundary, lam, kernel, seed, replicas, out,
    scheduler, cap, workers.

    Raises:
        ConfigError: an override is out of range or names an unknown
            scheduler or an invalid kernel
    """
    problems: List[Diagnostic] = []

    def check(ok: bool, key: str, message: str):
        if not ok:
            problems.append(Diagnostic(0, 0, key, message))

    targets = {
        'dim': (config.domain, 'dimension'),
        'size': (config.domain, 'size'),
        'boundary': (config.domain, 'boundary'),
        'lam': (config.model, 'lam'),
        'kernel': (config.model, 'kernel'),
        'seed': (config.engine, 'seed'),
        'scheduler': (config.engine, 'scheduler'),
        'cap': (config.engine, 'cap'),
        'workers': (config.engine, 'workers'),
        'replicas': (config.grid, 'replicas'),
        'out': (config.output, 'directory'),
    }
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in targets:
            raise KeyError(f"Unknown override '{key}'")
        target, attr = targets[key]
        setattr(target, attr, value)

    check(config.domain.dimension >= 1, '--dim', "must be >= 1")
    check(config.domain.size >= 1, '--size', "must be >= 1")
    check(config.model.lam > 0, '--lambda', f"must be > 0, got {config.model.lam}")
    check(config.grid.replicas >= 1, '--replicas', "must be >= 1")
    check(config.engine.cap is None or config.engine.cap >= 1, '--cap', "must be >= 1")
    check(config.engine.workers >= 1, '--workers', "must be >= 1")
    check(config.engine.scheduler in SCHEDULERS, '--scheduler',
          f"unknown scheduler '{config.engine.scheduler}'")
    if not problems:
        try:
            resolve_kernel(config.model.kernel, config.domain.dimension)
        except (ValueError, OSError) as e:
            problems.append(Diagnostic(0, 0, '--kernel', str(e)))
    if problems:
        raise ConfigError(problems)
    return config
