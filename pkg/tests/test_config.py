"""Unit tests for run configuration."""

import math

import pytest

from src.config import (
    OUTPUT_DIR_ENV,
    ConfigError,
    RunConfig,
    apply_overrides,
    grid_range,
    load_config,
    parse_config,
)
from src.module_d.schema import InitialFamily
from tests.fixtures import SAMPLE_CONFIG_YAML


class TestParseConfig:
    """Test cases for YAML parsing and validation."""

    def test_sample_config(self):
        """Test parsing the sample configuration."""
        config = parse_config(SAMPLE_CONFIG_YAML)
        assert config.experiment == "scan"
        assert config.domain.dimension == 1
        assert config.domain.size == 16
        assert config.grid.zeta == [0.1, 0.2]
        assert config.grid.u == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert config.grid.replicas == 2
        assert config.engine.seed == 7
        assert config.initial.spec().family is InitialFamily.POISSON

    def test_empty_text_gives_defaults(self):
        """Test that empty input yields the default configuration."""
        config = parse_config("")
        assert config.experiment == "drive"
        assert config.model.lam == 1.0
        assert math.isinf(config.engine.horizon)

    def test_unknown_key_has_location_and_suggestion(self):
        """Test that an unknown key reports line, column and a suggestion."""
        with pytest.raises(ConfigError) as exc:
            parse_config("experiment: drive\ndomian:\n  size: 8\n")
        diagnostic = exc.value.diagnostics[0]
        assert diagnostic.line == 2
        assert diagnostic.column == 1
        assert diagnostic.suggestion == "domain"
        assert "did you mean 'domain'" in str(exc.value)

    def test_unknown_nested_key(self):
        """Test that an unknown key inside a section is reported."""
        with pytest.raises(ConfigError) as exc:
            parse_config("engine:\n  sede: 3\n")
        assert exc.value.diagnostics[0].key == "engine.sede"
        assert exc.value.diagnostics[0].suggestion == "seed"

    def test_type_error(self):
        """Test that a value of the wrong type is reported."""
        with pytest.raises(ConfigError) as exc:
            parse_config("domain:\n  size: big\n")
        diagnostic = exc.value.diagnostics[0]
        assert diagnostic.key == "domain.size"
        assert diagnostic.line == 2

    def test_range_errors_are_collected(self):
        """Test that every out-of-range value is reported at once."""
        with pytest.raises(ConfigError) as exc:
            parse_config("model:\n  lambda: 0\ngrid:\n  replicas: 0\n  zeta: [0.1, -0.2]\n")
        keys = {d.key for d in exc.value.diagnostics}
        assert keys == {"model.lambda", "grid.replicas", "grid.zeta"}

    def test_invalid_kernel(self):
        """Test that an unknown kernel is reported."""
        with pytest.raises(ConfigError) as exc:
            parse_config("model:\n  kernel: nonsense\n")
        assert exc.value.diagnostics[0].key == "model.kernel"

    def test_kernel_dimension_mismatch(self):
        """Test that a kernel of the wrong dimension is reported."""
        with pytest.raises(ConfigError):
            parse_config("domain:\n  dimension: 2\nmodel:\n  kernel: tasep\n")

    def test_unknown_scheduler(self):
        """Test that an unknown scheduler is reported."""
        with pytest.raises(ConfigError) as exc:
            parse_config("engine:\n  scheduler: fifi\n")
        assert exc.value.diagnostics[0].suggestion == "fifo"

    def test_unknown_family(self):
        """Test that an unknown initial-state family is reported."""
        with pytest.raises(ConfigError):
            parse_config("initial:\n  family: gaussian\n")

    def test_syntax_error(self):
        """Test that a YAML syntax error is reported."""
        with pytest.raises(ConfigError) as exc:
            parse_config("domain: [1, 2\n")
        assert exc.value.diagnostics[0].key == "<syntax>"

    def test_families_list(self):
        """Test parsing the families list."""
        config = parse_config(
            "experiment: universality\n"
            "families:\n"
            "  - family: poisson\n"
            "  - family: periodic\n"
            "    params: {period: 8}\n"
        )
        specs = config.family_specs()
        assert [s.family for s in specs] == [InitialFamily.POISSON, InitialFamily.PERIODIC_PATTERN]
        assert specs[1].params == {'period': 8}

    def test_null_horizon_and_cap(self):
        """Test that a null horizon is infinite and a null cap means no cap."""
        config = parse_config("engine:\n  horizon: null\n  cap: null\n")
        assert math.isinf(config.engine.horizon)
        assert config.engine.cap is None

    def test_output_dir_from_environment(self, monkeypatch):
        """Test that ARW_OUTPUT_DIR overrides the output directory."""
        monkeypatch.setenv(OUTPUT_DIR_ENV, "/tmp/arw-env")
        config = parse_config("output:\n  directory: here\n")
        assert config.output.directory == "/tmp/arw-env"


class TestRunConfig:
    """Test cases for RunConfig helpers."""

    def test_yaml_round_trip(self, temp_dir):
        """Test saving a configuration and loading it back."""
        original = RunConfig.from_defaults("scan")
        path = temp_dir / "config.yaml"
        original.save_yaml(str(path))
        loaded = RunConfig.from_yaml(str(path))
        assert loaded.to_dict() == original.to_dict()

    def test_from_dict(self):
        """Test building a configuration from a dictionary."""
        config = RunConfig.from_dict({'experiment': 'couple', 'coupling': {'runs': 3}})
        assert config.experiment == "couple"
        assert config.coupling.runs == 3

    def test_make_domain_and_kernel(self):
        """Test the domain and kernel built from a configuration."""
        config = RunConfig.from_dict({'domain': {'dimension': 2, 'size': 5}})
        domain = config.make_domain("absorbing")
        assert domain.shape == (5, 5)
        assert not domain.is_torus
        assert config.make_kernel().dimension == 2

    def test_load_config_missing_file(self):
        """Test loading a configuration file that does not exist."""
        config = load_config("/nonexistent/config.yaml", experiment="scan")
        assert config.experiment == "scan"

    def test_load_config_file(self, sample_config_file):
        """Test loading a configuration file."""
        config = load_config(str(sample_config_file))
        assert config.experiment == "scan"
        assert config.output.directory.endswith("out")


class TestOverrides:
    """Test cases for command-line overrides."""

    def test_overrides_applied(self):
        """Test that command-line overrides replace file values."""
        config = apply_overrides(RunConfig.from_defaults(), dim=2, size=8, lam=0.5, seed=3,
                                 replicas=None, out="elsewhere")
        assert config.domain.dimension == 2
        assert config.domain.size == 8
        assert config.model.lam == 0.5
        assert config.engine.seed == 3
        assert config.grid.replicas == 4
        assert config.output.directory == "elsewhere"

    def test_invalid_override(self):
        """Test that an invalid override value raises."""
        with pytest.raises(ConfigError) as exc:
            apply_overrides(RunConfig.from_defaults(), lam=-1.0, scheduler="lifo")
        assert {d.key for d in exc.value.diagnostics} == {"--lambda", "--scheduler"}

    def test_invalid_kernel_override(self):
        """Test that an invalid kernel override raises."""
        with pytest.raises(ConfigError):
            apply_overrides(RunConfig.from_defaults(), dim=2, kernel="tasep")

    def test_unknown_override(self):
        """Test that an unknown override key raises."""
        with pytest.raises(KeyError):
            apply_overrides(RunConfig.from_defaults(), colour="red")


class TestGridRange:
    """Test cases for grid_range."""

    def test_inclusive(self):
        """Test that the grid includes its stop value."""
        assert grid_range(0.0, 1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_rounding(self):
        """Test that a floating step lands exactly on the stop value."""
        values = grid_range(0.0, 1.2, 0.05)
        assert len(values) == 25
        assert values[-1] == 1.2

    def test_invalid_step(self):
        """Test that a non-positive step raises."""
        with pytest.raises(ValueError):
            grid_range(0.0, 1.0, 0.0)
