"""Tests for configuration management."""

import math
import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml

from src.junction_lab.config.config import (
    SCENARIO_SECTIONS,
    Config,
    EdgeGridConfig,
    ExperimentConfig,
    GridConfig,
    IntegratorConfig,
    SolverConfig,
    TrackingParams,
    theta_from_units,
)


class TestIntegratorConfig:
    """Test integrator settings."""

    def test_defaults(self):
        """Test default tolerances and step cap."""
        config = IntegratorConfig()

        assert config.rel_tol == 1e-8
        assert config.abs_tol == 1e-10
        assert config.max_step_factor == 0.5
        assert config.method == 'RK45'
        assert config.layer_relax is True

    def test_invalid_method(self):
        """Test unsupported solver methods are rejected."""
        with pytest.raises(ValueError):
            IntegratorConfig(method='Euler')

    def test_nonpositive_tolerance(self):
        """Test tolerances must be positive."""
        with pytest.raises(ValueError):
            IntegratorConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(horizon=-1.0)

    def test_step_factor_range(self):
        """Test the step cap factor lies in (0, 1]."""
        assert IntegratorConfig(max_step_factor=1.0).max_step_factor == 1.0
        with pytest.raises(ValueError):
            IntegratorConfig(max_step_factor=1.5)

    def test_extra_fields_forbidden(self):
        """Test unknown keys are rejected."""
        with pytest.raises(ValueError):
            IntegratorConfig(tolerance=1e-3)


class TestGridConfigs:
    """Test grid and solver sections."""

    def test_region_must_be_a_box(self):
        """Test degenerate regions are rejected."""
        with pytest.raises(ValueError):
            GridConfig(region=(1.0, 1.0, -1.0, 1.0))

    def test_region_is_normalized_to_floats(self):
        """Test integer regions are stored as floats."""
        grid = GridConfig(region=(-1, 1, -2, 2))

        assert grid.region == (-1.0, 1.0, -2.0, 2.0)

    def test_edge_grid_positive(self):
        """Test edge radius and spacing must be positive."""
        with pytest.raises(ValueError):
            EdgeGridConfig(h=0.0)

    def test_solver_speed_sample(self):
        """Test the edge speed sample must be odd."""
        assert SolverConfig(n_speeds=3).n_speeds == 3
        with pytest.raises(ValueError):
            SolverConfig(n_speeds=4)

    def test_solver_directions(self):
        """Test at least four directions are required."""
        with pytest.raises(ValueError):
            SolverConfig(n_directions=3)


class TestConfig:
    """Test main configuration class."""

    def test_defaults(self):
        """Test a bare configuration is complete."""
        config = Config()

        assert config.schema_version == 1
        assert config.experiment.output_dir == 'artifacts'
        assert config.experiment.threads == 1
        assert config.scenarios.junction_behavior.horizon == 4.0
        assert config.scenarios.zeno.cycle == ['E', 'N', 'W', 'S']
        assert config.logging.level == 'INFO'

    def test_schema_version_mismatch(self):
        """Test configurations written for another schema are rejected."""
        with pytest.raises(ValueError):
            Config(schema_version=2)

    def test_log_level_normalized(self):
        """Test log level is upper-cased."""
        config = Config(logging={'level': 'debug'})

        assert config.logging.level == 'DEBUG'

    def test_invalid_log_level(self):
        """Test unknown log levels are rejected."""
        with pytest.raises(ValueError):
            Config(logging={'level': 'VERBOSE'})

    def test_tracking_gamma_range(self):
        """Test the layer exponent lies in (0, 1)."""
        with pytest.raises(ValueError):
            TrackingParams(gamma=1.0)

    def test_from_file(self):
        """Test loading configuration from a YAML file."""
        data = {
            'integrator': {'rel_tol': 1e-9, 'method': 'DOP853'},
            'experiment': {'output_dir': 'out', 'threads': 4, 'parallel': True},
            'scenarios': {'zeno': {'depth': 5}},
        }

        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            yaml.dump(data, f)
            config_path = f.name

        try:
            config = Config.from_file(config_path)

            assert config.integrator.rel_tol == 1e-9
            assert config.integrator.method == 'DOP853'
            assert config.experiment.threads == 4
            assert config.scenarios.zeno.depth == 5
            assert config.scenarios.tracking.gamma == 0.5
        finally:
            os.unlink(config_path)

    def test_from_file_not_found(self):
        """Test loading a missing file."""
        with pytest.raises(FileNotFoundError):
            Config.from_file('nonexistent.yaml')

    def test_from_file_unknown_key(self):
        """Test unknown top-level keys are rejected."""
        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            yaml.dump({'plotting': {'dpi': 150}}, f)
            config_path = f.name

        try:
            with pytest.raises(ValueError):
                Config.from_file(config_path)
        finally:
            os.unlink(config_path)

    @patch.dict(
        os.environ,
        {
            'JUNCTION_LAB_THREADS': '3',
            'JUNCTION_LAB_RTOL': '1e-7',
            'JUNCTION_LAB_OUTPUT_DIR': 'env-artifacts',
            'JUNCTION_LAB_LOG_LEVEL': 'warning',
        },
    )
    def test_from_env(self):
        """Test loading configuration from environment variables."""
        config = Config.from_env()

        assert config.experiment.threads == 3
        assert config.experiment.parallel is True
        assert config.experiment.output_dir == 'env-artifacts'
        assert config.integrator.rel_tol == 1e-7
        assert config.integrator.abs_tol == 1e-10
        assert config.logging.level == 'WARNING'

    @patch.dict(os.environ, {}, clear=True)
    def test_from_env_defaults(self):
        """Test the environment loader falls back to defaults."""
        with patch('src.junction_lab.config.config.load_dotenv'):
            config = Config.from_env()

        assert config.experiment.threads == 1
        assert config.experiment.parallel is False

    def test_template_round_trip(self):
        """Test the template loads back into the same configuration."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / 'junction-lab.yaml'
            Config.create_template(str(path))

            content = path.read_text()
            assert 'integrator:' in content
            assert 'scenarios:' in content
            assert Config.from_file(str(path)) == Config()


class TestExperimentConfig:
    """Test per-scenario configuration."""

    def test_from_config_picks_section(self):
        """Test the scenario section and shared settings are carried over."""
        config = Config(experiment={'threads': 2, 'parallel': True})

        cfg = ExperimentConfig.from_config(config, 'zeno')

        assert cfg.scenario == 'zeno'
        assert cfg.params['depth'] == 8
        assert cfg.threads == 2
        assert cfg.parallel is True
        assert cfg.section().depth == 8

    def test_every_scenario_has_a_section(self):
        """Test every scenario name resolves to a typed section."""
        config = Config()

        for name in SCENARIO_SECTIONS:
            cfg = ExperimentConfig.from_config(config, name)
            assert cfg.section().model_dump() == cfg.params

    def test_unknown_scenario(self):
        """Test unknown scenarios are rejected."""
        with pytest.raises(ValueError):
            ExperimentConfig(scenario='heat-equation')
        with pytest.raises(ValueError):
            ExperimentConfig.from_config(Config(), 'heat-equation')

    def test_params_are_validated(self):
        """Test params go through the section validators."""
        with pytest.raises(ValueError):
            ExperimentConfig(scenario='zeno', params={'depth': 0})

    def test_params_defaults_filled(self):
        """Test partial params are completed with section defaults."""
        cfg = ExperimentConfig(scenario='tracking', params={'gamma': 0.25})

        assert cfg.params['gamma'] == 0.25
        assert cfg.params['eps_values'] == [1e-2, 1e-3, 1e-4]


class TestThetaFromUnits:
    """Test angle conversion."""

    def test_conversion(self):
        """Test angles in units of π map into [0, 2π)."""
        assert theta_from_units(0.5) == pytest.approx(math.pi / 2)
        assert theta_from_units(2.0) == pytest.approx(0.0)
        assert theta_from_units(-0.5) == pytest.approx(1.5 * math.pi)
