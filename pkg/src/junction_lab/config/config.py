"""Configuration management for the junction lab."""

from typing import Optional, Dict, Any, List, Tuple
from pathlib import Path
import math
import os

from pydantic import BaseModel, Field, validator
import yaml
from dotenv import load_dotenv


SCHEMA_VERSION = 1

SUPPORTED_METHODS = ('RK45', 'DOP853', 'Radau', 'LSODA')


class IntegratorConfig(BaseModel):
    """Settings for the ε-penalized ODE integrator."""

    rel_tol: float = Field(default=1e-8, description='Relative tolerance')
    abs_tol: float = Field(default=1e-10, description='Absolute tolerance')
    max_step_factor: float = Field(
        default=0.5, description='Maximum step outside the layer, as a multiple of ε'
    )
    horizon: float = Field(default=1.0, description='Integration horizon T')
    method: str = Field(default='RK45', description='solve_ivp method')
    layer_relax: bool = Field(
        default=True,
        description='Lift the step cap once the path enters the invariant layer',
    )
    max_steps: int = Field(default=2_000_000, description='Step budget per run')
    min_samples: int = Field(
        default=201, description='Uniform dense samples merged with solver steps'
    )
    diagnose_k: bool = Field(
        default=False,
        description='Also integrate (1/ε)∫∇d directly to cross-check k',
    )

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'

    @validator('rel_tol', 'abs_tol', 'horizon')
    def validate_positive(cls, v):
        """Validate tolerances and horizon are positive."""
        if not v > 0:
            raise ValueError('Tolerances and horizon must be positive')
        return v

    @validator('max_step_factor')
    def validate_max_step_factor(cls, v):
        """Validate the step cap factor lies in (0, 1]."""
        if not 0 < v <= 1:
            raise ValueError('max_step_factor must be in (0, 1]')
        return v

    @validator('method')
    def validate_method(cls, v):
        """Validate the integration method."""
        if v not in SUPPORTED_METHODS:
            raise ValueError(f'method must be one of: {list(SUPPORTED_METHODS)}')
        return v

    @validator('max_steps', 'min_samples')
    def validate_counts(cls, v):
        """Validate step budget and sample count are positive."""
        if v <= 0:
            raise ValueError('max_steps and min_samples must be positive')
        return v


class GeometryConfig(BaseModel):
    """Tolerances used when classifying points of the plane against Γ."""

    network_tol: float = Field(
        default=1e-9, description='Off-axis tolerance for branch membership'
    )
    angle_tol: float = Field(
        default=1e-9, description='Tolerance for bisector and boundary angles'
    )

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'

    @validator('network_tol', 'angle_tol')
    def validate_nonnegative(cls, v):
        """Validate tolerances are nonnegative."""
        if v < 0:
            raise ValueError('Tolerances must be nonnegative')
        return v


class SolverConfig(BaseModel):
    """Settings shared by the semi-Lagrangian value solvers."""

    n_directions: int = Field(
        default=32, description='Unit-circle control directions (plus zero)'
    )
    fixpoint_tol: float = Field(default=1e-10, description='Sup-change tolerance')
    max_iterations: int = Field(default=1_000_000, description='Iteration cap')
    c_step: float = Field(default=1.0, description='Local step cap as multiple of ε')
    cfl: float = Field(
        default=1.0, description='Foot displacement per step in grid cells'
    )
    n_speeds: int = Field(default=5, description='Speed samples in [-1, 1] on edges')
    slack_factor: float = Field(
        default=10.0, description='Scheme slack as a multiple of h·M'
    )
    chain_constant: float = Field(
        default=2.0, description='Multiple of M in front of the ε^(1/4) term'
    )
    cross_check_factor: float = Field(
        default=5.0, description='V̄ cross-check tolerance as a multiple of h'
    )
    cross_check_eps: float = Field(
        default=1e-3, description='ε of the penalized run behind the V̄ cross-check'
    )

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'

    @validator('n_directions')
    def validate_directions(cls, v):
        """Validate at least four directions are sampled."""
        if v < 4:
            raise ValueError('n_directions must be at least 4')
        return v

    @validator('n_speeds')
    def validate_speeds(cls, v):
        """Validate the speed sample contains -1, 0 and 1."""
        if v < 3 or v % 2 == 0:
            raise ValueError('n_speeds must be odd and at least 3')
        return v

    @validator(
        'fixpoint_tol',
        'c_step',
        'cfl',
        'slack_factor',
        'chain_constant',
        'cross_check_factor',
        'cross_check_eps',
    )
    def validate_positive(cls, v):
        """Validate scheme constants are positive."""
        if not v > 0:
            raise ValueError('Solver constants must be positive')
        return v

    @validator('max_iterations')
    def validate_max_iterations(cls, v):
        """Validate the iteration cap is positive."""
        if v <= 0:
            raise ValueError('max_iterations must be positive')
        return v


class GridConfig(BaseModel):
    """Uniform 2D grid for V^ε."""

    region: Tuple[float, float, float, float] = Field(
        default=(-2.0, 2.0, -2.0, 2.0),
        description='Test region (x_min, x_max, y_min, y_max)',
    )
    h: float = Field(default=0.02, description='Grid spacing')
    margin: float = Field(
        default=0.5, description='Inflow-safe padding added around the region'
    )

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'

    @validator('region')
    def validate_region(cls, v):
        """Validate the region is a nondegenerate box."""
        x_min, x_max, y_min, y_max = v
        if not (x_min < x_max and y_min < y_max):
            raise ValueError('region must satisfy x_min < x_max and y_min < y_max')
        return tuple(float(c) for c in v)

    @validator('h')
    def validate_h(cls, v):
        """Validate spacing is positive."""
        if not v > 0:
            raise ValueError('Grid spacing must be positive')
        return v

    @validator('margin')
    def validate_margin(cls, v):
        """Validate margin is nonnegative."""
        if v < 0:
            raise ValueError('margin must be nonnegative')
        return v


class EdgeGridConfig(BaseModel):
    """Four 1D edge grids on [0, R] for V_Γ."""

    radius: float = Field(default=4.0, description='Outer radius R of each branch')
    h: float = Field(default=0.01, description='Edge grid spacing')

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'

    @validator('radius', 'h')
    def validate_positive(cls, v):
        """Validate radius and spacing are positive."""
        if not v > 0:
            raise ValueError('Edge grid radius and spacing must be positive')
        return v


class JunctionBehaviorParams(BaseModel):
    """Parameters of the junction-behavior scenario (angles in units of π)."""

    eps: float = Field(default=1e-4, description='ε for the behavior table')
    horizon: float = Field(default=4.0, description='Horizon of each run')
    thetas_from_o: List[float] = Field(
        default=[0.0, 0.25, 0.4, 0.75, 1.0, 1.6],
        description='Control angles from O, in units of π',
    )
    thetas_from_n: List[float] = Field(
        default=[0.5, 1.125, 1.25, 1.5, 1.75, 1.875],
        description='Control angles from e_N, in units of π',
    )
    eta_thetas: List[float] = Field(
        default=[1.125, 1.25, 1.375],
        description='Angles for the first-crossing abscissa, in units of π',
    )
    eta_eps: List[float] = Field(
        default=[1e-3, 1e-4, 1e-5], description='ε ladder for the crossing abscissa'
    )
    state_factor: float = Field(
        default=10.0, description='State error bound as a multiple of ε^(1/3)'
    )
    witness_s: float = Field(
        default=0.5, description='Time after the junction for the semigroup witness'
    )
    witness_n: List[int] = Field(
        default=[2, 4, 8, 16, 32], description='Starts e_N/n for the instability witness'
    )


class ZenoParams(BaseModel):
    """Parameters of the Zeno scenario."""

    depth: int = Field(default=8, description='Number of junction excursions')
    cycle: List[str] = Field(
        default=['E', 'N', 'W', 'S'], description='Branch visiting order'
    )
    eps_values: List[float] = Field(
        default=[1e-2, 1e-3], description='ε values for the independence check'
    )

    @validator('depth')
    def validate_depth(cls, v):
        """Validate depth is at least one."""
        if v < 1:
            raise ValueError('depth must be at least 1')
        return v


class ScalingLawParams(BaseModel):
    """Parameters of the scaling-law scenario."""

    n_samples: int = Field(default=20, description='Random (x, θ, ρ) triples')
    rhos: List[float] = Field(default=[0.5, 2.0], description='Scaling factors ρ')
    eps: float = Field(default=1e-2, description='Base ε')
    horizon: float = Field(default=0.5, description='Horizon of the base run')
    tolerance_factor: float = Field(
        default=10.0, description='Allowed discrepancy as a multiple of rel_tol'
    )
    seed: int = Field(default=7, description='Random seed')


class TrackingParams(BaseModel):
    """Parameters of the tracking scenario."""

    eps_values: List[float] = Field(
        default=[1e-2, 1e-3, 1e-4], description='ε ladder'
    )
    gamma: float = Field(default=0.5, description='Layer exponent γ in (0, 1)')
    horizon: float = Field(default=1.0, description='Horizon T')
    n_samples: int = Field(default=10, description='Random (x, α) pairs')
    ratio_bound: float = Field(
        default=10.0, description='Upper bound asserted on the tracking ratio'
    )
    seed: int = Field(default=11, description='Random seed')

    @validator('gamma')
    def validate_gamma(cls, v):
        """Validate γ lies in (0, 1)."""
        if not 0 < v < 1:
            raise ValueError('gamma must be in (0, 1)')
        return v


class CounterexampleParams(BaseModel):
    """Parameters of the counterexample scenario."""

    lambdas: List[float] = Field(default=[1.0, 2.0], description='Discount rates')
    n_sweep: int = Field(
        default=25, description='Log-uniform λ samples in [0.1, 10]'
    )
    horizon: float = Field(default=40.0, description='Quadrature horizon')
    quad_tol: float = Field(
        default=1e-6, description='Quadrature agreement tolerance'
    )


class ValueConvergenceParams(BaseModel):
    """Parameters of the value-convergence scenario."""

    eps_values: List[float] = Field(
        default=[0.2, 0.1, 0.05], description='ε ladder, decreasing'
    )
    lam: float = Field(default=1.0, description='Discount rate λ')
    cost: str = Field(default='capped_distance', description='Cost preset')
    cap: float = Field(default=2.0, description='Cap of the capped distance cost')
    grid: GridConfig = Field(default_factory=GridConfig, description='2D grid')
    edge_grid: EdgeGridConfig = Field(
        default_factory=EdgeGridConfig, description='Edge grids'
    )
    n_probes: int = Field(default=100, description='Random probe nodes')
    seed: int = Field(default=5, description='Random seed')

    @validator('lam')
    def validate_lam(cls, v):
        """Validate λ is positive."""
        if not v > 0:
            raise ValueError('lam must be positive')
        return v


class AprioriSuiteParams(BaseModel):
    """Parameters of the a priori estimate suite."""

    eps_values: List[float] = Field(
        default=[1e-2, 1e-3], description='ε values for invariance checks'
    )
    entry_eps: List[float] = Field(
        default=[1e-2, 1e-3, 1e-4], description='ε ladder for entry times'
    )
    n_samples: int = Field(default=50, description='Random (x, α) pairs')
    gamma: float = Field(default=0.5, description='Exponent γ for Z(ε^(4γ/3))')
    lam: float = Field(default=0.5, description='Level λ for Z(λ) entry times')
    horizon: float = Field(default=1.0, description='Horizon T')
    seed: int = Field(default=3, description='Random seed')


class ScenarioSettings(BaseModel):
    """Typed parameter sections, one per scenario."""

    junction_behavior: JunctionBehaviorParams = Field(
        default_factory=JunctionBehaviorParams
    )
    zeno: ZenoParams = Field(default_factory=ZenoParams)
    scaling_law: ScalingLawParams = Field(default_factory=ScalingLawParams)
    tracking: TrackingParams = Field(default_factory=TrackingParams)
    counterexample: CounterexampleParams = Field(default_factory=CounterexampleParams)
    value_convergence: ValueConvergenceParams = Field(
        default_factory=ValueConvergenceParams
    )
    apriori_suite: AprioriSuiteParams = Field(default_factory=AprioriSuiteParams)

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'


class ExperimentSettings(BaseModel):
    """Where and how scenarios run."""

    output_dir: str = Field(default='artifacts', description='Artifact directory')
    parallel: bool = Field(
        default=False, description='Run independent jobs concurrently'
    )
    threads: int = Field(default=1, description='Concurrent worker threads')

    @validator('threads')
    def validate_threads(cls, v):
        """Validate thread count is positive."""
        if v <= 0:
            raise ValueError('threads must be positive')
        return v


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = Field(default='INFO', description='Log level')
    file: Optional[str] = Field(default=None, description='Log file path')
    format: Optional[str] = Field(default=None, description='Log format')

    @validator('level')
    def validate_log_level(cls, v):
        """Validate log level."""
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.upper() not in valid_levels:
            raise ValueError(f'Log level must be one of: {valid_levels}')
        return v.upper()


class Config(BaseModel):
    """Main configuration class for the junction lab."""

    schema_version: int = Field(default=SCHEMA_VERSION, description='Schema version')
    integrator: IntegratorConfig = Field(
        default_factory=IntegratorConfig, description='ODE integrator settings'
    )
    geometry: GeometryConfig = Field(
        default_factory=GeometryConfig, description='Network tolerances'
    )
    solver: SolverConfig = Field(
        default_factory=SolverConfig, description='Value solver settings'
    )
    grid: GridConfig = Field(default_factory=GridConfig, description='2D grid')
    edge_grid: EdgeGridConfig = Field(
        default_factory=EdgeGridConfig, description='Edge grids'
    )
    experiment: ExperimentSettings = Field(
        default_factory=ExperimentSettings, description='Experiment settings'
    )
    scenarios: ScenarioSettings = Field(
        default_factory=ScenarioSettings, description='Per-scenario parameters'
    )
    logging: LoggingConfig = Field(
        default_factory=LoggingConfig, description='Logging settings'
    )

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'  # Don't allow extra fields

    @validator('schema_version')
    def validate_schema_version(cls, v):
        """Validate the file was written for this schema."""
        if v != SCHEMA_VERSION:
            raise ValueError(
                f'Unsupported schema_version {v}, expected {SCHEMA_VERSION}'
            )
        return v

    @classmethod
    def from_file(cls, config_path: str) -> 'Config':
        """Load configuration from YAML file."""
        config_file = Path(config_path)

        if not config_file.exists():
            raise FileNotFoundError(f'Configuration file not found: {config_path}')

        with open(config_file, 'r', encoding='utf-8') as f:
            config_data = yaml.safe_load(f) or {}

        return cls(**config_data)

    @classmethod
    def from_env(cls) -> 'Config':
        """Load configuration from environment variables."""
        # Load .env file if it exists
        load_dotenv()

        threads = os.getenv('JUNCTION_LAB_THREADS')
        rel_tol = os.getenv('JUNCTION_LAB_RTOL')
        abs_tol = os.getenv('JUNCTION_LAB_ATOL')

        config_data = {
            'integrator': {
                'rel_tol': float(rel_tol) if rel_tol else None,
                'abs_tol': float(abs_tol) if abs_tol else None,
            },
            'experiment': {
                'output_dir': os.getenv('JUNCTION_LAB_OUTPUT_DIR'),
                'threads': int(threads) if threads else None,
                'parallel': bool(threads) and int(threads) > 1,
            },
            'logging': {
                'level': os.getenv('JUNCTION_LAB_LOG_LEVEL', 'INFO'),
                'file': os.getenv('JUNCTION_LAB_LOG_FILE'),
            },
        }

        # Remove None values
        config_data = cls._remove_none_values(config_data)

        return cls(**config_data)

    @staticmethod
    def _remove_none_values(data: Dict[str, Any]) -> Dict[str, Any]:
        """Recursively remove None values from dictionary."""
        if isinstance(data, dict):
            return {
                k: Config._remove_none_values(v)
                for k, v in data.items()
                if v is not None
            }
        return data

    def to_file(self, config_path: str) -> None:
        """Save configuration to YAML file."""
        config_file = Path(config_path)
        config_file.parent.mkdir(parents=True, exist_ok=True)

        with open(config_file, 'w', encoding='utf-8') as f:
            yaml.safe_dump(
                self.model_dump(mode='json'),
                f,
                default_flow_style=False,
                indent=2,
                sort_keys=False,
            )

    @classmethod
    def create_template(cls, output_path: str) -> None:
        """Create a configuration template file with every documented key."""
        cls().to_file(output_path)


def theta_from_units(value: float) -> float:
    """Convert an angle given in units of π to radians in [0, 2π)."""
    return math.fmod(value * math.pi, 2 * math.pi) % (2 * math.pi)


SCENARIO_SECTIONS = {
    'junction-behavior': 'junction_behavior',
    'zeno': 'zeno',
    'scaling-law': 'scaling_law',
    'tracking': 'tracking',
    'counterexample': 'counterexample',
    'value-convergence': 'value_convergence',
    'apriori-suite': 'apriori_suite',
}


class ExperimentConfig(BaseModel):
    """Everything one scenario run depends on."""

    scenario: str = Field(..., description='Scenario name')
    params: Dict[str, Any] = Field(
        default_factory=dict, description="The scenario's typed parameter section"
    )
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    output_dir: str = Field(default='artifacts', description='Artifact directory')
    parallel: bool = Field(default=False, description='Run jobs concurrently')
    threads: int = Field(default=1, description='Concurrent worker threads')

    class Config:
        """Pydantic configuration."""

        extra = 'forbid'

    @validator('scenario')
    def validate_scenario(cls, v):
        """Validate the scenario is known."""
        if v not in SCENARIO_SECTIONS:
            raise ValueError(
                f'Unknown scenario {v!r}, expected one of {sorted(SCENARIO_SECTIONS)}'
            )
        return v

    @validator('params')
    def validate_params(cls, v, values):
        """Validate params against the scenario's section model."""
        scenario = values.get('scenario')
        if scenario is None:
            return v
        section = ScenarioSettings.model_fields[SCENARIO_SECTIONS[scenario]]
        return section.annotation(**v).model_dump()

    @classmethod
    def from_config(cls, config: Config, scenario: str) -> 'ExperimentConfig':
        """Pick one scenario's section out of the full configuration."""
        if scenario not in SCENARIO_SECTIONS:
            raise ValueError(
                f'Unknown scenario {scenario!r}, expected one of {sorted(SCENARIO_SECTIONS)}'
            )
        section = getattr(config.scenarios, SCENARIO_SECTIONS[scenario])
        return cls(
            scenario=scenario,
            params=section.model_dump(),
            integrator=config.integrator,
            geometry=config.geometry,
            solver=config.solver,
            output_dir=config.experiment.output_dir,
            parallel=config.experiment.parallel,
            threads=config.experiment.threads,
        )

    def section(self) -> BaseModel:
        """The params as their typed section model."""
        model = ScenarioSettings.model_fields[SCENARIO_SECTIONS[self.scenario]].annotation
        return model(**self.params)
