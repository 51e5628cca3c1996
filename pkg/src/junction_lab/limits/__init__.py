"""The ε → 0 layer: gradient flow, limit dynamics on Γ and control surgery."""

from .gradient_flow import gradient_flow, length_bound, limit_gap, reach_level_bound
from .junction import (
    EdgeRun,
    InstabilityWitness,
    SemigroupWitness,
    constant_control_limit,
    edge_limit_dynamics,
    instability_witness,
    semigroup_witness,
)
from .layer import CauchyGap, JumpError, is_decreasing, jump_errors, pairwise_distances
from .surgery import (
    DescentResult,
    RestrictedControl,
    SteeringPlan,
    accelerated_descent,
    drive_on_network,
    restricted_control,
    steer_on_network,
)
from .tracking import TrackingResult, tracking_trajectory
from .zeno import (
    DEFAULT_CYCLE,
    ZenoCheck,
    ZenoConstruction,
    branch_visits,
    zeno_control,
    zeno_eps_independence,
)

__all__ = [
    'gradient_flow',
    'length_bound',
    'limit_gap',
    'reach_level_bound',
    'EdgeRun',
    'InstabilityWitness',
    'SemigroupWitness',
    'constant_control_limit',
    'edge_limit_dynamics',
    'instability_witness',
    'semigroup_witness',
    'CauchyGap',
    'JumpError',
    'is_decreasing',
    'jump_errors',
    'pairwise_distances',
    'DescentResult',
    'RestrictedControl',
    'SteeringPlan',
    'accelerated_descent',
    'drive_on_network',
    'restricted_control',
    'steer_on_network',
    'TrackingResult',
    'tracking_trajectory',
    'DEFAULT_CYCLE',
    'ZenoCheck',
    'ZenoConstruction',
    'branch_visits',
    'zeno_control',
    'zeno_eps_independence',
]
