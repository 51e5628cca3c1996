"""Cost functionals and the value functions V^ε, V_Γ and V̄."""

from .cost import CostEvaluation, cost_functional, discounted_constant, tail_bound
from .grid_solver import SemiLagrangianSolver, control_set, grid_axes, solve_value_eps
from .network_solver import NetworkSolver, network_self_convergence, solve_value_network
from .limit_value import (
    LimitValue,
    OnNetworkOptimum,
    limit_values_on,
    optimize_on_network,
    restricted_plan_cost,
    schedule_cost,
    solve_value_bar,
    steer_and_stay_cost,
)
from .counterexample import (
    CounterexampleResult,
    counterexample_costs,
    counterexample_sweep,
    network_lower_bound,
    upper_path_cost,
)
from .convergence import chain_margins, convergence_study

__all__ = [
    'CostEvaluation',
    'cost_functional',
    'discounted_constant',
    'tail_bound',
    'SemiLagrangianSolver',
    'control_set',
    'grid_axes',
    'solve_value_eps',
    'NetworkSolver',
    'network_self_convergence',
    'solve_value_network',
    'LimitValue',
    'OnNetworkOptimum',
    'limit_values_on',
    'optimize_on_network',
    'restricted_plan_cost',
    'schedule_cost',
    'solve_value_bar',
    'steer_and_stay_cost',
    'CounterexampleResult',
    'counterexample_costs',
    'counterexample_sweep',
    'network_lower_bound',
    'upper_path_cost',
    'chain_margins',
    'convergence_study',
]
