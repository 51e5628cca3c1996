"""Integration of the ε-penalized ODE and its a priori estimates."""

from .integrator import (
    PerturbedIntegrator,
    eikonal_drift,
    entry_time,
    first_time,
    integrate_perturbed,
)
from .estimates import (
    AprioriReport,
    CrossingResult,
    EstimateCheck,
    InvarianceCheck,
    check_apriori_estimates,
    check_invariance,
    crossing_abscissa,
    equilibrium_point,
    field_residual,
    level_entry_constant,
    reach_time_bound,
    reach_time_validity,
    scaling_discrepancy,
    self_convergence,
)

__all__ = [
    'PerturbedIntegrator',
    'eikonal_drift',
    'entry_time',
    'first_time',
    'integrate_perturbed',
    'AprioriReport',
    'CrossingResult',
    'EstimateCheck',
    'InvarianceCheck',
    'check_apriori_estimates',
    'check_invariance',
    'crossing_abscissa',
    'equilibrium_point',
    'field_residual',
    'level_entry_constant',
    'reach_time_bound',
    'reach_time_validity',
    'scaling_discrepancy',
    'self_convergence',
]
