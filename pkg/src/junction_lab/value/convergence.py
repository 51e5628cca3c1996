"""Convergence of V^ε towards V̄∘φ_d as ε decreases."""

from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from ..config.config import EdgeGridConfig, GridConfig, SolverConfig
from ..geometry.projection import projected_plane
from ..models.value import (
    ChainMargins,
    ConvergenceReport,
    EdgeValueFunction,
    GridValueFunction,
    ValueProblem,
)
from .grid_solver import solve_value_eps
from .limit_value import limit_values_on
from .network_solver import solve_value_network

# Fitted Lipschitz constants may spread by this factor across ε and still count as stable.
LIPSCHITZ_SPREAD = 2.0
# Errors below this level count as converged in the monotonicity check.
ERROR_FLOOR = 1e-9


def _axis_lipschitz(vf: GridValueFunction, region) -> float:
    """max |Δu|/h between neighbouring grid nodes on the axes inside region."""
    x_min, x_max, y_min, y_max = region
    half = 0.5 * vf.h
    slopes = []
    i0 = np.nonzero(np.abs(vf.x_nodes) < half)[0]
    j0 = np.nonzero(np.abs(vf.y_nodes) < half)[0]
    if j0.size:
        mask = (vf.x_nodes >= x_min - half) & (vf.x_nodes <= x_max + half)
        row = vf.values[mask, j0[0]]
        slopes.append(np.abs(np.diff(row)) / np.diff(vf.x_nodes[mask]))
    if i0.size:
        mask = (vf.y_nodes >= y_min - half) & (vf.y_nodes <= y_max + half)
        col = vf.values[i0[0], mask]
        slopes.append(np.abs(np.diff(col)) / np.diff(vf.y_nodes[mask]))
    if not slopes:
        return 0.0
    return float(max(np.max(s) for s in slopes if s.size))


def chain_margins(
    vf: GridValueFunction,
    network: EdgeValueFunction,
    probes: np.ndarray,
    slack: float,
    chain_constant: float,
    bound: float,
) -> ChainMargins:
    """Margins of V̄(x̄) ≤ V^ε(x) + m_R(ε), V^ε(x̄) ≤ V̄(x̄) and V^ε(x) ≤ V^ε(x̄) + Cε^(1/4)."""
    eps = vf.eps
    feet = projected_plane(probes)
    v_x = vf.evaluate(probes)
    v_xbar = vf.evaluate(feet)
    bar = limit_values_on(network, probes)
    lower = float(np.min(v_x - bar))
    upper = float(np.min(bar - v_xbar + slack))
    layer = float(np.min(v_xbar + chain_constant * bound * eps**0.25 + slack - v_x))
    return ChainMargins(
        eps=eps,
        lower=lower,
        upper=upper,
        layer=layer,
        modulus=max(0.0, -lower - slack),
    )


def convergence_study(
    prob: ValueProblem,
    eps_values: Sequence[float],
    grid: Optional[GridConfig] = None,
    edge: Optional[EdgeGridConfig] = None,
    solver: Optional[SolverConfig] = None,
    n_probes: int = 100,
    seed: int = 5,
) -> ConvergenceReport:
    """Sup errors over the test region, value-chain margins and axis Lipschitz fits.

    The slack budget is slack_factor·h·M; the modulus m_R(ε) is reported as the
    amount by which the first chain inequality misses that budget.
    """
    grid = grid or GridConfig()
    solver = solver or SolverConfig()
    log = logger.bind(component='convergence_study')
    eps_values = sorted(eps_values, reverse=True)
    network = solve_value_network(prob, edge, solver)
    slack = solver.slack_factor * grid.h * prob.cost.bound
    rng = np.random.default_rng(seed)

    errors: List[float] = []
    margins: List[ChainMargins] = []
    fits: List[float] = []
    probes: Optional[np.ndarray] = None
    for eps in eps_values:
        vf = solve_value_eps(prob, eps, grid, solver)
        mask = vf.region_mask(grid.region)
        nodes = vf.nodes()[mask]
        error = float(np.max(np.abs(vf.values[mask] - limit_values_on(network, nodes))))
        if probes is None:
            pick = rng.choice(len(nodes), size=min(n_probes, len(nodes)), replace=False)
            probes = nodes[np.sort(pick)]
        margin = chain_margins(vf, network, probes, slack, solver.chain_constant, prob.cost.bound)
        fit = _axis_lipschitz(vf, grid.region)
        log.info(
            f'ε={eps}: sup error {error:.4e}, margins '
            f'({margin.lower:.3e}, {margin.upper:.3e}, {margin.layer:.3e}), Lipschitz {fit:.3f}'
        )
        errors.append(error)
        margins.append(margin)
        fits.append(fit)

    monotone = all(b < a or a <= ERROR_FLOOR for a, b in zip(errors, errors[1:]))
    moduli = [m.modulus for m in margins]
    modulus_monotone = all(b <= a + 1e-12 for a, b in zip(moduli, moduli[1:]))
    chains_ok = all(m.upper >= 0 and m.layer >= 0 for m in margins)
    positive = [f for f in fits if f > 0]
    stable = not positive or max(positive) <= LIPSCHITZ_SPREAD * min(positive)
    if not monotone:
        log.warning(f'Errors are not strictly decreasing in ε: {errors}')
    return ConvergenceReport(
        eps=list(eps_values),
        sup_errors=errors,
        chain_margins=margins,
        lipschitz_fit=fits,
        slack=slack,
        monotone=monotone,
        modulus_monotone=modulus_monotone,
        chains_ok=chains_ok,
        lipschitz_stable=stable,
    )
