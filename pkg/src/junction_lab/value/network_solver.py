"""Value iteration for V_Γ on the four branches and the junction."""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from loguru import logger
from scipy import sparse

from ..config.config import EdgeGridConfig, SolverConfig
from ..exceptions import ConvergenceError, DomainError
from ..models.points import EDGE_BRANCHES, NetworkPoint
from ..models.value import EdgeValueFunction, ValueProblem
from .cost import tail_bound


class NetworkSolver:
    """Discounted semi-Lagrangian scheme on Γ with time step τ = h.

    Node 0 is O; branch b holds nodes r = h, ..., R at indices
    1 + b·n, ..., n + b·n. A branch node moves with speed v ∈ [−1, 1] and reads
    its foot r + v·h by linear interpolation between neighbours, O included.
    O either stays or enters a branch with a positive speed. At r = R outward
    speeds are dropped.
    """

    def __init__(self, prob: ValueProblem, solver: Optional[SolverConfig] = None):
        if prob.mode != 'eikonal':
            raise DomainError('the network solver handles the Eikonal mode only')
        self.prob = prob
        self.cfg = solver or SolverConfig()
        self.logger = logger.bind(component='NetworkSolver')

    def assemble(self, edge: EdgeGridConfig):
        h = edge.h
        n = int(round(edge.radius / h))
        if n < 2:
            raise DomainError('edge grid needs at least two nodes per branch')
        radii = h * np.arange(1, n + 1)
        lam = self.prob.lam
        decay = 1.0 - lam * h
        if decay <= 0:
            raise DomainError('edge spacing must satisfy λ·h < 1', details={'h': h})
        speeds = np.linspace(-1.0, 1.0, self.cfg.n_speeds)

        owners: List[int] = []
        costs: List[float] = []
        rows, cols, weights = [], [], []

        def add(owner, cost, pairs):
            row = len(owners)
            owners.append(owner)
            costs.append(cost)
            for col, w in pairs:
                if w != 0.0:
                    rows.append(row)
                    cols.append(col)
                    weights.append(decay * w)

        junction_cost = h * self.prob.cost.at((0.0, 0.0))
        add(0, junction_cost, [(0, 1.0)])
        for b in range(4):
            first = 1 + b * n
            for v in speeds[speeds > 0]:
                add(0, junction_cost, [(0, 1.0 - v), (first, v)])

        for b, branch in enumerate(EDGE_BRANCHES):
            base = b * n
            running = h * self.prob.cost.evaluate(np.outer(radii, branch.direction))
            for j in range(1, n + 1):
                node = base + j
                for v in speeds:
                    if j == n and v > 0:
                        continue
                    pos = j + v
                    lo = math.floor(pos)
                    t = pos - lo
                    left = 0 if lo == 0 else base + lo
                    pairs = [(left, 1.0 - t)]
                    if t > 0:
                        pairs.append((base + lo + 1, t))
                    add(node, float(running[j - 1]), pairs)

        operator = sparse.csr_matrix(
            (weights, (rows, cols)), shape=(len(owners), 1 + 4 * n)
        )
        return radii, np.array(owners), np.array(costs), operator

    def solve(self, edge: EdgeGridConfig) -> EdgeValueFunction:
        radii, owners, costs, operator = self.assemble(edge)
        n = len(radii)
        cfg = self.cfg
        values = np.concatenate(
            ([self.prob.cost.at((0.0, 0.0))],
             *[self.prob.cost.evaluate(np.outer(radii, b.direction)) for b in EDGE_BRANCHES])
        ) / self.prob.lam

        residual = math.inf
        for it in range(1, cfg.max_iterations + 1):
            candidates = costs + operator @ values
            new = np.full_like(values, np.inf)
            np.minimum.at(new, owners, candidates)
            residual = float(np.max(np.abs(new - values)))
            values = new
            if residual < cfg.fixpoint_tol:
                break
        else:
            raise ConvergenceError(
                f'Network value iteration did not converge in {cfg.max_iterations} iterations',
                iterations=cfg.max_iterations,
                residual=residual,
            )

        # Outward speeds are dropped at R; a path from r needs R − r to get there.
        bound = self.prob.cost.bound
        slack = np.array([tail_bound(bound, self.prob.lam, radii[-1] - r) for r in radii])
        self.logger.debug(
            f'h={edge.h}: {1 + 4 * n} nodes, {it} iterations, residual {residual:.3e}, '
            f'truncation slack at O {tail_bound(bound, self.prob.lam, radii[-1]):.3e}'
        )
        branch_values: Dict = {
            branch: values[1 + b * n: 1 + (b + 1) * n].copy()
            for b, branch in enumerate(EDGE_BRANCHES)
        }
        return EdgeValueFunction(
            lam=self.prob.lam,
            h=edge.h,
            radii=radii,
            junction_value=float(values[0]),
            branch_values=branch_values,
            iterations=it,
            residual=residual,
            value_bound=self.prob.value_bound,
            boundary_slack=slack,
        )


def solve_value_network(
    prob: ValueProblem,
    edge: Optional[EdgeGridConfig] = None,
    solver: Optional[SolverConfig] = None,
) -> EdgeValueFunction:
    """V_Γ by value iteration of the 1D scheme with the stay-or-enter junction rule.

    Args:
        prob: Eikonal value problem
        edge: Edge grid; defaults when omitted
        solver: Scheme settings

    Returns:
        EdgeValueFunction with the per-node truncation slack
    """
    return NetworkSolver(prob, solver).solve(edge or EdgeGridConfig())


def network_self_convergence(
    prob: ValueProblem,
    edge: EdgeGridConfig,
    probes: Sequence[NetworkPoint],
    solver: Optional[SolverConfig] = None,
) -> Dict[str, float]:
    """Largest change of V_Γ at the probes when the edge spacing is halved."""
    coarse = solve_value_network(prob, edge, solver)
    fine = solve_value_network(
        prob, edge.model_copy(update={'h': edge.h / 2}), solver
    )
    change = max(abs(coarse.evaluate(p) - fine.evaluate(p)) for p in probes)
    return {'h': edge.h, 'change': float(change), 'ratio': float(change / edge.h)}
