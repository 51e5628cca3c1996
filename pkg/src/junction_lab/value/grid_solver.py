"""Semi-Lagrangian value iteration for V^ε on a uniform 2D grid."""

import math
from typing import Optional, Tuple

import numpy as np
from loguru import logger
from scipy import sparse

from ..config.config import GridConfig, SolverConfig
from ..exceptions import ConvergenceError, DomainError
from ..geometry.penalty import penalty_gradient_array
from ..models.value import GridValueFunction, ValueProblem


def grid_axes(grid: GridConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Node coordinates of the region padded by the margin, aligned on 0 when possible."""
    x_min, x_max, y_min, y_max = grid.region
    h = grid.h

    def axis(lo, hi):
        lo, hi = lo - grid.margin, hi + grid.margin
        i0, i1 = math.floor(lo / h + 1e-9), math.ceil(hi / h - 1e-9)
        return np.arange(i0, i1 + 1) * h

    return axis(x_min, x_max), axis(y_min, y_max)


def control_set(n_directions: int) -> np.ndarray:
    """n_directions unit vectors plus the zero control, shape (n + 1, 2)."""
    angles = 2.0 * np.pi * np.arange(n_directions) / n_directions
    dirs = np.stack((np.cos(angles), np.sin(angles)), axis=1)
    return np.vstack((dirs, np.zeros((1, 2))))


def bilinear_operator(
    feet: np.ndarray, xs: np.ndarray, ys: np.ndarray, scale: np.ndarray
) -> sparse.csr_matrix:
    """Rows scale[i]·(bilinear weights of feet[i]) over the (ij-ordered) grid nodes."""
    h_x, h_y = xs[1] - xs[0], ys[1] - ys[0]
    nx, ny = len(xs), len(ys)
    px = (feet[:, 0] - xs[0]) / h_x
    py = (feet[:, 1] - ys[0]) / h_y
    ix = np.clip(np.floor(px).astype(int), 0, nx - 2)
    iy = np.clip(np.floor(py).astype(int), 0, ny - 2)
    tx = np.clip(px - ix, 0.0, 1.0)
    ty = np.clip(py - iy, 0.0, 1.0)

    n = len(feet)
    rows = np.repeat(np.arange(n), 4)
    cols = np.stack(
        (ix * ny + iy, (ix + 1) * ny + iy, ix * ny + iy + 1, (ix + 1) * ny + iy + 1),
        axis=1,
    ).ravel()
    weights = np.stack(
        ((1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty), axis=1
    ) * scale[:, None]
    return sparse.csr_matrix((weights.ravel(), (rows, cols)), shape=(n, nx * ny))


class SemiLagrangianSolver:
    """Jacobi value iteration u ← min_a {c_a + P_a u} with one stacked sparse P."""

    def __init__(self, prob: ValueProblem, solver: Optional[SolverConfig] = None):
        if prob.mode != 'eikonal':
            raise DomainError('the grid solver handles the Eikonal mode only')
        self.prob = prob
        self.cfg = solver or SolverConfig()
        self.logger = logger.bind(component='SemiLagrangianSolver')

    def assemble(self, eps: float, xs: np.ndarray, ys: np.ndarray):
        """Costs (K, N), stacked operator (K·N × N) and the clamped-foot count."""
        cfg, lam = self.cfg, self.prob.lam
        h = min(xs[1] - xs[0], ys[1] - ys[0])
        gx, gy = np.meshgrid(xs, ys, indexing='ij')
        nodes = np.stack((gx.ravel(), gy.ravel()), axis=1)
        grad = penalty_gradient_array(nodes) / eps
        running = self.prob.cost.evaluate(nodes)
        lo = np.array((xs[0], ys[0]))
        hi = np.array((xs[-1], ys[-1]))

        costs, blocks = [], []
        clamped = 0
        for a in control_set(cfg.n_directions):
            field = a - grad
            speed = np.linalg.norm(field, axis=1)
            step = np.full(len(nodes), min(cfg.c_step * eps, 0.5 / lam))
            moving = speed > 0
            step[moving] = np.minimum(step[moving], cfg.cfl * h / speed[moving])
            feet = nodes + step[:, None] * field
            outside = np.any((feet < lo) | (feet > hi), axis=1)
            clamped += int(np.count_nonzero(outside))
            feet = np.clip(feet, lo, hi)
            costs.append(step * running)
            blocks.append(bilinear_operator(feet, xs, ys, 1.0 - lam * step))
        return np.array(costs), sparse.vstack(blocks, format='csr'), clamped

    def iterate(self, costs: np.ndarray, operator, u0: np.ndarray):
        """Fixed-point iteration with a geometric-residual early exit."""
        cfg = self.cfg
        k = costs.shape[0]
        u = u0
        residual = math.inf
        previous = math.inf
        for it in range(1, cfg.max_iterations + 1):
            candidates = costs + (operator @ u).reshape(k, -1)
            new = candidates.min(axis=0)
            residual = float(np.max(np.abs(new - u)))
            u = new
            if residual < cfg.fixpoint_tol:
                return u, it, residual
            if math.isfinite(previous) and previous > 0:
                rate = residual / previous
                if rate < 1.0 and residual * rate / (1.0 - rate) < cfg.fixpoint_tol:
                    return u, it, residual
            previous = residual
            if it % 500 == 0:
                self.logger.debug(f'iteration {it}: residual {residual:.3e}')
        raise ConvergenceError(
            f'Value iteration did not converge in {cfg.max_iterations} iterations',
            iterations=cfg.max_iterations,
            residual=residual,
        )

    def solve(self, eps: float, grid: GridConfig) -> GridValueFunction:
        if not eps > 0:
            raise DomainError('eps must be positive', details={'eps': eps})
        xs, ys = grid_axes(grid)
        costs, operator, clamped = self.assemble(eps, xs, ys)
        nodes = np.stack(np.meshgrid(xs, ys, indexing='ij'), axis=-1).reshape(-1, 2)
        u0 = self.prob.cost.evaluate(nodes) / self.prob.lam
        u, iterations, residual = self.iterate(costs, operator, u0)
        slack = self.prob.cost.bound * grid.h / self.prob.lam if clamped else 0.0
        if clamped:
            self.logger.warning(
                f'{clamped} foot points clamped to the box (slack {slack:.3e})'
            )
        self.logger.debug(
            f'ε={eps}: {len(xs)}×{len(ys)} nodes, {iterations} iterations, '
            f'residual {residual:.3e}'
        )
        return GridValueFunction(
            eps=eps,
            lam=self.prob.lam,
            h=grid.h,
            x_nodes=xs,
            y_nodes=ys,
            values=u.reshape(len(xs), len(ys)),
            iterations=iterations,
            residual=residual,
            boundary_slack=slack,
            value_bound=self.prob.value_bound,
        )


def solve_value_eps(
    prob: ValueProblem,
    eps: float,
    grid: Optional[GridConfig] = None,
    solver: Optional[SolverConfig] = None,
) -> GridValueFunction:
    """V^ε on the grid as the fixed point of the discounted semi-Lagrangian update.

    Args:
        prob: Eikonal value problem
        eps: Penalty parameter ε > 0
        grid: 2D grid; defaults when omitted
        solver: Scheme settings

    Returns:
        GridValueFunction, with the clamped-foot slack M·h/λ when any foot left the box

    Raises:
        ConvergenceError: If the iteration cap is reached
    """
    return SemiLagrangianSolver(prob, solver).solve(eps, grid or GridConfig())
