"""Gradient flow of the penalty and its Łojasiewicz bounds."""

import math

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp

from ..exceptions import DomainError, IntegrationError
from ..geometry.penalty import PENALTY, penalty
from ..geometry.projection import dominant_branch
from ..models.points import NetworkPoint, PlanePoint
from ..models.trajectory import GradientFlowResult

# Far end of the time window; the stop event ends the run long before it.
_MAX_TIME = 1e15


def _rhs(t, z):
    prod = z[0] * z[1]
    return [-2.0 * prod * z[1], -2.0 * prod * z[0]]


def _stop_event(level: float):
    def event(t, z):
        return (z[0] * z[1]) ** 2 - level

    event.terminal = True
    event.direction = -1
    return event


def length_bound(x: PlanePoint) -> float:
    """d(x)^(1−θ) / (ν(1−θ)), an upper bound on the length of the flow path."""
    exponent = 1.0 - PENALTY.loja_theta
    return penalty(x) ** exponent / (PENALTY.loja_nu * exponent)


def reach_level_bound(x: PlanePoint, level: float) -> float:
    """Upper bound on the first time the flow from x has d(Z) ≤ level."""
    if not level > 0:
        raise DomainError('level must be positive', details={'level': level})
    d = penalty(x)
    if d <= level:
        return 0.0
    exponent = 1.0 - PENALTY.loja_theta
    return d**exponent / (PENALTY.loja_nu**2 * exponent) * level ** (-PENALTY.loja_theta)


def gradient_flow(
    x: PlanePoint,
    stop_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-14,
    method: str = 'DOP853',
) -> GradientFlowResult:
    """Integrate Ż = −∇d(Z) from x until d(Z) < stop_tol.

    The limit point is read off the final state: the branch of its dominant
    coordinate at the radius of that coordinate, or O when the state is inside
    the box of half-width 2·stop_tol^(1/4) where both branches are ambiguous.
    """
    if not stop_tol > 0:
        raise DomainError('stop_tol must be positive', details={'stop_tol': stop_tol})
    log = logger.bind(component='gradient_flow')
    z0 = x.as_array()
    d0 = penalty(x)
    if d0 < stop_tol:
        limit_xy = z0
        times = np.array([0.0])
        path = z0[None, :]
        stop_time = 0.0
    else:
        sol = solve_ivp(
            _rhs,
            (0.0, _MAX_TIME),
            z0,
            method=method,
            rtol=rel_tol,
            atol=abs_tol,
            events=_stop_event(stop_tol),
        )
        if sol.status < 0:
            raise IntegrationError(
                f'Gradient flow failed: {sol.message}', time=float(sol.t[-1])
            )
        if sol.status != 1:
            raise IntegrationError(
                'Gradient flow did not reach the stopping level',
                time=float(sol.t[-1]),
                details={'stop_tol': stop_tol},
            )
        times = sol.t
        path = sol.y.T
        stop_time = float(sol.t_events[0][0])
        limit_xy = path[-1]
        log.debug(f'Flow from {z0.tolist()} stopped at t={stop_time:.6g} ({len(times)} samples)')

    junction_box = 2.0 * stop_tol**0.25
    branch = dominant_branch(limit_xy, junction_tol=junction_box)
    radius = max(abs(limit_xy[0]), abs(limit_xy[1]))
    limit = NetworkPoint.on(branch, radius)

    invariant = path[:, 1] ** 2 - path[:, 0] ** 2
    drift = float(np.max(np.abs(invariant - (x.x2**2 - x.x1**2))))
    d_path = (path[:, 0] * path[:, 1]) ** 2
    slack = 1e-14 * max(1.0, d0)
    monotone = bool(np.all(np.diff(d_path) <= slack))
    path_length = float(np.sum(np.linalg.norm(np.diff(path, axis=0), axis=1)))

    return GradientFlowResult(
        times=times,
        path=path,
        limit=limit,
        stop_time=stop_time,
        path_length=path_length,
        length_bound=length_bound(x),
        hyperbola_drift=drift,
        monotone=monotone,
    )


def limit_gap(result: GradientFlowResult, expected: NetworkPoint) -> float:
    """Plane distance between the reported and an expected limit point."""
    return float(math.dist(result.limit.as_array(), expected.as_array()))
