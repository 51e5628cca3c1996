"""Control surgery: moving between penalized and on-network controls."""

import math
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field
from scipy.integrate import solve_ivp

from ..dynamics.estimates import reach_time_bound
from ..exceptions import ControlBoundError, DomainError, IntegrationError
from ..geometry.penalty import penalty
from ..geometry.projection import project_to_network
from ..models.control import ControlSchedule
from ..models.points import NetworkPoint, PlanePoint
from ..models.trajectory import TrajectoryRecord

# Layer depth used to pick the default skip time, as a γ in ε^(1−γ).
SKIP_GAMMA = 0.5


class RestrictedControl(BaseModel):
    """ᾱ = α − k̇ read off an ε-trajectory, started from x̄ = φ_d(x)."""

    start: NetworkPoint
    control: ControlSchedule
    skip_time: float = Field(..., description='End of the initial layer transient')
    max_norm: float = Field(..., description='max |ᾱ| after the skip, before clipping')
    clipped: int = Field(..., description='Pieces shrunk onto the unit ball')


def _default_skip(traj: TrajectoryRecord) -> float:
    if penalty(traj.x) == 0:
        return 0.0
    entry = traj.metadata.get('layer_entry_time') or 0.0
    return min(max(entry, reach_time_bound(traj.x, traj.eps, SKIP_GAMMA)), traj.horizon)


def restricted_control(
    traj: TrajectoryRecord,
    alpha: Optional[ControlSchedule] = None,
    clip_tol: float = 1e-3,
    skip_time: Optional[float] = None,
) -> RestrictedControl:
    """Finite-difference ᾱ(t) = α(t) − k̇(t), clipped to the unit ball.

    Before skip_time the control is the constant that carries x̄ to X(skip_time).

    Args:
        traj: ε-trajectory with its k record
        alpha: Control that drove traj; the record's own by default
        clip_tol: Largest overshoot of |ᾱ| past 1 tolerated before failing
        skip_time: End of the initial layer; derived from the layer entry by default

    Returns:
        RestrictedControl with x̄, the schedule ᾱ and the clipping diagnostics
    """
    alpha = alpha or traj.control
    log = logger.bind(component='restricted_control')
    start = project_to_network(traj.x)
    t_skip = _default_skip(traj) if skip_time is None else float(skip_time)

    later = traj.times > t_skip
    times = np.concatenate(([t_skip], traj.times[later]))
    k = np.vstack((traj.k_at(t_skip), traj.k_states[later]))
    drive = np.array([alpha.integral(float(t)) for t in times])
    dt = np.diff(times)
    keep = dt > 0
    values = (np.diff(drive, axis=0) - np.diff(k, axis=0))[keep] / dt[keep, None]
    starts = times[:-1][keep]

    norms = np.linalg.norm(values, axis=1) if len(values) else np.zeros(0)
    max_norm = float(np.max(norms)) if norms.size else 0.0
    if max_norm > 1.0 + clip_tol:
        at = float(starts[int(np.argmax(norms))])
        raise ControlBoundError(
            f'Restricted control reaches |ᾱ| = {max_norm:.6g} at t={at:.6g}',
            details={'eps': traj.eps, 'time': at, 'norm': max_norm},
        )

    pieces: List[Tuple[float, Tuple[float, float]]] = []
    clipped = 0
    if t_skip > 0:
        head = (traj.state_at(t_skip) - start.as_array()) / t_skip
        norm = float(np.linalg.norm(head))
        if norm > 1.0:
            head = head / norm
            clipped += 1
        pieces.append((0.0, (float(head[0]), float(head[1]))))
    for t, v, norm in zip(starts, values, norms):
        if norm > 1.0:
            v = v / norm
            clipped += 1
        pieces.append((float(t), (float(v[0]), float(v[1]))))
    if not pieces:
        pieces.append((0.0, (0.0, 0.0)))
    if clipped:
        log.warning(f'Clipped {clipped} control pieces onto the unit ball (ε={traj.eps})')

    return RestrictedControl(
        start=start,
        control=ControlSchedule.from_pieces(pieces),
        skip_time=t_skip,
        max_norm=max_norm,
        clipped=clipped,
    )


def drive_on_network(
    xbar: NetworkPoint, control: ControlSchedule, times
) -> np.ndarray:
    """Unpenalized motion x̄ + ∫₀ᵗ ᾱ at each requested time, shape (n, 2)."""
    origin = xbar.as_array()
    return np.array([origin + control.integral(float(t)) for t in times])


class SteeringPlan(BaseModel):
    control: ControlSchedule
    arrival_time: float
    bound: float = Field(..., description='√2·|x̄ − ȳ| / speed')

    @property
    def within_bound(self) -> bool:
        return self.arrival_time <= self.bound + 1e-12


def steer_on_network(
    xbar: NetworkPoint, ybar: NetworkPoint, speed: float = 1.0
) -> SteeringPlan:
    """Constant-speed geodesic control from x̄ to ȳ, holding still on arrival.

    Args:
        xbar: Start on Γ
        ybar: Target on Γ
        speed: Speed in (0, 1] along every leg

    Returns:
        SteeringPlan whose arrival time is the geodesic distance over speed
    """
    if not 0 < speed <= 1:
        raise DomainError('speed must lie in (0, 1]', details={'speed': speed})
    bound = math.sqrt(2.0) * float(np.linalg.norm(xbar.as_array() - ybar.as_array()))
    bound /= speed
    legs: List[Tuple[float, np.ndarray]] = []
    if xbar.branch is ybar.branch and not xbar.is_junction():
        gap = ybar.radius - xbar.radius
        if gap != 0:
            legs.append((abs(gap), math.copysign(1.0, gap) * xbar.branch.direction))
    elif xbar.branch is not ybar.branch:
        if not xbar.is_junction():
            legs.append((xbar.radius, -xbar.branch.direction))
        if not ybar.is_junction():
            legs.append((ybar.radius, ybar.branch.direction))

    pieces = []
    clock = 0.0
    for length, direction in legs:
        value = speed * direction
        pieces.append((clock, (float(value[0]) + 0.0, float(value[1]) + 0.0)))
        clock += length / speed
    pieces.append((clock, (0.0, 0.0)))
    return SteeringPlan(
        control=ControlSchedule.from_pieces(pieces), arrival_time=clock, bound=bound
    )


class DescentResult(BaseModel):
    """Penalized run of the feedback −∇d/|∇d| until d falls below stop_tol."""

    eps: float
    arrival_time: float
    arrival: Tuple[float, float]
    target: NetworkPoint = Field(..., description='φ_d(x)')
    control: ControlSchedule

    @property
    def scaled_time(self) -> float:
        """τ/ε^(1/4)."""
        return self.arrival_time / self.eps**0.25


def accelerated_descent(
    x: PlanePoint,
    eps: float,
    stop_tol: float = 1e-14,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> DescentResult:
    """Run Ẋ = −∇d/|∇d| − (1/ε)∇d from x until d(X) ≤ stop_tol."""
    if not eps > 0:
        raise DomainError('eps must be positive', details={'eps': eps})
    target = project_to_network(x)
    if penalty(x) <= stop_tol:
        return DescentResult(
            eps=eps,
            arrival_time=0.0,
            arrival=(x.x1, x.x2),
            target=target,
            control=ControlSchedule.zero(),
        )

    inv_eps = 1.0 / eps

    def feedback(z):
        prod = z[0] * z[1]
        g = np.array((2.0 * prod * z[1], 2.0 * prod * z[0]))
        norm = float(np.linalg.norm(g))
        return (-g / norm if norm > 0 else np.zeros(2)), g

    def rhs(t, z):
        a, g = feedback(z)
        return a - inv_eps * g

    def reached(t, z):
        return (z[0] * z[1]) ** 2 - stop_tol

    reached.terminal = True
    reached.direction = -1
    # d^(1/4) falls at rate at least √2/2 under the feedback alone
    t_max = 2.0 * math.sqrt(2.0) * penalty(x) ** 0.25 + 1.0
    sol = solve_ivp(
        rhs, (0.0, t_max), x.as_array(), method='LSODA',
        rtol=rel_tol, atol=abs_tol, events=reached,
    )
    if sol.status != 1:
        raise IntegrationError(
            f'Descent did not reach the network: {sol.message}',
            time=float(sol.t[-1]),
            details={'eps': eps},
        )
    pieces = [(float(t), tuple(feedback(z)[0])) for t, z in zip(sol.t[:-1], sol.y.T[:-1])]
    pieces.append((float(sol.t[-1]), (0.0, 0.0)))
    end = sol.y[:, -1]
    return DescentResult(
        eps=eps,
        arrival_time=float(sol.t_events[0][0]),
        arrival=(float(end[0]), float(end[1])),
        target=target,
        control=ControlSchedule.from_pieces(pieces),
    )


__all__ = [
    'RestrictedControl',
    'SteeringPlan',
    'DescentResult',
    'restricted_control',
    'drive_on_network',
    'steer_on_network',
    'accelerated_descent',
]
