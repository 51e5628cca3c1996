"""Closed-form limit dynamics inside edges and through the junction."""

import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import solve_ivp

from ..exceptions import DomainError
from ..models.control import ControlSchedule
from ..models.points import Branch, EDGE_BRANCHES, NetworkPoint
from ..models.trajectory import LimitSegment, LimitTrajectory

TWO_PI = 2.0 * math.pi

Drift = Callable[[np.ndarray, np.ndarray], np.ndarray]


class EdgeRun(BaseModel):
    """Limit motion inside one open branch."""

    trajectory: LimitTrajectory = Field(..., description='Segments on the branch')
    k_increment: Tuple[float, float] = Field(..., description='Normal part ∫⟨f, e⊥⟩e⊥')
    junction_time: Optional[float] = Field(
        default=None, description='Time the radius reaches 0, if within the interval'
    )


def _edge_piece_affine(branch, r, t0, t1, a):
    e, n = branch.direction, branch.normal
    v = float(np.dot(a, e))
    normal = float(np.dot(a, n)) * n
    hit = None
    if v < 0 and r + v * (t1 - t0) <= 0:
        hit = t0 + r / -v
        t1 = hit
    seg = LimitSegment(t0=t0, t1=t1, location=branch, r0=r, speed=v)
    return seg, normal * (t1 - t0), hit, max(r + v * (t1 - t0), 0.0)


def _edge_piece_sampled(branch, r, t0, t1, a, drift):
    e, n = branch.direction, branch.normal

    def rhs(t, y):
        f = drift(y[0] * e, a)
        return [float(np.dot(f, e)), *(float(np.dot(f, n)) * n)]

    def junction(t, y):
        return y[0]

    junction.terminal = True
    junction.direction = -1
    sol = solve_ivp(
        rhs, (t0, t1), [r, 0.0, 0.0], rtol=1e-10, atol=1e-12, events=junction
    )
    radii = np.maximum(sol.y[0], 0.0)
    hit = float(sol.t_events[0][0]) if sol.status == 1 else None
    seg = LimitSegment(
        t0=t0,
        t1=float(sol.t[-1]),
        location=branch,
        kind='sampled',
        sample_times=[float(t) for t in sol.t],
        sample_radii=[float(v) for v in radii],
    )
    return seg, sol.y[1:, -1].copy(), hit, float(radii[-1])


def edge_limit_dynamics(
    start: NetworkPoint,
    alpha: ControlSchedule,
    interval: Tuple[float, float],
    drift: Optional[Drift] = None,
) -> EdgeRun:
    """Limit dynamics on the branch of start over interval = (a, b).

    The state moves with the tangential part ⟨f, e_i⟩e_i of the drift and k
    accrues the normal part ⟨f, e_i⊥⟩e_i⊥. The run stops early when the
    radius reaches 0. Controls are read at absolute time.

    Args:
        start: Point on an open branch
        alpha: Control schedule
        interval: (a, b) with a < b
        drift: Drift f(x, a); f = a when omitted

    Returns:
        EdgeRun with the segments, the k increment and the junction hit time
    """
    if start.is_junction():
        raise DomainError('edge dynamics need a start on an open branch')
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise DomainError('interval must satisfy a < b', details={'interval': interval})

    branch, r = start.branch, start.radius
    segments: List[LimitSegment] = []
    k = np.zeros(2)
    hit: Optional[float] = None
    for t0, t1, value in alpha.pieces(b):
        if t1 <= a:
            continue
        t0 = max(t0, a)
        if drift is None:
            seg, dk, hit, r = _edge_piece_affine(branch, r, t0, t1, value)
        else:
            seg, dk, hit, r = _edge_piece_sampled(branch, r, t0, t1, value, drift)
        segments.append(seg)
        k += dk
        if hit is not None:
            break

    return EdgeRun(
        trajectory=LimitTrajectory(segments=segments, f_inf=alpha.f_inf),
        k_increment=(float(k[0]), float(k[1])),
        junction_time=hit,
    )


def _normalize(theta: float) -> float:
    if not math.isfinite(theta):
        raise DomainError('theta must be finite', details={'theta': theta})
    return theta % TWO_PI


def _junction_exit(theta: float, angle_tol: float) -> Tuple[Branch, float]:
    """Branch entered from O under e_θ and its speed; O on a bisector."""
    scores = sorted(
        ((math.cos(theta - b.quarter_turns * math.pi / 2), b) for b in EDGE_BRANCHES),
        key=lambda item: item[0],
        reverse=True,
    )
    (best, branch), (second, _) = scores[0], scores[1]
    if best - second <= angle_tol:
        return Branch.O, 0.0
    return branch, best


def _from_north(r: float, theta: float, horizon: float, angle_tol: float):
    """Segments from (N, r) under e_θ, θ in [0, 2π)."""
    s, c = math.sin(theta), math.cos(theta)
    if theta <= math.pi + angle_tol:
        return [LimitSegment(t0=0.0, t1=horizon, location=Branch.N, r0=r, speed=s)]
    t_hit = r / -s
    first = LimitSegment(
        t0=0.0, t1=min(t_hit, horizon), location=Branch.N, r0=r, speed=s
    )
    if t_hit >= horizon:
        return [first]
    if theta <= 1.25 * math.pi + angle_tol:
        branch, speed = Branch.W, -c
    elif theta < 1.75 * math.pi - angle_tol:
        branch, speed = Branch.S, -s
    else:
        branch, speed = Branch.E, c
    return [
        first,
        LimitSegment(t0=t_hit, t1=horizon, location=branch, r0=0.0, speed=speed),
    ]


def constant_control_limit(
    start: NetworkPoint,
    theta: float,
    horizon: float = 1.0,
    angle_tol: float = 1e-9,
) -> LimitTrajectory:
    """Closed-form limit trajectory on [0, T] for the constant control e_θ.

    Starts on E, W or S are rotated onto N, solved there and rotated back.

    Args:
        start: Start on Γ
        theta: Control angle in radians
        horizon: T > 0
        angle_tol: Tolerance on the boundary angles at O

    Returns:
        LimitTrajectory partitioning (0, T]
    """
    if not horizon > 0:
        raise DomainError('horizon must be positive', details={'horizon': horizon})
    theta = _normalize(theta)

    if start.is_junction():
        branch, speed = _junction_exit(theta, angle_tol)
        if branch is Branch.O:
            return LimitTrajectory.stationary(start, horizon)
        return LimitTrajectory(
            segments=[
                LimitSegment(t0=0.0, t1=horizon, location=branch, r0=0.0, speed=speed)
            ]
        )

    turns = (Branch.N.quarter_turns - start.branch.quarter_turns) % 4
    local_theta = (theta + turns * math.pi / 2) % TWO_PI
    segments = _from_north(start.radius, local_theta, horizon, angle_tol)
    rotated = [
        seg.model_copy(update={'location': seg.location.rotate(-turns)})
        for seg in segments
    ]
    return LimitTrajectory(segments=rotated)


class SemigroupWitness(BaseModel):
    """Limit from e_N under e_{5π/4} at √2 + s against a restart from O."""

    s: float
    through_junction: Tuple[float, float] = Field(..., description='X(√2 + s) from e_N')
    restarted: Tuple[float, float] = Field(..., description='X(s) restarted from O')
    discrepancy: float = Field(..., description='Plane distance between the two')


def semigroup_witness(s: float, angle_tol: float = 1e-9) -> SemigroupWitness:
    if not s > 0:
        raise DomainError('s must be positive', details={'s': s})
    theta = 1.25 * math.pi
    t_hit = math.sqrt(2.0)
    through = constant_control_limit(
        NetworkPoint.on(Branch.N, 1.0), theta, t_hit + s, angle_tol
    ).plane_at(t_hit + s)
    restart = constant_control_limit(
        NetworkPoint.junction(), theta, s, angle_tol
    ).plane_at(s)
    return SemigroupWitness(
        s=s,
        through_junction=(float(through[0]), float(through[1])),
        restarted=(float(restart[0]), float(restart[1])),
        discrepancy=float(np.linalg.norm(through - restart)),
    )


class InstabilityRow(BaseModel):
    n: int
    branch: Branch
    radius: float


class InstabilityWitness(BaseModel):
    """Limits from e_N/n under e_{5π/4} against the limit from O."""

    horizon: float
    rows: List[InstabilityRow]
    from_junction: NetworkPoint


def instability_witness(
    n_values: List[int], horizon: float = 1.0, angle_tol: float = 1e-9
) -> InstabilityWitness:
    theta = 1.25 * math.pi
    rows = []
    for n in n_values:
        if n < 1:
            raise DomainError('n must be a positive integer', details={'n': n})
        limit = constant_control_limit(
            NetworkPoint.on(Branch.N, 1.0 / n), theta, horizon, angle_tol
        )
        end = limit.state_at(horizon)
        rows.append(InstabilityRow(n=n, branch=end.branch, radius=end.radius))
    origin = constant_control_limit(NetworkPoint.junction(), theta, horizon, angle_tol)
    return InstabilityWitness(
        horizon=horizon, rows=rows, from_junction=origin.state_at(horizon)
    )
