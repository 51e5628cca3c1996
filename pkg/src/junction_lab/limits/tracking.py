"""On-network trajectories tracking an ε-trajectory after it enters the layer."""

import math
from typing import Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from ..dynamics.estimates import reach_time_bound
from ..exceptions import HorizonError
from ..models.control import ControlSchedule
from ..models.points import NetworkPoint, PlanePoint
from ..models.trajectory import LimitTrajectory, TrajectoryRecord
from ..geometry.projection import classify_branch

# Speed slack for finite differences of the tracked path.
SPEED_TOL = 1e-6


class TrackingResult(BaseModel):
    """Tracked path Y̲ on Γ from t₀ = 4d(x)^(1/4)ε^(1−γ) onwards."""

    eps: float
    gamma: float
    start_time: float = Field(..., description='Layer-entry time t₀')
    shift: float = Field(..., description='Clamp level ε^(γ/8)')
    slowdown: float = Field(..., description='(1 + 2|f|∞ε^(5γ/24))^(−1)')
    times: np.ndarray = Field(..., description='Sample times in [t₀, T]')
    path: np.ndarray = Field(..., description='Y̲(tᵢ), shape (n, 2), on Γ')
    distances: np.ndarray = Field(..., description='|Y̲(tᵢ) − X(tᵢ)|')
    sup_distance: float
    error_scale: float = Field(..., description='ε^(γ/8) + ε^(5γ/24)·T')
    max_speed: float
    speed_bound: float = Field(..., description='√2·|f|∞')

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    @property
    def ratio(self) -> float:
        return self.sup_distance / self.error_scale

    @property
    def speed_ok(self) -> bool:
        return self.max_speed <= self.speed_bound + SPEED_TOL

    @property
    def start_point(self) -> NetworkPoint:
        """x̄_ε = Y̲(t₀)."""
        branch = classify_branch(PlanePoint.from_array(self.path[0]), tol=0.0)
        return NetworkPoint.on(branch, float(np.max(np.abs(self.path[0]))))

    def limit_trajectory(self) -> LimitTrajectory:
        return LimitTrajectory.from_samples(
            self.times, self.path, tol=0.0, f_inf=self.speed_bound
        )

    def control(self) -> ControlSchedule:
        """β = 0 before t₀ and the finite-difference velocity of Y̲ after."""
        dt = np.diff(self.times)
        velocity = np.diff(self.path, axis=0) / dt[:, None]
        pieces = [(0.0, (0.0, 0.0))]
        for t, v in zip(self.times[:-1], velocity):
            norm = math.hypot(v[0], v[1])
            if norm > self.speed_bound:
                v = v * (self.speed_bound / norm)
            pieces.append((float(t), (float(v[0]), float(v[1]))))
        return ControlSchedule.from_pieces(pieces, f_inf=self.speed_bound)


def _track(states: np.ndarray, shift: float, slowdown: float) -> np.ndarray:
    return slowdown * np.sign(states) * np.maximum(np.abs(states) - shift, 0.0)


def tracking_trajectory(
    traj: TrajectoryRecord, gamma: float, f_inf: Optional[float] = None
) -> TrackingResult:
    """Clamp, shift and slow down traj into a path on Γ and measure the gap.

    Args:
        traj: ε-trajectory long enough to pass the layer entry time
        gamma: Layer exponent in (0, 1)
        f_inf: Speed bound; the control's f_inf when omitted

    Returns:
        TrackingResult with the sup gap, its ratio to ε^(γ/8) and the speed check

    Raises:
        HorizonError: If the horizon ends before the layer entry time
    """
    if not 0 < gamma < 1:
        raise ValueError('gamma must lie in (0, 1)')
    f_inf = traj.control.f_inf if f_inf is None else f_inf
    eps = traj.eps
    t0 = reach_time_bound(traj.x, eps, gamma)
    if t0 > traj.horizon:
        raise HorizonError(
            f'Horizon {traj.horizon} is shorter than the layer entry time {t0:.6g}',
            details={'eps': eps, 'gamma': gamma, 'entry_time': t0},
        )
    shift = eps ** (gamma / 8)
    slowdown = 1.0 / (1.0 + 2.0 * f_inf * eps ** (5 * gamma / 24))

    later = traj.times > t0
    times = np.concatenate(([t0], traj.times[later]))
    states = np.vstack((traj.state_at(t0), traj.states[later]))
    path = _track(states, shift, slowdown)
    distances = np.linalg.norm(path - states, axis=1)

    dt = np.diff(times)
    moving = dt > 0
    speeds = np.linalg.norm(np.diff(path, axis=0)[moving], axis=1) / dt[moving]
    max_speed = float(np.max(speeds)) if speeds.size else 0.0

    result = TrackingResult(
        eps=eps,
        gamma=gamma,
        start_time=t0,
        shift=shift,
        slowdown=slowdown,
        times=times,
        path=path,
        distances=distances,
        sup_distance=float(np.max(distances)),
        error_scale=shift + eps ** (5 * gamma / 24) * traj.horizon,
        max_speed=max_speed,
        speed_bound=math.sqrt(2.0) * f_inf,
    )
    logger.bind(component='tracking').debug(
        f'ε={eps}: sup distance {result.sup_distance:.3e}, ratio {result.ratio:.3f}'
    )
    return result
