"""Sampled ε-trajectories, limit trajectories and gradient-flow results."""

import bisect
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, validator

from .control import ControlSchedule
from .points import Branch, NetworkPoint, PlanePoint
from ..config.config import IntegratorConfig
from ..utils.formatting import write_csv, write_json

# Tolerance for contiguity of segment intervals.
TIME_TOL = 1e-12


class TrajectoryRecord(BaseModel):
    """Sampled (t, X(t), k(t)) path for one (x, α, ε) triple."""

    eps: float = Field(..., description='Penalty parameter ε')
    x: PlanePoint = Field(..., description='Initial point')
    control: ControlSchedule = Field(..., description='Control used')
    horizon: float = Field(..., description='Integration horizon T')
    times: np.ndarray = Field(..., description='Increasing sample times')
    states: np.ndarray = Field(..., description='X(tᵢ), shape (n, 2)')
    k_states: np.ndarray = Field(..., description='k(tᵢ), shape (n, 2)')
    drift_integral: np.ndarray = Field(..., description='∫₀ᵗ f, shape (n, 2)')
    penalty_integral: Optional[np.ndarray] = Field(
        default=None, description='(1/ε)∫₀ᵗ d(X), shape (n,)'
    )
    energy_integral: Optional[np.ndarray] = Field(
        default=None, description='∫₀ᵗ |Ẋ|², shape (n,)'
    )
    diagnostic_k: Optional[np.ndarray] = Field(
        default=None, description='Direct quadrature of (1/ε)∫∇d, if requested'
    )
    integrator_config: Optional[IntegratorConfig] = Field(
        default=None, description='Integrator settings of the run'
    )
    metadata: Dict[str, Any] = Field(default_factory=dict)

    _dense: List[Tuple[float, float, Any]] = PrivateAttr(default_factory=list)

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    @validator('eps')
    def validate_eps(cls, v):
        """Validate ε is positive."""
        if not v > 0:
            raise ValueError('eps must be positive')
        return v

    def attach_dense(self, pieces: List[Tuple[float, float, Any]]) -> None:
        """Attach (t0, t1, OdeSolution) interpolants of the solver."""
        self._dense = list(pieces)

    @property
    def has_dense(self) -> bool:
        return bool(self._dense)

    def _full_state(self, t: float) -> np.ndarray:
        if not self._dense:
            i = int(np.clip(np.searchsorted(self.times, t), 0, len(self.times) - 1))
            return np.concatenate((self.states[i], self.drift_integral[i]))
        starts = [p[0] for p in self._dense]
        j = max(bisect.bisect_right(starts, t) - 1, 0)
        t0, t1, sol = self._dense[j]
        return np.asarray(sol(min(max(t, t0), t1)), dtype=float)

    def state_at(self, t: float) -> np.ndarray:
        """X(t) from the dense solver output."""
        return self._full_state(t)[:2]

    def k_at(self, t: float) -> np.ndarray:
        """k(t) = x + ∫f − X."""
        y = self._full_state(t)
        return self.x.as_array() + y[2:4] - y[:2]

    def energy_at(self, t: float) -> float:
        """∫₀ᵗ |Ẋ|²."""
        if self._dense:
            return float(self._full_state(t)[5])
        return float(np.interp(t, self.times, self.energy_integral))

    @property
    def end_state(self) -> np.ndarray:
        return self.states[-1]

    def penalty_values(self) -> np.ndarray:
        return (self.states[:, 0] * self.states[:, 1]) ** 2

    def bound_violation(self) -> float:
        """max over samples of |X(t)| − (|x| + √2·f_inf·t); ≤ 0 when the bound holds."""
        norms = np.linalg.norm(self.states, axis=1)
        bound = self.x.norm() + math.sqrt(2) * self.control.f_inf * self.times
        return float(np.max(norms - bound))

    def skorokhod_residual(self) -> float:
        """max |X + k − x − ∫f| over samples."""
        lhs = self.states + self.k_states - self.x.as_array() - self.drift_integral
        return float(np.max(np.abs(lhs)))

    def csv_rows(self):
        for t, s, k in zip(self.times, self.states, self.k_states):
            yield (float(t), float(s[0]), float(s[1]), float(k[0]), float(k[1]))

    def to_csv(self, path: str):
        return write_csv(path, ('t', 'x1', 'x2', 'k1', 'k2'), self.csv_rows())

    def to_manifest(self) -> Dict[str, Any]:
        """Run description: ε, start, horizon, control, integrator config and metadata."""
        cfg = self.integrator_config
        return {
            'eps': self.eps,
            'x': [self.x.x1, self.x.x2],
            'horizon': self.horizon,
            'control': self.control.to_dict(),
            'config': cfg.model_dump(mode='json') if cfg is not None else None,
            'samples': len(self.times),
            'metadata': self.metadata,
        }

    def to_json(self, path: str):
        return write_json(path, self.to_manifest())


class LimitSegment(BaseModel):
    """One interval of a limit trajectory, on a branch or at O."""

    t0: float = Field(..., description='Segment start')
    t1: float = Field(..., description='Segment end')
    location: Branch = Field(..., description='Branch, or O for a junction dwell')
    kind: str = Field(default='affine', description="'affine' or 'sampled'")
    r0: float = Field(default=0.0, description='Radius at t0 (affine)')
    speed: float = Field(default=0.0, description='dr/dt (affine)')
    sample_times: Optional[List[float]] = Field(default=None)
    sample_radii: Optional[List[float]] = Field(default=None)

    @validator('t1')
    def validate_interval(cls, v, values):
        """Validate t0 ≤ t1."""
        if 't0' in values and v < values['t0']:
            raise ValueError('segment must satisfy t0 <= t1')
        return v

    @validator('kind')
    def validate_kind(cls, v):
        """Validate the segment kind."""
        if v not in ('affine', 'sampled'):
            raise ValueError("kind must be 'affine' or 'sampled'")
        return v

    def radius_at(self, t: float) -> float:
        if self.location is Branch.O:
            return 0.0
        if self.kind == 'affine':
            return max(self.r0 + self.speed * (t - self.t0), 0.0)
        return float(np.interp(t, self.sample_times, self.sample_radii))

    def point_at(self, t: float) -> NetworkPoint:
        return NetworkPoint.on(self.location, self.radius_at(t))

    def max_speed(self) -> float:
        if self.location is Branch.O:
            return 0.0
        if self.kind == 'affine':
            return abs(self.speed)
        t = np.asarray(self.sample_times)
        r = np.asarray(self.sample_radii)
        dt = np.diff(t)
        mask = dt > 0
        if not np.any(mask):
            return 0.0
        return float(np.max(np.abs(np.diff(r)[mask] / dt[mask])))

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            't0': self.t0,
            't1': self.t1,
            'branch': self.location.value,
            'kind': self.kind,
        }
        if self.kind == 'affine':
            out['affine'] = {'r0': self.r0, 'speed': self.speed}
        else:
            out['samples'] = {'t': self.sample_times, 'r': self.sample_radii}
        return out


class LimitTrajectory(BaseModel):
    """Partition of (0, T] into junction dwells and branch runs."""

    segments: List[LimitSegment] = Field(..., description='Ordered segments')
    jump_from: Optional[PlanePoint] = Field(
        default=None, description='Initial point x when x ∉ Γ'
    )
    jump_to: Optional[NetworkPoint] = Field(
        default=None, description='X(0⁺) = x̄ = φ_d(x)'
    )
    f_inf: float = Field(default=1.0, description='Speed bound on every segment')

    @validator('segments')
    def validate_partition(cls, v):
        """Validate segments are contiguous."""
        if not v:
            raise ValueError('a limit trajectory needs at least one segment')
        for prev, nxt in zip(v, v[1:]):
            if abs(prev.t1 - nxt.t0) > TIME_TOL:
                raise ValueError('segments must be contiguous')
        return v

    @property
    def start_time(self) -> float:
        return self.segments[0].t0

    @property
    def horizon(self) -> float:
        return self.segments[-1].t1

    @property
    def k_jump(self) -> np.ndarray:
        """k(0⁺) = x − x̄."""
        if self.jump_from is None or self.jump_to is None:
            return np.zeros(2)
        return self.jump_from.as_array() - self.jump_to.as_array()

    def segment_at(self, t: float) -> LimitSegment:
        starts = [s.t0 for s in self.segments]
        j = max(bisect.bisect_right(starts, t) - 1, 0)
        seg = self.segments[j]
        # prefer the earlier segment at a shared endpoint
        if j > 0 and t <= self.segments[j - 1].t1 + TIME_TOL and t == seg.t0:
            seg = self.segments[j - 1]
        return seg

    def state_at(self, t: float) -> NetworkPoint:
        return self.segment_at(t).point_at(t)

    def plane_at(self, t: float) -> np.ndarray:
        return self.state_at(t).as_array()

    def sample(self, times) -> np.ndarray:
        return np.array([self.plane_at(float(t)) for t in times])

    def branches_visited(self) -> List[Branch]:
        return [s.location for s in self.segments]

    def max_speed(self) -> float:
        return max(s.max_speed() for s in self.segments)

    def speed_ok(self, tol: float = 1e-9) -> bool:
        return self.max_speed() <= self.f_inf + tol

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'segments': [s.to_dict() for s in self.segments],
            'f_inf': self.f_inf,
        }
        if self.jump_from is not None and self.jump_to is not None:
            out['jump'] = {
                'x': [self.jump_from.x1, self.jump_from.x2],
                'xbar': {
                    'branch': self.jump_to.branch.value,
                    'radius': self.jump_to.radius,
                },
            }
        return out

    @classmethod
    def stationary(cls, point: NetworkPoint, horizon: float) -> 'LimitTrajectory':
        return cls(
            segments=[
                LimitSegment(
                    t0=0.0, t1=horizon, location=point.branch, r0=point.radius
                )
            ]
        )

    @classmethod
    def from_samples(
        cls,
        times: np.ndarray,
        states: np.ndarray,
        tol: float,
        f_inf: float = 1.0,
    ) -> 'LimitTrajectory':
        """Extract segments from sampled states.

        A sample is at O when both coordinates are within tol; consecutive
        samples with the same label merge into one segment. Off-junction
        samples take the branch of their dominant coordinate.
        """
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float)
        labels = []
        radii = []
        for s in states:
            a1, a2 = abs(s[0]), abs(s[1])
            if a1 <= tol and a2 <= tol:
                labels.append(Branch.O)
                radii.append(0.0)
            elif a2 >= a1:
                labels.append(Branch.N if s[1] > 0 else Branch.S)
                radii.append(a2)
            else:
                labels.append(Branch.E if s[0] > 0 else Branch.W)
                radii.append(a1)

        segments: List[LimitSegment] = []
        start = 0
        for i in range(1, len(labels) + 1):
            if i < len(labels) and labels[i] == labels[start]:
                continue
            t0 = float(times[start])
            t1 = float(times[i]) if i < len(labels) else float(times[-1])
            location = labels[start]
            if location is Branch.O:
                segments.append(LimitSegment(t0=t0, t1=t1, location=Branch.O))
            else:
                stop = min(i + 1, len(labels))
                segments.append(
                    LimitSegment(
                        t0=t0,
                        t1=t1,
                        location=location,
                        kind='sampled',
                        sample_times=[float(t) for t in times[start:stop]],
                        sample_radii=[float(r) for r in radii[start:stop]],
                    )
                )
            start = i
        return cls(segments=segments, f_inf=f_inf)


class GradientFlowResult(BaseModel):
    """Path of Ż = −∇d(Z) up to the level d(Z) < stop_tol."""

    times: np.ndarray = Field(..., description='Sample times')
    path: np.ndarray = Field(..., description='Z(tᵢ), shape (n, 2)')
    limit: NetworkPoint = Field(..., description='Network point reached')
    stop_time: float = Field(..., description='First time with d(Z) < stop_tol')
    path_length: float = Field(..., description='Arc length of the sampled path')
    length_bound: float = Field(..., description='d(x)^(1−θ) / (ν(1−θ))')
    hyperbola_drift: float = Field(..., description='max |Z₂²−Z₁² − (x₂²−x₁²)|')
    monotone: bool = Field(..., description='d(Z) non-increasing along samples')

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True


__all__ = [
    'TrajectoryRecord',
    'LimitSegment',
    'LimitTrajectory',
    'GradientFlowResult',
]
