"""A priori estimates on ε-trajectories as runtime checks."""

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config.config import IntegratorConfig
from ..exceptions import DomainError, EstimateViolationError
from ..models.control import ControlSchedule
from ..models.points import PlanePoint
from ..models.trajectory import TrajectoryRecord
from .integrator import first_time, integrate_perturbed


class EstimateCheck(BaseModel):
    """Outcome of one estimate over all sampled pairs."""

    name: str = Field(..., description='Estimate identifier')
    passed: bool = Field(..., description='Holds within tolerance')
    margin: float = Field(..., description='Worst slack (negative when violated)')
    pair: Optional[Tuple[float, float]] = Field(
        default=None, description='Offending (t₁, t₂), if any'
    )
    value: Optional[float] = Field(default=None, description='Reported quantity')
    bound: Optional[float] = Field(default=None, description='Reported bound')


class AprioriReport(BaseModel):
    """All a priori checks for one trajectory."""

    eps: float
    checks: List[EstimateCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> EstimateCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def violations(self) -> List[EstimateCheck]:
        return [c for c in self.checks if not c.passed]

    def raise_for_violation(self) -> None:
        for c in self.violations():
            raise EstimateViolationError(
                f'Estimate {c.name} violated by {-c.margin:.3e} on pair {c.pair}',
                estimate=c.name,
                pair=c.pair,
            )


def _running_increase(h: np.ndarray) -> Tuple[float, int, int]:
    """max over i ≤ j of h[j] − h[i], with the maximizing pair."""
    running_min = np.minimum.accumulate(h)
    argmins = np.zeros(len(h), dtype=int)
    best = 0
    for j in range(1, len(h)):
        if h[j] < h[best]:
            best = j
        argmins[j] = best
    rise = h - running_min
    j = int(np.argmax(rise))
    return float(rise[j]), int(argmins[j]), j


def _default_slack(traj: TrajectoryRecord, scale: float) -> float:
    rtol = traj.metadata.get('rel_tol', 1e-8)
    atol = traj.metadata.get('abs_tol', 1e-10)
    return 100.0 * (rtol * max(1.0, scale) + atol)


def check_apriori_estimates(
    traj: TrajectoryRecord,
    eta: Optional[float] = None,
    slack: Optional[float] = None,
) -> AprioriReport:
    """Run the sublevel growth, penalty-integral, energy and size checks.

    (a) d(X(t₂)) − d(X(t₁)) ≤ (t₂−t₁)·f_inf²·ε/2
    (b) (1/ε)∫d ≤ C(t₂−t₁) + ¼(√d(X(t₁)) − √d(X(t₂))), C = (|x|+f_inf·T)·f_inf·√2
    (c) ∫_η^T |Ẋ|² ≤ 2(f_inf²(T−η) + (d(X(η)) − d(X(T)))/ε), reported
    plus |X(t)| ≤ |x| + √2·f_inf·t and |k(t)| ≤ 2|x| + (1+√2)·f_inf·t.
    """
    t = traj.times
    d = traj.penalty_values()
    f_inf = traj.control.f_inf
    eps = traj.eps
    horizon = traj.horizon
    x_norm = traj.x.norm()
    checks: List[EstimateCheck] = []

    tol_a = slack if slack is not None else _default_slack(traj, float(np.max(d)))
    rise, i, j = _running_increase(d - 0.5 * f_inf**2 * eps * t)
    checks.append(
        EstimateCheck(
            name='penalty_growth',
            passed=rise <= tol_a,
            margin=tol_a - rise,
            pair=(float(t[i]), float(t[j])) if rise > tol_a else None,
            value=rise,
            bound=tol_a,
        )
    )

    if traj.penalty_integral is not None:
        c_const = (x_norm + f_inf * horizon) * f_inf * math.sqrt(2)
        integral = traj.penalty_integral
        h = integral - c_const * t + 0.25 * np.sqrt(d)
        tol_b = (
            slack
            if slack is not None
            else _default_slack(traj, float(np.max(np.abs(integral))))
        )
        rise, i, j = _running_increase(h)
        checks.append(
            EstimateCheck(
                name='penalty_integral',
                passed=rise <= tol_b,
                margin=tol_b - rise,
                pair=(float(t[i]), float(t[j])) if rise > tol_b else None,
                value=float(integral[-1]),
                bound=c_const,
            )
        )

    if traj.energy_integral is not None:
        eta = 0.1 * horizon if eta is None else eta
        energy = traj.energy_at(horizon) - traj.energy_at(eta)
        d_eta = float(np.interp(eta, t, d))
        if traj.has_dense:
            s = traj.state_at(eta)
            d_eta = float((s[0] * s[1]) ** 2)
        bound = 2.0 * (f_inf**2 * (horizon - eta) + (d_eta - d[-1]) / eps)
        tol_c = slack if slack is not None else _default_slack(traj, abs(bound))
        ok = bool(np.isfinite(energy)) and energy <= bound + tol_c
        checks.append(
            EstimateCheck(
                name='energy',
                passed=ok,
                margin=bound + tol_c - energy,
                pair=(eta, horizon) if not ok else None,
                value=energy,
                bound=bound,
            )
        )

    tol_x = _default_slack(traj, x_norm + f_inf * horizon)
    excess = traj.bound_violation()
    checks.append(
        EstimateCheck(
            name='position_bound',
            passed=excess <= tol_x,
            margin=tol_x - excess,
            value=excess,
        )
    )

    k_norm = np.linalg.norm(traj.k_states, axis=1)
    k_excess = float(
        np.max(k_norm - (2 * x_norm + (1 + math.sqrt(2)) * f_inf * t))
    )
    checks.append(
        EstimateCheck(
            name='k_bound',
            passed=k_excess <= tol_x,
            margin=tol_x - k_excess,
            value=k_excess,
        )
    )
    return AprioriReport(eps=eps, checks=checks)


class InvarianceCheck(BaseModel):
    """Forward invariance of {d ≤ λ} along a sampled path."""

    level: float
    entered_at: Optional[float] = Field(default=None, description='First entry')
    max_ratio: float = Field(
        default=0.0, description='max d/λ after the first entry'
    )
    passed: bool = True


def check_invariance(
    traj: TrajectoryRecord, lam: float, rel_tol: float = 1e-6
) -> InvarianceCheck:
    """Once d(X) ≤ λ, d(X) stays ≤ λ(1 + rel_tol) at every later sample."""
    d = traj.penalty_values()
    inside = np.nonzero(d <= lam)[0]
    if inside.size == 0:
        return InvarianceCheck(level=lam)
    i = int(inside[0])
    ratio = float(np.max(d[i:]) / lam)
    return InvarianceCheck(
        level=lam,
        entered_at=float(traj.times[i]),
        max_ratio=ratio,
        passed=ratio <= 1 + rel_tol,
    )


def reach_time_bound(x: PlanePoint, eps: float, gamma: float) -> float:
    """Upper bound 4·d(x)^(1/4)·ε^(1−γ) on the entry time into Z(ε^(4γ/3))."""
    d = (x.x1 * x.x2) ** 2
    return 4.0 * d**0.25 * eps ** (1 - gamma)


def reach_time_validity(f_inf: float, gamma: float) -> float:
    """Largest ε for which the entry-time bound applies: (4|f|∞/7)^(−1/(1−γ))."""
    if f_inf == 0:
        return math.inf
    return (4 * f_inf / 7) ** (-1 / (1 - gamma))


def level_entry_constant(x: PlanePoint, f_inf: float, horizon: float) -> float:
    """C = (|x| + |f|∞)·T + ¼·d(x)^(1/2) in the entry time bound C·ε/λ."""
    d = (x.x1 * x.x2) ** 2
    return (x.norm() + f_inf) * horizon + 0.25 * math.sqrt(d)


def equilibrium_point(theta: float, eps: float) -> PlanePoint:
    """Rest point of Ẋ = e_θ − (1/ε)∇d(X) in the open third quadrant."""
    c, s = math.cos(theta), math.sin(theta)
    if not (c < 0 and s < 0):
        raise DomainError(
            'equilibrium formula needs cos θ < 0 and sin θ < 0',
            details={'theta': theta},
        )
    scale = eps ** (1 / 3)
    x1 = -((s * s / (2 * -c)) ** (1 / 3)) * scale
    x2 = -((c * c / (2 * -s)) ** (1 / 3)) * scale
    return PlanePoint(x1=x1, x2=x2)


def field_residual(p: PlanePoint, theta: float, eps: float) -> float:
    """|e_θ − (1/ε)∇d(p)|."""
    x1, x2 = p.x1, p.x2
    g1, g2 = 2 * x1 * x2 * x2, 2 * x1 * x1 * x2
    return math.hypot(math.cos(theta) - g1 / eps, math.sin(theta) - g2 / eps)


class CrossingResult(BaseModel):
    """First crossing of the E–W axis from e_N under the control e_θ."""

    theta: float
    eps: float
    t_eps: float = Field(..., description='First time with X₂ = 0')
    t_bound: float = Field(..., description='1/(−sin θ)')
    eta: float = Field(..., description='X₁(t_ε)')
    lower_bound: float = Field(..., description='−(3/2)(−cos θ)/(−sin θ)^(2/3)·ε^(1/3)')

    @property
    def ratio(self) -> float:
        return self.eta / self.eps ** (1 / 3)


def crossing_abscissa(
    theta: float, eps: float, cfg: Optional[IntegratorConfig] = None
) -> CrossingResult:
    """Integrate from e_N with e_θ and report η_ε = X₁(t_ε)."""
    s, c = math.sin(theta), math.cos(theta)
    if not (s < 0 and c <= 0):
        raise DomainError(
            'crossing abscissa needs θ in (π, 3π/2]', details={'theta': theta}
        )
    t_bound = 1.0 / -s
    traj = integrate_perturbed(
        PlanePoint(x1=0.0, x2=1.0),
        ControlSchedule.heading(theta),
        eps,
        cfg,
        horizon=1.5 * t_bound,
    )
    t_eps = first_time(traj, lambda state: float(state[1]))
    if t_eps is None:
        raise DomainError(
            'trajectory did not reach the E-W axis', details={'theta': theta, 'eps': eps}
        )
    eta = float(traj.state_at(t_eps)[0])
    return CrossingResult(
        theta=theta,
        eps=eps,
        t_eps=t_eps,
        t_bound=t_bound,
        eta=eta,
        lower_bound=-1.5 * (-c) / (-s) ** (2 / 3) * eps ** (1 / 3),
    )


def scaling_discrepancy(
    x: PlanePoint,
    theta: float,
    rho: float,
    eps: float,
    horizon: float,
    cfg: Optional[IntegratorConfig] = None,
) -> float:
    """max_t |X^{x,θ,ε}(t) − (1/ρ)·X^{ρx,θ,ρ³ε}(ρt)| at the base sample times."""
    alpha = ControlSchedule.heading(theta)
    base = integrate_perturbed(x, alpha, eps, cfg, horizon=horizon)
    scaled = integrate_perturbed(
        PlanePoint(x1=rho * x.x1, x2=rho * x.x2),
        alpha,
        rho**3 * eps,
        cfg,
        horizon=rho * horizon,
    )
    gaps = [
        np.linalg.norm(state - scaled.state_at(rho * t) / rho)
        for t, state in zip(base.times, base.states)
    ]
    return float(max(gaps))


def self_convergence(
    x: PlanePoint,
    alpha: ControlSchedule,
    eps: float,
    cfg: Optional[IntegratorConfig] = None,
) -> Tuple[float, float]:
    """Endpoint change when both tolerances are refined by 10×, and the coarse tolerance."""
    cfg = cfg or IntegratorConfig()
    fine = cfg.model_copy(
        update={'rel_tol': cfg.rel_tol / 10, 'abs_tol': cfg.abs_tol / 10}
    )
    coarse_end = integrate_perturbed(x, alpha, eps, cfg).end_state
    fine_end = integrate_perturbed(x, alpha, eps, fine).end_state
    scale = max(1.0, float(np.linalg.norm(coarse_end)))
    return float(np.linalg.norm(coarse_end - fine_end)), cfg.rel_tol * scale + cfg.abs_tol
