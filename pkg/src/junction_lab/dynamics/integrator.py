"""Integration of the ε-penalized controlled ODE Ẋ = f(X, α) − (1/ε)∇d(X)."""

from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..config.config import IntegratorConfig
from ..exceptions import (
    DomainError,
    IntegrationError,
    StepBudgetError,
    StepUnderflowError,
)
from ..geometry.penalty import invariance_threshold, penalty_array
from ..models.control import ControlSchedule
from ..models.points import PlanePoint
from ..models.trajectory import TrajectoryRecord

Drift = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Augmented state: X (2), ∫f (2), (1/ε)∫d (1), ∫|Ẋ|² (1), optional (1/ε)∫∇d (2).
_N_BASE = 6

_UNDERFLOW_MARKER = 'step size is less than spacing'


def eikonal_drift(x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """f(x, a) = a."""
    return a


def _rhs_factory(eps: float, drift: Drift, diagnose: bool):
    inv_eps = 1.0 / eps

    def rhs(t, y, a):
        x1, x2 = y[0], y[1]
        prod = x1 * x2
        g1, g2 = 2.0 * prod * x2, 2.0 * prod * x1
        f = drift(y[:2], a)
        v1, v2 = f[0] - inv_eps * g1, f[1] - inv_eps * g2
        out = [v1, v2, f[0], f[1], inv_eps * prod * prod, v1 * v1 + v2 * v2]
        if diagnose:
            out.extend((inv_eps * g1, inv_eps * g2))
        return out

    return rhs


def _layer_event(level: float):
    def event(t, y, a):
        return (y[0] * y[1]) ** 2 - level

    event.terminal = True
    event.direction = -1
    return event


class PerturbedIntegrator:
    """Piecewise solve_ivp driver for one (x, α, ε) triple.

    Every control breakpoint is an integration breakpoint. Outside the layer
    {d ≤ κε^(4/3)} the step is capped at max_step_factor·ε; once the path is
    inside the layer the cap is lifted when cfg.layer_relax is set.
    """

    def __init__(self, cfg: IntegratorConfig, drift: Optional[Drift] = None):
        self.cfg = cfg
        self.drift = drift or eikonal_drift
        self.logger = logger.bind(component='PerturbedIntegrator')

    def run(
        self,
        x: PlanePoint,
        alpha: ControlSchedule,
        eps: float,
        horizon: Optional[float] = None,
    ) -> TrajectoryRecord:
        if not eps > 0:
            raise DomainError('eps must be positive', details={'eps': eps})
        cfg = self.cfg
        horizon = cfg.horizon if horizon is None else horizon
        if not horizon > 0:
            raise DomainError('horizon must be positive', details={'horizon': horizon})

        level = invariance_threshold(alpha.f_inf, eps)
        rhs = _rhs_factory(eps, self.drift, cfg.diagnose_k)
        width = _N_BASE + (2 if cfg.diagnose_k else 0)
        y = np.zeros(width)
        y[:2] = x.as_array()

        in_layer = float(penalty_array(y[:2])) <= level
        layer_entry: Optional[float] = 0.0 if in_layer else None
        capped = cfg.max_step_factor * eps

        times: List[np.ndarray] = []
        values: List[np.ndarray] = []
        dense: List[Tuple[float, float, object]] = []
        n_steps = 0
        n_rhs = 0

        for t0, t1, a in alpha.pieces(horizon):
            start = t0
            while start < t1:
                relaxed = in_layer and cfg.layer_relax
                events = None if in_layer or not cfg.layer_relax else _layer_event(level)
                sol = solve_ivp(
                    rhs,
                    (start, t1),
                    y,
                    method=cfg.method,
                    rtol=cfg.rel_tol,
                    atol=cfg.abs_tol,
                    max_step=np.inf if relaxed else capped,
                    dense_output=True,
                    events=events,
                    args=(a,),
                )
                self._check(sol, start)
                n_steps += len(sol.t) - 1
                n_rhs += sol.nfev
                if n_steps > cfg.max_steps:
                    raise StepBudgetError(
                        f'Step budget of {cfg.max_steps} exhausted',
                        time=float(sol.t[-1]),
                        details={'eps': eps, 'steps': n_steps},
                    )

                skip = 1 if times else 0
                times.append(sol.t[skip:])
                values.append(sol.y[:, skip:].T)
                dense.append((float(sol.t[0]), float(sol.t[-1]), sol.sol))
                y = sol.y[:, -1].copy()

                if sol.status == 1:
                    in_layer = True
                    layer_entry = float(sol.t[-1])
                    self.logger.debug(f'Entered layer at t={layer_entry:.6g} (ε={eps})')
                start = float(sol.t[-1])

        t_all = np.concatenate(times)
        y_all = np.concatenate(values)
        t_all, y_all = self._merge_uniform(t_all, y_all, dense, horizon)

        states = y_all[:, :2]
        drift_integral = y_all[:, 2:4]
        k_states = x.as_array() + drift_integral - states
        record = TrajectoryRecord(
            eps=eps,
            x=x,
            control=alpha,
            horizon=horizon,
            times=t_all,
            states=states,
            k_states=k_states,
            drift_integral=drift_integral,
            penalty_integral=y_all[:, 4],
            energy_integral=y_all[:, 5],
            diagnostic_k=y_all[:, 6:8] if cfg.diagnose_k else None,
            integrator_config=cfg,
            metadata={
                'method': cfg.method,
                'rel_tol': cfg.rel_tol,
                'abs_tol': cfg.abs_tol,
                'max_step_factor': cfg.max_step_factor,
                'steps': n_steps,
                'rhs_evaluations': n_rhs,
                'layer_level': level,
                'layer_entry_time': layer_entry,
            },
        )
        record.attach_dense(dense)
        if cfg.diagnose_k:
            gap = float(np.max(np.abs(record.diagnostic_k - k_states)))
            record.metadata['k_quadrature_gap'] = gap
            self.logger.debug(f'k cross-check gap {gap:.3e}')
        self.logger.debug(
            f'Integrated ε={eps} to T={horizon}: {n_steps} steps, {n_rhs} evaluations'
        )
        return record

    def _check(self, sol, start: float) -> None:
        if sol.status >= 0:
            return
        time = float(sol.t[-1]) if len(sol.t) else start
        if _UNDERFLOW_MARKER in str(sol.message):
            raise StepUnderflowError(
                f'Step-size underflow at t={time}: {sol.message}', time=time
            )
        raise IntegrationError(f'Integration failed at t={time}: {sol.message}', time=time)

    def _merge_uniform(self, t_all, y_all, dense, horizon):
        n = self.cfg.min_samples
        if n < 2:
            return t_all, y_all
        grid = np.linspace(0.0, horizon, n)
        # keep grid points that are not within gap of an existing sample
        gap = 1e-9 * max(1.0, horizon)
        pos = np.clip(np.searchsorted(t_all, grid), 1, len(t_all) - 1)
        nearest = np.minimum(np.abs(grid - t_all[pos - 1]), np.abs(grid - t_all[pos]))
        extra = grid[nearest > gap]
        if extra.size == 0:
            return t_all, y_all
        starts = np.array([p[0] for p in dense])
        rows = []
        for t in extra:
            j = max(int(np.searchsorted(starts, t, side='right')) - 1, 0)
            t0, t1, sol = dense[j]
            rows.append(sol(min(max(t, t0), t1)))
        t_merged = np.concatenate((t_all, extra))
        y_merged = np.vstack((y_all, np.array(rows)))
        order = np.argsort(t_merged, kind='stable')
        return t_merged[order], y_merged[order]


def integrate_perturbed(
    x: PlanePoint,
    alpha: ControlSchedule,
    eps: float,
    cfg: Optional[IntegratorConfig] = None,
    drift: Optional[Drift] = None,
    horizon: Optional[float] = None,
) -> TrajectoryRecord:
    """Solve the ε-penalized ODE on [0, T] and accumulate k = x + ∫f − X.

    Args:
        x: Initial point
        alpha: Open-loop control
        eps: Penalty parameter ε > 0
        cfg: Integrator settings; defaults when omitted
        drift: Drift f(x, a); f = a when omitted
        horizon: Horizon T; cfg.horizon when omitted

    Returns:
        TrajectoryRecord with samples, dense output and run metadata

    Raises:
        DomainError: If eps or the horizon is not positive
        StepBudgetError: If the solver exceeds cfg.max_steps
        StepUnderflowError: If the step size collapses
    """
    integrator = PerturbedIntegrator(cfg or IntegratorConfig(), drift)
    return integrator.run(x, alpha, eps, horizon)


def first_time(
    traj: TrajectoryRecord, func: Callable[[np.ndarray], float]
) -> Optional[float]:
    """First sample-resolved time with func(X) ≤ 0, refined on the dense output."""
    values = np.array([func(s) for s in traj.states])
    hits = np.nonzero(values <= 0)[0]
    if hits.size == 0:
        return None
    i = int(hits[0])
    if i == 0:
        return float(traj.times[0])
    lo, hi = float(traj.times[i - 1]), float(traj.times[i])
    if not traj.has_dense:
        return hi

    def g(t):
        return func(traj.state_at(t))

    g_lo, g_hi = g(lo), g(hi)
    if g_hi > 0 or g_lo <= 0:
        return hi
    return float(brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps))


def entry_time(traj: TrajectoryRecord, lam: float) -> Optional[float]:
    """inf{t : d(X(t)) ≤ λ}, or None when not reached within the horizon.

    Args:
        traj: Integrated trajectory
        lam: Level λ > 0

    Returns:
        Entry time refined on the dense output, or None
    """
    if not lam > 0:
        raise DomainError('lam must be positive', details={'lam': lam})
    return first_time(traj, lambda s: float((s[0] * s[1]) ** 2) - lam)
