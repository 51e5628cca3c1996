"""Discounted cost of a trajectory with a certified tail bound."""

import math
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import quad

from ..exceptions import DomainError
from ..models.control import ControlSchedule
from ..models.trajectory import LimitTrajectory, TrajectoryRecord
from ..models.value import ValueProblem

Path = Union[TrajectoryRecord, LimitTrajectory]


class CostEvaluation(BaseModel):
    """∫₀ᵀ e^(−λt)ℓ dt and the bound M·e^(−λT)/λ on the rest."""

    value: float
    tail: float = Field(..., description='Bound on the omitted part beyond T')
    horizon: float
    quad_error: float = Field(default=0.0, description='Summed quad error estimates')

    @property
    def interval(self):
        """Bracket [value − tail, value + tail] for the infinite-horizon cost."""
        return self.value - self.tail, self.value + self.tail


def tail_bound(bound: float, lam: float, horizon: float) -> float:
    """M·e^(−λT)/λ."""
    return bound * math.exp(-lam * horizon) / lam


def _state_function(path: Path):
    if isinstance(path, TrajectoryRecord):
        return path.state_at
    return path.plane_at


def cost_functional(
    path: Path,
    prob: ValueProblem,
    control: Optional[ControlSchedule] = None,
    quad_tol: float = 1e-10,
) -> CostEvaluation:
    """Discounted running cost along path over [0, T], piece by piece.

    The integrand is split at segment ends and control breakpoints so quad
    only ever sees smooth pieces.

    Args:
        path: ε-trajectory or limit trajectory
        prob: Discount and running cost
        control: Control for control-dependent costs; the record's own by default
        quad_tol: Absolute and relative quad tolerance

    Returns:
        CostEvaluation with the value, the quadrature error and the tail bound
    """
    if isinstance(path, TrajectoryRecord):
        horizon = path.horizon
        control = control or path.control
        cuts = set(path.times[:1].tolist()) | {horizon}
    else:
        horizon = path.horizon
        cuts = {s.t0 for s in path.segments} | {path.horizon}
    if prob.cost.control_dependent and control is None:
        raise DomainError('a control-dependent cost needs the control schedule')
    if control is not None:
        cuts |= {b for b in control.breakpoints if b < horizon}
    cuts = sorted(c for c in cuts if 0.0 <= c <= horizon)

    state = _state_function(path)
    lam = prob.lam
    cost = prob.cost

    total = 0.0
    error = 0.0
    for t0, t1 in zip(cuts, cuts[1:]):
        if t1 <= t0:
            continue
        # evaluate the control inside the piece, never at its right end
        mid_a = control.value_at(0.5 * (t0 + t1)) if control is not None else None

        def piece(t, a=mid_a):
            return math.exp(-lam * t) * cost.at(state(t), a)

        value, err = quad(piece, t0, t1, epsabs=quad_tol, epsrel=quad_tol, limit=200)
        total += value
        error += err

    return CostEvaluation(
        value=total,
        tail=tail_bound(cost.bound, lam, horizon),
        horizon=horizon,
        quad_error=error,
    )


def discounted_constant(c: float, lam: float, horizon: float = np.inf) -> float:
    """∫₀ᵀ e^(−λt)c dt."""
    if math.isinf(horizon):
        return c / lam
    return c * (1.0 - math.exp(-lam * horizon)) / lam
