"""Costs showing V̄ < V_Γ when ℓ depends on the control.

From e_N the off-network control e_{5π/4} slides down N, through O and out
along W. With ℓ(x, a) = 2 + a₁ + a₂ + |x₂| its cost undercuts every control
confined to the network.
"""

import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..exceptions import DomainError
from ..limits.junction import constant_control_limit
from ..models.control import ControlSchedule
from ..models.points import Branch, NetworkPoint
from ..models.value import CostField, ValueProblem
from .cost import cost_functional

ROOT2 = math.sqrt(2.0)


def upper_path_cost(lam: float) -> float:
    """(λ√2(3−√2) − 1 + e^(−λ√2)) / (λ²√2)."""
    return (lam * ROOT2 * (3 - ROOT2) - 1 + math.exp(-lam * ROOT2)) / (lam**2 * ROOT2)


def network_lower_bound(lam: float) -> float:
    """(2λ − 1 + e^(−λ)) / λ²."""
    return (2 * lam - 1 + math.exp(-lam)) / lam**2


class CounterexampleResult(BaseModel):
    lam: float
    upper: float = Field(..., description='Closed-form cost of the e_{5π/4} path')
    lower: float = Field(..., description='Lower bound over network-confined controls')
    numeric_upper: float = Field(..., description='Quadrature of the same path cost')
    tail: float = Field(..., description='Tail bound of the quadrature')

    @property
    def strict(self) -> bool:
        return self.upper < self.lower

    @property
    def numeric_gap(self) -> float:
        return abs(self.numeric_upper - self.upper)


def counterexample_costs(
    lam: float, horizon: Optional[float] = None, quad_tol: float = 1e-10
) -> CounterexampleResult:
    """Both closed forms and a quadrature re-derivation of the upper one.

    The default horizon 40·max(1, 1/λ) keeps the tail below 4e^(−40)/λ.
    """
    if not lam > 0:
        raise DomainError('lambda must be positive', details={'lambda': lam})
    if horizon is None:
        horizon = 40.0 * max(1.0, 1.0 / lam)
    theta = 1.25 * math.pi
    path = constant_control_limit(NetworkPoint.on(Branch.N, 1.0), theta, horizon)
    prob = ValueProblem(lam=lam, cost=CostField.counterexample(), mode='counterexample')
    evaluation = cost_functional(
        path, prob, control=ControlSchedule.heading(theta), quad_tol=quad_tol
    )
    return CounterexampleResult(
        lam=lam,
        upper=upper_path_cost(lam),
        lower=network_lower_bound(lam),
        numeric_upper=evaluation.value,
        tail=evaluation.tail,
    )


def counterexample_sweep(
    n: int, lam_min: float = 0.1, lam_max: float = 10.0
) -> List[CounterexampleResult]:
    """counterexample_costs on n log-spaced discount rates."""
    return [counterexample_costs(float(lam)) for lam in np.geomspace(lam_min, lam_max, n)]
