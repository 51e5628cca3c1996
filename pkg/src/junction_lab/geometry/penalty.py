"""The penalty d(x) = x₁²x₂², its gradient and the constants attached to it."""

import math
from typing import Union

import numpy as np
from pydantic import BaseModel, Field

from ..models.points import PlanePoint

PointLike = Union[PlanePoint, np.ndarray, tuple, list]


class PenaltyField(BaseModel):
    """Constants of the penalty: |∇d| ≥ ν·d^θ and the invariance coefficient."""

    loja_nu: float = Field(default=2 * math.sqrt(2), description='Łojasiewicz ν')
    loja_theta: float = Field(default=0.75, description='Łojasiewicz θ')
    kappa_coeff: float = Field(
        default=2 ** (-4 / 3), description='κ / |f|∞^(4/3)'
    )

    class Config:
        """Pydantic configuration."""

        frozen = True


PENALTY = PenaltyField()


def _xy(p: PointLike) -> np.ndarray:
    if isinstance(p, PlanePoint):
        return p.as_array()
    return np.asarray(p, dtype=float)


def penalty_array(xy: np.ndarray) -> np.ndarray:
    """d on an (..., 2) array."""
    xy = np.asarray(xy, dtype=float)
    return (xy[..., 0] * xy[..., 1]) ** 2


def penalty_gradient_array(xy: np.ndarray) -> np.ndarray:
    """∇d = (2x₁x₂², 2x₁²x₂) on an (..., 2) array."""
    xy = np.asarray(xy, dtype=float)
    x1, x2 = xy[..., 0], xy[..., 1]
    prod = x1 * x2
    return np.stack((2 * prod * x2, 2 * prod * x1), axis=-1)


def penalty(p: PointLike) -> float:
    """d(x) = x₁²x₂²; zero exactly on Γ."""
    return float(penalty_array(_xy(p)))


def penalty_gradient(p: PointLike) -> PlanePoint:
    """∇d(x) = (2x₁x₂², 2x₁²x₂).

    Args:
        p: PlanePoint or (x1, x2)

    Returns:
        The gradient as a PlanePoint; zero on Γ
    """
    return PlanePoint.from_array(penalty_gradient_array(_xy(p)))


def kappa(f_inf: float) -> float:
    """κ = 2^(−4/3)·|f|∞^(4/3)."""
    if f_inf < 0:
        raise ValueError('f_inf must be nonnegative')
    return PENALTY.kappa_coeff * f_inf ** (4 / 3)


def invariance_threshold(f_inf: float, eps: float) -> float:
    """Smallest level λ = κ·ε^(4/3) for which {d ≤ λ} is forward invariant.

    Args:
        f_inf: Sup bound |f|∞ of the drift
        eps: Penalty parameter ε > 0

    Returns:
        The level λ

    Raises:
        ValueError: If eps is not positive
    """
    if not eps > 0:
        raise ValueError('eps must be positive')
    return kappa(f_inf) * eps ** (4 / 3)


class IdentityReport(BaseModel):
    """Worst relative residuals of the penalty identities over a sample."""

    n_points: int
    euler_identity: float = Field(..., description='⟨x,∇d⟩ = 4d')
    gradient_norm: float = Field(..., description='|∇d| = 2√d·|x|')
    norm_lower_bound: float = Field(..., description='|x| ≥ √2·d^(1/4)')
    lojasiewicz: float = Field(..., description='|∇d| ≥ 2√2·d^(3/4)')

    def passed(self, rel_tol: float = 1e-12) -> bool:
        return max(
            self.euler_identity,
            self.gradient_norm,
            self.norm_lower_bound,
            self.lojasiewicz,
        ) <= rel_tol


def check_identities(points: np.ndarray) -> IdentityReport:
    """Evaluate the four identities at every row of an (n, 2) array.

    Equalities report |lhs − rhs| / max(|rhs|, 1); inequalities report the
    relative amount by which the lower bound exceeds the left side (0 if none).
    """
    xy = np.asarray(points, dtype=float)
    d = penalty_array(xy)
    grad = penalty_gradient_array(xy)
    norm_x = np.hypot(xy[:, 0], xy[:, 1])
    norm_grad = np.hypot(grad[:, 0], grad[:, 1])

    def rel(lhs, rhs):
        return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1.0)))

    def below(lhs, lower):
        excess = (lower - lhs) / np.maximum(np.abs(lower), 1.0)
        return float(max(np.max(excess), 0.0))

    return IdentityReport(
        n_points=len(xy),
        euler_identity=rel(np.sum(xy * grad, axis=1), 4 * d),
        gradient_norm=rel(norm_grad, 2 * np.sqrt(d) * norm_x),
        norm_lower_bound=below(norm_x, math.sqrt(2) * d**0.25),
        lojasiewicz=below(norm_grad, PENALTY.loja_nu * d**PENALTY.loja_theta),
    )
