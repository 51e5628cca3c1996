"""Cost data, value problems and discrete value functions."""

import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, validator
from scipy.interpolate import RegularGridInterpolator

from .points import Branch, EDGE_BRANCHES, NetworkPoint
from ..utils.formatting import write_csv, write_json

COST_KINDS = ('constant', 'distance', 'capped_distance', 'counterexample')


class CostField(BaseModel):
    """Running cost ℓ with its sup bound M on the working region.

    The counterexample cost ℓ(x, a) = 2 + a₁ + a₂ + |x₂| depends on the control;
    the others depend on the state only.
    """

    kind: str = Field(..., description='One of constant, distance, capped_distance, counterexample')
    value: float = Field(default=1.0, description='Constant level, or the cap')
    bound: float = Field(..., description='M with |ℓ| ≤ M on the working region')
    lipschitz: Optional[float] = Field(default=None, description='Lipschitz constant of ℓ')

    class Config:
        """Pydantic configuration."""

        frozen = True

    @validator('kind')
    def validate_kind(cls, v):
        """Validate the cost kind."""
        if v not in COST_KINDS:
            raise ValueError(f'Unknown cost {v!r}, expected one of {COST_KINDS}')
        return v

    @validator('bound')
    def validate_bound(cls, v):
        """Validate M is positive."""
        if not v > 0:
            raise ValueError('cost bound M must be positive')
        return v

    @classmethod
    def constant(cls, c: float = 1.0) -> 'CostField':
        return cls(kind='constant', value=c, bound=max(abs(c), 1e-300), lipschitz=0.0)

    @classmethod
    def distance(cls, radius: float = 10.0) -> 'CostField':
        """ℓ(x) = |x|, bounded by the radius of the working region."""
        return cls(kind='distance', bound=radius, lipschitz=1.0)

    @classmethod
    def capped_distance(cls, cap: float = 2.0) -> 'CostField':
        return cls(kind='capped_distance', value=cap, bound=cap, lipschitz=1.0)

    @classmethod
    def counterexample(cls, bound: float = 4.0) -> 'CostField':
        return cls(kind='counterexample', bound=bound, lipschitz=1.0)

    @classmethod
    def from_name(cls, name: str, cap: float = 2.0, radius: float = 10.0) -> 'CostField':
        if name == 'constant':
            return cls.constant()
        if name == 'distance':
            return cls.distance(radius)
        if name == 'capped_distance':
            return cls.capped_distance(cap)
        if name == 'counterexample':
            return cls.counterexample()
        raise ValueError(f'Unknown cost {name!r}, expected one of {COST_KINDS}')

    @property
    def control_dependent(self) -> bool:
        return self.kind == 'counterexample'

    def evaluate(self, xy, a=None) -> np.ndarray:
        """ℓ at points of shape (..., 2); a is required for the counterexample."""
        xy = np.asarray(xy, dtype=float)
        if self.kind == 'constant':
            return np.full(xy.shape[:-1], self.value)
        norm = np.hypot(xy[..., 0], xy[..., 1])
        if self.kind == 'distance':
            return norm
        if self.kind == 'capped_distance':
            return np.minimum(norm, self.value)
        if a is None:
            raise ValueError('the counterexample cost needs the control value')
        a = np.asarray(a, dtype=float)
        return 2.0 + a[..., 0] + a[..., 1] + np.abs(xy[..., 1])

    def at(self, x, a=None) -> float:
        return float(self.evaluate(np.asarray(x, dtype=float), a))


class ValueProblem(BaseModel):
    """Discount rate λ and running cost ℓ of an infinite-horizon problem."""

    lam: float = Field(..., description='Discount rate λ')
    cost: CostField = Field(..., description='Running cost')
    mode: str = Field(default='eikonal', description="'eikonal' or 'counterexample'")

    class Config:
        """Pydantic configuration."""

        frozen = True

    @validator('lam')
    def validate_lam(cls, v):
        """Validate λ is positive."""
        if not v > 0:
            raise ValueError('lambda must be positive')
        return v

    @validator('mode')
    def validate_mode(cls, v, values):
        """Validate the mode matches the cost."""
        if v not in ('eikonal', 'counterexample'):
            raise ValueError("mode must be 'eikonal' or 'counterexample'")
        cost = values.get('cost')
        if cost is not None and cost.control_dependent != (v == 'counterexample'):
            raise ValueError(f'cost {cost.kind!r} does not match mode {v!r}')
        return v

    @property
    def value_bound(self) -> float:
        """M/λ."""
        return self.cost.bound / self.lam


class GridValueFunction(BaseModel):
    """V^ε at the nodes of a uniform grid, values indexed [i_x, i_y]."""

    eps: float
    lam: float
    h: float
    x_nodes: np.ndarray
    y_nodes: np.ndarray
    values: np.ndarray
    iterations: int
    residual: float
    boundary_slack: float = Field(default=0.0, description='M·h/λ when foot points were clamped')
    value_bound: float = Field(..., description='M/λ')

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    def evaluate(self, points) -> np.ndarray:
        """Bilinear interpolation at points of shape (..., 2)."""
        interp = RegularGridInterpolator(
            (self.x_nodes, self.y_nodes), self.values, method='linear',
            bounds_error=False, fill_value=None,
        )
        return interp(np.asarray(points, dtype=float))

    def nodes(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.x_nodes, self.y_nodes, indexing='ij')
        return np.stack((gx, gy), axis=-1)

    def region_mask(self, region) -> np.ndarray:
        x_min, x_max, y_min, y_max = region
        tol = 1e-9 * self.h
        mx = (self.x_nodes >= x_min - tol) & (self.x_nodes <= x_max + tol)
        my = (self.y_nodes >= y_min - tol) & (self.y_nodes <= y_max + tol)
        return mx[:, None] & my[None, :]

    def within_bound(self, tol: float = 1e-9) -> bool:
        return float(np.max(np.abs(self.values))) <= self.value_bound * (1 + tol) + tol

    def csv_rows(self):
        for i, x in enumerate(self.x_nodes):
            for j, y in enumerate(self.y_nodes):
                yield (float(x), float(y), float(self.values[i, j]))

    def to_csv(self, path: str):
        return write_csv(path, ('x1', 'x2', 'u'), self.csv_rows())


class EdgeValueFunction(BaseModel):
    """V_Γ on the four branches, sampled at r = h, 2h, ..., R, plus u(O)."""

    lam: float
    h: float
    radii: np.ndarray = Field(..., description='Branch node radii h..R')
    junction_value: float
    branch_values: Dict[Branch, np.ndarray]
    iterations: int
    residual: float
    value_bound: float
    boundary_slack: np.ndarray = Field(
        ..., description='M·e^(−λ(R − r))/λ per branch node, from the truncation at R'
    )

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    @property
    def radius(self) -> float:
        return float(self.radii[-1])

    def branch_profile(self, branch: Branch):
        """(r, u) including the junction node at r = 0."""
        return (
            np.concatenate(([0.0], self.radii)),
            np.concatenate(([self.junction_value], self.branch_values[branch])),
        )

    def evaluate(self, point: NetworkPoint) -> float:
        if point.is_junction():
            return self.junction_value
        r, u = self.branch_profile(point.branch)
        return float(np.interp(point.radius, r, u))

    def slack_at(self, point: NetworkPoint) -> float:
        """Slack of the truncation at R, M·e^(−λ(R − r))/λ, at a network point."""
        r = 0.0 if point.is_junction() else point.radius
        return self.value_bound * math.exp(-self.lam * (self.radius - min(r, self.radius)))

    def evaluate_codes(self, codes: np.ndarray, radii: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; codes index (O, E, N, W, S)."""
        out = np.full(np.shape(radii), self.junction_value, dtype=float)
        for code, branch in enumerate(EDGE_BRANCHES, start=1):
            mask = codes == code
            if np.any(mask):
                r, u = self.branch_profile(branch)
                out[mask] = np.interp(radii[mask], r, u)
        return out

    def junction_gap(self) -> float:
        """max over branches of |u_i(h) − u(O)|."""
        return max(
            abs(float(self.branch_values[b][0]) - self.junction_value)
            for b in EDGE_BRANCHES
        )

    def csv_rows(self):
        yield ('O', 0.0, self.junction_value)
        for branch in EDGE_BRANCHES:
            for r, u in zip(self.radii, self.branch_values[branch]):
                yield (branch.value, float(r), float(u))

    def to_csv(self, path: str):
        return write_csv(path, ('branch', 'r', 'u'), self.csv_rows())


class ChainMargins(BaseModel):
    """Smallest margins of the three value inequalities over the probe nodes."""

    eps: float
    lower: float = Field(..., description='min V^ε(x) − V̄(x̄)')
    upper: float = Field(..., description='min V̄(x̄) − V^ε(x̄) + slack')
    layer: float = Field(..., description='min V^ε(x̄) + C·ε^(1/4) + slack − V^ε(x)')
    modulus: float = Field(..., description='Empirical m_R(ε) = max(0, −lower − slack)')


class ConvergenceReport(BaseModel):
    """Errors ‖V^ε − V̄∘φ_d‖ over the test region and the value-chain margins."""

    eps: List[float]
    sup_errors: List[float]
    chain_margins: List[ChainMargins]
    lipschitz_fit: List[float]
    slack: float
    monotone: bool
    modulus_monotone: bool
    chains_ok: bool
    lipschitz_stable: bool

    @validator('sup_errors')
    def validate_errors(cls, v):
        """Validate errors are nonnegative."""
        if any(e < 0 or math.isnan(e) for e in v):
            raise ValueError('sup errors must be nonnegative numbers')
        return v

    @property
    def passed(self) -> bool:
        return self.monotone and self.chains_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            'eps': self.eps,
            'sup_error': self.sup_errors,
            'chain_margins': [m.model_dump() for m in self.chain_margins],
            'lipschitz_fit': self.lipschitz_fit,
            'slack': self.slack,
            'monotone': self.monotone,
            'modulus_monotone': self.modulus_monotone,
            'chains_ok': self.chains_ok,
            'lipschitz_stable': self.lipschitz_stable,
        }

    def to_json(self, path: str):
        return write_json(path, self.to_dict())


__all__ = [
    'COST_KINDS',
    'CostField',
    'ValueProblem',
    'GridValueFunction',
    'EdgeValueFunction',
    'ChainMargins',
    'ConvergenceReport',
]
