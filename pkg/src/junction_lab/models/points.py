"""Points of the plane and points of the cross-shaped network Γ."""

import math
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field, validator


class Branch(str, Enum):
    """Branch labels of Γ; O is the junction."""

    E = 'E'
    N = 'N'
    W = 'W'
    S = 'S'
    O = 'O'  # noqa: E741

    @property
    def direction(self) -> np.ndarray:
        """Unit vector e_i of the branch (zero for O)."""
        return np.array(_DIRECTIONS[self], dtype=float)

    @property
    def normal(self) -> np.ndarray:
        """Rotated unit vector e_i⊥."""
        e = _DIRECTIONS[self]
        return np.array((-e[1], e[0]), dtype=float)

    @property
    def quarter_turns(self) -> int:
        """Number of quarter turns taking E onto this branch."""
        return _QUARTER_TURNS[self]

    def rotate(self, quarter_turns: int) -> 'Branch':
        """Image of the branch under a rotation by quarter_turns·π/2."""
        if self is Branch.O:
            return self
        return EDGE_BRANCHES[(self.quarter_turns + quarter_turns) % 4]


_DIRECTIONS = {
    Branch.E: (1.0, 0.0),
    Branch.N: (0.0, 1.0),
    Branch.W: (-1.0, 0.0),
    Branch.S: (0.0, -1.0),
    Branch.O: (0.0, 0.0),
}
_QUARTER_TURNS = {Branch.E: 0, Branch.N: 1, Branch.W: 2, Branch.S: 3, Branch.O: 0}

EDGE_BRANCHES = (Branch.E, Branch.N, Branch.W, Branch.S)


class PlanePoint(BaseModel):
    """A point x = (x₁, x₂) of ℝ²."""

    x1: float = Field(..., description='Abscissa')
    x2: float = Field(..., description='Ordinate')

    class Config:
        """Pydantic configuration."""

        frozen = True

    @validator('x1', 'x2')
    def validate_finite(cls, v):
        """Validate coordinates are finite."""
        if not math.isfinite(v):
            raise ValueError('Coordinates must be finite')
        return float(v)

    @classmethod
    def from_array(cls, xy) -> 'PlanePoint':
        """Build from any length-2 sequence."""
        return cls(x1=float(xy[0]), x2=float(xy[1]))

    @classmethod
    def parse(cls, text: str) -> 'PlanePoint':
        """Parse 'x1,x2'."""
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 2:
            raise ValueError(f'Expected "x1,x2", got {text!r}')
        return cls(x1=float(parts[0]), x2=float(parts[1]))

    def as_array(self) -> np.ndarray:
        return np.array((self.x1, self.x2), dtype=float)

    def norm(self) -> float:
        return math.hypot(self.x1, self.x2)


class NetworkPoint(BaseModel):
    """A point of Γ stored as (branch, radius)."""

    branch: Branch = Field(..., description='Branch label, O for the junction')
    radius: float = Field(default=0.0, description='Distance to O along the branch')

    class Config:
        """Pydantic configuration."""

        frozen = True

    @validator('radius')
    def validate_radius(cls, v, values):
        """Validate radius = 0 exactly at the junction."""
        if not math.isfinite(v) or v < 0:
            raise ValueError('radius must be a finite nonnegative number')
        branch = values.get('branch')
        if branch is Branch.O and v != 0:
            raise ValueError('The junction O has radius 0')
        if branch is not None and branch is not Branch.O and v == 0:
            raise ValueError('Points on an open branch have positive radius')
        return float(v)

    @classmethod
    def junction(cls) -> 'NetworkPoint':
        return cls(branch=Branch.O, radius=0.0)

    @classmethod
    def on(cls, branch: Branch, radius: float) -> 'NetworkPoint':
        """Point at the given radius, collapsing radius 0 to O."""
        if radius <= 0 or branch is Branch.O:
            return cls.junction()
        return cls(branch=branch, radius=radius)

    @classmethod
    def parse(cls, text: str) -> 'NetworkPoint':
        """Parse 'O' or 'B,r' with B in E/N/W/S."""
        parts = [p.strip() for p in text.split(',')]
        branch = Branch(parts[0].upper())
        if branch is Branch.O:
            if len(parts) > 1 and float(parts[1]) != 0:
                raise ValueError('The junction O has radius 0')
            return cls.junction()
        if len(parts) != 2:
            raise ValueError(f'Expected "B,r", got {text!r}')
        return cls(branch=branch, radius=float(parts[1]))

    def is_junction(self) -> bool:
        return self.branch is Branch.O

    def to_plane(self) -> PlanePoint:
        """Embedding into ℝ²; exact for axis points."""
        e = _DIRECTIONS[self.branch]
        return PlanePoint(x1=e[0] * self.radius + 0.0, x2=e[1] * self.radius + 0.0)

    def as_array(self) -> np.ndarray:
        return self.branch.direction * self.radius

    def distance(self, other: 'NetworkPoint') -> float:
        """Geodesic distance along Γ."""
        if self.branch is other.branch:
            return abs(self.radius - other.radius)
        return self.radius + other.radius

    def rotate(self, quarter_turns: int) -> 'NetworkPoint':
        return NetworkPoint.on(self.branch.rotate(quarter_turns), self.radius)

    def label(self) -> Tuple[str, float]:
        return self.branch.value, self.radius
