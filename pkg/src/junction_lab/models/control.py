"""Piecewise-constant open-loop controls."""

import bisect
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator

# Relative slack accepted on |value| ≤ f_inf for values built from cos/sin.
BOUND_SLACK = 1e-12


class ControlSchedule(BaseModel):
    """α: [0, ∞) → A, constant on [breakpoints[j], breakpoints[j+1]).

    The last value applies from the last breakpoint onwards.
    """

    breakpoints: List[float] = Field(..., description='Increasing times, from 0')
    values: List[Tuple[float, float]] = Field(..., description='Control per piece')
    f_inf: float = Field(default=1.0, description='Sup bound |f|∞ on the controls')

    class Config:
        """Pydantic configuration."""

        frozen = True

    @validator('breakpoints')
    def validate_breakpoints(cls, v):
        """Validate breakpoints start at 0 and strictly increase."""
        if not v or v[0] != 0:
            raise ValueError('breakpoints must start at 0')
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError('breakpoints must be strictly increasing')
        return [float(b) for b in v]

    @validator('values')
    def validate_values(cls, v, values):
        """Validate one value per piece and |value| ≤ f_inf."""
        breakpoints = values.get('breakpoints')
        if breakpoints is not None and len(v) != len(breakpoints):
            raise ValueError('values and breakpoints must have the same length')
        return [(float(a), float(b)) for a, b in v]

    @validator('f_inf')
    def validate_bound(cls, v, values):
        """Validate the bound is nonnegative and every piece respects it."""
        if v < 0:
            raise ValueError('f_inf must be nonnegative')
        for a in values.get('values') or []:
            if math.hypot(*a) > v * (1 + BOUND_SLACK) + BOUND_SLACK:
                raise ValueError(f'control value {a} exceeds f_inf = {v}')
        return v

    @classmethod
    def constant(cls, value, f_inf: float = 1.0) -> 'ControlSchedule':
        return cls(breakpoints=[0.0], values=[tuple(value)], f_inf=f_inf)

    @classmethod
    def heading(cls, theta: float, speed: float = 1.0) -> 'ControlSchedule':
        """Constant control speed·e_θ."""
        return cls.constant(
            (speed * math.cos(theta), speed * math.sin(theta)), f_inf=speed
        )

    @classmethod
    def zero(cls, f_inf: float = 1.0) -> 'ControlSchedule':
        return cls.constant((0.0, 0.0), f_inf=f_inf)

    @classmethod
    def parse(cls, text: str) -> 'ControlSchedule':
        """Parse 'zero', 'theta=<radians>', 'a1,a2' or 't0:a1,a2;t1:a1,a2;...'."""
        text = text.strip()
        if text == 'zero':
            return cls.zero()
        if text.startswith('theta='):
            return cls.heading(float(text[len('theta='):]))
        if ':' not in text:
            a1, a2 = (float(p) for p in text.split(','))
            return cls.constant((a1, a2), f_inf=max(1.0, math.hypot(a1, a2)))
        pieces = []
        for chunk in text.split(';'):
            start, value = chunk.split(':')
            a1, a2 = (float(p) for p in value.split(','))
            pieces.append((float(start), (a1, a2)))
        f_inf = max([1.0] + [math.hypot(*v) for _, v in pieces])
        return cls.from_pieces(pieces, f_inf=f_inf)

    @classmethod
    def from_pieces(
        cls, pieces: List[Tuple[float, Tuple[float, float]]], f_inf: float = 1.0
    ) -> 'ControlSchedule':
        """Build from (start time, value) pairs, merging equal neighbours."""
        breakpoints: List[float] = []
        values: List[Tuple[float, float]] = []
        for start, value in pieces:
            value = (float(value[0]), float(value[1]))
            if values and values[-1] == value:
                continue
            if breakpoints and start <= breakpoints[-1]:
                values[-1] = value
                continue
            breakpoints.append(float(start))
            values.append(value)
        return cls(breakpoints=breakpoints, values=values, f_inf=f_inf)

    def value_at(self, t: float) -> np.ndarray:
        j = max(bisect.bisect_right(self.breakpoints, t) - 1, 0)
        return np.array(self.values[j], dtype=float)

    def pieces(self, horizon: float) -> List[Tuple[float, float, np.ndarray]]:
        """(t0, t1, value) triples covering [0, horizon]."""
        out = []
        for j, start in enumerate(self.breakpoints):
            if start >= horizon:
                break
            stop = self.breakpoints[j + 1] if j + 1 < len(self.breakpoints) else horizon
            out.append((start, min(stop, horizon), np.array(self.values[j])))
        return out

    def integral(self, t: float) -> np.ndarray:
        """∫₀ᵗ α(s) ds."""
        total = np.zeros(2)
        for t0, t1, value in self.pieces(t):
            total += (t1 - t0) * value
        return total

    def shifted(self, offset: float, prefix: Optional[Tuple[float, float]] = None):
        """Delay the schedule by offset, holding prefix (default 0) before it."""
        if offset <= 0:
            return self
        head = prefix if prefix is not None else (0.0, 0.0)
        pieces = [(0.0, head)] + [
            (b + offset, v) for b, v in zip(self.breakpoints, self.values)
        ]
        return ControlSchedule.from_pieces(pieces, f_inf=self.f_inf)

    def to_dict(self) -> dict:
        return {
            'breakpoints': list(self.breakpoints),
            'values': [list(v) for v in self.values],
            'f_inf': self.f_inf,
        }
