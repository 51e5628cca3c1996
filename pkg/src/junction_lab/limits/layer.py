"""ε → 0 behaviour of perturbed trajectories: the initial jump and Cauchy gaps."""

from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..config.config import IntegratorConfig
from ..dynamics.integrator import integrate_perturbed
from ..exceptions import DomainError
from ..geometry.projection import project_to_network
from ..models.control import ControlSchedule
from ..models.points import PlanePoint


class JumpError(BaseModel):
    eps: float
    error: float


def jump_errors(
    x: PlanePoint,
    eps_values: Sequence[float],
    t: float = 0.05,
    alpha: Optional[ControlSchedule] = None,
    cfg: Optional[IntegratorConfig] = None,
) -> List[JumpError]:
    """|X^ε(t) − φ_d(x)| for each ε, with α ≡ 0 unless given."""
    alpha = alpha or ControlSchedule.zero()
    target = project_to_network(x).as_array()
    out = []
    for eps in eps_values:
        traj = integrate_perturbed(x, alpha, eps, cfg, horizon=t)
        out.append(
            JumpError(eps=eps, error=float(np.linalg.norm(traj.end_state - target)))
        )
    return out


class CauchyGap(BaseModel):
    eps_coarse: float
    eps_fine: float
    sup_distance: float


def pairwise_distances(
    x: PlanePoint,
    alpha: ControlSchedule,
    eps_values: Sequence[float],
    delta: float,
    horizon: float = 1.0,
    n_grid: int = 401,
    cfg: Optional[IntegratorConfig] = None,
) -> List[CauchyGap]:
    """sup over [δ, T] of |X^{ε_k} − X^{ε_{k+1}}| for consecutive ε values."""
    if not 0 < delta < horizon:
        raise DomainError('delta must lie in (0, horizon)', details={'delta': delta})
    grid = np.linspace(delta, horizon, n_grid)
    paths = []
    for eps in eps_values:
        traj = integrate_perturbed(x, alpha, eps, cfg, horizon=horizon)
        paths.append(np.array([traj.state_at(t) for t in grid]))
    return [
        CauchyGap(
            eps_coarse=eps_values[i],
            eps_fine=eps_values[i + 1],
            sup_distance=float(np.max(np.linalg.norm(paths[i] - paths[i + 1], axis=1))),
        )
        for i in range(len(paths) - 1)
    ]


def is_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))
