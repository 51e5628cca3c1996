"""A control whose trajectory visits every branch in finite time.

On [2^(−k−1), 2^(−k)] the path runs out along branch i(k) at unit speed for
half of the interval and back to O for the other half. It sits at O at every
dyadic time 2^(−k).
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from ..config.config import IntegratorConfig
from ..dynamics.integrator import integrate_perturbed
from ..exceptions import DomainError
from ..models.control import ControlSchedule
from ..models.points import Branch, NetworkPoint, PlanePoint
from ..models.trajectory import LimitSegment, LimitTrajectory

DEFAULT_CYCLE = (Branch.E, Branch.N, Branch.W, Branch.S)


class ZenoConstruction(BaseModel):
    """The control and its (ε-independent) trajectory from O."""

    cycle: List[Branch]
    depth: int
    control: ControlSchedule
    trajectory: LimitTrajectory

    def dyadic_times(self) -> List[float]:
        return [2.0**-k for k in range(self.depth + 1)]

    def junction_returns(self) -> List[Tuple[float, NetworkPoint]]:
        return [(t, self.trajectory.state_at(t)) for t in self.dyadic_times()]


def _parse_cycle(cycle: Sequence) -> List[Branch]:
    branches = [b if isinstance(b, Branch) else Branch(str(b).upper()) for b in cycle]
    if not branches or any(b is Branch.O for b in branches):
        raise DomainError('cycle must list open branches', details={'cycle': cycle})
    return branches


def zeno_control(
    cycle: Sequence = DEFAULT_CYCLE, depth: int = 8, horizon: float = 1.0
) -> ZenoConstruction:
    """Build α = Σ_{k<depth} β_k and the trajectory it drives from O.

    Args:
        cycle: Branches visited in turn, as Branch values or letters
        depth: Number of dyadic excursions
        horizon: T ≥ 1; the path rests at O after t = 1

    Returns:
        ZenoConstruction with the control, the limit path and the return times
    """
    if depth < 1:
        raise DomainError('depth must be at least 1', details={'depth': depth})
    if horizon < 1.0:
        raise DomainError('horizon must cover [0, 1]', details={'horizon': horizon})
    branches = _parse_cycle(cycle)

    pieces = [(0.0, (0.0, 0.0))]
    segments = [LimitSegment(t0=0.0, t1=2.0**-depth, location=Branch.O)]
    for k in range(depth - 1, -1, -1):
        branch = branches[k % len(branches)]
        e = tuple(branch.direction)
        start, turn, stop = 2.0 ** (-k - 1), 2.0 ** (-k - 1) + 2.0 ** (-k - 2), 2.0**-k
        pieces.append((start, e))
        pieces.append((turn, (-e[0], -e[1])))
        segments.append(
            LimitSegment(t0=start, t1=turn, location=branch, r0=0.0, speed=1.0)
        )
        segments.append(
            LimitSegment(t0=turn, t1=stop, location=branch, r0=turn - start, speed=-1.0)
        )
    pieces.append((1.0, (0.0, 0.0)))
    if horizon > 1.0:
        segments.append(LimitSegment(t0=1.0, t1=horizon, location=Branch.O))

    return ZenoConstruction(
        cycle=branches,
        depth=depth,
        control=ControlSchedule.from_pieces(pieces),
        trajectory=LimitTrajectory(segments=segments),
    )


class ZenoCheck(BaseModel):
    eps: float
    max_deviation: float = Field(..., description='sup |X^ε(t) − X(t)| over samples')


def zeno_eps_independence(
    construction: ZenoConstruction,
    eps_values: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
) -> List[ZenoCheck]:
    """Integrate the construction's control at each ε and compare to its path."""
    log = logger.bind(component='zeno')
    checks = []
    horizon = construction.trajectory.horizon
    for eps in eps_values:
        traj = integrate_perturbed(
            PlanePoint(x1=0.0, x2=0.0), construction.control, eps, cfg, horizon=horizon
        )
        expected = construction.trajectory.sample(traj.times)
        deviation = float(np.max(np.linalg.norm(traj.states - expected, axis=1)))
        log.debug(f'ε={eps}: deviation {deviation:.3e}')
        checks.append(ZenoCheck(eps=eps, max_deviation=deviation))
    return checks


def branch_visits(construction: ZenoConstruction) -> Dict[int, Branch]:
    """Branch visited on (2^(−k−1), 2^(−k)) for each k < depth."""
    out = {}
    for k in range(construction.depth):
        mid = 2.0 ** (-k - 1) + 2.0 ** (-k - 2)
        out[k] = construction.trajectory.state_at(mid).branch
    return out
