"""Domain types of the junction lab."""

from .points import Branch, EDGE_BRANCHES, NetworkPoint, PlanePoint
from .control import ControlSchedule
from .trajectory import (
    GradientFlowResult,
    LimitSegment,
    LimitTrajectory,
    TrajectoryRecord,
)
from .value import (
    ChainMargins,
    ConvergenceReport,
    CostField,
    EdgeValueFunction,
    GridValueFunction,
    ValueProblem,
)

__all__ = [
    'Branch',
    'EDGE_BRANCHES',
    'NetworkPoint',
    'PlanePoint',
    'ControlSchedule',
    'GradientFlowResult',
    'LimitSegment',
    'LimitTrajectory',
    'TrajectoryRecord',
    'ChainMargins',
    'ConvergenceReport',
    'CostField',
    'EdgeValueFunction',
    'GridValueFunction',
    'ValueProblem',
]
