"""Exceptions raised by the junction lab."""

from typing import Any, Dict, Optional, Tuple


class JunctionLabError(Exception):
    """Base exception for junction lab errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """Initialize junction lab error.

        Args:
            message: Error message
            details: Extra context (inputs, offending values)
        """
        super().__init__(message)
        self.message = message
        self.details = details or {}


class DomainError(JunctionLabError):
    """An input violates the precondition of an operation."""

    pass


class IntegrationError(JunctionLabError):
    """The ODE solver could not complete the requested horizon."""

    def __init__(self, message: str, time: Optional[float] = None, **kwargs):
        """Initialize integration error.

        Args:
            message: Error message
            time: Simulation time at which the solver gave up
            **kwargs: Additional arguments for base class
        """
        super().__init__(message, **kwargs)
        self.time = time


class StepUnderflowError(IntegrationError):
    """Step size fell below floating-point spacing."""

    pass


class StepBudgetError(IntegrationError):
    """Tolerance not achievable within the step budget."""

    pass


class HorizonError(JunctionLabError):
    """Horizon is shorter than a construction requires."""

    pass


class ControlBoundError(JunctionLabError):
    """A derived control leaves the admissible ball beyond tolerance."""

    pass


class ConvergenceError(JunctionLabError):
    """Value iteration did not reach its fixed-point tolerance."""

    def __init__(
        self,
        message: str,
        iterations: int = 0,
        residual: float = float('nan'),
        **kwargs,
    ):
        super().__init__(message, **kwargs)
        self.iterations = iterations
        self.residual = residual


class EstimateViolationError(JunctionLabError):
    """An a priori estimate failed on a sampled pair of times."""

    def __init__(
        self,
        message: str,
        estimate: str = '',
        pair: Optional[Tuple[float, float]] = None,
        **kwargs,
    ):
        super().__init__(message, **kwargs)
        self.estimate = estimate
        self.pair = pair


class ScenarioError(JunctionLabError):
    """Unknown scenario or invalid scenario parameters."""

    pass


class ManifestError(JunctionLabError):
    """A manifest file could not be parsed."""

    pass
