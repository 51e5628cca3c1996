"""Configuration management for the junction lab."""

from .config import (
    Config,
    IntegratorConfig,
    GeometryConfig,
    SolverConfig,
    GridConfig,
    EdgeGridConfig,
    ScenarioSettings,
    ExperimentConfig,
    SCENARIO_SECTIONS,
)

__all__ = [
    'Config',
    'IntegratorConfig',
    'GeometryConfig',
    'SolverConfig',
    'GridConfig',
    'EdgeGridConfig',
    'ScenarioSettings',
    'ExperimentConfig',
    'SCENARIO_SECTIONS',
]
