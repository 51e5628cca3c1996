"""Scenario strategies, orchestration, artifacts and manifests."""

from .artifacts import ArtifactRecord, ArtifactWriter, sha256_file
from .manifest import (
    AssertionRecord,
    Manifest,
    ScenarioStatus,
    SummaryReport,
    load_manifest,
    summarize,
)
from .orchestrator import Job, JobOrchestrator, JobResult
from .strategy import ScenarioContext, ScenarioOutcome, ScenarioStrategy
from .scenarios import SCENARIOS, strategy_for
from .engine import ExperimentEngine, execute, run_scenario
from .selftest import geometry_manifest, run_selftest

__all__ = [
    'ArtifactRecord',
    'ArtifactWriter',
    'sha256_file',
    'AssertionRecord',
    'Manifest',
    'ScenarioStatus',
    'SummaryReport',
    'load_manifest',
    'summarize',
    'Job',
    'JobOrchestrator',
    'JobResult',
    'ScenarioContext',
    'ScenarioOutcome',
    'ScenarioStrategy',
    'SCENARIOS',
    'strategy_for',
    'ExperimentEngine',
    'execute',
    'run_scenario',
    'geometry_manifest',
    'run_selftest',
]
