"""Scenario strategy interface and shared run context."""

import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger
from pydantic import BaseModel, Field

from ..config.config import ExperimentConfig
from .artifacts import ArtifactRecord, ArtifactWriter
from .manifest import AssertionRecord, ScenarioStatus
from .orchestrator import Job, JobOrchestrator, JobResult


class ScenarioContext(BaseModel):
    """Configuration, artifact directory and job runner for one scenario run."""

    config: ExperimentConfig = Field(..., description='Resolved experiment config')
    output_dir: Path = Field(..., description='Directory for this scenario')
    writer: ArtifactWriter = Field(..., description='Artifact writer')
    orchestrator: JobOrchestrator = Field(..., description='Job runner')

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True


class ScenarioOutcome(BaseModel):
    """What a strategy hands back to the engine."""

    scenario: str = Field(..., description='Scenario name')
    inputs: Dict[str, Any] = Field(default_factory=dict, description='Resolved inputs')
    anchors: List[str] = Field(default_factory=list, description='Exercised properties')
    assertions: List[AssertionRecord] = Field(default_factory=list)
    artifacts: List[ArtifactRecord] = Field(default_factory=list)

    @property
    def status(self) -> ScenarioStatus:
        if all(a.passed for a in self.assertions):
            return ScenarioStatus.PASSED
        return ScenarioStatus.FAILED


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class ScenarioStrategy(ABC):
    """Abstract base class for scenario strategies."""

    name: str = ''
    anchors: List[str] = []

    def __init__(self, context: ScenarioContext):
        """Initialize scenario strategy.

        Args:
            context: Scenario context with config, writer and job runner
        """
        self.context = context
        self.params = context.config.section()
        self.logger = logger.bind(scenario=self.name)
        self._assertions: List[AssertionRecord] = []

    @abstractmethod
    async def execute(self) -> None:
        """Compute, write artifacts and record assertions."""
        pass

    async def run(self) -> ScenarioOutcome:
        self._assertions = []
        self.logger.info(f'Starting scenario {self.name}')
        await self.execute()
        outcome = ScenarioOutcome(
            scenario=self.name,
            inputs=self.context.config.model_dump(mode='json', exclude={'output_dir'}),
            anchors=list(self.anchors),
            assertions=list(self._assertions),
            artifacts=self.context.writer.sorted_records(),
        )
        failing = [a.id for a in outcome.assertions if not a.passed]
        if failing:
            self.logger.warning(f'Scenario {self.name} failed: {failing}')
        else:
            self.logger.info(
                f'Scenario {self.name} passed {len(outcome.assertions)} assertions'
            )
        return outcome

    def check(
        self,
        assertion_id: str,
        description: str,
        passed: bool,
        value: Optional[float] = None,
        bound: Optional[float] = None,
    ) -> bool:
        """Record an assertion and return whether it held."""
        passed = bool(passed)
        self._assertions.append(
            AssertionRecord(
                id=assertion_id,
                description=description,
                passed=passed,
                value=_finite(value),
                bound=_finite(bound),
            )
        )
        if not passed:
            self.logger.warning(
                f'Assertion {assertion_id} failed: value={value}, bound={bound}'
            )
        return passed

    async def run_jobs(self, jobs: List[Job]) -> List[JobResult]:
        """Run jobs through the orchestrator; failures become failed assertions."""
        results = await self.context.orchestrator.run(jobs)
        for r in results:
            if not r.success:
                self.check(f'job:{_key_label(r.key)}', 'job completed', False)
        return results

    @property
    def writer(self) -> ArtifactWriter:
        return self.context.writer

    @property
    def cfg(self) -> ExperimentConfig:
        return self.context.config


def _key_label(key: Any) -> str:
    if isinstance(key, (tuple, list)):
        return ':'.join(str(k) for k in key)
    return str(key)

