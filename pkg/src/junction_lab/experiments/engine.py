"""Experiment engine - main entry point for scenario runs."""

import asyncio
from pathlib import Path
from typing import List, Optional, Sequence

from ..config.config import Config, ExperimentConfig
from .artifacts import ArtifactWriter
from .manifest import Manifest, SummaryReport, summarize
from .orchestrator import JobOrchestrator
from .scenarios import SCENARIOS, strategy_for
from .strategy import ScenarioContext
from ..utils.logging import get_logger

MANIFEST_NAME = 'manifest.json'


class ExperimentEngine:
    """Binds configuration, artifact directories and manifests to the strategies."""

    def __init__(self, config: Config):
        """Initialize experiment engine.

        Args:
            config: Full configuration
        """
        self.config = config
        self.logger = get_logger('ExperimentEngine')

    def experiment_config(self, scenario: str) -> ExperimentConfig:
        return ExperimentConfig.from_config(self.config, scenario)

    async def run_scenario(self, scenario: str) -> Manifest:
        """Run one scenario and write its manifest next to its artifacts."""
        strategy_for(scenario)
        return await execute(self.experiment_config(scenario))

    async def run_all(self, scenarios: Optional[Sequence[str]] = None) -> List[Manifest]:
        """Run scenarios one after another; each keeps its own job concurrency."""
        names = list(scenarios) if scenarios is not None else list(SCENARIOS)
        manifests = []
        for name in names:
            manifests.append(await self.run_scenario(name))
        return manifests

    async def run_and_summarize(
        self, scenarios: Optional[Sequence[str]] = None
    ) -> SummaryReport:
        return summarize(await self.run_all(scenarios))


async def execute(cfg: ExperimentConfig) -> Manifest:
    """Run the strategy for cfg.scenario and persist its manifest."""
    log = get_logger('ExperimentEngine')
    strategy_cls = strategy_for(cfg.scenario)
    out_dir = Path(cfg.output_dir) / cfg.scenario
    context = ScenarioContext(
        config=cfg,
        output_dir=out_dir,
        writer=ArtifactWriter(out_dir),
        orchestrator=JobOrchestrator(parallel=cfg.parallel, threads=cfg.threads),
    )

    log.info(f'Starting scenario {cfg.scenario}')
    try:
        outcome = await strategy_cls(context).run()
    except Exception as e:
        log.error(f'Scenario {cfg.scenario} failed: {e}')
        raise

    manifest = Manifest(
        scenario=outcome.scenario,
        inputs=outcome.inputs,
        anchors=outcome.anchors,
        assertions=outcome.assertions,
        artifacts=outcome.artifacts,
        status=outcome.status,
    )
    path = manifest.to_file(out_dir / MANIFEST_NAME)
    log.info(f'Scenario {cfg.scenario} {manifest.status.value}; manifest at {path}')
    return manifest


def run_scenario(cfg: ExperimentConfig) -> Manifest:
    """Synchronous wrapper around execute.

    Args:
        cfg: Scenario name, parameters and output directory

    Returns:
        The written manifest
    """
    return asyncio.run(execute(cfg))
