"""Quick invariant suites: geometry checks plus shrunken scenario runs."""

from pathlib import Path
from typing import Dict, List

import numpy as np

from ..config.config import Config, ExperimentConfig
from ..geometry.penalty import check_identities
from ..geometry.projection import project_to_network
from ..limits.gradient_flow import gradient_flow, limit_gap
from ..models.points import PlanePoint
from .artifacts import ArtifactWriter
from .engine import MANIFEST_NAME, execute
from .manifest import AssertionRecord, Manifest, ScenarioStatus, SummaryReport, summarize
from ..utils.logging import get_logger

# Parameter overrides that keep each scenario to seconds.
QUICK_OVERRIDES: Dict[str, Dict] = {
    'junction-behavior': {'eps': 1e-3, 'eta_eps': [1e-3, 1e-4]},
    'zeno': {'depth': 10},
    'scaling-law': {'n_samples': 5},
    'tracking': {'n_samples': 3, 'eps_values': [1e-2, 1e-3]},
    'counterexample': {},
    'apriori-suite': {'n_samples': 10},
}
GEOMETRY_SAMPLES = 1000
FLOW_SAMPLES = 200
PROJECTION_TOL = 1e-5
HYPERBOLA_TOL = 1e-8


def geometry_manifest(out_dir: Path, seed: int = 1) -> Manifest:
    """Penalty identities and gradient-flow projections on random points."""
    rng = np.random.default_rng(seed)
    points = rng.uniform(-5.0, 5.0, size=(GEOMETRY_SAMPLES, 2))
    report = check_identities(points)
    assertions = [
        AssertionRecord(
            id='identities',
            description='penalty identities and Łojasiewicz inequality',
            passed=report.passed(),
            value=max(
                report.euler_identity,
                report.gradient_norm,
                report.norm_lower_bound,
                report.lojasiewicz,
            ),
            bound=1e-12,
        )
    ]

    rows = []
    worst_gap = worst_drift = 0.0
    for xy in points[:FLOW_SAMPLES]:
        x = PlanePoint.from_array(xy)
        flow = gradient_flow(x)
        gap = limit_gap(flow, project_to_network(x))
        worst_gap = max(worst_gap, gap)
        worst_drift = max(worst_drift, flow.hyperbola_drift)
        rows.append((x.x1, x.x2, flow.limit.branch.value, flow.limit.radius, gap,
                     flow.hyperbola_drift))
    assertions.append(
        AssertionRecord(
            id='projection',
            description='gradient-flow limit equals the closed-form projection',
            passed=worst_gap <= PROJECTION_TOL,
            value=worst_gap,
            bound=PROJECTION_TOL,
        )
    )
    assertions.append(
        AssertionRecord(
            id='hyperbola',
            description='Z₂² − Z₁² conserved along the flow',
            passed=worst_drift <= HYPERBOLA_TOL,
            value=worst_drift,
            bound=HYPERBOLA_TOL,
        )
    )
    writer = ArtifactWriter(out_dir)
    writer.csv(
        'projection.csv', ('x1', 'x2', 'branch', 'radius', 'gap', 'hyperbola_drift'), rows
    )
    manifest = Manifest(
        scenario='geometry',
        inputs={'samples': GEOMETRY_SAMPLES, 'flows': FLOW_SAMPLES, 'seed': seed},
        anchors=['penalty-identities', 'closed-form-projection', 'hyperbola-invariant'],
        assertions=assertions,
        artifacts=writer.sorted_records(),
        status=ScenarioStatus.PASSED
        if all(a.passed for a in assertions)
        else ScenarioStatus.FAILED,
    )
    manifest.to_file(out_dir / MANIFEST_NAME)
    return manifest


async def run_selftest(config: Config, full: bool = False) -> SummaryReport:
    """Run every quick suite; the value-convergence ladder only when full."""
    log = get_logger('selftest')
    root = Path(config.experiment.output_dir) / 'selftest'
    manifests: List[Manifest] = [geometry_manifest(root / 'geometry')]

    names = list(QUICK_OVERRIDES) + (['value-convergence'] if full else [])
    for name in names:
        cfg = ExperimentConfig.from_config(config, name)
        params = {**cfg.params, **QUICK_OVERRIDES.get(name, {})}
        cfg = ExperimentConfig(
            **{**cfg.model_dump(), 'params': params, 'output_dir': str(root)}
        )
        manifests.append(await execute(cfg))

    report = summarize(manifests)
    log.info(f'Selftest {report.overall}: {len(report.rows)} assertions')
    return report
