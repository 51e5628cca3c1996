"""Tests for job orchestration, artifacts, manifests and scenario runs."""

import json
import tempfile
import time
from pathlib import Path

import pytest

from src.junction_lab.config.config import Config, ExperimentConfig
from src.junction_lab.exceptions import ManifestError, ScenarioError
from src.junction_lab.experiments.artifacts import ArtifactWriter, sha256_file
from src.junction_lab.experiments.engine import ExperimentEngine, execute, run_scenario
from src.junction_lab.experiments.manifest import (
    AssertionRecord,
    Manifest,
    ScenarioStatus,
    load_manifest,
    summarize,
)
from src.junction_lab.experiments.orchestrator import Job, JobOrchestrator
from src.junction_lab.experiments.scenarios import SCENARIOS, strategy_for
from src.junction_lab.experiments.selftest import QUICK_OVERRIDES, geometry_manifest


def _square(x, delay=0.0):
    time.sleep(delay)
    return x * x


def _fail(x):
    raise RuntimeError(f'bad input {x}')


def _manifest(scenario, *passed):
    assertions = [
        AssertionRecord(id=f'check{i}', description='test check', passed=p, value=1.0)
        for i, p in enumerate(passed)
    ]
    return Manifest(
        scenario=scenario,
        assertions=assertions,
        status=ScenarioStatus.PASSED if all(passed) else ScenarioStatus.FAILED,
    )


class TestJobOrchestrator:
    """Test sequential and concurrent job execution."""

    def setup_method(self):
        """Set up test fixtures."""
        # later keys finish first when run concurrently
        self.jobs = [
            Job(key=k, func=_square, args=(k,), kwargs={'delay': 0.01 * (5 - k)})
            for k in (3, 1, 4, 2)
        ]

    @pytest.mark.asyncio
    async def test_sequential_results_ordered(self):
        """Test sequential runs return results sorted by key."""
        results = await JobOrchestrator().run(self.jobs)

        assert [r.key for r in results] == [1, 2, 3, 4]
        assert [r.value for r in results] == [1, 4, 9, 16]
        assert all(r.success for r in results)

    @pytest.mark.asyncio
    async def test_parallel_matches_sequential(self):
        """Test the thread pool yields the same merged output."""
        sequential = await JobOrchestrator().run(self.jobs)
        parallel = await JobOrchestrator(parallel=True, threads=3).run(self.jobs)

        assert [r.model_dump() for r in parallel] == [r.model_dump() for r in sequential]

    def test_parallel_needs_threads(self):
        """Test a single thread falls back to sequential execution."""
        orchestrator = JobOrchestrator(parallel=True, threads=1)

        assert orchestrator.parallel is False

    @pytest.mark.asyncio
    @pytest.mark.parametrize('parallel', [False, True])
    async def test_failure_becomes_error_result(self, parallel):
        """Test a raising job is reported instead of aborting the run."""
        jobs = [Job(key=1, func=_square, args=(2,)), Job(key=2, func=_fail, args=(7,))]

        results = await JobOrchestrator(parallel=parallel, threads=2).run(jobs)

        assert results[0].success and results[0].value == 4
        assert not results[1].success
        assert results[1].error == 'RuntimeError: bad input 7'

    @pytest.mark.asyncio
    async def test_duplicate_keys(self):
        """Test duplicate keys are rejected."""
        jobs = [Job(key=(1, 'a'), func=_square, args=(1,))] * 2

        with pytest.raises(ValueError):
            await JobOrchestrator().run(jobs)

    @pytest.mark.asyncio
    async def test_merge_and_summarize(self):
        """Test merging successful values and counting outcomes."""
        jobs = [
            Job(key=[0.1, 'x'], func=_square, args=(3,)),
            Job(key=[0.2, 'x'], func=_fail, args=(0,)),
        ]
        orchestrator = JobOrchestrator()

        results = await orchestrator.run(jobs)

        assert orchestrator.merge(results) == {(0.1, 'x'): 9}
        assert orchestrator.summarize(results) == {
            'total': 2,
            'successful': 1,
            'failed': 1,
        }


class TestArtifactWriter:
    """Test artifact files and their hashes."""

    def test_records_hashes(self):
        """Test every written file is recorded with its SHA-256."""
        with tempfile.TemporaryDirectory() as tmpdir:
            writer = ArtifactWriter(Path(tmpdir))

            writer.json('b.json', {'z': 1, 'a': [1.5, 2]})
            writer.csv('a.csv', ('eps', 'value'), [(0.1, 1.0 / 3.0)])

            records = writer.sorted_records()
            assert [r.path for r in records] == ['a.csv', 'b.json']
            for record in records:
                assert record.sha256 == sha256_file(str(Path(tmpdir) / record.path))
            with open(Path(tmpdir) / 'a.csv') as f:
                assert f.read().splitlines()[1].startswith('0.1,0.333333333333333')

    def test_rewrite_replaces_record(self):
        """Test writing the same name twice keeps one record."""
        with tempfile.TemporaryDirectory() as tmpdir:
            writer = ArtifactWriter(Path(tmpdir))

            first = writer.json('out.json', {'v': 1})
            second = writer.json('out.json', {'v': 2})

            assert len(writer.records) == 1
            assert writer.records[0].sha256 == second.sha256 != first.sha256

    def test_json_is_sorted(self):
        """Test JSON artifacts are written with sorted keys."""
        with tempfile.TemporaryDirectory() as tmpdir:
            writer = ArtifactWriter(Path(tmpdir))
            writer.json('out.json', {'b': 1, 'a': 2})

            text = (Path(tmpdir) / 'out.json').read_text()

            assert text.index('"a"') < text.index('"b"')


class TestManifest:
    """Test manifest persistence and aggregation."""

    def test_round_trip(self):
        """Test a written manifest loads back unchanged."""
        manifest = _manifest('zeno', True, False)

        with tempfile.TemporaryDirectory() as tmpdir:
            path = manifest.to_file(Path(tmpdir) / 'zeno' / 'manifest.json')
            loaded = load_manifest(path)

        assert loaded == manifest
        assert loaded.failing == ['check1']
        assert loaded.versions['junction_lab'] == '0.1.0'

    def test_missing_file(self):
        """Test a missing manifest raises ManifestError."""
        with pytest.raises(ManifestError):
            load_manifest('/nonexistent/manifest.json')

    @pytest.mark.parametrize(
        'content', ['{not json', '[1, 2, 3]', '{"scenario": "zeno"}']
    )
    def test_malformed_file(self, content):
        """Test bad JSON, non-objects and missing fields raise ManifestError."""
        with tempfile.NamedTemporaryFile(mode='w', suffix='.json', delete=False) as f:
            f.write(content)
            path = f.name

        try:
            with pytest.raises(ManifestError):
                load_manifest(path)
        finally:
            Path(path).unlink()

    def test_summarize_empty(self):
        """Test an empty summary passes with no rows."""
        report = summarize([])

        assert report.overall == 'PASS'
        assert report.rows == []

    def test_summarize_mixed(self):
        """Test one failing assertion fails the aggregate."""
        report = summarize(
            [_manifest('zeno', True, True), _manifest('tracking', True, False)]
        )

        assert report.overall == 'FAIL'
        assert report.scenarios == ['zeno', 'tracking']
        assert len(report.rows) == 4
        assert report.failing == ['tracking:check1']
        data = json.loads(report.to_json())
        assert data['overall'] == 'FAIL'
        text = report.render_text()
        assert 'tracking' in text and 'FAIL' in text

    def test_summarize_accepts_dicts_and_paths(self):
        """Test summaries read dicts and manifest paths alike."""
        manifest = _manifest('counterexample', True)

        with tempfile.TemporaryDirectory() as tmpdir:
            path = manifest.to_file(Path(tmpdir) / 'manifest.json')
            report = summarize([path, manifest.model_dump(mode='json')])

        assert report.scenarios == ['counterexample', 'counterexample']
        assert report.passed


class TestScenarios:
    """Test scenario lookup and end-to-end scenario runs."""

    def setup_method(self):
        """Set up test fixtures."""
        self.config = Config()

    def _experiment(self, scenario, output_dir, **params):
        cfg = ExperimentConfig.from_config(self.config, scenario)
        return ExperimentConfig(
            **{
                **cfg.model_dump(),
                'params': {**cfg.params, **params},
                'output_dir': output_dir,
            }
        )

    def test_registry(self):
        """Test every configured scenario has a strategy."""
        assert set(SCENARIOS) == {
            'junction-behavior',
            'zeno',
            'scaling-law',
            'tracking',
            'counterexample',
            'value-convergence',
            'apriori-suite',
        }
        assert set(QUICK_OVERRIDES) <= set(SCENARIOS)

    def test_unknown_scenario(self):
        """Test unknown scenario names raise ScenarioError."""
        with pytest.raises(ScenarioError):
            strategy_for('bogus')

    @pytest.mark.asyncio
    async def test_engine_rejects_unknown_scenario(self):
        """Test the engine checks names before building a config."""
        with pytest.raises(ScenarioError):
            await ExperimentEngine(self.config).run_scenario('bogus')

    @pytest.mark.asyncio
    async def test_counterexample_scenario(self):
        """Test the counterexample scenario passes and writes its manifest."""
        with tempfile.TemporaryDirectory() as tmpdir:
            cfg = self._experiment('counterexample', tmpdir, n_sweep=5)

            manifest = await execute(cfg)

            out = Path(tmpdir) / 'counterexample'
            assert manifest.status is ScenarioStatus.PASSED, manifest.failing
            assert (out / 'manifest.json').exists()
            assert [a.path for a in manifest.artifacts] == ['costs.csv', 'sweep.csv']
            ids = {a.id for a in manifest.assertions}
            assert {'strict:1.0', 'reference:upper', 'reference:lower', 'sweep'} <= ids
            assert 'output_dir' not in manifest.inputs
            assert load_manifest(out / 'manifest.json') == manifest

    def test_zeno_scenario(self):
        """Test a shallow Zeno construction passes every check."""
        with tempfile.TemporaryDirectory() as tmpdir:
            cfg = self._experiment('zeno', tmpdir, depth=4, eps_values=[1e-2])

            manifest = run_scenario(cfg)

            assert manifest.status is ScenarioStatus.PASSED, manifest.failing
            ids = [a.id for a in manifest.assertions]
            assert [i for i in ids if i.startswith('junction_return:')] == [
                f'junction_return:{k}' for k in range(5)
            ]
            assert 'eps_independent:0.01' in ids

    @pytest.mark.asyncio
    async def test_deterministic_artifacts(self):
        """Test two runs of the same config produce identical files."""
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            a = await execute(self._experiment('counterexample', first, n_sweep=3))
            b = await execute(self._experiment('counterexample', second, n_sweep=3))

            assert a.artifacts == b.artifacts
            assert sha256_file(str(Path(first) / 'counterexample' / 'manifest.json')) == (
                sha256_file(str(Path(second) / 'counterexample' / 'manifest.json'))
            )

    @pytest.mark.slow
    def test_geometry_manifest(self):
        """Test the geometry suite passes on random points."""
        with tempfile.TemporaryDirectory() as tmpdir:
            manifest = geometry_manifest(Path(tmpdir), seed=1)

            assert manifest.status is ScenarioStatus.PASSED, manifest.failing
            assert [a.id for a in manifest.assertions] == [
                'identities',
                'projection',
                'hyperbola',
            ]
            assert (Path(tmpdir) / 'manifest.json').exists()
