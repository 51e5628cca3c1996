"""Scenario manifests and the aggregate report across scenarios."""

import io
import json
import platform
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pydantic
import scipy
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.table import Table

from ..config.config import SCHEMA_VERSION
from ..exceptions import ManifestError
from .artifacts import ArtifactRecord


class ScenarioStatus(str, Enum):
    """Overall scenario status."""

    PASSED = 'passed'
    FAILED = 'failed'


class AssertionRecord(BaseModel):
    """One checked property of a scenario."""

    id: str = Field(..., description='Stable assertion identifier')
    description: str = Field(..., description='What is checked')
    passed: bool = Field(..., description='Whether the check held')
    value: Optional[float] = Field(default=None, description='Measured quantity')
    bound: Optional[float] = Field(default=None, description='Bound it is held to')


def library_versions() -> Dict[str, str]:
    from .. import __version__

    return {
        'junction_lab': __version__,
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'pydantic': pydantic.VERSION,
        'python': platform.python_version(),
    }


class Manifest(BaseModel):
    """Everything needed to audit one scenario run; no wall-clock values."""

    scenario: str = Field(..., description='Scenario name')
    schema_version: int = Field(default=SCHEMA_VERSION, description='Config schema')
    versions: Dict[str, str] = Field(default_factory=library_versions)
    inputs: Dict[str, Any] = Field(default_factory=dict, description='Resolved config')
    anchors: List[str] = Field(
        default_factory=list, description='Properties of the theory exercised'
    )
    assertions: List[AssertionRecord] = Field(default_factory=list)
    artifacts: List[ArtifactRecord] = Field(default_factory=list)
    status: ScenarioStatus = Field(..., description='passed iff every assertion held')

    @property
    def failing(self) -> List[str]:
        return [a.id for a in self.assertions if not a.passed]

    def to_file(self, path: Union[str, Path]) -> Path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w', encoding='utf-8') as f:
            json.dump(self.model_dump(mode='json'), f, indent=2, sort_keys=True)
            f.write('\n')
        return out


def load_manifest(path: Union[str, Path]) -> Manifest:
    """Read a manifest file, raising ManifestError on anything malformed."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ManifestError(f'Manifest not found: {path}') from e
    except json.JSONDecodeError as e:
        raise ManifestError(f'Manifest is not valid JSON: {path}', details={'error': str(e)}) from e
    return parse_manifest(data, source=str(path))


def parse_manifest(data: Any, source: str = '<memory>') -> Manifest:
    if isinstance(data, Manifest):
        return data
    if not isinstance(data, dict):
        raise ManifestError(f'Manifest must be a JSON object: {source}')
    try:
        return Manifest(**data)
    except ValidationError as e:
        raise ManifestError(
            f'Malformed manifest: {source}', details={'errors': e.errors()}
        ) from e


class SummaryRow(BaseModel):
    scenario: str
    assertion: str
    passed: bool
    value: Optional[float] = None
    bound: Optional[float] = None


class SummaryReport(BaseModel):
    """All assertions across scenarios with one overall verdict."""

    scenarios: List[str] = Field(default_factory=list)
    rows: List[SummaryRow] = Field(default_factory=list)
    failing: List[str] = Field(
        default_factory=list, description='scenario:assertion ids that failed'
    )

    @property
    def passed(self) -> bool:
        return not self.failing

    @property
    def overall(self) -> str:
        return 'PASS' if self.passed else 'FAIL'

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode='json')
        data['overall'] = self.overall
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> Table:
        table = Table(title=f'Assertions: {self.overall}')
        table.add_column('Scenario', style='cyan')
        table.add_column('Assertion')
        table.add_column('Status')
        table.add_column('Value', justify='right')
        table.add_column('Bound', justify='right')
        for row in self.rows:
            table.add_row(
                row.scenario,
                row.assertion,
                'PASS' if row.passed else 'FAIL',
                '' if row.value is None else f'{row.value:.6g}',
                '' if row.bound is None else f'{row.bound:.6g}',
            )
        return table

    def render_text(self, width: int = 120) -> str:
        """The table as plain text, without colour codes."""
        buffer = io.StringIO()
        Console(file=buffer, width=width, no_color=True, force_terminal=False).print(
            self.table()
        )
        return buffer.getvalue()


def summarize(manifests: Sequence[Any]) -> SummaryReport:
    """Aggregate Manifest objects, dicts or paths into one report."""
    report = SummaryReport()
    for item in manifests:
        if isinstance(item, (str, Path)):
            manifest = load_manifest(item)
        else:
            manifest = parse_manifest(item)
        report.scenarios.append(manifest.scenario)
        for a in manifest.assertions:
            report.rows.append(
                SummaryRow(
                    scenario=manifest.scenario,
                    assertion=a.id,
                    passed=a.passed,
                    value=a.value,
                    bound=a.bound,
                )
            )
            if not a.passed:
                report.failing.append(f'{manifest.scenario}:{a.id}')
    return report
