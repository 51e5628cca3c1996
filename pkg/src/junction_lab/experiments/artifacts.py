"""Artifact writing and content hashing for scenario runs."""

import hashlib
from pathlib import Path
from typing import Any, Iterable, List, Sequence

from loguru import logger
from pydantic import BaseModel, Field

from ..utils.formatting import write_csv, write_json

_CHUNK = 1 << 16


def sha256_file(path: str) -> str:
    """Hex SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(_CHUNK), b''):
            digest.update(block)
    return digest.hexdigest()


class ArtifactRecord(BaseModel):
    """One written file, relative to the scenario directory."""

    path: str = Field(..., description='Path relative to the scenario directory')
    sha256: str = Field(..., description='Hex SHA-256 of the file contents')


class ArtifactWriter:
    """Writes CSV/JSON files under one directory and remembers their hashes."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.records: List[ArtifactRecord] = []
        self.logger = logger.bind(component='ArtifactWriter')

    def _record(self, path: Path) -> ArtifactRecord:
        record = ArtifactRecord(
            path=path.relative_to(self.root).as_posix(), sha256=sha256_file(str(path))
        )
        self.records = [r for r in self.records if r.path != record.path] + [record]
        self.logger.info(f'Wrote {path}')
        return record

    def csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> ArtifactRecord:
        return self._record(write_csv(str(self.root / name), header, rows))

    def json(self, name: str, payload: Any) -> ArtifactRecord:
        return self._record(write_json(str(self.root / name), payload))

    def sorted_records(self) -> List[ArtifactRecord]:
        return sorted(self.records, key=lambda r: r.path)
