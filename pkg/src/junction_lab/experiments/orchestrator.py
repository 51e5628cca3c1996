"""Runs independent scenario jobs sequentially or on a bounded thread pool."""

import asyncio
from typing import Any, Callable, Dict, Hashable, List, Optional

from loguru import logger
from pydantic import BaseModel, Field


class Job(BaseModel):
    """One independent unit of work, e.g. a single (ε, x) integration."""

    key: Any = Field(..., description='Sortable key used to merge results')
    func: Callable[..., Any] = Field(..., description='Work to run')
    args: tuple = Field(default=(), description='Positional arguments')
    kwargs: Dict[str, Any] = Field(default_factory=dict, description='Keyword arguments')

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True


class JobResult(BaseModel):
    """Outcome of one job; exactly one of value and error is meaningful."""

    key: Any
    value: Any = None
    error: Optional[str] = Field(default=None, description='Error message if failed')

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    @property
    def success(self) -> bool:
        return self.error is None


class JobOrchestrator:
    """Executes job lists and merges results by key.

    With parallel off the jobs run one after another in the calling thread.
    With parallel on they run through asyncio.to_thread under a semaphore of
    size threads. Either way the returned list is ordered by key, so the
    merged output does not depend on completion order.
    """

    def __init__(self, parallel: bool = False, threads: int = 1):
        self.parallel = parallel and threads > 1
        self.threads = max(1, threads)
        self.logger = logger.bind(component='JobOrchestrator')

    async def run(self, jobs: List[Job]) -> List[JobResult]:
        keys = [job.key for job in jobs]
        if len(set(map(_hashable, keys))) != len(keys):
            raise ValueError('job keys must be unique')
        self.logger.debug(
            f'Running {len(jobs)} jobs '
            f'({"parallel, " + str(self.threads) + " threads" if self.parallel else "sequential"})'
        )
        if self.parallel:
            results = await self._run_concurrent(jobs)
        else:
            results = [self._run_one(job) for job in jobs]
        return sorted(results, key=lambda r: _sort_key(r.key))

    def _run_one(self, job: Job) -> JobResult:
        try:
            return JobResult(key=job.key, value=job.func(*job.args, **job.kwargs))
        except Exception as e:
            self.logger.error(f'Job {job.key} failed: {e}')
            return JobResult(key=job.key, error=f'{type(e).__name__}: {e}')

    async def _run_concurrent(self, jobs: List[Job]) -> List[JobResult]:
        semaphore = asyncio.Semaphore(self.threads)

        async def process(job: Job):
            async with semaphore:
                return await asyncio.to_thread(job.func, *job.args, **job.kwargs)

        outcomes = await asyncio.gather(
            *[process(job) for job in jobs], return_exceptions=True
        )

        results = []
        for job, outcome in zip(jobs, outcomes):
            if isinstance(outcome, Exception):
                self.logger.error(f'Job {job.key} failed: {outcome}')
                results.append(
                    JobResult(key=job.key, error=f'{type(outcome).__name__}: {outcome}')
                )
            else:
                results.append(JobResult(key=job.key, value=outcome))
        return results

    def merge(self, results: List[JobResult]) -> Dict[Hashable, Any]:
        """Successful values by key."""
        return {_hashable(r.key): r.value for r in results if r.success}

    @staticmethod
    def summarize(results: List[JobResult]) -> Dict[str, int]:
        summary = {'total': len(results), 'successful': 0, 'failed': 0}
        for result in results:
            summary['successful' if result.success else 'failed'] += 1
        return summary


def _hashable(key: Any) -> Hashable:
    if isinstance(key, list):
        return tuple(_hashable(k) for k in key)
    return key


def _sort_key(key: Any):
    if isinstance(key, (tuple, list)):
        return tuple(str(k) if not isinstance(k, (int, float)) else k for k in key)
    return (key,) if isinstance(key, (int, float)) else (str(key),)
