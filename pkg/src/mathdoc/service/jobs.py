"""Background rule-mining jobs: FIFO queue over a bounded worker pool.

States move queued -> running -> done | failed; results are immutable
once done, and the same CSV bytes plus order always produce the same
result bytes.  Finished jobs beyond the retention count are evicted
oldest first.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from .. import rulemine
from ..boolpoly import TermOrder
from ..errors import DomainError


@dataclass
class AnalysisJob:
    job_id: str
    state: str = "queued"  # queued | running | done | failed
    order: str = "degrevlex"
    dataset_digest: str = ""
    error: str = ""
    result: Optional[bytes] = None
    sequence: int = 0

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "state": self.state,
            "order": self.order,
            "dataset_digest": self.dataset_digest,
            "error": self.error,
        }


def default_runner(csv_bytes: bytes, order: TermOrder) -> bytes:
    dataset = rulemine.load_csv(csv_bytes)
    return rulemine.export_rules_json(rulemine.mine_rules(dataset, order))


class JobManager:
    def __init__(
        self,
        max_workers: int = 2,
        retention: int = 50,
        runner: Callable[[bytes, TermOrder], bytes] = default_runner,
    ):
        self._executor = ThreadPoolExecutor(max_workers=max_workers)
        self._jobs: dict[str, AnalysisJob] = {}
        self._lock = threading.Lock()
        self._retention = retention
        self._runner = runner
        self._counter = 0
        self._closed = False

    def submit(self, csv_bytes: bytes, order: TermOrder) -> str:
        # validate eagerly so format errors surface on the request, not in the job
        dataset = rulemine.load_csv(csv_bytes)
        with self._lock:
            if self._closed:
                raise DomainError("job manager is shut down")
            self._counter += 1
            job = AnalysisJob(
                job_id=uuid.uuid4().hex,
                order=order.value,
                dataset_digest=dataset.source_digest,
                sequence=self._counter,
            )
            self._jobs[job.job_id] = job
            self._evict_locked()
        self._executor.submit(self._run, job.job_id, csv_bytes, order)
        return job.job_id

    def _run(self, job_id: str, csv_bytes: bytes, order: TermOrder) -> None:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None or job.state != "queued":
                return
            job.state = "running"
        try:
            result = self._runner(csv_bytes, order)
        except DomainError as exc:
            self._finish(job_id, error=str(exc))
        except Exception as exc:  # defensive: never lose a job silently
            self._finish(job_id, error=f"internal error: {exc}")
        else:
            self._finish(job_id, result=result)

    def _finish(self, job_id: str, result: Optional[bytes] = None, error: str = "") -> None:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None or job.state in ("done", "failed"):
                return
            if result is not None:
                job.state = "done"
                job.result = result
            else:
                job.state = "failed"
                job.error = error
            self._evict_locked()

    def _evict_locked(self) -> None:
        finished = [j for j in self._jobs.values() if j.state in ("done", "failed")]
        excess = len(finished) - self._retention
        if excess > 0:
            for job in sorted(finished, key=lambda j: j.sequence)[:excess]:
                del self._jobs[job.job_id]

    def get(self, job_id: str) -> Optional[AnalysisJob]:
        with self._lock:
            return self._jobs.get(job_id)

    def shutdown(self) -> None:
        """Stop the pool; unfinished jobs are marked failed/aborted."""
        with self._lock:
            self._closed = True
        self._executor.shutdown(wait=False, cancel_futures=True)
        with self._lock:
            for job in self._jobs.values():
                if job.state in ("queued", "running"):
                    job.state = "failed"
                    job.error = "aborted"
