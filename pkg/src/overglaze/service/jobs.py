"""In-process job store with a bounded worker pool and TTL expiry."""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

__all__ = ["JobFailure", "JobRecord", "JobStore"]


class JobFailure(Exception):
    """Raised by job work functions to fail with a structured error body."""

    def __init__(self, error: dict):
        super().__init__(error.get("message", "job failed"))
        self.error = error

_TRANSITIONS = {
    "queued": {"running", "failed"},
    "running": {"done", "failed"},
    "done": set(),
    "failed": set(),
}


@dataclass
class JobRecord:
    id: str
    status: str = "queued"
    result: dict | None = None
    error: dict | None = None
    finished_at: float | None = None

    def transition(self, status: str):
        if status not in _TRANSITIONS[self.status]:
            raise RuntimeError(f"illegal job transition {self.status} -> {status}")
        self.status = status


class JobStore:
    """Tracks optimization jobs; results expire `ttl_seconds` after finishing."""

    def __init__(
        self,
        max_workers: int = 2,
        ttl_seconds: float = 3600.0,
        clock: Callable[[], float] = time.monotonic,
    ):
        self._jobs: dict[str, JobRecord] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._ttl = ttl_seconds
        self._clock = clock

    def submit(self, work: Callable[[], dict]) -> str:
        job_id = uuid.uuid4().hex
        record = JobRecord(id=job_id)
        with self._lock:
            self._jobs[job_id] = record
        self._pool.submit(self._run, record, work)
        return job_id

    def _run(self, record: JobRecord, work: Callable[[], dict]):
        with self._lock:
            record.transition("running")
        try:
            result = work()
        except Exception as exc:  # surfaced to the client as a failed job
            if isinstance(exc, JobFailure):
                error = exc.error
            else:
                error = {"code": "job_failed", "message": str(exc)}
            with self._lock:
                record.transition("failed")
                record.error = error
                record.finished_at = self._clock()
            return
        with self._lock:
            record.transition("done")
            record.result = result
            record.finished_at = self._clock()

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            record = self._jobs.get(job_id)
            if record is None:
                return None
            if record.finished_at is not None and self._clock() - record.finished_at > self._ttl:
                del self._jobs[job_id]
                return None
            return record

    def shutdown(self):
        self._pool.shutdown(wait=True)
