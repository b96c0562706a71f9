"""Asynchronous analysis jobs: FIFO worker threads, deduplication by cache
key, and a one-file-per-key disk cache of result payload bytes."""
from __future__ import annotations

import json
import logging
import os
import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ..json_util import canonical_bytes, stable_hash
from ..runs import Run
from .plugins import build_payload

log = logging.getLogger(__name__)

QUEUED = "queued"
RUNNING = "running"
FINISHED = "finished"
FAILED = "failed"


def cache_key(plugin: str, params: dict[str, Any], id_hash_pairs: Sequence[tuple[str, str]]) -> str:
    """Identity of a unit of work: plugin, canonical params, and the sorted
    (registry id, content hash) pairs of the selected runs."""
    return stable_hash({
        "plugin": plugin,
        "params": params,
        "runs": [[rid, h] for rid, h in sorted(id_hash_pairs)],
    })


@dataclass
class Job:
    id: str
    plugin: str
    run_ids: list[str]
    params: dict[str, Any]
    state: str = QUEUED
    error: str | None = None
    payload_bytes: bytes | None = None
    created: float = field(default_factory=time.time)
    # immutable snapshot taken at submission; keeps the result consistent
    # with the cache key even if the registry refreshes meanwhile
    runs: list[Run] = field(default_factory=list, repr=False)

    def status_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"job_id": self.id, "plugin": self.plugin,
                               "run_ids": self.run_ids, "params": self.params,
                               "state": self.state}
        if self.state == FAILED:
            out["error"] = self.error
        if self.state == FINISHED and self.payload_bytes is not None:
            out["result"] = json.loads(self.payload_bytes)
        return out


class JobManager:
    """FIFO job execution with at most one job per cache key.

    Status reads only take the table lock, never waiting on computations.
    """

    def __init__(self, cache_dir: str | Path | None = None, workers: int | None = None):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        if self.cache_dir is not None:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._queue: "queue.SimpleQueue[str]" = queue.SimpleQueue()
        self._stop = threading.Event()
        n = workers if workers is not None else (os.cpu_count() or 2)
        self._threads = [threading.Thread(target=self._worker, name=f"hpolens-worker-{i}", daemon=True)
                         for i in range(max(1, n))]
        for t in self._threads:
            t.start()

    # -- cache -------------------------------------------------------------

    def _cache_file(self, key: str) -> Path | None:
        return None if self.cache_dir is None else self.cache_dir / f"{key}.json"

    def _read_cache(self, key: str) -> bytes | None:
        f = self._cache_file(key)
        if f is None or not f.is_file():
            return None
        return f.read_bytes()

    def _write_cache(self, job: Job, payload: bytes) -> None:
        f = self._cache_file(job.id)
        if f is None:
            return
        tmp = f.with_suffix(".tmp")
        tmp.write_bytes(payload)
        tmp.replace(f)
        meta = {"plugin": job.plugin, "run_ids": job.run_ids, "params": job.params,
                "created": job.created}
        f.with_suffix(".meta.json").write_bytes(canonical_bytes(meta))

    # -- submission and polling ---------------------------------------------

    def submit(self, plugin: str, params: dict[str, Any],
               selection: Sequence[tuple[str, Run]]) -> Job:
        """Submit canonicalized work; returns the (possibly pre-existing) job.

        `selection` holds (registry id, Run) pairs, already expanded and
        sorted; `params` must come from validate_params."""
        key = cache_key(plugin, params, [(rid, run.id) for rid, run in selection])
        run_ids = [rid for rid, _ in selection]
        with self._lock:
            job = self._jobs.get(key)
            if job is not None:
                return job
            cached = self._read_cache(key)
            if cached is not None:
                job = Job(id=key, plugin=plugin, run_ids=run_ids, params=params,
                          state=FINISHED, payload_bytes=cached)
                self._jobs[key] = job
                return job
            job = Job(id=key, plugin=plugin, run_ids=run_ids, params=params,
                      runs=[run for _, run in selection])
            self._jobs[key] = job
            self._queue.put(key)
            return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    # -- workers -------------------------------------------------------------

    def _worker(self) -> None:
        while not self._stop.is_set():
            try:
                key = self._queue.get(timeout=0.1)
            except queue.Empty:
                continue
            with self._lock:
                job = self._jobs[key]
                job.state = RUNNING
            try:
                payload = build_payload(job.plugin, job.run_ids, job.runs, job.params)
                data = canonical_bytes(payload)
            except Exception as e:
                log.info("job %s failed: %s", key, e)
                with self._lock:
                    job.state = FAILED
                    job.error = f"{type(e).__name__}: {e}"
                continue
            try:
                self._write_cache(job, data)
            except OSError as e:  # cache is best-effort; the result still serves
                log.warning("could not persist cache entry %s: %s", key, e)
            with self._lock:
                job.state = FINISHED
                job.payload_bytes = data
                job.runs = []

    def shutdown(self, timeout: float = 2.0) -> None:
        self._stop.set()
        for t in self._threads:
            t.join(timeout=timeout)
