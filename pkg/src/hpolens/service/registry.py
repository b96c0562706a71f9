"""Registry of on-disk runs addressed by directory name, with live tailing
and named run groups."""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from ..convert import TABULAR, RunSource, detect_format
from ..errors import HpolensError, UnknownNameError
from ..runs import Run, TrialStatus

log = logging.getLogger(__name__)

GROUP_PREFIX = "group:"


def is_live(run: Run) -> bool:
    return any(t.status is TrialStatus.RUNNING for t in run.trials)


@dataclass
class _Entry:
    source: RunSource
    run: Run


class RunRegistry:
    """Maps stable registry ids (directory names) to loaded runs.

    Registry ids stay fixed across refreshes while each Run's content hash
    tracks what is actually on disk; accessors re-stat the files so callers
    always see appended trials."""

    def __init__(self, runs_dir: str | Path):
        self.runs_dir = Path(runs_dir)
        self._lock = threading.RLock()
        self._entries: dict[str, _Entry] = {}
        self._groups: dict[str, list[str]] = {}
        self._poll_thread: threading.Thread | None = None
        self._stop = threading.Event()

    # -- discovery -----------------------------------------------------------

    def scan(self) -> None:
        """Pick up new run directories, drop vanished ones."""
        if not self.runs_dir.is_dir():
            raise FileNotFoundError(f"runs directory does not exist: {self.runs_dir}")
        with self._lock:
            for d in sorted(self.runs_dir.iterdir()):
                rid = d.name
                if not d.is_dir() or rid in self._entries:
                    continue
                if detect_format(d) != TABULAR:
                    continue
                source = RunSource(path=d)
                try:
                    self._entries[rid] = _Entry(source, source.load())
                except HpolensError as e:
                    log.warning("skipping %s: %s", d, e)
            for rid in list(self._entries):
                if not (self.runs_dir / rid).is_dir():
                    del self._entries[rid]

    def _refresh_entry(self, entry: _Entry) -> None:
        try:
            run, changed = entry.source.refresh(entry.run)
            if changed:
                entry.run = run
        except (HpolensError, OSError) as e:
            log.warning("refresh failed for %s: %s", entry.source.path, e)

    def refresh_all(self) -> None:
        with self._lock:
            self.scan()
            for entry in self._entries.values():
                self._refresh_entry(entry)

    # -- access ---------------------------------------------------------------

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def list_runs(self) -> list[tuple[str, Run, bool]]:
        self.refresh_all()
        with self._lock:
            return [(rid, e.run, is_live(e.run)) for rid, e in sorted(self._entries.items())]

    def get_run(self, rid: str) -> Run:
        with self._lock:
            entry = self._entries.get(rid)
            if entry is None:
                self.scan()
                entry = self._entries.get(rid)
            if entry is None:
                raise UnknownNameError("run", rid)
            self._refresh_entry(entry)
            return entry.run

    # -- groups ----------------------------------------------------------------

    def add_group(self, name: str, run_ids: list[str]) -> str:
        if not name:
            raise UnknownNameError("group name", name)
        members: list[str] = []
        for rid in run_ids:
            self.get_run(rid)
            members.append(rid)
        if not members:
            raise UnknownNameError("run", "(empty group)")
        with self._lock:
            self._groups[name] = members
        return GROUP_PREFIX + name

    def resolve(self, run_ids: list[str]) -> list[tuple[str, Run]]:
        """Expand group ids and load runs; sorted by registry id, deduped."""
        expanded: list[str] = []
        for rid in run_ids:
            if rid.startswith(GROUP_PREFIX):
                gname = rid[len(GROUP_PREFIX):]
                with self._lock:
                    members = self._groups.get(gname)
                if members is None:
                    raise UnknownNameError("group", gname)
                expanded.extend(members)
            else:
                expanded.append(rid)
        out = []
        for rid in sorted(set(expanded)):
            out.append((rid, self.get_run(rid)))
        return out

    # -- background polling -----------------------------------------------------

    def start_polling(self, interval: float) -> None:
        if interval <= 0 or self._poll_thread is not None:
            return

        def loop() -> None:
            while not self._stop.wait(interval):
                try:
                    self.refresh_all()
                except Exception as e:  # keep the poller alive
                    log.warning("poll failed: %s", e)

        self._poll_thread = threading.Thread(target=loop, name="hpolens-poller", daemon=True)
        self._poll_thread.start()

    def stop_polling(self) -> None:
        self._stop.set()
        if self._poll_thread is not None:
            self._poll_thread.join(timeout=2.0)
            self._poll_thread = None
