"""Converters between on-disk run data and Run objects.

The canonical tabular format is a directory of four UTF-8 files: meta.json,
space.json, configs.json, and trials.jsonl (one trial object per line).
RunSource tails trials.jsonl so still-running optimizations can be reloaded
incrementally.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .errors import RunValidationError, SchemaError
from .json_util import canonical_dumps
from .runs import Objective, Run, Trial, TrialStatus, config_violations, validate_run
from .spaces import ConfigurationSpace

META_FILE = "meta.json"
SPACE_FILE = "space.json"
CONFIGS_FILE = "configs.json"
TRIALS_FILE = "trials.jsonl"
REQUIRED_FILES = (META_FILE, SPACE_FILE, CONFIGS_FILE, TRIALS_FILE)

TABULAR = "tabular"
AUTO = "auto"
UNKNOWN = "unknown"

_TRIAL_KEYS = ("config_id", "budget", "seed", "objectives", "status", "start", "end")


def detect_format(path: str | Path) -> str:
    """TABULAR iff the directory holds all four mandatory files."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such path: {p}")
    if p.is_dir() and all((p / f).is_file() for f in REQUIRED_FILES):
        return TABULAR
    return UNKNOWN


def _load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e.msg}", file=path.name, line=e.lineno) from None


def _parse_meta(raw: Any, file: str) -> tuple[str, str, list[Objective], list[float]]:
    if not isinstance(raw, dict):
        raise SchemaError("meta must be an object", file=file)
    for key in ("name", "optimizer", "objectives", "budgets"):
        if key not in raw:
            raise SchemaError(f"missing field {key!r}", file=file)
    try:
        objectives = [Objective.from_dict(o) for o in raw["objectives"]]
        budgets = [float(b) for b in raw["budgets"]]
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad objectives/budgets: {e}", file=file) from None
    return str(raw["name"]), str(raw["optimizer"]), objectives, budgets


def _parse_space(raw: Any, file: str) -> ConfigurationSpace:
    try:
        return ConfigurationSpace.from_dict(raw)
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad configuration space: {e}", file=file) from None


def _parse_configs(raw: Any, file: str) -> dict[str, dict[str, Any]]:
    if not isinstance(raw, dict) or not all(isinstance(v, dict) for v in raw.values()):
        raise SchemaError("configs must map config_id to value objects", file=file)
    return {str(k): dict(v) for k, v in raw.items()}


def _parse_trial(obj: Any, file: str, line: int) -> Trial:
    if not isinstance(obj, dict):
        raise SchemaError("trial line must be an object", file=file, line=line)
    for key in _TRIAL_KEYS:
        if key not in obj:
            raise SchemaError(f"missing field {key!r}", file=file, line=line)
    try:
        return Trial.from_dict(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad trial: {e}", file=file, line=line) from None


def _parse_trials(data: bytes, first_line: int, strict: bool) -> tuple[list[Trial], int, int]:
    """Parse complete trial lines from raw bytes.

    Returns (trials, bytes consumed, physical lines consumed). A trailing
    chunk without a newline is parsed when it is valid JSON; otherwise it is
    a schema error under `strict` and is left unconsumed for a later append
    otherwise."""
    trials: list[Trial] = []
    consumed = 0
    lines = 0
    for chunk in data.split(b"\n")[:-1]:
        lineno = first_line + lines
        text = chunk.decode("utf-8").strip()
        if text:
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as e:
                raise SchemaError(f"invalid JSON: {e.msg}", file=TRIALS_FILE, line=lineno) from None
            trials.append(_parse_trial(obj, TRIALS_FILE, lineno))
        consumed += len(chunk) + 1
        lines += 1
    tail = data[consumed:]
    if tail:
        # no trailing newline: either the file just ends that way or a
        # writer is mid-line; only strict parsing treats the latter as fatal
        text = tail.decode("utf-8", errors="replace").strip()
        lineno = first_line + lines
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            if strict:
                raise SchemaError(f"invalid JSON: {e.msg}", file=TRIALS_FILE, line=lineno) from None
            return trials, consumed, lines
        trials.append(_parse_trial(obj, TRIALS_FILE, lineno))
        consumed += len(tail)
        lines += 1
    return trials, consumed, lines


def load_tabular(path: str | Path) -> Run:
    """Read a run directory; raises SchemaError / RunValidationError."""
    p = Path(path)
    if detect_format(p) != TABULAR:
        missing = [f for f in REQUIRED_FILES if not (p / f).is_file()]
        raise SchemaError(f"not a tabular run directory (missing {', '.join(missing)})", file=str(p))
    name, optimizer, objectives, budgets = _parse_meta(_load_json(p / META_FILE), META_FILE)
    space = _parse_space(_load_json(p / SPACE_FILE), SPACE_FILE)
    configs = _parse_configs(_load_json(p / CONFIGS_FILE), CONFIGS_FILE)
    data = (p / TRIALS_FILE).read_bytes()
    trials, _, _ = _parse_trials(data, first_line=1, strict=True)
    run = Run.create(name=name, space=space, objectives=objectives, budgets=budgets,
                     configs=configs, trials=trials, meta={"optimizer": optimizer})
    violations = validate_run(run)
    if violations:
        raise RunValidationError(violations)
    return run


def write_tabular(run: Run, path: str | Path, overwrite: bool = False) -> None:
    """Write the canonical tabular files; output bytes are deterministic."""
    violations = validate_run(run)
    if violations:
        raise RunValidationError(violations)
    p = Path(path)
    if p.exists() and any(p.iterdir()) and not overwrite:
        raise FileExistsError(f"refusing to write into non-empty directory {p}")
    p.mkdir(parents=True, exist_ok=True)
    meta = {
        "name": run.name,
        "optimizer": run.meta.get("optimizer", "unknown"),
        "objectives": [o.to_dict() for o in run.objectives],
        "budgets": run.budgets,
    }
    (p / META_FILE).write_text(canonical_dumps(meta) + "\n", encoding="utf-8")
    (p / SPACE_FILE).write_text(canonical_dumps(run.space.to_dict()) + "\n", encoding="utf-8")
    (p / CONFIGS_FILE).write_text(canonical_dumps(run.configs) + "\n", encoding="utf-8")
    lines = "".join(canonical_dumps(t.to_dict()) + "\n" for t in run.trials)
    (p / TRIALS_FILE).write_text(lines, encoding="utf-8")


def _stat(path: Path) -> tuple[int, int]:
    st = path.stat()
    return st.st_size, st.st_mtime_ns


@dataclass
class RunSource:
    """A tailable on-disk run directory.

    `watermark` remembers (size, mtime_ns) per file already read; appended
    trials.jsonl bytes are parsed incrementally, anything else triggers a
    full reload.
    """

    path: Path
    format: str = AUTO
    watermark: dict[str, tuple[int, int]] = field(default_factory=dict)
    _trial_lines: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        self.path = Path(self.path)

    def load(self) -> Run:
        fmt = detect_format(self.path) if self.format == AUTO else self.format
        if fmt != TABULAR:
            raise SchemaError(f"no loadable run format at {self.path}", file=str(self.path))
        name, optimizer, objectives, budgets = _parse_meta(_load_json(self.path / META_FILE), META_FILE)
        space = _parse_space(_load_json(self.path / SPACE_FILE), SPACE_FILE)
        configs = _parse_configs(_load_json(self.path / CONFIGS_FILE), CONFIGS_FILE)
        data = (self.path / TRIALS_FILE).read_bytes()
        trials, consumed, lines = _parse_trials(data, first_line=1, strict=False)
        run = Run.create(name=name, space=space, objectives=objectives, budgets=budgets,
                         configs=configs, trials=trials, meta={"optimizer": optimizer})
        violations = validate_run(run)
        if violations:
            raise RunValidationError(violations)
        for f in (META_FILE, SPACE_FILE, CONFIGS_FILE):
            self.watermark[f] = _stat(self.path / f)
        self.watermark[TRIALS_FILE] = (consumed, _stat(self.path / TRIALS_FILE)[1])
        self._trial_lines = lines
        return run

    def refresh(self, previous: Run) -> tuple[Run, bool]:
        """Reload if files changed; never mutates `previous`.

        Appends to trials.jsonl are parsed alone; shrinkage or changes to the
        other files fall back to a full reload. `changed` reports whether run
        content (hence its id) differs."""
        stats = {f: _stat(self.path / f) for f in REQUIRED_FILES}
        if all(stats[f] == self.watermark.get(f) for f in REQUIRED_FILES):
            return previous, False
        fixed_changed = any(stats[f] != self.watermark.get(f)
                            for f in (META_FILE, SPACE_FILE, CONFIGS_FILE))
        old_size = self.watermark.get(TRIALS_FILE, (0, 0))[0]
        if fixed_changed or stats[TRIALS_FILE][0] < old_size:
            run = self.load()
            return run, run.id != previous.id
        with open(self.path / TRIALS_FILE, "rb") as fh:
            fh.seek(old_size)
            data = fh.read()
        new_trials, consumed, lines = _parse_trials(data, first_line=self._trial_lines + 1, strict=False)
        self.watermark[TRIALS_FILE] = (old_size + consumed, stats[TRIALS_FILE][1])
        self._trial_lines += lines
        if not new_trials:
            return previous, False
        run = Run.create(name=previous.name, space=previous.space, objectives=previous.objectives,
                         budgets=previous.budgets, configs=previous.configs,
                         trials=previous.trials + new_trials, meta=previous.meta)
        violations = validate_run(run)
        if violations:
            raise RunValidationError(violations)
        return run, True


def refresh(source: RunSource, previous: Run) -> tuple[Run, bool]:
    return source.refresh(previous)


@dataclass(frozen=True)
class TrialRecord:
    """Programmatic trial submission: a Trial with inline config values."""

    config: dict[str, Any]
    budget: float
    objectives: dict[str, float | None]
    status: TrialStatus = TrialStatus.SUCCESS
    start_time: float = 0.0
    end_time: float | None = None
    seed: int | None = None


def ingest_records(space: ConfigurationSpace, objectives: list[Objective],
                   budgets: list[float], records: Sequence[TrialRecord | dict],
                   name: str = "ingested", optimizer: str = "programmatic") -> Run:
    """Build a Run from in-memory records.

    Identical config-value dicts share one config id; ids are "c<k>" in
    first-seen order."""
    configs: dict[str, dict[str, Any]] = {}
    seen: dict[str, str] = {}
    trials: list[Trial] = []
    for i, rec in enumerate(records):
        if isinstance(rec, dict):
            rec = TrialRecord(
                config=rec["config"], budget=rec["budget"], objectives=rec["objectives"],
                status=TrialStatus(rec.get("status", TrialStatus.SUCCESS)),
                start_time=rec.get("start", 0.0), end_time=rec.get("end"),
                seed=rec.get("seed"))
        key = canonical_dumps(rec.config)
        cid = seen.get(key)
        if cid is None:
            cid = f"c{len(configs)}"
            bad = config_violations(space, cid, rec.config)
            if bad:
                raise RunValidationError([f"record {i}: {v}" for v in bad])
            seen[key] = cid
            configs[cid] = dict(rec.config)
        trials.append(Trial(config_id=cid, budget=float(rec.budget),
                            objectives=dict(rec.objectives), status=TrialStatus(rec.status),
                            start_time=float(rec.start_time),
                            end_time=None if rec.end_time is None else float(rec.end_time),
                            seed=None if rec.seed is None else int(rec.seed)))
    run = Run.create(name=name, space=space, objectives=list(objectives), budgets=list(budgets),
                     configs=configs, trials=trials, meta={"optimizer": optimizer})
    violations = validate_run(run)
    if violations:
        raise RunValidationError(violations)
    return run
