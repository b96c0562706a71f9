"""Canonical in-memory model of HPO runs: objectives, trials, runs, groups,
plus incumbent and status queries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

from .errors import IncompatibleRunsError, UnknownNameError
from .json_util import stable_hash
from .spaces import ConfigurationSpace

#: Budget selector: per config, use its largest evaluated budget.
HIGHEST = "highest"
#: Budget selector: do not filter by budget.
ALL = "all"


class Direction(str, Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class TrialStatus(str, Enum):
    SUCCESS = "success"
    TIMEOUT = "timeout"
    MEMORYOUT = "memoryout"
    CRASHED = "crashed"
    RUNNING = "running"
    NOT_EVALUATED = "not_evaluated"


@dataclass(frozen=True)
class Objective:
    name: str
    direction: Direction = Direction.MINIMIZE
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self) -> None:
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"objective {self.name}: lower > upper")

    def better(self, a: float, b: float) -> bool:
        """True iff value `a` improves on value `b`."""
        return a < b if self.direction is Direction.MINIMIZE else a > b

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "direction": self.direction.value,
                "lower": self.lower, "upper": self.upper}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Objective":
        return cls(d["name"], Direction(d["direction"]), d.get("lower"), d.get("upper"))


@dataclass(frozen=True)
class Trial:
    """One evaluation of a configuration at a budget."""

    config_id: str
    budget: float
    objectives: dict[str, float | None]
    status: TrialStatus
    start_time: float = 0.0
    end_time: float | None = None
    seed: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "config_id": self.config_id,
            "budget": self.budget,
            "seed": self.seed,
            "objectives": dict(self.objectives),
            "status": self.status.value,
            "start": self.start_time,
            "end": self.end_time,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Trial":
        return cls(
            config_id=d["config_id"],
            budget=float(d["budget"]),
            objectives=dict(d.get("objectives") or {}),
            status=TrialStatus(d["status"]),
            start_time=float(d.get("start", 0.0)),
            end_time=None if d.get("end") is None else float(d["end"]),
            seed=None if d.get("seed") is None else int(d["seed"]),
        )


@dataclass
class Run:
    """A complete HPO process. Immutable by convention after construction."""

    id: str
    name: str
    space: ConfigurationSpace
    objectives: list[Objective]
    budgets: list[float]
    configs: dict[str, dict[str, Any]]
    trials: list[Trial]
    meta: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def content_hash(space: ConfigurationSpace, objectives: list[Objective],
                     budgets: list[float], configs: dict[str, dict[str, Any]],
                     trials: list[Trial]) -> str:
        return stable_hash({
            "space": space.to_dict(),
            "objectives": [o.to_dict() for o in objectives],
            "budgets": list(budgets),
            "configs": configs,
            "trials": [t.to_dict() for t in trials],
        })

    @classmethod
    def create(cls, name: str, space: ConfigurationSpace, objectives: list[Objective],
               budgets: list[float], configs: dict[str, dict[str, Any]],
               trials: list[Trial], meta: dict[str, str] | None = None) -> "Run":
        rid = cls.content_hash(space, objectives, budgets, configs, trials)
        full_meta = dict(meta or {})
        full_meta.setdefault("optimizer", "unknown")
        return cls(rid, name, space, objectives, list(budgets), configs, list(trials), full_meta)

    def objective(self, name: str) -> Objective:
        for o in self.objectives:
            if o.name == name:
                return o
        raise UnknownNameError("objective", name)

    @property
    def objective_names(self) -> list[str]:
        return [o.name for o in self.objectives]


@dataclass
class RunGroup:
    """Non-empty list of runs with identical objectives, analyzed together."""

    name: str
    members: list[Run]

    def __post_init__(self) -> None:
        if not self.members:
            raise IncompatibleRunsError("a run group needs at least one member")

    @property
    def objectives(self) -> list[Objective]:
        return self.members[0].objectives

    def objective(self, name: str) -> Objective:
        return self.members[0].objective(name)


def group_runs(name: str, runs: list[Run]) -> RunGroup:
    """Group runs, checking that objective names and directions line up."""
    if not runs:
        raise IncompatibleRunsError("cannot group an empty list of runs")
    reference = [(o.name, o.direction) for o in runs[0].objectives]
    for run in runs[1:]:
        sig = [(o.name, o.direction) for o in run.objectives]
        if sig != reference:
            raise IncompatibleRunsError(
                f"run {run.name!r} declares objectives {sig}, expected {reference}"
            )
    return RunGroup(name, list(runs))


def member_runs(run_or_group: Run | RunGroup) -> list[Run]:
    return run_or_group.members if isinstance(run_or_group, RunGroup) else [run_or_group]


def config_violations(space: ConfigurationSpace, cid: str, config: dict[str, Any]) -> list[str]:
    """Invariant violations of one config against its space."""
    out: list[str] = []
    for key, value in config.items():
        if key not in space:
            out.append(f"config {cid!r}: unknown hyperparameter {key!r}")
            continue
        if not space.is_active(key, config):
            out.append(f"config {cid!r}: inactive hyperparameter {key!r} has a value")
        elif not space.get(key).contains(value):
            out.append(f"config {cid!r}: value {value!r} outside bounds/choices of {key!r}")
    for hp in space:
        if hp.name not in config and space.is_active(hp.name, config):
            out.append(f"config {cid!r}: missing value for active hyperparameter {hp.name!r}")
    return out


def validate_run(run: Run) -> list[str]:
    """Structural invariant check; returns one description per violation."""
    out: list[str] = []
    declared = set(run.objective_names)
    budgets = set(run.budgets)

    if any(b2 <= b1 for b1, b2 in zip(run.budgets, run.budgets[1:])):
        out.append(f"budgets not strictly increasing: {run.budgets}")

    for cid, config in run.configs.items():
        out.extend(config_violations(run.space, cid, config))

    for i, trial in enumerate(run.trials):
        where = f"trial {i} (config {trial.config_id!r})"
        if trial.config_id not in run.configs:
            out.append(f"{where}: unknown config_id {trial.config_id!r}")
        if trial.budget not in budgets:
            out.append(f"{where}: budget {trial.budget} not declared")
        for name in trial.objectives:
            if name not in declared:
                out.append(f"{where}: unknown objective {name!r}")
        if trial.status is TrialStatus.SUCCESS:
            for name in declared:
                v = trial.objectives.get(name)
                if v is None or not math.isfinite(v):
                    out.append(f"{where}: successful but objective {name!r} is missing or non-finite")
        if trial.end_time is not None and trial.end_time < trial.start_time:
            out.append(f"{where}: end_time {trial.end_time} before start_time {trial.start_time}")
    return out


def select_trials(run: Run, budget: float | str = HIGHEST,
                  statuses: tuple[TrialStatus, ...] = (TrialStatus.SUCCESS,)) -> list[Trial]:
    """Trials matching a status filter at a budget selection.

    `budget` is a declared budget value, HIGHEST (per config, its largest
    budget among matching trials), or ALL.
    """
    matching = [t for t in run.trials if t.status in statuses]
    if budget == ALL:
        return matching
    if budget == HIGHEST:
        top: dict[str, float] = {}
        for t in matching:
            if t.config_id not in top or t.budget > top[t.config_id]:
                top[t.config_id] = t.budget
        return [t for t in matching if t.budget == top[t.config_id]]
    return [t for t in matching if t.budget == budget]


def best_values(run: Run, objective: str, budget: float | str = HIGHEST) -> dict[str, tuple[float, float]]:
    """Per config: (best objective value, earliest end_time attaining it)
    over successful trials at the budget selection."""
    obj = run.objective(objective)
    best: dict[str, tuple[float, float]] = {}
    for t in select_trials(run, budget):
        v = t.objectives.get(objective)
        if v is None or not math.isfinite(v):
            continue
        end = t.end_time if t.end_time is not None else math.inf
        if t.config_id not in best:
            best[t.config_id] = (v, end)
            continue
        cur_v, cur_end = best[t.config_id]
        if obj.better(v, cur_v) or (v == cur_v and end < cur_end):
            best[t.config_id] = (v, end)
    return best


def incumbent(run_or_group: Run | RunGroup, objective: str,
              budget: float | str = HIGHEST) -> tuple[str, float] | None:
    """Best-performing config at the budget selection, or None.

    Ties break on earliest end_time, then lexicographic config id.
    """
    obj = member_runs(run_or_group)[0].objective(objective)
    winner: tuple[str, float, float] | None = None  # (config_id, value, end)
    for run in member_runs(run_or_group):
        run.objective(objective)  # raise on undeclared name
        for cid, (value, end) in best_values(run, objective, budget).items():
            if winner is None:
                winner = (cid, value, end)
                continue
            _, w_value, w_end = winner
            if obj.better(value, w_value) or (
                value == w_value and (end, cid) < (w_end, winner[0])
            ):
                winner = (cid, value, end)
    return None if winner is None else (winner[0], winner[1])


def status_counts(run: Run, budget: float | str = ALL) -> dict[TrialStatus, int]:
    """Trial counts per status, over all trials or one budget."""
    if budget != ALL and budget not in run.budgets:
        raise UnknownNameError("budget", str(budget))
    counts = {s: 0 for s in TrialStatus}
    for t in run.trials:
        if budget == ALL or t.budget == budget:
            counts[t.status] += 1
    return counts
