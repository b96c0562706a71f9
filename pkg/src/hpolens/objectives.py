"""Objective-centric analyses: incumbent trajectories over time or trial
count, and two-objective Pareto fronts with direction-aware dominance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySelectionError
from .runs import HIGHEST, Direction, Run, RunGroup, best_values, select_trials

TRIALS_AXIS = "trials"
TIME_AXIS = "time"


@dataclass
class Trajectory:
    """Incumbent objective value as a step function of time or trial index."""

    x_axis: str
    xs: list[float]
    ys: list[float]
    std: list[float] | None = None

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys):
            raise ValueError("xs and ys lengths differ")
        if self.std is not None and len(self.std) != len(self.xs):
            raise ValueError("std length differs from xs")


@dataclass(frozen=True)
class ParetoPoint:
    run_id: str
    config_id: str
    values: tuple[float, float]


@dataclass
class ParetoResult:
    objective_a: str
    objective_b: str
    points: list[ParetoPoint]
    frontier: list[bool]

    def frontier_points(self) -> list[ParetoPoint]:
        return [p for p, keep in zip(self.points, self.frontier) if keep]


def _members(run_or_group: Run | RunGroup) -> list[Run]:
    if isinstance(run_or_group, RunGroup):
        return list(run_or_group.members)
    return [run_or_group]


def _member_series(run: Run, objective_name: str, budget,
                   x_axis: str) -> tuple[list[float], list[float], float | None]:
    """Improvement points of one run, plus the terminal x for the time axis.

    The terminal point itself is appended by the caller so that group
    aggregation can place it after building the union grid. Empty lists when
    the selection is empty."""
    obj = run.objective(objective_name)
    trials = select_trials(run, budget=budget)
    if x_axis == TRIALS_AXIS:
        xs: list[float] = []
        ys: list[float] = []
        best: float | None = None
        for i, trial in enumerate(trials, start=1):
            v = trial.objectives[obj.name]
            if best is None or obj.better(v, best):
                best = v
            xs.append(float(i))
            ys.append(best)
        return xs, ys, None
    # Time axis: a point per incumbent improvement, judged in result-arrival
    # order; the terminal sits at the last result.
    timed = [t for t in trials if t.end_time is not None]
    if not timed:
        return [], [], None
    timed.sort(key=lambda t: t.end_time)
    xs, ys = [], []
    best = None
    for trial in timed:
        v = trial.objectives[obj.name]
        if best is None or obj.better(v, best):
            best = v
            xs.append(float(trial.end_time))
            ys.append(best)
    return xs, ys, float(timed[-1].end_time)


def cost_over_time(run_or_group: Run | RunGroup, objective_name: str,
                   budget=HIGHEST, x_axis: str = TRIALS_AXIS) -> Trajectory:
    """Step function of the incumbent objective value.

    Groups are aggregated on the union grid of member xs with last-value
    interpolation; ys is the member mean and std the population std. Members
    without an incumbent yet at a grid point sit out that point.
    """
    if x_axis not in (TRIALS_AXIS, TIME_AXIS):
        raise ValueError(f"x_axis must be {TRIALS_AXIS!r} or {TIME_AXIS!r}, got {x_axis!r}")
    series = [_member_series(run, objective_name, budget, x_axis) for run in _members(run_or_group)]
    series = [s for s in series if s[0]]
    if not series:
        raise EmptySelectionError("no successful trials with usable timestamps in selection")

    if not isinstance(run_or_group, RunGroup):
        xs, ys, terminal = series[0]
        if terminal is not None:
            xs = xs + [terminal]
            ys = ys + [ys[-1]]
        return Trajectory(x_axis=x_axis, xs=xs, ys=ys)

    # union grid of improvement points, then the terminal point at the last
    # end across members; a group of one thus reproduces its member exactly
    grid = sorted({x for xs, _, _ in series for x in xs})
    terminals = [t for _, _, t in series if t is not None]
    if terminals:
        grid.append(max(terminals))
    out_ys: list[float] = []
    out_std: list[float] = []
    for x in grid:
        vals = []
        for xs, ys, _ in series:
            # last value at or before x; absent if the member has not started
            pos = int(np.searchsorted(np.asarray(xs), x, side="right")) - 1
            if pos >= 0:
                vals.append(ys[pos])
        arr = np.asarray(vals)
        out_ys.append(float(arr.mean()))
        out_std.append(float(arr.std()))
    return Trajectory(x_axis=x_axis, xs=[float(x) for x in grid], ys=out_ys, std=out_std)


def _frontier_flags(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Non-dominated flags for minimization in both coordinates.

    Sweep over points sorted by (a, b): a point survives iff its b is strictly
    below every strictly-smaller-a point's b and minimal within its own a
    group, which keeps exact duplicates."""
    n = len(a)
    order = np.lexsort((b, a))
    keep = np.zeros(n, dtype=bool)
    best_before = np.inf
    i = 0
    while i < n:
        j = i
        while j < n and a[order[j]] == a[order[i]]:
            j += 1
        group = order[i:j]
        group_min = b[group].min()
        if group_min < best_before:
            keep[group[b[group] == group_min]] = True
        best_before = min(best_before, group_min)
        i = j
    return keep


def pareto_front(run_or_group: Run | RunGroup, objective_a: str, objective_b: str,
                 budget=HIGHEST) -> ParetoResult:
    """Configs on the two-objective Pareto frontier.

    A point is removed only by weak dominance with strict improvement in at
    least one coordinate, so duplicated coordinate pairs stay on the frontier
    together."""
    if objective_a == objective_b:
        raise ValueError("objective_a and objective_b must differ")
    members = _members(run_or_group)
    points: list[ParetoPoint] = []
    for run in members:
        obj_a = run.objective(objective_a)
        obj_b = run.objective(objective_b)
        va = best_values(run, objective_a, budget=budget)
        vb = best_values(run, objective_b, budget=budget)
        for cid in sorted(set(va) & set(vb)):
            points.append(ParetoPoint(run.id, cid, (va[cid][0], vb[cid][0])))
    if not points:
        raise EmptySelectionError("no configs with both objectives at the selected budget")

    sign_a = 1.0 if members[0].objective(objective_a).direction == Direction.MINIMIZE else -1.0
    sign_b = 1.0 if members[0].objective(objective_b).direction == Direction.MINIMIZE else -1.0
    a = np.array([p.values[0] * sign_a for p in points])
    b = np.array([p.values[1] * sign_b for p in points])
    keep = _frontier_flags(a, b)
    return ParetoResult(objective_a=objective_a, objective_b=objective_b,
                        points=points, frontier=[bool(k) for k in keep])
