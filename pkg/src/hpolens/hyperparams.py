"""Hyperparameter-centric analyses on a forest surrogate: global importance
via first-order variance decomposition, local importance around the
incumbent, greedy ablation paths, partial dependence, and parallel
coordinates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import (EncodedMatrix, decode_value, encode_config, encode_run,
                       random_support_configs)
from .errors import EmptySelectionError, InsufficientDataError
from .forest import ForestRegressor, make_forest
from .runs import HIGHEST, Direction, Run, best_values, incumbent
from .spaces import ConfigurationSpace, HpKind

FANOVA = "fanova"
LPI = "lpi"

DEFAULT_GRID_SIZE = 20
DEFAULT_PDP_SAMPLES = 50
DEFAULT_MAX_LINES = 200


@dataclass
class ImportanceReport:
    method: str
    objective: str
    budget: object
    names: list[str]
    importance: list[float]
    spread: list[float]

    def ranking(self) -> list[str]:
        order = sorted(range(len(self.names)), key=lambda i: (-self.importance[i], i))
        return [self.names[i] for i in order]


@dataclass(frozen=True)
class AblationStep:
    name: str
    value: object
    prediction: float


@dataclass
class AblationPath:
    origin: dict
    target: dict
    origin_prediction: float
    steps: list[AblationStep]


@dataclass
class PdpCurve:
    name: str
    grid: list[float]
    display: list[object]
    mean: list[float]
    std: list[float]


@dataclass
class ParallelCoordsData:
    axes: list[str]
    config_ids: list[str]
    lines: list[list[object]]


def _fit_surrogate(run: Run, objective_name: str, budget, forest_params: dict | None,
                   min_rows: int = 2) -> tuple[ForestRegressor, EncodedMatrix]:
    em = encode_run(run, objective_name, budget=budget)
    if em.n < min_rows:
        raise InsufficientDataError(f"need at least {min_rows} successful trials, got {em.n}")
    forest = make_forest(forest_params, feature_domains=em.forest_domains())
    forest.fit(em.X, em.y)
    return forest, em


def fanova(run: Run, objective_name: str, budget=HIGHEST,
           forest_params: dict | None = None) -> ImportanceReport:
    """First-order variance-decomposition importance per hyperparameter.

    Per tree, the share of total prediction variance explained by each
    dimension's marginal effect is computed exactly from leaf boxes; the
    report averages the shares over trees and uses their std as spread.
    Trees with zero total variance are skipped.
    """
    d = len(run.space)
    em = encode_run(run, objective_name, budget=budget)
    if em.n < max(2, d + 1):
        raise InsufficientDataError(f"need at least {max(2, d + 1)} successful trials, got {em.n}")
    # variance shares are scale-free, so standardize the target: affine
    # transforms of the objective then leave split selection unchanged
    scale = float(em.y.std())
    y = (em.y - float(em.y.mean())) / scale if scale > 0 else np.zeros_like(em.y)
    forest = make_forest(forest_params, feature_domains=em.forest_domains())
    forest.fit(em.X, y)
    ratios = []
    for tree in forest.trees_:
        v_total = tree.box_variance
        if v_total <= 0.0:
            continue
        per_dim = np.array([tree.marginal_variance(u) for u in range(d)])
        ratios.append(np.clip(per_dim / v_total, 0.0, 1.0))
    names = list(run.space.names)
    if not ratios:
        zeros = [0.0] * d
        return ImportanceReport(FANOVA, objective_name, budget, names, zeros, list(zeros))
    stacked = np.stack(ratios)
    return ImportanceReport(FANOVA, objective_name, budget, names,
                            [float(v) for v in stacked.mean(axis=0)],
                            [float(v) for v in stacked.std(axis=0)])


def _grid_for(space: ConfigurationSpace, j: int, grid_size: int) -> np.ndarray:
    hp = space.hyperparameters[j]
    if hp.kind is HpKind.CONSTANT:
        return np.array([0.0])
    if hp.kind in (HpKind.CATEGORICAL, HpKind.ORDINAL):
        return np.arange(len(hp.choices), dtype=float)
    return np.linspace(0.0, 1.0, grid_size)


def lpi(run: Run, objective_name: str, budget=HIGHEST, forest_params: dict | None = None,
        grid_size: int = DEFAULT_GRID_SIZE) -> ImportanceReport:
    """Local importance: prediction variance when one dimension sweeps a grid
    while the rest stay pinned at the incumbent, normalized across dims."""
    inc = incumbent(run, objective_name, budget=budget)
    if inc is None:
        raise InsufficientDataError("no incumbent at the selected budget")
    forest, em = _fit_surrogate(run, objective_name, budget, forest_params)
    space = run.space
    x0 = encode_config(space, run.configs[inc[0]])
    d = len(space)

    variances = np.zeros(d)
    per_tree = np.zeros((forest.n_trees, d))
    for j in range(d):
        grid = _grid_for(space, j, grid_size)
        X = np.tile(x0, (len(grid), 1))
        X[:, j] = grid
        preds = forest.predict_trees(X)  # (n_trees, len(grid))
        variances[j] = preds.mean(axis=0).var()
        per_tree[:, j] = preds.var(axis=1)

    total = variances.sum()
    importance = variances / total if total > 0 else np.zeros(d)
    tree_totals = per_tree.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        tree_ratios = np.where(tree_totals > 0, per_tree / tree_totals, 0.0)
    spread = tree_ratios.std(axis=0)
    return ImportanceReport(LPI, objective_name, budget, list(space.names),
                            [float(v) for v in importance], [float(v) for v in spread])


def ablation_path(run: Run, objective_name: str, budget=HIGHEST,
                  forest_params: dict | None = None) -> AblationPath:
    """Greedy path from the space default to the incumbent.

    Each step switches the single differing hyperparameter whose change the
    surrogate predicts to help most. Switching a parent atomically
    deactivates its now-inactive children and activates new ones at their
    defaults; those move to their target values in later steps.
    """
    inc = incumbent(run, objective_name, budget=budget)
    if inc is None:
        raise InsufficientDataError("no incumbent at the selected budget")
    forest, em = _fit_surrogate(run, objective_name, budget, forest_params)
    space = run.space
    direction = run.objective(objective_name).direction
    sign = 1.0 if direction is Direction.MINIMIZE else -1.0

    origin = space.default_config()
    target = dict(run.configs[inc[0]])
    current = dict(origin)
    current_pred = float(forest.predict(encode_config(space, current)[None, :])[0])
    origin_pred = current_pred

    names = list(space.names)
    steps: list[AblationStep] = []
    for _ in range(2 * len(space) + 1):
        diffs = [n for n in names if n in current and n in target and current[n] != target[n]]
        if not diffs:
            break
        best = None
        for n in diffs:
            candidate = space.settle({**current, n: target[n]})
            pred = float(forest.predict(encode_config(space, candidate)[None, :])[0])
            key = (sign * pred, -abs(pred - current_pred), names.index(n))
            if best is None or key < best[0]:
                best = (key, n, candidate, pred)
        _, n, candidate, pred = best
        steps.append(AblationStep(name=n, value=target[n], prediction=pred))
        current = candidate
        current_pred = pred
    else:
        raise AssertionError("ablation failed to converge on the incumbent")
    return AblationPath(origin=origin, target=target, origin_prediction=origin_pred, steps=steps)


def pdp(run: Run, objective_name: str, budget=HIGHEST, hp: str | None = None,
        forest_params: dict | None = None, grid_size: int = DEFAULT_GRID_SIZE,
        n_samples: int = DEFAULT_PDP_SAMPLES, seed: int = 0) -> PdpCurve:
    """Average marginal effect of one hyperparameter under the surrogate.

    One fixed set of uniform background samples is swept across the grid;
    std is the mean across samples of the across-tree std, an uncertainty
    signal rather than sample scatter.
    """
    if hp is None:
        raise ValueError("hp is required")
    space = run.space
    hp_obj = space.get(hp)  # raises UnknownNameError
    j = space.index(hp)
    forest, em = _fit_surrogate(run, objective_name, budget, forest_params)

    grid = _grid_for(space, j, grid_size)
    samples = random_support_configs(space, n_samples, seed=seed)
    X = np.repeat(samples[None, :, :], len(grid), axis=0)  # (g, n, d)
    X[:, :, j] = grid[:, None]
    flat = X.reshape(-1, len(space))
    preds = forest.predict_trees(flat)  # (n_trees, g*n)
    preds = preds.reshape(forest.n_trees, len(grid), n_samples)
    mean = preds.mean(axis=0).mean(axis=1)
    std = preds.std(axis=0).mean(axis=1)
    display = [decode_value(hp_obj, float(g)) for g in grid]
    return PdpCurve(name=hp, grid=[float(g) for g in grid], display=display,
                    mean=[float(v) for v in mean], std=[float(v) for v in std])


def parallel_coordinates(run: Run, objective_name: str, budget=HIGHEST,
                         hp_subset: list[str] | None = None,
                         max_lines: int = DEFAULT_MAX_LINES) -> ParallelCoordsData:
    """One line per config across hyperparameter axes plus the objective.

    Axes are ordered by fanova importance (descending) when the surrogate
    has enough data, otherwise by space order. Inactive hyperparameters
    yield gaps (None)."""
    obj = run.objective(objective_name)
    values = best_values(run, objective_name, budget=budget)
    if not values:
        raise EmptySelectionError("no successful trials at the selected budget")

    names = list(run.space.names)
    if hp_subset is not None:
        for n in hp_subset:
            run.space.get(n)  # raises UnknownNameError
        names = [n for n in names if n in set(hp_subset)]
    try:
        report = fanova(run, objective_name, budget=budget)
        ranked = [n for n in report.ranking() if n in set(names)]
    except InsufficientDataError:
        ranked = names

    sign = 1.0 if obj.direction is Direction.MINIMIZE else -1.0
    ordered = sorted(values, key=lambda c: (sign * values[c][0], c))[:max_lines]
    lines = []
    for cid in ordered:
        cfg = run.configs[cid]
        lines.append([cfg.get(n) for n in ranked] + [values[cid][0]])
    return ParallelCoordsData(axes=ranked + [objective_name], config_ids=ordered, lines=lines)
