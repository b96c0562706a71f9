"""2-D embedding of explored configurations via multidimensional scaling,
plus border corners and random support points that outline the space."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .encoding import columns_for, distance_matrix, encode_config, random_support_configs
from .errors import EmptySelectionError
from .json_util import stable_hash
from .runs import HIGHEST, Run, TrialStatus, best_values, incumbent, select_trials
from .spaces import ConfigurationSpace, HpKind

EVALUATED = "evaluated"
INCUMBENT = "incumbent"
BORDER = "border"
RANDOM_SUPPORT = "random_support"

# enumerate corners outright below this count, otherwise rejection-sample
_ENUMERATE_LIMIT = 4096


def _corner_choices(space: ConfigurationSpace) -> list[list[float]]:
    choices: list[list[float]] = []
    for hp in space:
        if hp.kind is HpKind.CONSTANT:
            choices.append([0.0])
        elif hp.kind in (HpKind.CATEGORICAL, HpKind.ORDINAL):
            choices.append([float(i) for i in range(len(hp.choices))])
        else:
            choices.append([0.0, 1.0])
    return choices


def border_configs(space: ConfigurationSpace, cap: int = 50) -> np.ndarray:
    """Encoded corner configurations, at most `cap` of them.

    Corners combine per-dimension extremes. Oversized corner sets are
    subsampled deterministically, seeded by the space content, without
    enumerating the full product.
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    if cap == 0 or len(space) == 0:
        return np.empty((0, len(space)))
    choices = _corner_choices(space)
    total = 1
    for c in choices:
        total *= len(c)

    if total <= cap:
        return np.array(list(itertools.product(*choices)), dtype=float)

    seed = int(stable_hash(space.to_dict()), 16) % 2**32
    rng = np.random.default_rng(seed)
    if total <= _ENUMERATE_LIMIT:
        corners = np.array(list(itertools.product(*choices)), dtype=float)
        picked = np.sort(rng.choice(total, size=cap, replace=False))
        return corners[picked]
    # huge corner count: draw dimension-wise and reject repeats
    seen: set[tuple[float, ...]] = set()
    out: list[tuple[float, ...]] = []
    while len(out) < cap:
        corner = tuple(c[rng.integers(len(c))] for c in choices)
        if corner not in seen:
            seen.add(corner)
            out.append(corner)
    return np.array(out, dtype=float)


# -- multidimensional scaling ----------------------------------------------


def _pairwise(X: np.ndarray) -> np.ndarray:
    g = X @ X.T
    sq = np.diag(g)[:, None] + np.diag(g)[None, :] - 2 * g
    return np.sqrt(np.clip(sq, 0.0, None))


def _classical_init(D: np.ndarray) -> np.ndarray:
    n = len(D)
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (D ** 2) @ J
    w, V = np.linalg.eigh(B)
    lam = np.clip(w[-2:][::-1], 0.0, None)
    vec = V[:, -2:][:, ::-1]
    # pin eigenvector signs so repeated runs agree
    for c in range(2):
        pivot = np.argmax(np.abs(vec[:, c]))
        if vec[pivot, c] < 0:
            vec[:, c] = -vec[:, c]
    return vec * np.sqrt(lam)


def _validate_distances(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.allclose(D, D.T, atol=1e-12):
        raise ValueError("distance matrix must be symmetric")
    if (D < 0).any():
        raise ValueError("distances must be non-negative")
    return (D + D.T) / 2


def _smacof(D: np.ndarray, X0: np.ndarray, max_iter: int, tol: float) -> tuple[np.ndarray, list[float]]:
    """Stress-majorization iterations; returns coords and the normalized
    stress after init and after each update."""
    n = len(D)
    denom = float((D ** 2).sum()) / 2
    if denom == 0.0:
        return np.zeros((n, 2)), [0.0]
    X = X0.copy()
    E = _pairwise(X)
    raw = float(((D - E) ** 2).sum()) / 2
    history = [float(np.sqrt(raw / denom))]
    for _ in range(max_iter):
        if raw == 0.0:
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(E > 0, D / E, 0.0)
        np.fill_diagonal(ratio, 0.0)
        B = -ratio
        np.fill_diagonal(B, ratio.sum(axis=1))
        X = (B @ X) / n
        E = _pairwise(X)
        new_raw = float(((D - E) ** 2).sum()) / 2
        assert new_raw <= raw * (1 + 1e-12) + 1e-15, "stress increased during majorization"
        history.append(float(np.sqrt(new_raw / denom)))
        improved = (raw - new_raw) / raw
        raw = new_raw
        if improved < tol:
            break
    X = X - X.mean(axis=0)
    return X, history


class SmacofEmbedding(BaseEstimator):
    """2-D metric MDS fitted on a precomputed distance matrix.

    Starts from the classical-MDS solution and refines it by stress
    majorization until the relative stress improvement drops below `tol`.
    """

    def __init__(self, max_iter: int = 300, tol: float = 1e-6, random_state: int = 0):
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, D: np.ndarray) -> "SmacofEmbedding":
        D = _validate_distances(D)
        n = len(D)
        if n <= 1:
            # nothing to arrange; classical init needs two eigenpairs
            self.embedding_ = np.zeros((n, 2))
            self.stress_ = 0.0
            self.stress_history_ = [0.0]
            self.n_iter_ = 0
            return self
        X0 = _classical_init(D)
        scale = float(D.mean())
        if scale > 0 and float(np.abs(X0).max()) < 1e-12 * scale:
            # degenerate start (all points coincide): nudge apart so the
            # majorization step has a gradient to follow
            rng = np.random.default_rng(self.random_state)
            X0 = rng.normal(scale=scale / 10, size=(n, 2))
        X, history = _smacof(D, X0, self.max_iter, self.tol)
        self.embedding_ = X
        self.stress_ = history[-1]
        self.stress_history_ = history
        self.n_iter_ = len(history) - 1
        return self

    def fit_transform(self, D: np.ndarray) -> np.ndarray:
        return self.fit(D).embedding_


def mds_embed(distances: np.ndarray, seed: int = 0) -> tuple[np.ndarray, float]:
    est = SmacofEmbedding(random_state=seed).fit(distances)
    return est.embedding_, est.stress_


# -- footprint assembly -----------------------------------------------------


@dataclass(frozen=True)
class FootprintPoint:
    x: float
    y: float
    kind: str
    config_id: str | None = None
    value: float | None = None


@dataclass
class FootprintResult:
    points: list[FootprintPoint]
    stress: float


_EVALUATED_STATUSES = (TrialStatus.SUCCESS, TrialStatus.TIMEOUT,
                       TrialStatus.MEMORYOUT, TrialStatus.CRASHED)


def compute_footprint(run: Run, objective_name: str, budget=HIGHEST,
                      border_cap: int = 50, n_support: int = 100, seed: int = 0) -> FootprintResult:
    """Embed evaluated, border, and random support configs into the plane."""
    run.objective(objective_name)
    trials = select_trials(run, budget=budget, statuses=_EVALUATED_STATUSES)
    config_ids = sorted({t.config_id for t in trials})
    if not config_ids:
        raise EmptySelectionError("no evaluated configs at the selected budget")

    space = run.space
    cols = columns_for(space)
    evaluated = np.array([encode_config(space, run.configs[cid]) for cid in config_ids])
    border = border_configs(space, cap=border_cap)
    support = random_support_configs(space, n_support, seed=seed)
    X = np.vstack([evaluated, border, support]) if len(space) else np.zeros((len(config_ids) + len(border) + n_support, 0))

    D = distance_matrix(cols, X)
    coords, stress = mds_embed(D, seed=seed)

    values = best_values(run, objective_name, budget=budget)
    inc = incumbent(run, objective_name, budget=budget)
    inc_id = inc[0] if inc is not None else None

    points: list[FootprintPoint] = []
    for i, cid in enumerate(config_ids):
        kind = INCUMBENT if cid == inc_id else EVALUATED
        val = values.get(cid)
        points.append(FootprintPoint(float(coords[i, 0]), float(coords[i, 1]), kind,
                                     config_id=cid, value=val[0] if val else None))
    off = len(config_ids)
    for i in range(len(border)):
        points.append(FootprintPoint(float(coords[off + i, 0]), float(coords[off + i, 1]), BORDER))
    off += len(border)
    for i in range(n_support):
        points.append(FootprintPoint(float(coords[off + i, 0]), float(coords[off + i, 1]), RANDOM_SUPPORT))
    return FootprintResult(points=points, stress=float(stress))
