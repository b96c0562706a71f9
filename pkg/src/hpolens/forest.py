"""Random-forest regressor over encoded configurations.

Trees split numeric dimensions by threshold and categorical dimensions by
value-set membership. Each tree exposes exact marginal predictions computed
from leaf-box volumes over the encoded domain, which variance-decomposition
and partial-dependence analyses rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import InsufficientDataError

DEFAULT_FOREST_PARAMS = {
    "n_trees": 16,
    "max_depth": 64,
    "min_samples_leaf": 1,
    "bootstrap": True,
    "max_features_ratio": 5 / 6,
    "seed": 0,
}


@dataclass(frozen=True)
class NumDomain:
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class CatDomain:
    codes: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.codes)


Domain = NumDomain | CatDomain


def parse_domains(specs: Sequence[tuple] | None, X: np.ndarray) -> list[Domain]:
    """Build per-dimension domains; default to each column's numeric range."""
    if specs is None:
        out: list[Domain] = []
        for j in range(X.shape[1]):
            lo, hi = float(X[:, j].min()), float(X[:, j].max())
            out.append(NumDomain(lo, hi))
        return out
    if len(specs) != X.shape[1]:
        raise ValueError("feature_domains length does not match n_features")
    parsed: list[Domain] = []
    for spec in specs:
        if spec[0] == "num":
            parsed.append(NumDomain(float(spec[1]), float(spec[2])))
        elif spec[0] == "cat":
            parsed.append(CatDomain(tuple(int(c) for c in spec[1])))
        else:
            raise ValueError(f"unknown domain kind {spec[0]!r}")
    return parsed


def _code_cols(domains: Sequence[Domain]) -> int:
    """Width of the shared code-membership table (codes are shifted by +1)."""
    top = 0
    for d in domains:
        if isinstance(d, CatDomain) and d.codes:
            top = max(top, max(d.codes) + 2)
    return max(top, 1)


class Tree:
    """Binary regression tree over a mixed numeric/categorical domain.

    Node arrays use -1 in `feature` for leaves. Categorical split membership
    lives in `cat_left[node, code + 1]`.
    """

    def __init__(self, feature: np.ndarray, threshold: np.ndarray, is_cat: np.ndarray,
                 cat_left: np.ndarray, left: np.ndarray, right: np.ndarray,
                 value: np.ndarray, count: np.ndarray, domains: Sequence[Domain]):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=float)
        self.is_cat = np.asarray(is_cat, dtype=bool)
        self.cat_left = np.asarray(cat_left, dtype=bool)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=float)
        self.count = np.asarray(count, dtype=np.int64)
        self.domains = list(domains)
        self.d = len(self.domains)
        if np.any(self.feature >= self.d):
            raise ValueError("tree splits on a dimension outside the domain")
        if not np.all(np.isfinite(self.value[self.feature < 0])):
            raise ValueError("non-finite leaf value")
        self._build_leaf_boxes()

    @classmethod
    def from_dict(cls, node: dict[str, Any], domains: Sequence[Domain]) -> "Tree":
        """Build a tree from nested dicts; handy for stubs and random trees.

        Internal nodes: {"dim": j, "threshold": t | "codes_left": [...],
        "left": ..., "right": ...}; leaves: {"value": v, "count": n?}.
        """
        feature: list[int] = []
        threshold: list[float] = []
        is_cat: list[bool] = []
        cat_rows: list[np.ndarray] = []
        left: list[int] = []
        right: list[int] = []
        value: list[float] = []
        count: list[int] = []
        ncols = _code_cols(domains)

        def add(n: dict[str, Any]) -> int:
            i = len(feature)
            for arr in (feature, threshold, is_cat, left, right, value, count):
                arr.append(0)  # type: ignore[arg-type]
            cat_rows.append(np.zeros(ncols, dtype=bool))
            if "value" in n:
                feature[i] = -1
                threshold[i] = 0.0
                left[i] = right[i] = -1
                value[i] = float(n["value"])
                count[i] = int(n.get("count", 1))
                return i
            feature[i] = int(n["dim"])
            if "codes_left" in n:
                is_cat[i] = True
                for c in n["codes_left"]:
                    cat_rows[i][int(c) + 1] = True
            else:
                threshold[i] = float(n["threshold"])
            value[i] = float(n.get("value", 0.0))
            count[i] = int(n.get("count", 0))
            left[i] = add(n["left"])
            right[i] = add(n["right"])
            return i

        add(node)
        return cls(np.array(feature), np.array(threshold), np.array(is_cat),
                   np.stack(cat_rows), np.array(left), np.array(right),
                   np.array(value), np.array(count), domains)

    # -- leaf boxes -------------------------------------------------------

    def _build_leaf_boxes(self) -> None:
        d = self.d
        num_lo = np.array([dom.lower if isinstance(dom, NumDomain) else 0.0 for dom in self.domains])
        num_hi = np.array([dom.upper if isinstance(dom, NumDomain) else 1.0 for dom in self.domains])
        cat_dims = [j for j, dom in enumerate(self.domains) if isinstance(dom, CatDomain)]
        full_masks = {j: np.ones(self.domains[j].k, dtype=bool) for j in cat_dims}

        leaves: list[int] = []
        lo_rows: list[np.ndarray] = []
        hi_rows: list[np.ndarray] = []
        mask_rows: dict[int, list[np.ndarray]] = {j: [] for j in cat_dims}

        stack: list[tuple[int, np.ndarray, np.ndarray, dict[int, np.ndarray]]] = [
            (0, num_lo.copy(), num_hi.copy(), {j: m.copy() for j, m in full_masks.items()})
        ]
        while stack:
            node, lo, hi, masks = stack.pop()
            f = int(self.feature[node])
            if f < 0:
                leaves.append(node)
                lo_rows.append(lo)
                hi_rows.append(hi)
                for j in cat_dims:
                    mask_rows[j].append(masks[j])
                continue
            if self.is_cat[node]:
                dom = self.domains[f]
                row = self.cat_left[node]
                in_left = np.array([row[c + 1] for c in dom.codes])
                l_masks = dict(masks)
                r_masks = dict(masks)
                l_masks[f] = masks[f] & in_left
                r_masks[f] = masks[f] & ~in_left
                stack.append((int(self.right[node]), lo, hi, r_masks))
                stack.append((int(self.left[node]), lo.copy(), hi.copy(), l_masks))
            else:
                t = float(self.threshold[node])
                r_lo = lo.copy()
                r_lo[f] = max(lo[f], t)
                l_hi = hi.copy()
                l_hi[f] = min(hi[f], t)
                stack.append((int(self.right[node]), r_lo, hi, masks))
                stack.append((int(self.left[node]), lo, l_hi, masks))

        self.leaf_nodes = np.array(leaves, dtype=np.int32)
        self.leaf_lo = np.stack(lo_rows) if leaves else np.empty((0, d))
        self.leaf_hi = np.stack(hi_rows) if leaves else np.empty((0, d))
        self.leaf_masks = {j: (np.stack(mask_rows[j]) if leaves else np.empty((0, self.domains[j].k), dtype=bool))
                           for j in cat_dims}
        self.leaf_value = self.value[self.leaf_nodes]

        frac = np.ones((len(leaves), d))
        for j, dom in enumerate(self.domains):
            if isinstance(dom, CatDomain):
                frac[:, j] = self.leaf_masks[j].sum(axis=1) / dom.k
            elif dom.width > 0:
                frac[:, j] = np.clip(self.leaf_hi[:, j] - self.leaf_lo[:, j], 0.0, None) / dom.width
        self.leaf_frac = frac
        self.leaf_weight = frac.prod(axis=1)
        self._w_except = np.stack(
            [np.prod(np.delete(frac, j, axis=1), axis=1) for j in range(d)],
            axis=1) if d and len(leaves) else np.ones((len(leaves), max(d, 1)))

        self.box_mean = float(self.leaf_value @ self.leaf_weight)
        self.box_variance = max(float((self.leaf_value ** 2) @ self.leaf_weight - self.box_mean ** 2), 0.0)

    # -- queries ----------------------------------------------------------

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        n = len(X)
        idx = np.zeros(n, dtype=np.int32)
        rows = np.arange(n)
        ncols = self.cat_left.shape[1]
        while True:
            feat = self.feature[idx]
            inner = feat >= 0
            if not inner.any():
                break
            f = np.where(inner, feat, 0)
            v = X[rows, f]
            code = np.clip(np.rint(v).astype(np.int64) + 1, 0, ncols - 1)
            go_left = np.where(self.is_cat[idx], self.cat_left[idx, code], v <= self.threshold[idx])
            nxt = np.where(go_left, self.left[idx], self.right[idx])
            idx = np.where(inner, nxt, idx).astype(np.int32)
        return self.value[idx]

    def _leaf_contains(self, dim: int, v: float) -> np.ndarray:
        dom = self.domains[dim]
        if isinstance(dom, CatDomain):
            code = int(round(v))
            if code not in dom.codes:
                raise ValueError(f"code {code} outside domain of dimension {dim}")
            return self.leaf_masks[dim][:, dom.codes.index(code)]
        if not (dom.lower <= v <= dom.upper):
            raise ValueError(f"value {v} outside bounds of dimension {dim}")
        lo = self.leaf_lo[:, dim]
        hi = self.leaf_hi[:, dim]
        return (v <= hi) & ((v > lo) | (lo <= dom.lower))

    def marginal(self, dims: Sequence[int], values: Sequence[float]) -> float:
        """Exact prediction with `dims` fixed at `values`, all else averaged
        uniformly over the domain box."""
        dims = list(dims)
        if len(dims) != len(set(dims)):
            raise ValueError("dims must be distinct")
        if len(dims) != len(values):
            raise ValueError("dims and values lengths differ")
        if not dims:
            return self.box_mean
        keep = np.ones(len(self.leaf_nodes), dtype=bool)
        for dim, v in zip(dims, values):
            keep &= self._leaf_contains(int(dim), float(v))
        others = [j for j in range(self.d) if j not in set(dims)]
        w = np.prod(self.leaf_frac[:, others], axis=1) if others else np.ones(len(self.leaf_nodes))
        return float((self.leaf_value * w * keep).sum())

    def marginal_variance(self, dim: int) -> float:
        """Exact variance of the single-dimension marginal effect."""
        dom = self.domains[dim]
        w = self.leaf_value * self._w_except[:, dim]
        if isinstance(dom, CatDomain):
            margins = self.leaf_masks[dim].T @ w  # one value per code
            var = float((margins ** 2).mean() - self.box_mean ** 2)
            return max(var, 0.0)
        if dom.width <= 0:
            return 0.0
        split_mask = (self.feature == dim) & ~self.is_cat
        pts = np.unique(np.concatenate([[dom.lower, dom.upper], self.threshold[split_mask]]))
        pts = pts[(pts >= dom.lower) & (pts <= dom.upper)]
        mids = (pts[:-1] + pts[1:]) / 2
        lens = np.diff(pts)
        contains = (mids[None, :] > self.leaf_lo[:, dim:dim + 1]) & (mids[None, :] <= self.leaf_hi[:, dim:dim + 1])
        margins = contains.T @ w
        var = float((lens / dom.width) @ (margins ** 2) - self.box_mean ** 2)
        return max(var, 0.0)


def tree_marginal(tree: Tree, dims: Sequence[int], values: Sequence[float]) -> float:
    return tree.marginal(dims, values)


# -- fitting ---------------------------------------------------------------


class _Builder:
    def __init__(self, ncols: int):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.is_cat: list[bool] = []
        self.cat_left: list[np.ndarray] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.count: list[int] = []
        self.ncols = ncols

    def add(self) -> int:
        i = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.is_cat.append(False)
        self.cat_left.append(np.zeros(self.ncols, dtype=bool))
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        self.count.append(0)
        return i


# Candidates whose SSE is within this fraction of the node SSE of the best
# one count as ties and resolve to the earliest candidate. Different split
# positions (and different features) often induce the exact same partition
# of the node's targets, so their SSEs tie in exact arithmetic; without a
# margin, last-ulp rounding noise would pick the winner.
_TIE_REL_TOL = 1e-9


def _best_numeric_split(xj: np.ndarray, ys: np.ndarray, msl: int) -> tuple[float, float] | None:
    """Minimal child SSE over thresholds; returns (sse, threshold).

    `ys` must be centered on the node mean so the cumsum formulas stay
    well conditioned.
    """
    order = np.argsort(xj, kind="stable")
    xs = xj[order]
    yo = ys[order]
    m = len(xs)
    cy = np.cumsum(yo)
    cy2 = np.cumsum(yo ** 2)
    n_left = np.arange(1, m)
    valid = xs[1:] > xs[:-1]
    if msl > 1:
        valid &= (n_left >= msl) & (m - n_left >= msl)
    if not valid.any():
        return None
    sse_l = cy2[:-1] - cy[:-1] ** 2 / n_left
    n_right = m - n_left
    sse_r = (cy2[-1] - cy2[:-1]) - (cy[-1] - cy[:-1]) ** 2 / n_right
    sse = np.where(valid, sse_l + sse_r, np.inf)
    p = int(np.argmax(sse <= sse.min() + _TIE_REL_TOL * cy2[-1]))
    thr = (xs[p] + xs[p + 1]) / 2
    if not (xs[p] <= thr < xs[p + 1]):
        thr = xs[p]
    return float(sse[p]), thr


def _best_categorical_split(xj: np.ndarray, ys: np.ndarray, msl: int) -> tuple[float, np.ndarray] | None:
    """Best prefix split of categories ordered by mean target."""
    codes, inverse = np.unique(xj, return_inverse=True)
    if len(codes) < 2:
        return None
    counts = np.bincount(inverse).astype(float)
    sums = np.bincount(inverse, weights=ys)
    sums2 = np.bincount(inverse, weights=ys ** 2)
    order = np.lexsort((codes, sums / counts))
    cn = np.cumsum(counts[order])
    cs = np.cumsum(sums[order])
    cs2 = np.cumsum(sums2[order])
    n_left = cn[:-1]
    n_right = cn[-1] - n_left
    valid = (n_left >= msl) & (n_right >= msl)
    if not valid.any():
        return None
    sse_l = cs2[:-1] - cs[:-1] ** 2 / n_left
    sse_r = (cs2[-1] - cs2[:-1]) - (cs[-1] - cs[:-1]) ** 2 / n_right
    sse = np.where(valid, sse_l + sse_r, np.inf)
    q = int(np.argmax(sse <= sse.min() + _TIE_REL_TOL * cs2[-1]))
    return float(sse[q]), codes[order[: q + 1]]


def _grow(b: _Builder, X: np.ndarray, y: np.ndarray, domains: list[Domain],
          idx: np.ndarray, depth: int, rng: np.random.Generator,
          max_depth: int, msl: int, n_feats: int) -> int:
    node = b.add()
    ys = y[idx]
    m = len(idx)
    b.value[node] = float(ys.mean())
    b.count[node] = m
    if depth >= max_depth or m < 2 or m < 2 * msl or np.ptp(ys) == 0:
        return node

    feats = np.sort(rng.choice(len(domains), size=n_feats, replace=False))
    # score on the centered target: SSE is shift-invariant, and the cumsum
    # formulas cancel badly when a node's values share a large offset
    ysc = ys - ys.mean()
    tie_tol = _TIE_REL_TOL * float(ysc @ ysc)
    best_sse = math.inf
    best: tuple[int, float | np.ndarray] | None = None
    for j in feats:
        xj = X[idx, j]
        if isinstance(domains[j], CatDomain):
            found = _best_categorical_split(xj, ysc, msl)
        else:
            found = _best_numeric_split(xj, ysc, msl)
        if found is not None and found[0] < best_sse - tie_tol:
            best_sse = found[0]
            best = (int(j), found[1])
    if best is None:
        return node

    j, split = best
    b.feature[node] = j
    if isinstance(split, np.ndarray):
        b.is_cat[node] = True
        for c in split:
            b.cat_left[node][int(c) + 1] = True
        go_left = np.isin(X[idx, j], split)
    else:
        b.threshold[node] = split
        go_left = X[idx, j] <= split
    b.left[node] = _grow(b, X, y, domains, idx[go_left], depth + 1, rng, max_depth, msl, n_feats)
    b.right[node] = _grow(b, X, y, domains, idx[~go_left], depth + 1, rng, max_depth, msl, n_feats)
    return node


class ForestRegressor(BaseEstimator, RegressorMixin):
    """CART forest with variance-reduction splits and reproducible fits.

    Parameters mirror the analysis defaults; `feature_domains` optionally
    fixes the marginalization box per dimension as ("num", lo, hi) or
    ("cat", [codes]) tuples. Without it, numeric domains are inferred from
    the training data range.
    """

    def __init__(self, n_trees: int = 16, max_depth: int = 64, min_samples_leaf: int = 1,
                 bootstrap: bool = True, max_features_ratio: float = 5 / 6,
                 random_state: int = 0, feature_domains: Sequence[tuple] | None = None):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.bootstrap = bootstrap
        self.max_features_ratio = max_features_ratio
        self.random_state = random_state
        self.feature_domains = feature_domains

    def fit(self, X: np.ndarray, y: np.ndarray) -> "ForestRegressor":
        # check_X_y also rejects NaN/inf in X and y
        X, y = check_X_y(X, y, ensure_min_samples=1, y_numeric=True)
        if len(X) < 2:
            raise InsufficientDataError(f"need at least 2 samples, got {len(X)}")
        domains = parse_domains(self.feature_domains, X)
        d = X.shape[1]
        n_feats = max(1, min(d, math.ceil(self.max_features_ratio * d)))
        seeds = np.random.SeedSequence(self.random_state).spawn(self.n_trees)
        ncols = _code_cols(domains)
        trees = []
        for seq in seeds:
            rng = np.random.default_rng(seq)
            idx = rng.integers(0, len(X), size=len(X)) if self.bootstrap else np.arange(len(X))
            b = _Builder(ncols)
            _grow(b, X, y, domains, np.asarray(idx), 0, rng, self.max_depth,
                  self.min_samples_leaf, n_feats)
            trees.append(Tree(np.array(b.feature), np.array(b.threshold), np.array(b.is_cat),
                              np.stack(b.cat_left), np.array(b.left), np.array(b.right),
                              np.array(b.value), np.array(b.count), domains))
        self.trees_ = trees
        self.domains_ = domains
        self.n_features_in_ = d
        return self

    def predict_trees(self, X: np.ndarray) -> np.ndarray:
        """Per-tree predictions, shape (n_trees, n_samples)."""
        check_is_fitted(self, "trees_")
        X = check_array(np.atleast_2d(X))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.stack([t.predict(X) for t in self.trees_])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_trees(X).mean(axis=0)

    def predict_stats(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(mean, population variance across trees) per sample."""
        per_tree = self.predict_trees(X)
        return per_tree.mean(axis=0), per_tree.var(axis=0)


def make_forest(params: dict | None, feature_domains: Sequence[tuple] | None = None) -> ForestRegressor:
    """ForestRegressor from an analysis-level parameter dict (may use "seed")."""
    merged = dict(DEFAULT_FOREST_PARAMS)
    merged.update(params or {})
    unknown = set(merged) - set(DEFAULT_FOREST_PARAMS)
    if unknown:
        raise ValueError(f"unknown forest parameters: {sorted(unknown)}")
    return ForestRegressor(
        n_trees=int(merged["n_trees"]),
        max_depth=int(merged["max_depth"]),
        min_samples_leaf=int(merged["min_samples_leaf"]),
        bootstrap=bool(merged["bootstrap"]),
        max_features_ratio=float(merged["max_features_ratio"]),
        random_state=int(merged["seed"]),
        feature_domains=feature_domains,
    )
