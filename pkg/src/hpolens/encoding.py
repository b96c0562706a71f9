"""Numeric encoding of configurations for surrogates, distances, and
embeddings.

Active numeric values map to [0, 1] (log10 space for log-scaled bounds),
categorical and ordinal values map to their choice index, constants map to
0.0, and inactive hyperparameters map to the sentinel -1.0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptySelectionError, UnknownNameError
from .runs import HIGHEST, Run, TrialStatus, select_trials
from .spaces import CHOICE_KINDS, ConfigurationSpace, HpKind, Hyperparameter

INACTIVE = -1.0


@dataclass(frozen=True)
class Column:
    """Normalization descriptor for one encoded dimension."""

    name: str
    kind: str  # "num" | "cat" | "const"
    lower: float = 0.0
    upper: float = 1.0
    log: bool = False
    integer: bool = False
    k: int = 0
    choices: tuple[str, ...] = ()
    conditional: bool = False

    def forest_domain(self) -> tuple:
        """Integration domain of this dimension for tree marginalization."""
        if self.kind == "cat":
            codes = list(range(self.k))
            if self.conditional:
                codes = [-1] + codes
            return ("cat", codes)
        lo = INACTIVE if self.conditional else 0.0
        return ("num", lo, 1.0)


def columns_for(space: ConfigurationSpace) -> list[Column]:
    cols = []
    for hp in space:
        conditional = hp.condition is not None
        if hp.kind in CHOICE_KINDS:
            cols.append(Column(hp.name, "cat", k=len(hp.choices), choices=hp.choices,
                               conditional=conditional))
        elif hp.kind is HpKind.CONSTANT:
            cols.append(Column(hp.name, "const", conditional=conditional))
        else:
            cols.append(Column(hp.name, "num", lower=hp.lower, upper=hp.upper,
                               log=hp.log_scale, integer=hp.kind is HpKind.INT,
                               conditional=conditional))
    return cols


def encode_value(hp: Hyperparameter, value: Any) -> float:
    """Encode one active hyperparameter value; raises on out-of-range values."""
    if not hp.contains(value):
        raise ValueError(f"{hp.name}: value {value!r} outside bounds/choices")
    if hp.kind is HpKind.CONSTANT:
        return 0.0
    if hp.kind in CHOICE_KINDS:
        return float(hp.choices.index(value))
    if hp.log_scale:
        return (math.log10(value) - math.log10(hp.lower)) / (
            math.log10(hp.upper) - math.log10(hp.lower))
    return (float(value) - hp.lower) / (hp.upper - hp.lower)


def decode_value(hp: Hyperparameter, code: float) -> Any:
    """Invert :func:`encode_value`; returns None for the inactive sentinel."""
    if code == INACTIVE:
        return None
    if hp.kind is HpKind.CONSTANT:
        return hp.default
    if hp.kind in CHOICE_KINDS:
        return hp.choices[int(round(code))]
    if hp.log_scale:
        lo, hi = math.log10(hp.lower), math.log10(hp.upper)
        value = 10 ** (lo + code * (hi - lo))
    else:
        value = hp.lower + code * (hp.upper - hp.lower)
    if hp.kind is HpKind.INT:
        return int(min(hp.upper, max(hp.lower, round(value))))
    return value


def encode_config(space: ConfigurationSpace, config: dict[str, Any]) -> np.ndarray:
    """One encoded coordinate per hyperparameter, -1.0 where inactive."""
    out = np.empty(len(space))
    for j, hp in enumerate(space):
        if not space.is_active(hp.name, config):
            out[j] = INACTIVE
        elif hp.name not in config:
            raise ValueError(f"config is missing active hyperparameter {hp.name!r}")
        else:
            out[j] = encode_value(hp, config[hp.name])
    return out


def decode_config(space: ConfigurationSpace, vector: Sequence[float]) -> dict[str, Any]:
    """Raw values for the active coordinates of an encoded vector."""
    out: dict[str, Any] = {}
    for hp, code in zip(space, vector):
        value = decode_value(hp, float(code))
        if value is not None:
            out[hp.name] = value
    return out


@dataclass
class EncodedMatrix:
    """Design matrix over encoded configurations plus an objective vector."""

    X: np.ndarray
    y: np.ndarray
    config_ids: list[str]
    columns: list[Column]
    objective: str
    budget: float | str

    def __post_init__(self) -> None:
        if not (len(self.X) == len(self.y) == len(self.config_ids)):
            raise ValueError("rows, y, and config_ids lengths disagree")

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def forest_domains(self) -> list[tuple]:
        return [c.forest_domain() for c in self.columns]


def encode_run(run: Run, objective: str, budget: float | str = HIGHEST,
               status_filter: tuple[TrialStatus, ...] = (TrialStatus.SUCCESS,)) -> EncodedMatrix:
    """One row per trial matching the filter at the budget selection."""
    run.objective(objective)
    trials = [t for t in select_trials(run, budget, status_filter)
              if t.objectives.get(objective) is not None]
    if not trials:
        raise EmptySelectionError(
            f"no {'/'.join(s.value for s in status_filter)} trials for objective "
            f"{objective!r} at budget {budget!r}")
    encoded = {cid: encode_config(run.space, run.configs[cid])
               for cid in {t.config_id for t in trials}}
    X = np.stack([encoded[t.config_id] for t in trials])
    y = np.array([t.objectives[objective] for t in trials], dtype=float)
    return EncodedMatrix(X, y, [t.config_id for t in trials], columns_for(run.space),
                         objective, budget)


def _dim_deltas(col: Column, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-dimension distance contribution delta in [0, 1], broadcast-safe."""
    if col.kind == "cat":
        return (a != b).astype(float)
    inactive_a = a == INACTIVE
    inactive_b = b == INACTIVE
    delta = np.abs(a - b)
    delta = np.where(inactive_a ^ inactive_b, 1.0, delta)
    return np.where(inactive_a & inactive_b, 0.0, delta)


def config_distance(space: ConfigurationSpace | list[Column],
                    a: Sequence[float], b: Sequence[float]) -> float:
    """Mixed-space pseudo-metric: root mean square of per-dimension deltas.

    Numeric dimensions contribute |a - b|, categorical ones an equality
    indicator; an active/inactive mismatch counts as 1, two inactive as 0.
    """
    cols = columns_for(space) if isinstance(space, ConfigurationSpace) else space
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or len(a) != len(cols):
        raise ValueError("vector lengths do not match the space")
    sq = 0.0
    for j, col in enumerate(cols):
        sq += float(_dim_deltas(col, a[j:j + 1], b[j:j + 1])[0]) ** 2
    return math.sqrt(sq / len(cols)) if cols else 0.0


def distance_matrix(space: ConfigurationSpace | list[Column], X: np.ndarray) -> np.ndarray:
    """Pairwise config_distance over the rows of X."""
    cols = columns_for(space) if isinstance(space, ConfigurationSpace) else space
    n = len(X)
    sq = np.zeros((n, n))
    for j, col in enumerate(cols):
        c = X[:, j]
        sq += _dim_deltas(col, c[:, None], c[None, :]) ** 2
    out = np.sqrt(sq / max(len(cols), 1))
    np.fill_diagonal(out, 0.0)
    return out


def random_support_configs(space: ConfigurationSpace, n: int, seed: int) -> np.ndarray:
    """Uniform encoded configs with every hyperparameter active."""
    rng = np.random.default_rng(seed)
    out = np.empty((n, len(space)))
    for j, hp in enumerate(space):
        if hp.kind is HpKind.CONSTANT:
            out[:, j] = 0.0
        elif hp.kind in CHOICE_KINDS:
            out[:, j] = rng.integers(0, len(hp.choices), size=n)
        else:
            out[:, j] = rng.uniform(0.0, 1.0, size=n)
    return out


class ConfigEncoder(BaseEstimator, TransformerMixin):
    """Stateless transformer from raw config dicts to encoded matrices."""

    def __init__(self, space: ConfigurationSpace):
        self.space = space

    def fit(self, X: Any = None, y: Any = None) -> "ConfigEncoder":
        self.columns_ = columns_for(self.space)
        return self

    def transform(self, X: Sequence[dict[str, Any]]) -> np.ndarray:
        if not hasattr(self, "columns_"):
            self.fit()
        if len(X) == 0:
            return np.empty((0, len(self.space)))
        return np.stack([encode_config(self.space, cfg) for cfg in X])

    def inverse_transform(self, X: np.ndarray) -> list[dict[str, Any]]:
        return [decode_config(self.space, row) for row in np.atleast_2d(X)]
