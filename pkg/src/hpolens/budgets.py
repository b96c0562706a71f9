"""Correlation of per-config objective values across fidelity levels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError
from .runs import Run, best_values


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j < len(v) and v[order[j]] == v[order[i]]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2  # mean of positions i+1 .. j
        i = j
    return ranks


def spearman(x: np.ndarray, y: np.ndarray) -> float | None:
    """Spearman rho with average-rank ties; None when undefined.

    Undefined when fewer than two pairs or either vector has zero variance.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("vectors must have equal length")
    if len(x) < 2:
        return None
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        return None
    return float((dx @ dy) / np.sqrt(sx * sy))


@dataclass
class BudgetCorrelation:
    objective: str
    budgets: list[float]
    rho: list[list[float | None]]
    n_common: list[list[int]]


def budget_correlation(run: Run, objective_name: str) -> BudgetCorrelation:
    """Spearman correlation of objective values between every budget pair.

    A config's value at a budget is its best successful value there; only
    configs evaluated at both budgets of a pair enter that pair's statistic.
    """
    run.objective(objective_name)
    budgets = list(run.budgets)
    if len(budgets) < 2:
        raise InsufficientDataError("budget correlation needs at least 2 budgets")

    per_budget = [best_values(run, objective_name, budget=b) for b in budgets]
    k = len(budgets)
    rho: list[list[float | None]] = [[None] * k for _ in range(k)]
    n_common = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            common = sorted(set(per_budget[i]) & set(per_budget[j]))
            vi = np.array([per_budget[i][c][0] for c in common])
            vj = np.array([per_budget[j][c][0] for c in common])
            r = spearman(vi, vj) if len(common) >= 2 else None
            rho[i][j] = rho[j][i] = r
            n_common[i][j] = n_common[j][i] = len(common)
    return BudgetCorrelation(objective=objective_name, budgets=budgets, rho=rho, n_common=n_common)
