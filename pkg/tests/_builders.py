"""Randomized run/space generators shared across test modules."""
from __future__ import annotations

import numpy as np

from hpolens import (Condition, ConfigurationSpace, Direction, HpKind,
                     Hyperparameter, Objective, TrialRecord, TrialStatus,
                     ingest_records)


def random_space(rng: np.random.Generator, n_hps: int = 4, conditional: bool = True,
                 categorical: bool = True) -> ConfigurationSpace:
    """Mixed-kind space; condition parents always precede their children."""
    hps: list[Hyperparameter] = []
    choice_parents: list[Hyperparameter] = []
    for i in range(n_hps):
        name = f"hp{i}"
        condition = None
        if conditional and choice_parents and rng.random() < 0.35:
            parent = choice_parents[rng.integers(len(choice_parents))]
            k = rng.integers(1, len(parent.choices))
            values = tuple(sorted(rng.choice(parent.choices, size=k, replace=False)))
            condition = Condition(parent.name, values)
        roll = rng.random()
        if categorical and roll < 0.3:
            n_choices = int(rng.integers(2, 5))
            hp = Hyperparameter(name, HpKind.CATEGORICAL,
                                choices=tuple(f"v{j}" for j in range(n_choices)),
                                condition=condition)
            choice_parents.append(hp)
        elif categorical and roll < 0.4:
            hp = Hyperparameter(name, HpKind.ORDINAL, choices=("low", "mid", "high"),
                                condition=condition)
            choice_parents.append(hp)
        elif roll < 0.55:
            lo = int(rng.integers(0, 10))
            hp = Hyperparameter(name, HpKind.INT, lower=lo, upper=lo + int(rng.integers(2, 20)),
                                condition=condition)
        elif roll < 0.65:
            hp = Hyperparameter(name, HpKind.CONSTANT, default="fixed", condition=condition)
        else:
            log = bool(rng.random() < 0.3)
            lo = float(rng.uniform(1e-4, 1e-2)) if log else float(rng.uniform(-5, 0))
            hi = lo * 100 if log else lo + float(rng.uniform(1, 10))
            hp = Hyperparameter(name, HpKind.FLOAT, lower=lo, upper=hi, log_scale=log,
                                condition=condition)
        hps.append(hp)
    return ConfigurationSpace(hps)


def random_config(space: ConfigurationSpace, rng: np.random.Generator) -> dict:
    """Full active assignment drawn uniformly (log-uniform where scaled)."""
    out: dict = {}
    for hp in space:
        if not space.is_active(hp.name, out):
            continue
        if hp.kind is HpKind.FLOAT:
            if hp.log_scale:
                out[hp.name] = float(10 ** rng.uniform(np.log10(hp.lower), np.log10(hp.upper)))
            else:
                out[hp.name] = float(rng.uniform(hp.lower, hp.upper))
        elif hp.kind is HpKind.INT:
            out[hp.name] = int(rng.integers(hp.lower, hp.upper + 1))
        elif hp.kind in (HpKind.CATEGORICAL, HpKind.ORDINAL):
            out[hp.name] = str(rng.choice(hp.choices))
        else:
            out[hp.name] = hp.default
    return out


def random_run(rng: np.random.Generator, n_hps: int = 4, n_trials: int = 30,
               n_objectives: int = 1, n_budgets: int = 2, conditional: bool = True,
               categorical: bool = True, with_failures: bool = True, name: str = "random"):
    space = random_space(rng, n_hps=n_hps, conditional=conditional, categorical=categorical)
    directions = [Direction.MINIMIZE if rng.random() < 0.5 else Direction.MAXIMIZE
                  for _ in range(n_objectives)]
    objectives = [Objective(f"m{i}", directions[i]) for i in range(n_objectives)]
    budgets = sorted(float(b) for b in rng.choice(np.arange(1, 50), size=n_budgets, replace=False))

    records = []
    clock = 0.0
    for _ in range(n_trials):
        config = random_config(space, rng)
        budget = float(budgets[rng.integers(len(budgets))])
        roll = rng.random()
        if not with_failures or roll < 0.8:
            status = TrialStatus.SUCCESS
            values = {o.name: float(rng.normal()) for o in objectives}
        elif roll < 0.9:
            status = TrialStatus.CRASHED
            values = {o.name: None for o in objectives}
        elif roll < 0.95:
            status = TrialStatus.TIMEOUT
            values = {}
        else:
            status = TrialStatus.RUNNING
            values = {}
        start = clock
        clock += float(rng.uniform(0.1, 2.0))
        end = None if status is TrialStatus.RUNNING else clock
        records.append(TrialRecord(config=config, budget=budget, objectives=values,
                                   status=status, start_time=start, end_time=end,
                                   seed=int(rng.integers(0, 3))))
    return ingest_records(space, objectives, budgets, records, name=name)


def box_run(fn, n: int = 500, d: int = 3, seed: int = 0, n_objectives: int = 1,
            n_budgets: int = 1, name: str = "box"):
    """Run over the unit box [0,1]^d with y = fn(X); direction Minimize."""
    rng = np.random.default_rng(seed)
    space = ConfigurationSpace([
        Hyperparameter(f"x{i + 1}", HpKind.FLOAT, lower=0.0, upper=1.0) for i in range(d)
    ])
    objectives = [Objective("loss")] + [Objective(f"m{i}") for i in range(1, n_objectives)]
    budgets = [float(b + 1) for b in range(n_budgets)]
    X = rng.uniform(0.0, 1.0, size=(n, d))
    y = np.asarray(fn(X), dtype=float)
    records = []
    for i in range(n):
        cfg = {f"x{j + 1}": float(X[i, j]) for j in range(d)}
        values = {"loss": float(y[i])}
        for o in objectives[1:]:
            values[o.name] = float(rng.uniform())
        records.append(TrialRecord(config=cfg, budget=budgets[-1], objectives=values,
                                   start_time=float(i), end_time=float(i) + 0.5))
    return ingest_records(space, objectives, budgets, records, name=name)


def brute_force_frontier(points, sign_a, sign_b):
    """Quadratic dominance oracle with strict-improvement semantics."""
    a = np.array([p[0] * sign_a for p in points])
    b = np.array([p[1] * sign_b for p in points])
    keep = []
    for i in range(len(points)):
        dominated = ((a <= a[i]) & (b <= b[i]) & ((a < a[i]) | (b < b[i]))).any()
        keep.append(not dominated)
    return keep


def random_stub_tree(rng, domains, depth=0, max_depth=3):
    """Random nested-dict tree over `domains`, values in [0, 1]."""
    from hpolens.forest import CatDomain
    if depth >= max_depth or rng.random() < 0.25:
        return {"value": float(rng.uniform())}
    j = int(rng.integers(len(domains)))
    dom = domains[j]
    if isinstance(dom, CatDomain):
        k = int(rng.integers(1, dom.k))
        codes_left = [int(c) for c in rng.choice(dom.codes, size=k, replace=False)]
        node = {"dim": j, "codes_left": codes_left}
    else:
        node = {"dim": j, "threshold": float(rng.uniform(dom.lower, dom.upper))}
    node["left"] = random_stub_tree(rng, domains, depth + 1, max_depth)
    node["right"] = random_stub_tree(rng, domains, depth + 1, max_depth)
    return node


def mc_sample(rng, domains, n):
    """Uniform samples over mixed numeric/categorical domains."""
    from hpolens.forest import CatDomain
    X = np.empty((n, len(domains)))
    for j, dom in enumerate(domains):
        if isinstance(dom, CatDomain):
            X[:, j] = rng.choice(dom.codes, size=n)
        else:
            X[:, j] = rng.uniform(dom.lower, dom.upper, size=n)
    return X
