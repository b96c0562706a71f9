"""Analysis plugins: parameter schemas, validation, execution, payloads.

Each plugin resolves its parameters to a fully-defaulted canonical form
before execution so that equal work is recognized by the job cache no matter
how the request spelled it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

from ..budgets import budget_correlation
from ..encoding import encode_config
from ..errors import InvalidParamsError, UnknownNameError
from ..footprint import compute_footprint
from ..hyperparams import ablation_path, fanova, lpi, parallel_coordinates, pdp
from ..objectives import cost_over_time, pareto_front
from ..runs import (ALL, HIGHEST, Run, RunGroup, group_runs, incumbent,
                    status_counts)

REQUIRED = object()
FIRST_OBJECTIVE = object()
SECOND_OBJECTIVE = object()


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # "str" | "int" | "float" | "bool" | "budget" | "choice" | "list_str"
    default: Any = REQUIRED
    choices: tuple[str, ...] = ()


def _coerce(plugin: str, p: Param, value: Any) -> Any:
    err = lambda msg: InvalidParamsError(f"{plugin}: {msg}", field=p.name)
    try:
        if p.kind == "str":
            if not isinstance(value, str):
                raise err("expected a string")
            return value
        if p.kind == "int":
            if isinstance(value, bool) or int(value) != value:
                raise err("expected an integer")
            return int(value)
        if p.kind == "float":
            return float(value)
        if p.kind == "bool":
            if not isinstance(value, bool):
                raise err("expected a boolean")
            return value
        if p.kind == "budget":
            if value == HIGHEST or value == ALL:
                return value
            return float(value)
        if p.kind == "choice":
            if value not in p.choices:
                raise err(f"expected one of {list(p.choices)}")
            return value
        if p.kind == "list_str":
            if value is None:
                return None
            if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
                raise err("expected a list of strings")
            return list(value)
    except (TypeError, ValueError):
        raise err(f"cannot interpret {value!r}") from None
    raise AssertionError(f"unhandled param kind {p.kind}")


@dataclass(frozen=True)
class Plugin:
    name: str
    params: tuple[Param, ...]
    min_runs: int
    max_runs: int | None
    fn: Callable[[list[Run], dict[str, Any]], dict[str, Any]]

    def param_names(self) -> list[str]:
        return [p.name for p in self.params]


def _resolve_default(plugin: str, p: Param, runs: list[Run]) -> Any:
    objectives = runs[0].objective_names
    if p.default is FIRST_OBJECTIVE:
        return objectives[0]
    if p.default is SECOND_OBJECTIVE:
        if len(objectives) < 2:
            raise InvalidParamsError(f"{plugin}: run declares a single objective", field=p.name)
        return objectives[1]
    if p.default is REQUIRED:
        raise InvalidParamsError(f"{plugin}: missing required parameter", field=p.name)
    return p.default


def validate_params(plugin_name: str, params: dict[str, Any] | None, runs: list[Run]) -> dict[str, Any]:
    """Canonical fully-defaulted parameter dict; raises InvalidParamsError."""
    plugin = get_plugin(plugin_name)
    params = dict(params or {})
    known = {p.name for p in plugin.params}
    for key in params:
        if key not in known:
            raise InvalidParamsError(
                f"{plugin_name}: unknown parameter (valid: {sorted(known) or 'none'})", field=key)
    if len(runs) < plugin.min_runs:
        raise InvalidParamsError(f"{plugin_name}: needs at least {plugin.min_runs} run(s)",
                                 field="run_ids")
    if plugin.max_runs is not None and len(runs) > plugin.max_runs:
        raise InvalidParamsError(f"{plugin_name}: accepts at most {plugin.max_runs} run(s)",
                                 field="run_ids")
    out: dict[str, Any] = {}
    for p in plugin.params:
        if p.name in params and params[p.name] is not None:
            out[p.name] = _coerce(plugin_name, p, params[p.name])
        else:
            out[p.name] = _resolve_default(plugin_name, p, runs)
    return out


def _single(runs: list[Run]) -> Run:
    return runs[0]


def _run_or_group(runs: list[Run]) -> Run | RunGroup:
    if len(runs) == 1:
        return runs[0]
    return group_runs("selection", runs)


# -- payload builders -------------------------------------------------------


def overview_data(run: Run) -> dict[str, Any]:
    ends = [t.end_time for t in run.trials if t.end_time is not None]
    starts = [t.start_time for t in run.trials]
    per_budget = []
    for b in run.budgets:
        counts = status_counts(run, budget=b)
        per_budget.append({"budget": b, "counts": {s.value: n for s, n in counts.items()}})
    best = []
    for o in run.objectives:
        inc = incumbent(run, o.name)
        best.append({"objective": o.name,
                     "config_id": inc[0] if inc else None,
                     "value": inc[1] if inc else None})
    return {
        "meta": {"id": run.id, "name": run.name,
                 "optimizer": run.meta.get("optimizer", "unknown")},
        "objectives": [o.to_dict() for o in run.objectives],
        "budgets": run.budgets,
        "space": {"n_hyperparameters": len(run.space),
                  "hyperparameters": [hp.to_dict() for hp in run.space]},
        "n_trials": len(run.trials),
        "n_configs": len(run.configs),
        "status_counts": {"all": {s.value: n for s, n in status_counts(run).items()},
                          "per_budget": per_budget},
        "best": best,
        "duration": (max(ends) - min(starts)) if ends else None,
    }


def config_detail_data(run: Run, config_id: str) -> dict[str, Any]:
    if config_id not in run.configs:
        raise UnknownNameError("config", config_id)
    config = run.configs[config_id]
    rows = []
    for t in run.trials:
        if t.config_id != config_id:
            continue
        rows.append({"budget": t.budget, "status": t.status.value, "seed": t.seed,
                     "objectives": t.objectives, "start": t.start_time, "end": t.end_time})
    flags = {}
    for o in run.objectives:
        inc = incumbent(run, o.name)
        flags[o.name] = bool(inc and inc[0] == config_id)
    return {
        "config_id": config_id,
        "values": config,
        "encoded": [float(v) for v in encode_config(run.space, config)],
        "trials": rows,
        "incumbent": flags,
    }


def _overview(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    return overview_data(_single(runs))


def _configurations(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    return config_detail_data(_single(runs), params["config_id"])


def _footprint(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    res = compute_footprint(_single(runs), params["objective"], budget=params["budget"],
                            border_cap=params["border_cap"], n_support=params["n_support"],
                            seed=params["seed"])
    return {"stress": res.stress,
            "points": [{"x": p.x, "y": p.y, "kind": p.kind,
                        "config_id": p.config_id, "value": p.value} for p in res.points]}


def _cost_over_time(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    traj = cost_over_time(_run_or_group(runs), params["objective"], budget=params["budget"],
                          x_axis=params["x_axis"])
    return {"x_axis": traj.x_axis, "xs": traj.xs, "ys": traj.ys, "std": traj.std}


def _pareto_front(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    res = pareto_front(_run_or_group(runs), params["objective_a"], params["objective_b"],
                       budget=params["budget"])
    return {"objective_a": res.objective_a, "objective_b": res.objective_b,
            "points": [{"run_id": p.run_id, "config_id": p.config_id,
                        "a": p.values[0], "b": p.values[1], "frontier": f}
                       for p, f in zip(res.points, res.frontier)]}


def _parallel_coordinates(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    res = parallel_coordinates(_single(runs), params["objective"], budget=params["budget"],
                               hp_subset=params["hp_subset"], max_lines=params["max_lines"])
    return {"axes": res.axes, "config_ids": res.config_ids, "lines": res.lines}


def _pdp(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    curve = pdp(_single(runs), params["objective"], budget=params["budget"], hp=params["hp"],
                forest_params={"n_trees": params["n_trees"], "seed": params["seed"]},
                grid_size=params["grid_size"], n_samples=params["n_samples"],
                seed=params["seed"])
    return {"name": curve.name, "grid": curve.grid, "display": curve.display,
            "mean": curve.mean, "std": curve.std}


def _importances(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    forest_params = {"n_trees": params["n_trees"], "seed": params["seed"]}
    if params["method"] == "fanova":
        report = fanova(_single(runs), params["objective"], budget=params["budget"],
                        forest_params=forest_params)
    else:
        report = lpi(_single(runs), params["objective"], budget=params["budget"],
                     forest_params=forest_params, grid_size=params["grid_size"])
    return {"method": report.method, "objective": report.objective, "budget": report.budget,
            "names": report.names, "importance": report.importance, "spread": report.spread}


def _ablation_path(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    path = ablation_path(_single(runs), params["objective"], budget=params["budget"],
                         forest_params={"n_trees": params["n_trees"], "seed": params["seed"]})
    return {"origin": path.origin, "target": path.target,
            "origin_prediction": path.origin_prediction,
            "steps": [{"name": s.name, "value": s.value, "prediction": s.prediction}
                      for s in path.steps]}


def _budget_correlation(runs: list[Run], params: dict[str, Any]) -> dict[str, Any]:
    res = budget_correlation(_single(runs), params["objective"])
    return {"objective": res.objective, "budgets": res.budgets,
            "rho": res.rho, "n_common": res.n_common}


_OBJECTIVE = Param("objective", "str", FIRST_OBJECTIVE)
_BUDGET = Param("budget", "budget", HIGHEST)
_SEED = Param("seed", "int", 0)
_N_TREES = Param("n_trees", "int", 16)

PLUGINS: dict[str, Plugin] = {
    "overview": Plugin("overview", (), 1, 1, _overview),
    "configurations": Plugin("configurations", (Param("config_id", "str"),), 1, 1, _configurations),
    "footprint": Plugin("footprint", (_OBJECTIVE, _BUDGET, Param("border_cap", "int", 50),
                                      Param("n_support", "int", 100), _SEED), 1, 1, _footprint),
    "cost_over_time": Plugin("cost_over_time",
                             (_OBJECTIVE, _BUDGET,
                              Param("x_axis", "choice", "trials", ("trials", "time"))),
                             1, None, _cost_over_time),
    "pareto_front": Plugin("pareto_front",
                           (Param("objective_a", "str", FIRST_OBJECTIVE),
                            Param("objective_b", "str", SECOND_OBJECTIVE), _BUDGET),
                           1, None, _pareto_front),
    "parallel_coordinates": Plugin("parallel_coordinates",
                                   (_OBJECTIVE, _BUDGET, Param("hp_subset", "list_str", None),
                                    Param("max_lines", "int", 200)), 1, 1, _parallel_coordinates),
    "pdp": Plugin("pdp", (_OBJECTIVE, _BUDGET, Param("hp", "str"),
                          Param("grid_size", "int", 20), Param("n_samples", "int", 50),
                          _SEED, _N_TREES), 1, 1, _pdp),
    "importances": Plugin("importances",
                          (_OBJECTIVE, _BUDGET,
                           Param("method", "choice", "fanova", ("fanova", "lpi")),
                           Param("grid_size", "int", 20), _N_TREES, _SEED), 1, 1, _importances),
    "ablation_path": Plugin("ablation_path", (_OBJECTIVE, _BUDGET, _N_TREES, _SEED),
                            1, 1, _ablation_path),
    "budget_correlation": Plugin("budget_correlation", (_OBJECTIVE,), 1, 1, _budget_correlation),
}


def get_plugin(name: str) -> Plugin:
    try:
        return PLUGINS[name]
    except KeyError:
        raise InvalidParamsError(f"unknown plugin {name!r} (valid: {sorted(PLUGINS)})",
                                 field="plugin") from None


def build_payload(plugin_name: str, run_ids: Sequence[str], runs: list[Run],
                  params: dict[str, Any]) -> dict[str, Any]:
    """Execute a plugin; returns the full result payload (pre-serialization).

    `params` must already be canonical (validate_params output) and `runs`
    aligned with `run_ids`."""
    plugin = get_plugin(plugin_name)
    data = plugin.fn(list(runs), params)
    return {"plugin": plugin_name, "run_ids": list(run_ids), "params": params, "data": data}
