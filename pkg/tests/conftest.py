import numpy as np
import pytest

from hpolens import (ConfigurationSpace, Direction, HpKind, Hyperparameter,
                     Objective, Run, Trial, TrialStatus)

# Collected by the makereport hook; printed one line per criterion at the end.
_ACCEPTANCE: dict[str, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _ACCEPTANCE[name] = report.passed
    elif report.failed:
        # setup/teardown error counts as a failed criterion
        _ACCEPTANCE[name] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def simple_space():
    """Unconditional two-float space on the unit square."""
    return ConfigurationSpace([
        Hyperparameter("x1", HpKind.FLOAT, lower=0.0, upper=1.0),
        Hyperparameter("x2", HpKind.FLOAT, lower=0.0, upper=1.0),
    ])


@pytest.fixture
def nn_space():
    """Conditional space: momentum only active when opt == sgd."""
    return ConfigurationSpace([
        Hyperparameter("lr", HpKind.FLOAT, lower=1e-4, upper=1e-1, log_scale=True),
        Hyperparameter("units", HpKind.INT, lower=16, upper=256),
        Hyperparameter("opt", HpKind.CATEGORICAL, choices=("adam", "sgd")),
        Hyperparameter("momentum", HpKind.FLOAT, lower=0.0, upper=0.99,
                       condition=("opt", ("sgd",))),
    ])


def make_run(space, trials, objectives=None, budgets=None, configs=None, name="test"):
    """Run.create with light defaults; trials given as dicts."""
    if objectives is None:
        objectives = [Objective("loss")]
    if budgets is None:
        budgets = sorted({t["budget"] for t in trials}) or [1.0]
    built = [
        Trial(
            config_id=t["config_id"],
            budget=float(t["budget"]),
            seed=t.get("seed"),
            objectives=t.get("objectives", {}),
            status=t.get("status", TrialStatus.SUCCESS),
            start_time=t.get("start", 0.0),
            end_time=t.get("end", 1.0),
        )
        for t in trials
    ]
    return Run.create(name=name, space=space, objectives=objectives,
                      budgets=[float(b) for b in budgets],
                      configs=configs or {}, trials=built)


@pytest.fixture
def run_factory():
    return make_run


@pytest.fixture
def square_run(simple_space):
    """Six successful trials of loss = x1 + 2*x2 at a single budget."""
    points = [(0.0, 0.0), (0.25, 0.5), (0.5, 0.25), (0.75, 1.0), (1.0, 0.0), (1.0, 1.0)]
    configs = {f"c{i}": {"x1": a, "x2": b} for i, (a, b) in enumerate(points)}
    trials = [
        {"config_id": cid, "budget": 1.0,
         "objectives": {"loss": v["x1"] + 2 * v["x2"]},
         "start": float(i), "end": float(i) + 0.5}
        for i, (cid, v) in enumerate(configs.items())
    ]
    return make_run(simple_space, trials, configs=configs)
