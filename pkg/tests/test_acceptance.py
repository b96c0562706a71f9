"""End-to-end acceptance checks, one test per shipped guarantee.

Each test carries an `acceptance` marker; the terminal summary prints one
PASS/FAIL line per criterion (see conftest).
"""
import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from hpolens import (ConfigurationSpace, Direction, EmptySelectionError,
                     HpKind, Hyperparameter, Objective, TrialRecord,
                     ablation_path, budget_correlation, cost_over_time,
                     encode_config, encode_run, group_runs, ingest_records,
                     load_tabular, make_forest, pareto_front, write_tabular)
from hpolens.convert import RunSource
from hpolens.footprint import SmacofEmbedding
from hpolens.forest import CatDomain, NumDomain, Tree
from hpolens.hyperparams import fanova
from hpolens.service import (JobManager, build_payload, create_app,
                             validate_params)

from _builders import (box_run, brute_force_frontier, mc_sample, random_run,
                       random_stub_tree)


@pytest.mark.acceptance("pareto front equals brute-force dominance oracle")
def test_pareto_matches_bruteforce_oracle(run_factory, simple_space):
    rng = np.random.default_rng(42)
    elapsed = 0.0
    for case in range(50):
        n = int(rng.integers(2, 501))
        dir_a = Direction.MINIMIZE if rng.random() < 0.5 else Direction.MAXIMIZE
        dir_b = Direction.MINIMIZE if rng.random() < 0.5 else Direction.MAXIMIZE
        if case % 2 == 0:
            # coarse integer grid forces ties and duplicate points
            vals = rng.integers(0, 5, size=(n, 2)).astype(float)
        else:
            vals = rng.uniform(size=(n, 2))
        configs = {f"c{i}": {"x1": 0.5, "x2": 0.5} for i in range(n)}
        trials = [{"config_id": f"c{i}", "budget": 1.0,
                   "objectives": {"a": float(vals[i, 0]), "b": float(vals[i, 1])},
                   "end": float(i)} for i in range(n)]
        run = run_factory(simple_space, trials, configs=configs,
                          objectives=[Objective("a", dir_a), Objective("b", dir_b)])
        t0 = time.perf_counter()
        res = pareto_front(run, "a", "b")
        elapsed += time.perf_counter() - t0
        sign_a = 1.0 if dir_a is Direction.MINIMIZE else -1.0
        sign_b = 1.0 if dir_b is Direction.MINIMIZE else -1.0
        pts = [(p.values[0], p.values[1]) for p in res.points]
        assert res.frontier == brute_force_frontier(pts, sign_a, sign_b)
    assert elapsed < 1.0, f"pareto calls took {elapsed:.2f}s"


@pytest.mark.acceptance("fanova importances on analytic targets")
def test_fanova_analytic_targets():
    t0 = time.perf_counter()
    single = box_run(lambda X: X[:, 0], n=500, d=3, seed=0)
    rep = fanova(single, "loss")
    by = dict(zip(rep.names, rep.importance))
    assert by["x1"] > 0.8
    assert by["x2"] < 0.1 and by["x3"] < 0.1

    additive = box_run(lambda X: X[:, 0] + X[:, 1], n=500, d=3, seed=0)
    rep_add = fanova(additive, "loss")
    by_add = dict(zip(rep_add.names, rep_add.importance))
    assert abs(by_add["x1"] - by_add["x2"]) < 0.15

    shifted = box_run(lambda X: 3 * (X[:, 0] + X[:, 1]) + 7, n=500, d=3, seed=0)
    rep_shift = fanova(shifted, "loss")
    np.testing.assert_allclose(rep_add.importance, rep_shift.importance, atol=1e-9)
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.acceptance("tree marginalization equals Monte-Carlo oracle")
def test_tree_marginal_vs_monte_carlo():
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        domains = []
        for _ in range(d):
            if rng.random() < 0.3:
                domains.append(CatDomain(tuple(range(int(rng.integers(2, 5))))))
            else:
                lo = float(rng.uniform(-1.0, 0.5))
                domains.append(NumDomain(lo, lo + float(rng.uniform(0.5, 2.0))))
        tree = Tree.from_dict(random_stub_tree(rng, domains, max_depth=4), domains)
        n_fix = int(rng.integers(0, d + 1))
        dims = sorted(int(j) for j in rng.choice(d, size=n_fix, replace=False))
        values = []
        for j in dims:
            dom = domains[j]
            if isinstance(dom, CatDomain):
                values.append(float(rng.choice(dom.codes)))
            else:
                values.append(float(rng.uniform(dom.lower, dom.upper)))
        X = mc_sample(rng, domains, 100_000)
        for j, v in zip(dims, values):
            X[:, j] = v
        mc = float(tree.predict(X).mean())
        assert tree.marginal(dims, values) == pytest.approx(mc, abs=1e-2)


@pytest.mark.acceptance("budget correlation extremes and hand-computed case")
def test_budget_correlation_extremes(run_factory, simple_space):
    def two_budget(vals1, vals2):
        configs = {f"c{i}": {"x1": 0.5, "x2": 0.5} for i in range(len(vals1))}
        trials = []
        for i, (v1, v2) in enumerate(zip(vals1, vals2)):
            trials.append({"config_id": f"c{i}", "budget": 1.0,
                           "objectives": {"loss": float(v1)}})
            trials.append({"config_id": f"c{i}", "budget": 2.0,
                           "objectives": {"loss": float(v2)}})
        return run_factory(simple_space, trials, budgets=[1.0, 2.0], configs=configs)

    ranks = [1, 2, 3, 4, 5]
    same = budget_correlation(two_budget(ranks, ranks), "loss")
    assert same.rho[0][1] == pytest.approx(1.0, abs=1e-9)
    rev = budget_correlation(two_budget(ranks, ranks[::-1]), "loss")
    assert rev.rho[0][1] == pytest.approx(-1.0, abs=1e-9)
    swap = budget_correlation(two_budget(ranks, [1, 2, 3, 5, 4]), "loss")
    assert swap.rho[0][1] == pytest.approx(0.9, abs=1e-9)


@pytest.mark.acceptance("cost over time monotone; group of one matches the run")
def test_trajectory_monotonicity():
    rng = np.random.default_rng(11)
    checked = 0
    for i in range(100):
        run = random_run(rng, n_hps=int(rng.integers(2, 6)),
                         n_trials=int(rng.integers(5, 40)),
                         n_objectives=int(rng.integers(1, 3)),
                         n_budgets=int(rng.integers(1, 4)), name=f"r{i}")
        for obj in run.objectives:
            for axis in ("trials", "time"):
                try:
                    traj = cost_over_time(run, obj.name, x_axis=axis)
                except EmptySelectionError:
                    continue
                diffs = np.diff(traj.ys)
                if obj.direction is Direction.MINIMIZE:
                    assert (diffs <= 0).all()
                else:
                    assert (diffs >= 0).all()
                solo = cost_over_time(group_runs("g", [run]), obj.name, x_axis=axis)
                assert solo.xs == traj.xs and solo.ys == traj.ys
                assert solo.std == [0.0] * len(traj.ys)
                checked += 1
    assert checked >= 100


@pytest.mark.acceptance("MDS embeds planar distances with tiny stress")
def test_mds_exactness():
    rng = np.random.default_rng(5)
    for n in (3, 8, 21, 50):
        pts = rng.uniform(-2.0, 2.0, size=(n, 2))
        D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        est = SmacofEmbedding().fit(D)
        assert est.stress_ < 1e-3
        assert (np.diff(est.stress_history_) <= 1e-12).all()

    tri = np.ones((3, 3)) - np.eye(3)
    est = SmacofEmbedding().fit(tri)
    E = est.embedding_
    dists = np.sqrt(((E[:, None, :] - E[None, :, :]) ** 2).sum(-1))
    off = dists[~np.eye(3, dtype=bool)]
    assert float(np.ptp(off)) < 1e-3
    assert abs(float(off.mean()) - 1.0) < 1e-3
    assert (np.diff(est.stress_history_) <= 1e-12).all()


@pytest.mark.acceptance("ablation path on an exact stub surrogate")
def test_ablation_on_stub_surrogate():
    space = ConfigurationSpace([
        Hyperparameter("x1", HpKind.FLOAT, lower=0.0, upper=1.0),
        Hyperparameter("x2", HpKind.FLOAT, lower=0.0, upper=1.0),
    ])
    k = 5
    records = [TrialRecord(config={"x1": i / (k - 1), "x2": j / (k - 1)}, budget=1.0,
                           objectives={"loss": i / (k - 1) + 2 * j / (k - 1)},
                           start_time=0.0, end_time=1.0)
               for i in range(k) for j in range(k)]
    run = ingest_records(space, [Objective("loss")], [1.0], records)
    stub = {"n_trees": 1, "bootstrap": False, "max_features_ratio": 1.0}
    path = ablation_path(run, "loss", forest_params=stub)
    # loss = x1 + 2*x2: flipping x2 from the default 0.5 to the incumbent 0.0
    # buys twice as much as x1, so it must come first
    assert path.steps[0].name == "x2"
    # final prediction equals an independently fitted twin surrogate queried
    # at the incumbent
    em = encode_run(run, "loss")
    twin = make_forest(stub, feature_domains=em.forest_domains()).fit(em.X, em.y)
    x_inc = np.array([encode_config(space, path.target)])
    assert path.steps[-1].prediction == pytest.approx(float(twin.predict(x_inc)[0]), abs=1e-9)


@pytest.mark.acceptance("tabular write/load identity and incremental refresh")
def test_converter_round_trip(tmp_path):
    rng = np.random.default_rng(23)
    saw_condition = saw_categorical = False
    for i in range(20):
        run = random_run(rng, n_hps=int(rng.integers(2, 7)),
                         n_trials=int(rng.integers(1, 40)),
                         n_objectives=int(rng.integers(1, 3)),
                         n_budgets=int(rng.integers(1, 3)), name=f"run{i}")
        saw_condition |= any(hp.condition is not None for hp in run.space)
        saw_categorical |= any(hp.kind is HpKind.CATEGORICAL for hp in run.space)
        d = tmp_path / f"run{i}"
        write_tabular(run, d)
        loaded = load_tabular(d)
        assert loaded == run and loaded.id == run.id

        src = RunSource(d)
        before = src.load()
        cid = next(iter(run.configs))
        line = {"config_id": cid, "budget": run.budgets[0], "seed": None,
                "objectives": {o.name: 0.5 for o in run.objectives},
                "status": "success", "start": 1e6, "end": 1e6 + 1}
        with open(d / "trials.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps(line) + "\n")
        refreshed, changed = src.refresh(before)
        assert changed and refreshed == load_tabular(d)
    assert saw_condition and saw_categorical


@pytest.mark.acceptance("every plugin completes on a 39-hp, 1000-trial run")
def test_scalability_big_run():
    rng = np.random.default_rng(7)
    run = random_run(rng, n_hps=39, n_trials=1000, n_objectives=2, n_budgets=3,
                     name="big")
    assert len(run.space) == 39 and len(run.trials) == 1000
    numeric_hp = next(hp.name for hp in run.space if hp.kind is not HpKind.CONSTANT)
    raw_params = {
        "overview": {},
        "configurations": {"config_id": next(iter(run.configs))},
        "footprint": {},
        "cost_over_time": {},
        "pareto_front": {},
        "parallel_coordinates": {},
        "pdp": {"hp": numeric_hp},
        "importances": {},
        "ablation_path": {},
        "budget_correlation": {},
    }
    for plugin, raw in raw_params.items():
        params = validate_params(plugin, raw, [run])
        t0 = time.perf_counter()
        payload = build_payload(plugin, ["big"], [run], params)
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"{plugin} took {elapsed:.1f}s"
        assert payload["plugin"] == plugin


@pytest.mark.acceptance("service dedup, byte-identical cache, responsive polls")
def test_service_contract(tmp_path):
    runs_dir = tmp_path / "runs"
    runs_dir.mkdir()
    slow = box_run(lambda X: X[:, 0], n=500, d=3, seed=1, name="slow")
    write_tabular(slow, runs_dir / "slow")
    cache_dir = tmp_path / "cache"

    app = create_app(runs_dir, cache_dir=cache_dir, workers=1, poll_interval=0)
    body = {"plugin": "footprint", "run_ids": ["slow"],
            "params": {"n_support": 900, "border_cap": 8}}
    with TestClient(app) as client:
        # fully usable without any dashboard assets
        assert client.get("/api/runs").status_code == 200
        assert client.get("/").status_code == 404

        job_id = client.post("/api/jobs", json=body).json()["job_id"]
        saw_running = False
        poll_times = []
        status = {}
        deadline = time.monotonic() + 60
        while time.monotonic() < deadline:
            t0 = time.perf_counter()
            status = client.get(f"/api/jobs/{job_id}").json()
            poll_times.append(time.perf_counter() - t0)
            if status["state"] == "running" and not saw_running:
                saw_running = True
                # duplicate submission while computing joins the same job
                dup = client.post("/api/jobs", json=body).json()
                assert dup["job_id"] == job_id
            if status["state"] in ("finished", "failed"):
                break
            time.sleep(0.002)
        assert status.get("state") == "finished", status.get("error")
        assert saw_running, "job finished before a running-state poll"
        assert max(poll_times) < 0.1, f"slowest poll {max(poll_times):.3f}s"

    # cache hits are byte-identical across a full service restart
    params = validate_params("footprint", {"n_support": 40, "border_cap": 8}, [slow])
    m1 = JobManager(cache_dir=cache_dir, workers=1)
    try:
        job = m1.submit("footprint", params, [("slow", slow)])
        deadline = time.monotonic() + 60
        while job.state in ("queued", "running") and time.monotonic() < deadline:
            time.sleep(0.005)
        assert job.state == "finished"
        first_bytes = job.payload_bytes
    finally:
        m1.shutdown()
    m2 = JobManager(cache_dir=cache_dir, workers=1)
    try:
        again = m2.submit("footprint", params, [("slow", slow)])
        assert again.state == "finished", "expected a cache hit, not a recompute"
        assert again.payload_bytes == first_bytes
    finally:
        m2.shutdown()
