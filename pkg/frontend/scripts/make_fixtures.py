#!/usr/bin/env python3
"""Regenerate the dashboard test fixtures.

Writes a small deterministic run to test/fixtures/run/ and records one
payload per plugin with `hpolens analyze`, so the frontend tests exercise
real wire bytes without a live service.
"""
from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from hpolens import (Condition, ConfigurationSpace, Direction, HpKind,
                     Hyperparameter, Objective, TrialRecord, TrialStatus,
                     incumbent, ingest_records, write_tabular)

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "test" / "fixtures"
RUN_DIR = FIXTURES / "run"
PAYLOADS = FIXTURES / "payloads"


def build_run():
    space = ConfigurationSpace([
        Hyperparameter("lr", HpKind.FLOAT, lower=1e-4, upper=1.0, log_scale=True),
        Hyperparameter("depth", HpKind.INT, lower=1, upper=12),
        Hyperparameter("optimizer", HpKind.CATEGORICAL,
                       choices=("adam", "sgd", "rmsprop")),
        Hyperparameter("momentum", HpKind.FLOAT, lower=0.0, upper=0.99,
                       condition=Condition("optimizer", ("sgd", "rmsprop"))),
        Hyperparameter("width", HpKind.ORDINAL, choices=("narrow", "normal", "wide")),
    ])
    objectives = [Objective("loss", Direction.MINIMIZE),
                  Objective("accuracy", Direction.MAXIMIZE)]
    budgets = [10.0, 50.0, 100.0]

    rng = np.random.default_rng(0)
    records = []
    clock = 0.0
    for i in range(80):
        opt = ("adam", "sgd", "rmsprop")[int(rng.integers(3))]
        config = {
            "lr": float(np.exp(rng.uniform(np.log(1e-4), np.log(1.0)))),
            "depth": int(rng.integers(1, 13)),
            "optimizer": opt,
            "width": ("narrow", "normal", "wide")[int(rng.integers(3))],
        }
        if opt != "adam":
            config["momentum"] = float(rng.uniform(0.0, 0.99))
        # every 3rd config runs the full ladder, the rest stop early
        n_budgets = 3 if i % 3 == 0 else int(rng.integers(1, 3))
        for b in budgets[:n_budgets]:
            base = (np.log10(config["lr"]) + 2.0) ** 2 * 0.1 + config["depth"] * 0.02
            base += {"adam": 0.0, "sgd": 0.15, "rmsprop": 0.08}[opt]
            base -= 0.3 * config.get("momentum", 0.0)
            loss = float(base + 2.0 / b + rng.normal(0, 0.02))
            # accuracy rewards depth while loss penalizes it: real tradeoff
            acc = float(np.clip(0.45 + 0.045 * config["depth"]
                                - 0.05 * base + rng.normal(0, 0.03), 0, 1))
            status = TrialStatus.SUCCESS
            if rng.random() < 0.05:
                status = TrialStatus.CRASHED if rng.random() < 0.5 else TrialStatus.TIMEOUT
            duration = float(b * 0.1 + rng.uniform(0, 1))
            records.append(TrialRecord(
                config=config, budget=b,
                objectives={"loss": loss, "accuracy": acc} if status is TrialStatus.SUCCESS
                else {"loss": None, "accuracy": None},
                status=status, start_time=clock, end_time=clock + duration,
                seed=int(rng.integers(0, 3))))
            clock += duration
    return ingest_records(space, objectives, budgets, records,
                          name="demo", optimizer="demo-opt")


def analyze(plugin: str, out: Path, *params: str) -> None:
    cmd = ["hpolens", "analyze", plugin, "--run", str(RUN_DIR), "--out", str(out)]
    for p in params:
        cmd += ["--param", p]
    subprocess.run(cmd, check=True)


def main() -> int:
    run = build_run()
    write_tabular(run, RUN_DIR, overwrite=True)
    PAYLOADS.mkdir(parents=True, exist_ok=True)

    inc_id = incumbent(run, "loss")[0]
    analyze("overview", PAYLOADS / "overview.json")
    analyze("configurations", PAYLOADS / "configurations.json", f"config_id={inc_id}")
    analyze("footprint", PAYLOADS / "footprint.json",
            "objective=loss", "border_cap=20", "n_support=40")
    analyze("cost_over_time", PAYLOADS / "cost_over_time.json",
            "objective=loss", "x_axis=trials")
    analyze("pareto_front", PAYLOADS / "pareto_front.json")
    analyze("parallel_coordinates", PAYLOADS / "parallel_coordinates.json",
            "objective=loss")
    analyze("pdp", PAYLOADS / "pdp.json",
            "hp=lr", "grid_size=15", "n_samples=30", "n_trees=8")
    analyze("importances", PAYLOADS / "importances.json",
            "method=fanova", "n_trees=8")
    analyze("ablation_path", PAYLOADS / "ablation_path.json", "n_trees=8")
    analyze("budget_correlation", PAYLOADS / "budget_correlation.json",
            "objective=loss")

    listing = {p.stem: json.loads(p.read_text())["plugin"]
               for p in sorted(PAYLOADS.glob("*.json"))}
    print(f"wrote {RUN_DIR} and {len(listing)} payloads: {', '.join(listing)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
