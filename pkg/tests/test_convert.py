import json

import numpy as np
import pytest

from hpolens import (Objective, Run, RunSource, RunValidationError,
                     SchemaError, TrialRecord, TrialStatus, detect_format,
                     ingest_records, load_tabular, refresh, write_tabular)
from hpolens.convert import TABULAR, UNKNOWN

from _builders import random_run


@pytest.fixture
def run_dir(tmp_path, square_run):
    d = tmp_path / "square"
    write_tabular(square_run, d)
    return d


class TestDetectFormat:
    def test_tabular_directory(self, run_dir):
        assert detect_format(run_dir) == TABULAR

    def test_incomplete_directory(self, run_dir):
        (run_dir / "meta.json").unlink()
        assert detect_format(run_dir) == UNKNOWN

    def test_plain_file(self, tmp_path):
        f = tmp_path / "x.txt"
        f.write_text("hi")
        assert detect_format(f) == UNKNOWN

    def test_missing_path(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            detect_format(tmp_path / "ghost")


class TestWriteLoad:
    def test_roundtrip_preserves_run(self, square_run, run_dir):
        loaded = load_tabular(run_dir)
        assert loaded == square_run
        assert loaded.id == square_run.id

    def test_write_is_deterministic(self, square_run, tmp_path):
        write_tabular(square_run, tmp_path / "a")
        write_tabular(square_run, tmp_path / "b")
        for f in ("meta.json", "space.json", "configs.json", "trials.jsonl"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_refuses_non_empty_dir(self, square_run, run_dir):
        with pytest.raises(FileExistsError, match="non-empty"):
            write_tabular(square_run, run_dir)
        write_tabular(square_run, run_dir, overwrite=True)  # explicit opt-in

    def test_rejects_invalid_run(self, simple_space, run_factory, tmp_path):
        run = run_factory(simple_space,
                          [{"config_id": "ghost", "budget": 1.0,
                            "objectives": {"loss": 1.0}}])
        with pytest.raises(RunValidationError):
            write_tabular(run, tmp_path / "bad")

    def test_randomized_roundtrips(self, tmp_path):
        rng = np.random.default_rng(19)
        for i in range(10):
            run = random_run(rng, n_hps=int(rng.integers(2, 7)),
                             n_trials=int(rng.integers(1, 40)),
                             n_objectives=int(rng.integers(1, 3)), name=f"r{i}")
            d = tmp_path / f"r{i}"
            write_tabular(run, d)
            assert load_tabular(d) == run


class TestSchemaErrors:
    def test_missing_file(self, run_dir):
        (run_dir / "space.json").unlink()
        with pytest.raises(SchemaError, match="space.json"):
            load_tabular(run_dir)

    def test_meta_missing_field(self, run_dir):
        meta = json.loads((run_dir / "meta.json").read_text())
        del meta["optimizer"]
        (run_dir / "meta.json").write_text(json.dumps(meta))
        with pytest.raises(SchemaError, match="optimizer"):
            load_tabular(run_dir)

    def test_invalid_json_reports_file(self, run_dir):
        (run_dir / "configs.json").write_text("{nope")
        with pytest.raises(SchemaError) as err:
            load_tabular(run_dir)
        assert err.value.file == "configs.json"

    def test_trial_error_reports_line(self, run_dir):
        lines = (run_dir / "trials.jsonl").read_text().splitlines()
        bad = json.loads(lines[2])
        del bad["status"]
        lines[2] = json.dumps(bad)
        (run_dir / "trials.jsonl").write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError) as err:
            load_tabular(run_dir)
        assert err.value.file == "trials.jsonl"
        assert err.value.line == 3
        assert "status" in str(err.value)

    def test_truncated_last_line_strict(self, run_dir):
        raw = (run_dir / "trials.jsonl").read_text()
        (run_dir / "trials.jsonl").write_text(raw.rstrip("\n")[:-9])
        with pytest.raises(SchemaError):
            load_tabular(run_dir)

    def test_complete_line_without_newline_ok(self, run_dir):
        raw = (run_dir / "trials.jsonl").read_text()
        (run_dir / "trials.jsonl").write_text(raw.rstrip("\n"))
        run = load_tabular(run_dir)
        assert len(run.trials) == 6

    def test_validation_failure_lists_violations(self, run_dir):
        cfgs = json.loads((run_dir / "configs.json").read_text())
        cfgs["c0"]["x1"] = 42.0
        (run_dir / "configs.json").write_text(json.dumps(cfgs))
        with pytest.raises(RunValidationError) as err:
            load_tabular(run_dir)
        assert any("outside bounds" in v for v in err.value.violations)


def append_trial(run_dir, budget=1.0, loss=0.05, config_id="c0", newline=True):
    line = json.dumps({"config_id": config_id, "budget": budget, "seed": None,
                       "objectives": {"loss": loss}, "status": "success",
                       "start": 90.0, "end": 91.0})
    with open(run_dir / "trials.jsonl", "a") as fh:
        fh.write(line + ("\n" if newline else ""))


class TestRunSource:
    def test_load_then_noop_refresh(self, run_dir, square_run):
        src = RunSource(run_dir)
        run = src.load()
        assert run == square_run
        again, changed = src.refresh(run)
        assert again is run and changed is False

    def test_append_detected(self, run_dir):
        src = RunSource(run_dir)
        run = src.load()
        append_trial(run_dir)
        new, changed = src.refresh(run)
        assert changed is True
        assert len(new.trials) == 7
        assert new.trials[-1].objectives["loss"] == 0.05
        assert len(run.trials) == 6  # previous run untouched

    def test_refresh_after_append_equals_full_reload(self, run_dir):
        src = RunSource(run_dir)
        run = src.load()
        append_trial(run_dir)
        incremental, _ = src.refresh(run)
        assert incremental == RunSource(run_dir).load()
        assert incremental.id == RunSource(run_dir).load().id

    def test_partial_line_left_for_later(self, run_dir):
        src = RunSource(run_dir)
        run = src.load()
        with open(run_dir / "trials.jsonl", "a") as fh:
            fh.write('{"config_id": "c0", "bud')  # writer mid-line
        same, changed = src.refresh(run)
        assert changed is False
        with open(run_dir / "trials.jsonl", "a") as fh:
            fh.write('get": 1.0, "seed": null, "objectives": {"loss": 0.01}, '
                     '"status": "success", "start": 95.0, "end": 96.0}\n')
        new, changed = src.refresh(same)
        assert changed is True
        assert new.trials[-1].objectives["loss"] == 0.01
        assert new == RunSource(run_dir).load()

    def test_meta_change_triggers_full_reload(self, run_dir):
        src = RunSource(run_dir)
        run = src.load()
        meta = json.loads((run_dir / "meta.json").read_text())
        meta["name"] = "renamed"
        (run_dir / "meta.json").write_text(json.dumps(meta))
        new, changed = src.refresh(run)
        assert new.name == "renamed"
        # content hash ignores the name, so the reload reports no change
        assert new.id == run.id and changed is False

    def test_truncation_triggers_full_reload(self, run_dir):
        src = RunSource(run_dir)
        run = src.load()
        lines = (run_dir / "trials.jsonl").read_text().splitlines()
        (run_dir / "trials.jsonl").write_text("\n".join(lines[:3]) + "\n")
        new, changed = src.refresh(run)
        assert changed is True
        assert len(new.trials) == 3

    def test_module_level_refresh(self, run_dir):
        src = RunSource(run_dir)
        run = src.load()
        append_trial(run_dir)
        new, changed = refresh(src, run)
        assert changed and len(new.trials) == 7

    def test_non_tabular_source(self, tmp_path):
        (tmp_path / "stuff").mkdir()
        with pytest.raises(SchemaError):
            RunSource(tmp_path / "stuff").load()


class TestIngestRecords:
    def test_dedups_identical_configs(self, simple_space):
        rec = {"config": {"x1": 0.5, "x2": 0.5}, "budget": 1.0,
               "objectives": {"loss": 1.0}, "end": 1.0}
        other = dict(rec, config={"x1": 0.9, "x2": 0.5}, end=2.0)
        run = ingest_records(simple_space, [Objective("loss")], [1.0],
                             [rec, dict(rec, end=3.0), other])
        assert len(run.configs) == 2
        assert [t.config_id for t in run.trials] == ["c0", "c0", "c1"]

    def test_ids_in_first_seen_order(self, simple_space):
        records = [TrialRecord(config={"x1": v, "x2": 0.5}, budget=1.0,
                               objectives={"loss": v}, end_time=1.0)
                   for v in (0.9, 0.1, 0.5)]
        run = ingest_records(simple_space, [Objective("loss")], [1.0], records)
        assert run.configs["c0"]["x1"] == 0.9
        assert run.configs["c2"]["x1"] == 0.5

    def test_invalid_config_names_record_index(self, simple_space):
        records = [
            TrialRecord(config={"x1": 0.5, "x2": 0.5}, budget=1.0,
                        objectives={"loss": 1.0}, end_time=1.0),
            TrialRecord(config={"x1": 9.0, "x2": 0.5}, budget=1.0,
                        objectives={"loss": 1.0}, end_time=1.0),
        ]
        with pytest.raises(RunValidationError) as err:
            ingest_records(simple_space, [Objective("loss")], [1.0], records)
        assert any(v.startswith("record 1:") for v in err.value.violations)

    def test_trial_level_violation_caught(self, simple_space):
        records = [TrialRecord(config={"x1": 0.5, "x2": 0.5}, budget=9.0,
                               objectives={"loss": 1.0}, end_time=1.0)]
        with pytest.raises(RunValidationError):
            ingest_records(simple_space, [Objective("loss")], [1.0], records)

    def test_ingested_run_roundtrips_to_disk(self, simple_space, tmp_path):
        records = [TrialRecord(config={"x1": 0.2, "x2": 0.8}, budget=1.0,
                               objectives={"loss": 0.3}, status=TrialStatus.SUCCESS,
                               start_time=0.0, end_time=1.5, seed=3)]
        run = ingest_records(simple_space, [Objective("loss")], [1.0], records)
        write_tabular(run, tmp_path / "r")
        assert load_tabular(tmp_path / "r") == run
