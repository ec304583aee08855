import math

import numpy as np
import orjson
import pytest

from wsclab.consolidation import load_checkpoint
from wsclab.datastructures import load_run_config
from wsclab.enum import Method
from wsclab.exceptions import ConfigurationError, DomainError, ReportError
from wsclab.harness import ExperimentRun, aggregate_rows, build_variants, derive_seed, mean_and_se, run_experiment, run_id
from wsclab.harness.records import SUMMARY_COLUMNS, format_value, read_csv, write_csv
from wsclab.harness.runner import identity_echo
from wsclab.processpool import run_jobs, worker_count


def test_derived_seeds_are_stable_and_separate():
    assert derive_seed(0, 1, "data") == derive_seed(0, 1, "data")
    seeds = {derive_seed(s, t, c) for s in range(3) for t in range(3) for c in ("data", "reset", "alignment")}
    assert len(seeds) == 27


def test_run_id_tracks_identity_only(write_config):
    cfg = load_run_config(write_config(), environ={})
    base = run_id(identity_echo(cfg), "wsc", 5, 0)
    assert len(base) == 16
    assert run_id(identity_echo(cfg.replace({"run.output_dir": "elsewhere", "run.timing": True})), "wsc", 5, 0) == base
    assert run_id(identity_echo(cfg.replace({"reset.retain": 0.5})), "wsc", 5, 0) != base
    assert run_id(identity_echo(cfg), "wsc", 5, 1) != base
    assert run_id(identity_echo(cfg), "replay", 5, 0) != base
    assert run_id(identity_echo(cfg), "wsc", 10, 0) != base


def test_format_value():
    assert format_value(None) == ""
    assert format_value(float("nan")) == ""
    assert format_value(0.1) == "0.1"
    assert format_value(12) == "12"


def test_mean_and_standard_error():
    assert mean_and_se([]) == (None, None)
    assert mean_and_se(["0.5"]) == (0.5, None)
    mean, se = mean_and_se(["1.0", "", "3.0"])
    assert mean == 2.0
    assert se == pytest.approx(1.0)
    mean, se = mean_and_se(["0.2", "0.4", "0.9"])
    assert mean == pytest.approx(0.5)
    assert se == pytest.approx(math.sqrt(((0.3**2) + (0.1**2) + (0.4**2)) / 2 / 3))


def test_aggregation_ignores_row_order():
    rows = [
        {"method": m, "budget_per_class": b, "seed": str(s), "avg_final_acc": str(0.1 * s + b / 100), "steps": "10"}
        for m in ("wsc", "replay")
        for b in (5, 20)
        for s in range(3)
    ]
    forward = aggregate_rows(rows, ("method", "budget_per_class"))
    backward = aggregate_rows(list(reversed(rows)), ("method", "budget_per_class"))
    assert forward == backward
    assert [(row["method"], row["budget_per_class"]) for row in forward] == [("replay", "5"), ("replay", "20"), ("wsc", "5"), ("wsc", "20")]
    assert forward[0]["n_seeds"] == "3"
    assert forward[0]["steps_se"] == "0.0"
    assert forward[0]["kappa_mean"] == ""


def test_csv_roundtrip_and_missing_columns(tmp_path):
    path = write_csv(tmp_path / "out" / "summary.csv", SUMMARY_COLUMNS, [{"run_id": "abc", "seed": "0"}])
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(SUMMARY_COLUMNS)
    rows = read_csv(path, ("run_id",))
    assert rows[0]["run_id"] == "abc" and rows[0]["kappa"] == ""
    with pytest.raises(ReportError):
        read_csv(path, ("suite",))


@pytest.mark.parametrize(
    "parallel, jobs, expected",
    [(1, 5, 1), (4, 2, 2), (3, 10, 3), (2, 0, 1)],
)
def test_worker_count(parallel: int, jobs: int, expected: int):
    assert worker_count(parallel, jobs) == expected


def test_worker_count_rejects_negative():
    with pytest.raises(ConfigurationError) as info:
        worker_count(-1, 3)
    assert info.value.field == "parallel"


def test_run_jobs_keeps_job_order():
    assert run_jobs(pow, [(2, 3), (3, 2), (5, 0)], 1) == [8, 9, 1]


def test_variants(write_config):
    cfg = load_run_config(write_config("ablate.suites = component, retain\nablate.retain_grid = 0.1, 0.5"), environ={})
    variants = build_variants(cfg)
    assert [v.name for v in variants] == ["replay", "wo_reset", "wo_avg", "wsc", "q=0.1", "q=0.5"]
    assert variants[1].config(cfg).reset.retain_fraction == 1.0
    assert variants[2].config(cfg).schedule.averaging is False
    assert variants[0].method is Method.REPLAY
    all_suites = build_variants(load_run_config(write_config("ablate.suites = metric, strategy, frequency", name="all.cfg"), environ={}))
    assert len(all_suites) == 8 + 5 + 3
    with pytest.raises(ConfigurationError):
        build_variants(load_run_config(write_config("ablate.suites = nonsense", name="bad.cfg"), environ={}))


def test_wsc_run_writes_its_directory(write_config, tmp_path):
    cfg = load_run_config(write_config(), environ={})
    record = run_experiment(cfg, Method.WSC, 5, 0, tmp_path / "out")
    run_dir = tmp_path / "out" / record.run_id
    assert record.complete
    assert len(record.accuracy) == 3
    assert record.metrics["kappa"] == pytest.approx(20 / 80)
    assert len(record.alignment) == 2
    assert record.cost["optimizer_steps"] > 0
    saved = orjson.loads((run_dir / "record.json").read_bytes())
    assert saved["complete"] is True
    assert saved["run_id"] == record.run_id
    lines = (run_dir / "epochs.jsonl").read_bytes().splitlines()
    assert len(lines) == 3 * 4
    assert orjson.loads(lines[0])["task"] == 0
    checkpoint = load_checkpoint(run_dir / "final.wsck")
    assert checkpoint.theta.layout[0][0] == "fc0.weight"
    assert not (run_dir / "INCOMPLETE").exists()
    summary = record.summary_row()
    assert summary["metric"] == "moment" and summary["strategy"] == "soft_blend"
    assert summary["wall_clock_s"] == ""
    assert record.summary_row(timing=True)["wall_clock_s"] != ""


def test_runs_are_reproducible(write_config, tmp_path):
    cfg = load_run_config(write_config(), environ={})
    first = run_experiment(cfg, Method.WSC, 5, 0, tmp_path / "a")
    second = run_experiment(cfg, Method.WSC, 5, 0, tmp_path / "b")
    assert first.summary_row() == second.summary_row()
    assert first.accuracy == second.accuracy
    a = load_checkpoint(tmp_path / "a" / first.run_id / "final.wsck")
    b = load_checkpoint(tmp_path / "b" / second.run_id / "final.wsck")
    assert np.array_equal(a.theta.flat, b.theta.flat)


def test_scratch_run(write_config, tmp_path):
    cfg = load_run_config(write_config(), environ={})
    record = run_experiment(cfg, Method.SCRATCH, 5, 0, tmp_path)
    assert record.complete
    assert record.summary_row()["metric"] == ""


def test_failed_run_is_marked_incomplete(write_config, tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise DomainError("evaluation failed")

    monkeypatch.setattr("wsclab.harness.runner.eval_accuracy_row", broken)
    cfg = load_run_config(write_config(), environ={})
    run = ExperimentRun(cfg, Method.REPLAY, 5, 0, tmp_path)
    with pytest.raises(DomainError):
        run.execute()
    assert (run.run_dir / "INCOMPLETE").read_text(encoding="utf-8").startswith("DomainError")
    saved = orjson.loads((run.run_dir / "record.json").read_bytes())
    assert saved["complete"] is False
    assert "evaluation failed" in saved["error"]
    assert not (run.run_dir / "final.wsck").exists()
