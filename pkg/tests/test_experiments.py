import math

import numpy as np
import pytest

from dagsp.experiments import (
    ConfigError,
    ExperimentConfig,
    aggregate,
    emit_plot_data,
    run_sir_experiment,
    run_synthetic_experiment,
)

SMALL_SYN = dict(n_nodes=25, edge_prob=0.15, trials=3, fractions=[0.4, 1.0])
SMALL_SIR = dict(experiment="dynamic_sir", n_individuals=12, n_times=6, trials=2, initial_infected=[2],
                 fractions=[0.2, 0.5], roc_fraction=0.5)


def emit_bytes(tmp_path, name, **kw):
    paths = emit_plot_data(tmp_path / name, **kw)
    return {p.name: p.read_bytes() for p in paths}


def test_synthetic_rows():
    rows = run_synthetic_experiment(ExperimentConfig(**SMALL_SYN))
    assert len(rows) == 6 * 2 * 3
    assert {r["basis"] for r in rows} == set(ExperimentConfig().bases)
    assert all(r["rel_error"] >= 0 for r in rows)


def test_synthetic_byte_identical_across_jobs(tmp_path):
    a = run_synthetic_experiment(ExperimentConfig(**SMALL_SYN, jobs=1))
    b = run_synthetic_experiment(ExperimentConfig(**SMALL_SYN, jobs=2))
    assert emit_bytes(tmp_path, "a", synthetic_rows=a) == emit_bytes(tmp_path, "b", synthetic_rows=b)
    c = run_synthetic_experiment(ExperimentConfig(**SMALL_SYN, seed=1))
    assert emit_bytes(tmp_path, "c", synthetic_rows=c) != emit_bytes(tmp_path, "a", synthetic_rows=a)


def test_sir_smoke_and_determinism(tmp_path):
    rows, roc = run_sir_experiment(ExperimentConfig(**SMALL_SIR))
    trivial = [r for r in rows if r["basis"] == "trivial"]
    assert trivial and all(r["auc"] == 0.5 for r in trivial)
    assert {r["basis"] for r in roc} >= {"dag-weighted", "trivial"}
    rows2, roc2 = run_sir_experiment(ExperimentConfig(**SMALL_SIR, jobs=2))
    assert emit_bytes(tmp_path, "a", sir_rows=rows, roc_rows=roc) == emit_bytes(tmp_path, "b", sir_rows=rows2, roc_rows=roc2)


def test_aggregate_interval():
    rows = [{"x": 1, "s": "a", "v": v} for v in (1.0, 2.0, 3.0, 4.0)]
    (agg,) = aggregate(rows, "x", "s", "v")
    half = 1.96 * np.std([1, 2, 3, 4], ddof=1) / math.sqrt(4)
    assert agg["mean"] == 2.5
    assert agg["ci_high"] - agg["mean"] == pytest.approx(half)
    (single,) = aggregate(rows[:1], "x", "s", "v")
    assert single["ci_low"] == single["ci_high"] == 1.0


def test_empty_results_give_header_only(tmp_path):
    paths = emit_plot_data(tmp_path, synthetic_rows=[], sir_rows=[], roc_rows=[])
    assert len(paths) == 4
    for p in paths:
        assert p.read_text() == "x,series,mean,ci_low,ci_high\n"


@pytest.mark.parametrize("bad", [dict(trials=0), dict(fractions=[0.0]), dict(bases=["nope"]),
                                 dict(experiment="other"), dict(jobs=0)])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig(**bad)


def test_config_json_roundtrip(tmp_path):
    cfg = ExperimentConfig(trials=4, seed=9)
    p = tmp_path / "c.json"
    p.write_text(cfg.to_json())
    again = ExperimentConfig.from_json(p, trials=7)
    assert again.seed == 9 and again.trials == 7
