import hashlib
import json
import os

import numpy as np
import pytest

from jchsim import (ExperimentConfig, convergence_sweep, derive_rng,
                    parse_config_text, run_experiment)


def _hash_files(paths):
    out = {}
    for p in paths:
        if p.endswith(".json"):
            continue  # sidecar carries timings
        with open(p, "rb") as f:
            out[os.path.basename(p)] = hashlib.sha256(f.read()).hexdigest()
    return out


def test_derive_rng_deterministic_and_independent():
    a = derive_rng(1, 0, 0).uniform(size=4)
    b = derive_rng(1, 0, 0).uniform(size=4)
    assert np.array_equal(a, b)
    c = derive_rng(1, 0, 1).uniform(size=4)
    d = derive_rng(1, 1, 0).uniform(size=4)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert not np.array_equal(c, d)


def test_parse_config_roundtrip():
    text = """
    # comment
    model.L = 6
    model.D_over_J = 0.01, 2, 100
    ensemble.samples = 5
    ensemble.seed = 77
    tasks = spectrum, entanglement
    output.dir = myout
    """
    cfg = parse_config_text(text)
    assert cfg.L == 6 and cfg.N == 3
    assert cfg.sweep == (0.01, 2.0, 100.0)
    assert cfg.samples == 5 and cfg.seed == 77
    assert cfg.tasks == ("spectrum", "entanglement")
    assert cfg.out_dir == "myout"
    assert cfg.validate() == []


def test_parse_config_clean_mode_forces_single_sample():
    cfg = parse_config_text(
        "model.L = 4\nmodel.g_cl_over_J = 2\nensemble.samples = 9\n"
    )
    assert cfg.mode == "clean"
    assert cfg.samples == 1


def test_parse_config_errors():
    with pytest.raises(ValueError, match="unknown config key"):
        parse_config_text("model.bogus = 3")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_text("model.L 6")
    cfg = parse_config_text("model.L = 6\nmodel.D_over_J = -2\n")
    assert any("non-negative" in e for e in cfg.validate())
    cfg = parse_config_text("model.L = 6\ntasks = dance\n")
    assert any("unknown task" in e for e in cfg.validate())


def test_memory_cap_rejected_up_front(tmp_path):
    cfg = ExperimentConfig(L=10, N=5, sweep=(2.0,), samples=1,
                           out_dir=str(tmp_path), memory_cap=10**9)
    with pytest.raises(MemoryError, match="GB"):
        run_experiment(cfg)


def test_run_experiment_deterministic_across_workers(tmp_path):
    base = dict(L=4, N=2, sweep=(0.5, 2.0), samples=3, seed=123,
                tasks=("spectrum", "entanglement", "dynamics", "eth"),
                dynamics_t_max=100.0, page_samples=200)
    r1 = run_experiment(ExperimentConfig(
        **base, out_dir=str(tmp_path / "a"), workers=1))
    r2 = run_experiment(ExperimentConfig(
        **base, out_dir=str(tmp_path / "b"), workers=2))
    h1, h2 = _hash_files(r1.files), _hash_files(r2.files)
    assert h1 == h2
    assert len(h1) >= 8


def test_prefix_property(tmp_path):
    base = dict(L=4, N=2, sweep=(1.0,), seed=9, tasks=("spectrum",))
    r1 = run_experiment(ExperimentConfig(
        **base, samples=1, out_dir=str(tmp_path / "one")))
    r2 = run_experiment(ExperimentConfig(
        **base, samples=2, out_dir=str(tmp_path / "two")))
    ev1 = r1.records[0]["eigenvalues"]
    ev2 = r2.records[0]["eigenvalues"]
    assert np.array_equal(ev1, ev2)


def test_aggregates_recomputable_from_records(tmp_path):
    cfg = ExperimentConfig(L=4, N=2, sweep=(2.0,), samples=4, seed=5,
                           tasks=("spectrum",), out_dir=str(tmp_path))
    res = run_experiment(cfg)
    rvals = [rec["mean_r"] for rec in res.records]
    agg = res.aggregates["per_param"][0]
    assert agg["r_mean"] == pytest.approx(np.mean(rvals), abs=1e-15)


def test_metadata_sidecar(tmp_path):
    cfg = ExperimentConfig(L=4, N=2, sweep=(1.0,), samples=1, seed=3,
                           tasks=("spectrum",), out_dir=str(tmp_path))
    run_experiment(cfg)
    with open(tmp_path / "metadata.json") as f:
        meta = json.load(f)
    assert meta["config"]["seed"] == 3
    assert "wall_time_s" in meta


def test_ee_aggregate_schema(tmp_path):
    cfg = ExperimentConfig(L=4, N=2, sweep=(2.0,), samples=3, seed=6,
                           tasks=("entanglement",), page_samples=200,
                           out_dir=str(tmp_path))
    run_experiment(cfg)
    with open(tmp_path / "ee_aggregate.csv") as f:
        header = f.readline().strip()
    assert header == "D_over_J,L,S_mean,S_over_SP,Delta_S,S_P,S_P_stderr"


def test_clean_mode_run(tmp_path):
    cfg = ExperimentConfig(L=4, N=2, mode="clean", sweep=(0.01, 2.0),
                           samples=1, seed=1, tasks=("spectrum",),
                           out_dir=str(tmp_path))
    res = run_experiment(cfg)
    assert all(rec["realization"] == 0 for rec in res.records)
    # projected clean sector is smaller than the full 32-state basis
    assert len(res.records[0]["eigenvalues"]) < 32


def test_convergence_sweep_prefix_nesting(tmp_path):
    cfg = ExperimentConfig(L=4, N=2, sweep=(2.0,), seed=11,
                           tasks=("spectrum",), out_dir=str(tmp_path))
    entries = convergence_sweep(cfg, [1, 2, 4])
    assert [e["samples"] for e in entries] == [1, 2, 4]
    assert entries[0]["flagged_single_sample"]
    assert np.isnan(entries[0]["r_stderr"])
    with pytest.raises(ValueError):
        convergence_sweep(cfg, [4, 2])


def test_stderr_shrinks_with_samples(tmp_path):
    cfg = ExperimentConfig(L=4, N=2, sweep=(2.0,), seed=21,
                           tasks=("spectrum",), out_dir=str(tmp_path))
    entries = convergence_sweep(cfg, [8, 32])
    # i.i.d. sampling: quadrupling the count roughly halves the stderr
    ratio = entries[0]["r_stderr"] / entries[1]["r_stderr"]
    assert 1.2 < ratio < 3.5
