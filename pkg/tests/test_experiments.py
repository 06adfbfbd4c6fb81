"""Experiment harness: configs, curves, sweeps, ranking, CSV contracts."""

import os

import numpy as np
import pytest

import copula_lab as cl
from copula_lab.experiments import ExperimentConfig, _write_csv

CURVE_HEADER = "theta,mean_neg_entropy,p025,p975,reps,samples"
SWEEP_HEADER = "sample_size,mean_monotone_fraction,reps"


def test_config_validation():
    with pytest.raises(cl.ConfigError):
        ExperimentConfig(family="clayton", theta_grid=[2.0, 1.0])
    with pytest.raises(cl.ConfigError):
        ExperimentConfig(family="clayton", theta_grid=[])
    with pytest.raises(cl.CountError):
        ExperimentConfig(family="clayton", theta_grid=[1.0], samples_m=5)
    with pytest.raises(cl.ConfigError):
        ExperimentConfig(family="clayton", theta_grid=[-1.0, 1.0])
    with pytest.raises(cl.ConfigError):
        ExperimentConfig(family="independence")


def test_config_defaults():
    cfg = ExperimentConfig(family="bb1", repetitions_r=1)
    assert cfg.delta == 1.5
    assert cfg.theta_grid[0] == pytest.approx(0.25)
    cfg = ExperimentConfig(family="student_t", repetitions_r=1)
    assert cfg.nu == 4.0


def test_curve_single_point_flag(tmp_path):
    cfg = ExperimentConfig(family="fgm", theta_grid=[0.0], samples_m=50,
                           repetitions_r=3, seed=1, render_figure=False)
    rep = cl.run_entropy_curve(cfg)
    assert rep.single_point
    assert rep.monotone_fraction == 1.0
    assert rep.rank_correlation == 1.0


def test_curve_gaussian_matches_closed_form():
    cfg = ExperimentConfig(family="gaussian", theta_grid=[0.2, 0.5, 0.8],
                           samples_m=100_000, repetitions_r=10, seed=8,
                           render_figure=False)
    rep = cl.run_entropy_curve(cfg)
    exact = [0.020202707317519466, 0.14384103622589045, 0.5108256237659907]
    for est, mi in zip(rep.estimates, exact):
        se = np.std(est.rep_values) / np.sqrt(len(est.rep_values))
        assert abs(est.mean - mi) < max(3 * se, 1e-3)
        assert est.lo95 <= est.mean <= est.hi95


def test_curve_csv_schema_and_determinism(tmp_path):
    out = tmp_path / "curve.csv"
    cfg = ExperimentConfig(family="clayton", theta_grid=[0.5, 1.0, 2.0],
                           samples_m=200, repetitions_r=4, seed=3,
                           output_path=str(out), render_figure=False)
    cl.run_entropy_curve(cfg)
    text = out.read_bytes()
    assert text.decode("utf-8").splitlines()[0] == CURVE_HEADER
    assert b"\r" not in text
    cl.run_entropy_curve(cfg)
    assert out.read_bytes() == text


def test_curve_thread_count_invariance(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("COPULA_LAB_THREADS", threads)
        out = tmp_path / f"c{threads}.csv"
        cfg = ExperimentConfig(family="frank", theta_grid=[1.0, 3.0, 6.0],
                               samples_m=300, repetitions_r=6, seed=5,
                               output_path=str(out), render_figure=False)
        cl.run_entropy_curve(cfg)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_curve_renders_figure(tmp_path):
    out = tmp_path / "curve.csv"
    cfg = ExperimentConfig(family="clayton", theta_grid=[0.5, 1.0],
                           samples_m=100, repetitions_r=2, seed=1,
                           output_path=str(out))
    cl.run_entropy_curve(cfg)
    assert (tmp_path / "curve.png").exists()


def test_sweep_report_and_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = ExperimentConfig(family="clayton", theta_grid=[0.5, 1.0, 2.0, 4.0],
                           samples_m=100, repetitions_r=5, seed=2,
                           output_path=str(out), render_figure=True)
    rep = cl.run_size_sweep(cfg, [100, 400])
    assert rep.sample_sizes == [100, 400]
    assert all(0.0 <= f <= 1.0 for f in rep.mean_monotone_fraction)
    lines = out.read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 3
    assert (tmp_path / "sweep.png").exists()


def test_sweep_single_rep_degenerate():
    cfg = ExperimentConfig(family="clayton", theta_grid=[0.5, 1.0, 2.0],
                           samples_m=150, repetitions_r=1, seed=2,
                           render_figure=False)
    rep = cl.run_size_sweep(cfg, [150])
    assert len(rep.mean_monotone_fraction) == 1
    assert rep.reps == 1


def test_sweep_size_validation():
    cfg = ExperimentConfig(family="clayton", theta_grid=[0.5, 1.0],
                           samples_m=100, repetitions_r=2, render_figure=False)
    with pytest.raises(cl.ConfigError):
        cl.run_size_sweep(cfg, [400, 100])
    with pytest.raises(cl.ConfigError):
        cl.run_size_sweep(cfg, [5])


def test_run_verify_csv(tmp_path):
    out = tmp_path / "verify.csv"
    summary = cl.run_verify("clayton", [1.0, 2.0],
                            grid=cl.GridSpec(resolution=15, pair_budget=10_000),
                            output_path=str(out))
    assert summary.passed
    lines = out.read_text().splitlines()
    assert lines[0] == "property,family,params,passed,worst_violation,location"
    assert len(lines) == 1 + len(summary.reports)


# ---------------------------------------------------------------------------
# pair ranking


def _write_dataset(path, data, header=None):
    rows = [",".join(repr(float(x)) for x in row) for row in data]
    if header:
        rows.insert(0, ",".join(header))
    path.write_text("\n".join(rows) + "\n")


def test_rank_pairs_identical_columns_first(tmp_path):
    rng = np.random.default_rng(4)
    a = rng.normal(size=200)
    b = a.copy()
    c = rng.normal(size=200)
    path = tmp_path / "d.csv"
    _write_dataset(path, np.column_stack([a, b, c]), header=["x", "y", "z"])
    ranked = cl.rank_pairs(str(path), top_k=3)
    assert ranked[0].col_i == "x" and ranked[0].col_j == "y"
    assert ranked[0].abs_spearman == pytest.approx(1.0, abs=1e-12)
    assert ranked[0].rank == 1


def test_rank_pairs_independent_columns_near_zero(tmp_path):
    rng = np.random.default_rng(9)
    data = rng.normal(size=(5000, 3))
    path = tmp_path / "d.csv"
    _write_dataset(path, data)
    ranked = cl.rank_pairs(str(path), top_k=3)
    assert all(rp.abs_spearman < 0.05 for rp in ranked)


def test_rank_pairs_mi_ordering_matches_spearman(tmp_path):
    # columns drawn pairwise from progressively stronger copulas
    n = 4000
    rng_seed = 15
    cols = []
    for k, th in enumerate([0.3, 0.6, 0.9]):
        s = cl.sample(cl.model("gaussian", th), n, rng_seed + k).values
        cols.extend([s[:, 0], s[:, 1]])
    data = np.column_stack(cols)  # pairs (0,1), (2,3), (4,5)
    path = tmp_path / "d.csv"
    _write_dataset(path, data)
    ranked = cl.rank_pairs(str(path), top_k=3, mi_family="gaussian", seed=5)
    strongest = {("col4", "col5"), ("col2", "col3"), ("col0", "col1")}
    got = [(rp.col_i, rp.col_j) for rp in ranked]
    assert set(got) == strongest
    assert got[0] == ("col4", "col5")
    mis = [rp.mi_estimate for rp in ranked]
    assert mis == sorted(mis, reverse=True)


def test_rank_pairs_parse_error_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(cl.ConfigError, match="row 2, column 2"):
        cl.rank_pairs(str(path), top_k=1)


def test_rank_pairs_requires_rows(tmp_path):
    path = tmp_path / "small.csv"
    _write_dataset(path, np.ones((5, 2)) * np.arange(5)[:, None])
    with pytest.raises(cl.CountError):
        cl.rank_pairs(str(path), top_k=1)


def test_write_csv_float_repr(tmp_path):
    out = tmp_path / "x.csv"
    _write_csv(str(out), ["a", "b"], [(0.5, 1), (1 / 3, 2)])
    assert out.read_text() == "a,b\n0.5,1\n0.3333333333333333,2\n"


def test_worker_count_env(monkeypatch):
    from copula_lab.experiments import worker_count
    monkeypatch.setenv("COPULA_LAB_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("COPULA_LAB_THREADS", "zero")
    with pytest.raises(cl.ConfigError):
        worker_count()
    monkeypatch.delenv("COPULA_LAB_THREADS")
    assert worker_count() >= 1
