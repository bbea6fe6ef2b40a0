import math

import pytest

from mmdrobust import experiments as ex

TINY_EST = {"M": 10, "T": 20, "step": 1.0}


def test_linear_fit_exact():
    slope, intercept, r2 = ex.linear_fit([0, 1, 2, 3], [1, 3, 5, 7])
    assert slope == pytest.approx(2) and intercept == pytest.approx(1) and r2 == pytest.approx(1)


def test_merge_params_nested():
    p = ex.merge_params("table1", {"n": 20, "estimator": {"T": 5}})
    assert p["n"] == 20 and p["estimator"]["T"] == 5 and p["estimator"]["M"] == 500
    assert ex.DEFAULTS["table1"]["estimator"]["T"] == 2000
    with pytest.raises(ValueError):
        ex.merge_params("table9", {})


def test_step_expression():
    assert ex._estimator_cfg({"step": "d/10"}, 0, 25).step == 2.5
    with pytest.raises(ValueError):
        ex._estimator_cfg({"step": "n/10"}, 0, 25)


def test_rep_streams_distinct():
    a = [ex._seed_int(s) for s in ex.rep_streams(3, 0)]
    b = [ex._seed_int(s) for s in ex.rep_streams(3, 1)]
    assert len(set(a + b)) == 6


def test_csv_round_trip(tmp_path):
    row = ex.ResultRow("e", "m", "s", "0.1", "mse", 1 / 3, 0.0, 2, 7)
    ex.write_csv(tmp_path / "r.csv", [row])
    back = ex.read_csv(tmp_path / "r.csv")
    assert list(back[0]) == ex.CSV_COLUMNS
    assert float(back[0]["value"]) == pytest.approx(1 / 3, rel=1e-9)
    assert ex._fmt(float("inf")) == "inf" and ex._fmt(float("nan")) == "nan"


def test_table1_tiny_layout():
    rows, reps = ex.run_table1({"n": 40, "d": 2, "repetitions": 2, "estimator": TINY_EST}, 1)
    ours = [r for r in rows if "paper" not in r.method]
    assert len(ours) == 3 * 8 and len(reps) == 3 * 8 * 2
    assert all(r.value >= 0 and r.paper_ref for r in rows)
    js = [r for r in rows if r.method.startswith("JS-GAN")]
    assert len(js) == 8 and js[3].value == 0.1879


def test_eps_sweep_tiny_nested_outliers():
    p = {"n": 60, "d": 2, "repetitions": 2, "eps_grid": [0.0, 0.1, 0.2], "estimator": TINY_EST}
    rows, reps = ex.run_eps_sweep(p, 2)
    metrics = [r.metric for r in rows]
    assert metrics.count("mse") == 3 and "fit_r2" in metrics


def test_dim_sweep_tiny_includes_d1():
    p = {"n": 60, "repetitions": 2, "d_grid": [1, 4, 9], "estimator": TINY_EST}
    rows, _ = ex.run_dim_sweep(p, 3)
    assert any(r.sweep == "1" for r in rows)
    assert {r.metric for r in rows} >= {"sqrt_mse_norm", "sqrt_mse_per_coord", "fit_r2_norm",
                                        "max_min_ratio_per_coord"}
    for r in rows:
        if r.metric == "sqrt_mse_norm" and r.sweep not in ("d>1",):
            coord = next(c for c in rows if c.setting == r.setting and c.sweep == r.sweep
                         and c.metric == "sqrt_mse_per_coord")
            assert r.value == pytest.approx(coord.value * math.sqrt(int(r.sweep)), rel=1e-12)


def test_mixture_tiny():
    p = {"n": 60, "repetitions": 2, "mae_points": 200, "em_restarts": 2,
         "dictionary": {"lo": -5.0, "hi": 5.0, "step": 0.5, "variance": 1.0},
         "estimator": TINY_EST}
    rows, reps = ex.run_mixture(p, 4)
    assert {(r.method, r.setting) for r in rows} >= {("MMD", "outlier"), ("EM", "clean")}
    assert all(r.value >= 0 for r in rows)


def test_dependence_tiny():
    p = {"lags": [1, 2], "n_traj": 5, "traj_len": 30, "hmm_sizes": [40, 80], "repetitions": 2,
         "estimator": TINY_EST}
    rows, _ = ex.run_dependence_demo(p, 5)
    rho = [r for r in rows if r.metric == "rho"]
    assert len(rho) == 3 * 2
    iid = [r for r in rho if "iid" in r.method]
    assert all(float(r.paper_value) == 0.0 for r in iid)


def test_byte_identical_rerun_and_jobs(tmp_path):
    p = {"n": 40, "d": 2, "repetitions": 2, "estimator": TINY_EST}
    ex.run_experiment("table1", p, 9, tmp_path / "a")
    ex.run_experiment("table1", p, 9, tmp_path / "b")
    ex.run_experiment("table1", p, 9, tmp_path / "c", jobs=2)
    for name in ("table1.csv", "table1_reps.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes() == (tmp_path / "c" / name).read_bytes()


def test_sweep_writes_svg(tmp_path):
    p = {"n": 40, "d": 2, "repetitions": 2, "eps_grid": [0.0, 0.2], "estimator": TINY_EST}
    ex.run_experiment("eps_sweep", p, 0, tmp_path)
    assert (tmp_path / "eps_sweep.svg").read_text().startswith("<svg")


def test_unknown_experiment():
    with pytest.raises(ValueError):
        ex.run_experiment("nope")
