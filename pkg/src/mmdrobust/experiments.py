"""Seeded simulation study: contamination table, epsilon and dimension
sweeps, mixture MAE table and dependence demo.

Every experiment returns a list of :class:`ResultRow` and, through
:func:`run_experiment`, writes them to CSV (plus per-repetition CSV and
SVG plots for the sweeps). All randomness derives from the base seed:
repetition ``r`` uses ``SeedSequence(base_seed * 10**6 + r + offset)``
where ``offset`` encodes the sweep axis, and spawns independent child
streams for the clean data, the contamination and the estimator.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import baselines, bounds, dependence
from .contamination import (CauchyCoordinatewise, ContaminationSpec, Dirac,
                            GaussianShift, contaminate)
from .estimator import EstimatorConfig, psga
from .kernels import Kernel, kernel_from_config
from .models import DictionaryMixture, GaussianLocation
from .svg import write_line_chart

SEED_STRIDE = 10**6
AXIS_STRIDE = 10**4

# Published numbers, kept for side-by-side display only (value, sd).
TABLE1_REF = "Table 1 (contamination study, eps=0.2, d=10, n=500)"
TABLE1_COLUMNS = ("N(0.2)", "N(0.5)", "N(1)", "N(5)", "N(10)", "C(0.5)", "delta(1)", "delta(10)")
TABLE1_PAPER = {
    "Mean": [(0.0379, 0.0046), (0.0954, 0.0039), (0.2033, 0.0115), (1.0166, 0.0145),
             (1.9915, 0.0153), (0.3577, 0.6451), (0.2057, 0.0115), (2.0048, 0.0156)],
    "Median": [(0.0387, 0.0158), (0.0893, 0.0098), (0.1756, 0.0058), (0.3106, 0.0109),
               (0.3345, 0.0164), (0.0769, 0.0232), (0.3194, 0.0215), (0.3258, 0.0098)],
    "JS-GAN": [(0.1848, 0.0443), (0.2036, 0.0346), (0.2172, 0.0241), (0.1879, 0.0287),
               (0.2204, 0.0423), (0.2276, 0.0376), (0.1969, 0.0342), (0.1877, 0.0324)],
    "MMD": [(0.0654, 0.0132), (0.1172, 0.0199), (0.1730, 0.0077), (0.0634, 0.0081),
            (0.0681, 0.0157), (0.0882, 0.0140), (0.3622, 0.0212), (0.0601, 0.0157)],
}
TABLE2_REF = "Table 2 (mixture MAE, outlier at 100)"
TABLE2_PAPER = {
    "MMD": {"clean": (0.0170, 0.0052), "outlier": (0.0173, 0.0045)},
    "CAVI": {"clean": (0.0218, 0.0172), "outlier": (0.0976, 0.0002)},
    "EM": {"clean": (0.0186, 0.0147), "outlier": (0.0738, 0.0186)},
}
MIXTURE_WEIGHTS = (0.3, 0.3, 0.4)
MIXTURE_MEANS = (-3.72, 0.11, 4.54)

DEFAULTS = {
    "table1": {"n": 500, "d": 10, "epsilon": 0.2, "repetitions": 50,
               "estimator": {"M": 500, "T": 2000, "step": 1.0}},
    "eps_sweep": {"n": 5000, "d": 10, "repetitions": 10, "q_shift": 5.0,
                  "eps_grid": [0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2],
                  "estimator": {"M": 50, "T": 2000, "step": 1.0}},
    "dim_sweep": {"n": 5000, "epsilon": 0.1, "repetitions": 10, "q_shift": 5.0,
                  "d_grid": [1, 4, 9, 16, 25, 36, 49, 64],
                  "estimator": {"M": 100, "T": 1000, "step": "d/10"}},
    "mixture": {"n": 500, "repetitions": 50, "outlier": 100.0, "mae_points": 10_000,
                "dictionary": {"lo": -5.0, "hi": 5.0, "step": 0.02, "variance": 1.0},
                "em_restarts": 10,
                "estimator": {"M": 100, "T": 1000, "step": 0.3}},
    "dependence": {"lags": [1, 2, 3, 4, 5, 6, 7, 8], "n_traj": 100, "traj_len": 500,
                   "ar_coefficient": 0.5, "hmm_c": 0.9, "hmm_sizes": [500, 5000],
                   "repetitions": 10, "kernel_gamma": 1.0,
                   "estimator": {"M": 200, "T": 500, "step": 1.0}},
}


@dataclass
class ResultRow:
    experiment: str
    method: str
    setting: str
    sweep: str
    metric: str
    value: float
    stdev: float
    repetitions: int
    base_seed: int
    paper_value: str = ""
    paper_sd: str = ""
    paper_ref: str = ""


CSV_COLUMNS = [f.name for f in fields(ResultRow)]


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return str(v)


def rows_to_csv(rows, columns=None):
    """Serialise rows (dataclasses or dicts) to CSV text with ``\\n`` line ends."""
    buf = io.StringIO()
    dict_rows = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    columns = columns or (CSV_COLUMNS if rows and not isinstance(rows[0], dict)
                          else list(dict_rows[0]) if dict_rows else CSV_COLUMNS)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in dict_rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def write_csv(path, rows, columns=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows, columns))


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def rep_streams(base_seed, rep, offset=0, count=3):
    """Independent child seed sequences for one repetition."""
    return np.random.SeedSequence(base_seed * SEED_STRIDE + rep + offset).spawn(count)


def _seed_int(ss):
    return int(ss.generate_state(1, np.uint64)[0])


def _map(fn, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks, chunksize=1))
    return [fn(t) for t in tasks]


def linear_fit(x, y):
    """Least-squares line ``y = a + b x``; returns ``(slope, intercept, r2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.column_stack([x, np.ones_like(x)])
    (b, a), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (a + b * x)
    tot = ((y - y.mean()) ** 2).sum()
    r2 = 1.0 - (resid @ resid) / tot if tot > 0 else 1.0
    return float(b), float(a), float(r2)


def _estimator_cfg(est, seed, d=None):
    step = est.get("step", 1.0)
    if isinstance(step, str):
        # "d/10" style: scale the step with the dimension
        if not step.startswith("d/"):
            raise ValueError(f"unsupported step expression {step!r}")
        step = d / float(step[2:])
    return EstimatorConfig(M=int(est.get("M", 500)), T=int(est.get("T", 2000)),
                           schedule=est.get("schedule", "inverse_sqrt"), step=float(step),
                           averaging=bool(est.get("averaging", False)), seed=seed)


def merge_params(name, overrides):
    if name not in DEFAULTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(DEFAULTS)}")
    params = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULTS[name].items()}
    for key, val in (overrides or {}).items():
        if isinstance(val, dict) and isinstance(params.get(key), dict):
            params[key].update(val)
        else:
            params[key] = val
    return params


def table1_contaminations():
    return [GaussianShift(0.2), GaussianShift(0.5), GaussianShift(1.0), GaussianShift(5.0),
            GaussianShift(10.0), CauchyCoordinatewise(0.5), Dirac(1.0), Dirac(10.0)]


def _location_errors(data, theta0, k, est, seed, methods):
    d = len(theta0)
    out = {}
    if "Mean" in methods:
        out["Mean"] = baselines.mean_estimator(data)
    if "Median" in methods:
        out["Median"] = baselines.coordinatewise_median(data)
    if "MMD" in methods:
        cfg = _estimator_cfg(est, seed, d)
        out["MMD"] = psga(k, GaussianLocation(1.0, d), data, cfg).theta_hat
    return {m: float(((v - theta0) ** 2).sum()) for m, v in out.items()}


def _table1_task(args):
    rep, q_index, p, base_seed = args
    d, n = p["d"], p["n"]
    s_data, s_cont, s_est = rep_streams(base_seed, rep)
    clean = np.random.default_rng(s_data).standard_normal((n, d))
    q = table1_contaminations()[q_index]
    # same contamination stream for every column: only the outlier law changes
    spec = ContaminationSpec("huber", p["epsilon"], q)
    data, _ = contaminate(clean, spec, np.random.default_rng(s_cont))
    k = kernel_from_config(p.get("kernel"), d)
    return _location_errors(data, np.zeros(d), k, p["estimator"], _seed_int(s_est),
                            p.get("methods", ("Mean", "Median", "MMD")))


def _summarise(sq_errors, d, per_coordinate=True):
    """``sqrt(mean sq / d)`` and the sd of per-repetition errors."""
    sq = np.asarray(sq_errors, dtype=float)
    if per_coordinate:
        sq = sq / d
    per_rep = np.sqrt(sq)
    sd = float(per_rep.std(ddof=1)) if len(per_rep) > 1 else 0.0
    return float(math.sqrt(sq.mean())), sd


def run_table1(params=None, base_seed=0, jobs=1):
    """Root-MSE per coordinate for Mean / Median / MMD under eight outlier laws."""
    p = merge_params("table1", params)
    qs = table1_contaminations()
    tasks = [(r, j, p, base_seed) for j in range(len(qs)) for r in range(p["repetitions"])]
    results = _map(_table1_task, tasks, jobs)
    rows, reps = [], []
    methods = p.get("methods", ("Mean", "Median", "MMD"))
    for j, q in enumerate(qs):
        cell = [res for (r, jj, _, _), res in zip(tasks, results) if jj == j]
        for m in methods:
            sq = [c[m] for c in cell]
            value, sd = _summarise(sq, p["d"])
            pv, psd = TABLE1_PAPER[m][j]
            rows.append(ResultRow("table1", m, q.label(), "", "sqrt_mse_per_coord", value, sd,
                                  p["repetitions"], base_seed, _fmt(pv), _fmt(psd), TABLE1_REF))
            reps += [{"method": m, "setting": q.label(), "rep": r, "sq_error": s}
                     for r, s in enumerate(sq)]
    for j, q in enumerate(qs):
        pv, psd = TABLE1_PAPER["JS-GAN"][j]
        rows.append(ResultRow("table1", "JS-GAN (paper-reported)", q.label(), "",
                              "sqrt_mse_per_coord", pv, psd, 50, base_seed,
                              _fmt(pv), _fmt(psd), TABLE1_REF))
    return rows, reps


def _sweep_task(args):
    kind, rep, axis_value, axis_index, p, base_seed, attack = args
    if kind == "eps":
        d, eps, offset = p["d"], axis_value, 0
    else:
        d, eps, offset = int(axis_value), p["epsilon"], axis_index * AXIS_STRIDE
    n = p["n"]
    s_data, s_cont, s_est = rep_streams(base_seed, rep, offset)
    clean = np.random.default_rng(s_data).standard_normal((n, d))
    q = GaussianShift(p["q_shift"]) if attack == "gaussian" else Dirac(1.0)
    data, _ = contaminate(clean, ContaminationSpec("huber", eps, q), np.random.default_rng(s_cont))
    k = kernel_from_config(p.get("kernel"), d)
    return _location_errors(data, np.zeros(d), k, p["estimator"], _seed_int(s_est), ("MMD",))["MMD"]


def run_eps_sweep(params=None, base_seed=0, jobs=1):
    """MSE of the MMD estimator against the contamination rate.

    Common random numbers: repetition ``r`` uses the same clean data,
    contamination uniforms and estimator stream at every epsilon, so the
    outlier sets are nested and the curve is smooth in epsilon.
    """
    p = merge_params("eps_sweep", params)
    grid = [float(e) for e in p["eps_grid"]]
    tasks = [("eps", r, e, i, p, base_seed, "gaussian")
             for i, e in enumerate(grid) for r in range(p["repetitions"])]
    results = np.asarray(_map(_sweep_task, tasks, jobs)).reshape(len(grid), p["repetitions"])
    rows, reps = [], []
    mse = results.mean(axis=1)
    for i, e in enumerate(grid):
        sd = float(results[i].std(ddof=1)) if p["repetitions"] > 1 else 0.0
        rows.append(ResultRow("eps_sweep", "MMD", f"N({p['q_shift']:g})", _fmt(e), "mse",
                              float(mse[i]), sd, p["repetitions"], base_seed))
        reps += [{"method": "MMD", "setting": _fmt(e), "rep": r, "sq_error": float(s)}
                 for r, s in enumerate(results[i])]
    slope, intercept, r2 = linear_fit(grid, mse)
    for metric, v in (("fit_slope", slope), ("fit_intercept", intercept), ("fit_r2", r2)):
        rows.append(ResultRow("eps_sweep", "MMD", f"N({p['q_shift']:g})", "all", metric, v, 0.0,
                              p["repetitions"], base_seed))
    return rows, reps


def run_dim_sweep(params=None, base_seed=0, jobs=1):
    """Error against the dimension for a far Gaussian and a sqrt(d)-distant Dirac attack.

    Both the per-coordinate root MSE and the root MSE of the Euclidean
    norm are reported, with line fits against ``sqrt(d)``.
    """
    p = merge_params("dim_sweep", params)
    grid = [int(d) for d in p["d_grid"]]
    rows, reps = [], []
    for attack, label in (("gaussian", f"N({p['q_shift']:g})"), ("dirac", "delta(1)")):
        tasks = [("dim", r, d, i, p, base_seed, attack)
                 for i, d in enumerate(grid) for r in range(p["repetitions"])]
        res = np.asarray(_map(_sweep_task, tasks, jobs)).reshape(len(grid), p["repetitions"])
        norm_err, coord_err = [], []
        for i, d in enumerate(grid):
            v_norm, sd_norm = _summarise(res[i], d, per_coordinate=False)
            v_coord, sd_coord = _summarise(res[i], d, per_coordinate=True)
            norm_err.append(v_norm)
            coord_err.append(v_coord)
            rows.append(ResultRow("dim_sweep", "MMD", label, str(d), "sqrt_mse_norm", v_norm,
                                  sd_norm, p["repetitions"], base_seed))
            rows.append(ResultRow("dim_sweep", "MMD", label, str(d), "sqrt_mse_per_coord",
                                  v_coord, sd_coord, p["repetitions"], base_seed))
            reps += [{"method": "MMD", "setting": f"{label}|d={d}", "rep": r, "sq_error": float(s)}
                     for r, s in enumerate(res[i])]
        fit_d = [(d, a, b) for d, a, b in zip(grid, norm_err, coord_err) if d > 1]
        x = np.sqrt([f[0] for f in fit_d])
        for metric, ys in (("norm", [f[1] for f in fit_d]), ("per_coord", [f[2] for f in fit_d])):
            slope, _, r2 = linear_fit(x, ys)
            ratio = max(ys) / min(ys)
            for name, v in ((f"fit_slope_{metric}", slope), (f"fit_r2_{metric}", r2),
                            (f"max_min_ratio_{metric}", ratio)):
                rows.append(ResultRow("dim_sweep", "MMD", label, "d>1", name, v, 0.0,
                                      p["repetitions"], base_seed))
    return rows, reps


def true_mixture():
    return DictionaryMixture(np.asarray(MIXTURE_MEANS)), np.asarray(MIXTURE_WEIGHTS)


def _mixture_task(args):
    rep, outlier_on, p, base_seed = args
    n = p["n"]
    s_data, s_cont, s_est, s_em, s_mae = rep_streams(base_seed, rep, count=5)
    truth, w0 = true_mixture()
    data = truth.sample(w0, n, np.random.default_rng(s_data))
    if outlier_on:
        spec = ContaminationSpec("adversarial", 1.0 / n, Dirac(p["outlier"]))
        data, _ = contaminate(data, spec, np.random.default_rng(s_cont))
    dcfg = p["dictionary"]
    dic = DictionaryMixture.gaussian_grid(dcfg["lo"], dcfg["hi"], dcfg["step"], dcfg["variance"])
    k = kernel_from_config(p.get("kernel"), 1)
    fit = psga(k, dic, data, _estimator_cfg(p["estimator"], _seed_int(s_est), 1))
    em = baselines.em_mixture(data[:, 0], 3, p["em_restarts"], np.random.default_rng(s_em))

    def p_true(z):
        return truth.density(w0, z)

    def sample_true(count, rng):
        return truth.sample(w0, count, rng)

    mae_rng = np.random.default_rng(s_mae)
    z = sample_true(p["mae_points"], mae_rng)
    base = p_true(z)
    return {
        "MMD": float(np.mean(np.abs(base - dic.density(fit.theta_hat, z)))),
        "EM": float(np.mean(np.abs(base - em.density(z[:, 0])))),
    }


def run_mixture(params=None, base_seed=0, jobs=1):
    """Density MAE of the dictionary MMD fit and of EM, with and without one outlier."""
    p = merge_params("mixture", params)
    tasks = [(r, on, p, base_seed) for on in (False, True) for r in range(p["repetitions"])]
    results = _map(_mixture_task, tasks, jobs)
    rows, reps = [], []
    for on in (False, True):
        setting = "outlier" if on else "clean"
        cell = [res for (r, o, _, _), res in zip(tasks, results) if o == on]
        for m in ("MMD", "EM"):
            vals = np.array([c[m] for c in cell])
            sd = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            pv, psd = TABLE2_PAPER[m][setting]
            rows.append(ResultRow("mixture", m, setting, "", "mae", float(vals.mean()), sd,
                                  p["repetitions"], base_seed, _fmt(pv), _fmt(psd), TABLE2_REF))
            reps += [{"method": m, "setting": setting, "rep": r, "mae": float(v)}
                     for r, v in enumerate(vals)]
        pv, psd = TABLE2_PAPER["CAVI"][setting]
        rows.append(ResultRow("mixture", "CAVI (paper-reported)", setting, "", "mae", pv, psd,
                              50, base_seed, _fmt(pv), _fmt(psd), TABLE2_REF))
    return rows, reps


def dependence_processes(p):
    a = p["ar_coefficient"]
    return {
        "iid": dependence.IID.gaussian(1),
        "ar": dependence.VectorAR(np.array([[a]])),
        "binary_half": dependence.BinaryHalfAR(),
    }


def rho_envelope(name, proc, k, t):
    """Analytic upper bound on ``rho_t`` (0 for i.i.d.)."""
    if name == "iid":
        return 0.0
    if name == "ar":
        return dependence.ar_rho_bound(proc.a_norm, k.lipschitz, proc.noise_mean_norm(), t)
    return dependence.binary_half_rho_bound(k.lipschitz, t)


def _rho_task(args):
    name, lag, lag_index, p, base_seed = args
    proc = dependence_processes(p)[name]
    k = Kernel("gaussian", p["kernel_gamma"])
    seed = base_seed * SEED_STRIDE + lag_index * AXIS_STRIDE + sorted(dependence_processes(p)).index(name)
    est = dependence.rho_hat(proc, k, lag, p["n_traj"], p["traj_len"], seed)
    return est.value, est.stderr, est.signed, rho_envelope(name, proc, k, lag)


def _hmm_task(args):
    rep, size, size_index, p, base_seed = args
    s_data, s_est = rep_streams(base_seed, rep, (size_index + 1) * AXIS_STRIDE, count=2)
    proc = dependence.HiddenMarkov.sticky(MIXTURE_WEIGHTS, p["hmm_c"], (-4.0, 0.0, 4.0))
    x = dependence.generate(proc, size, np.random.default_rng(s_data))
    dic = DictionaryMixture(proc.means, proc.variance)
    k = Kernel("gaussian", 1.0)
    fit = psga(k, dic, x, _estimator_cfg(p["estimator"], _seed_int(s_est), 1))
    return float(np.linalg.norm(fit.theta_hat - proc.stationary()))


def run_dependence_demo(params=None, base_seed=0, jobs=1):
    """rho_t estimates with analytic envelopes, and HMM weight error against n."""
    p = merge_params("dependence", params)
    names = ("iid", "ar", "binary_half")
    tasks = [(nm, t, i, p, base_seed) for nm in names for i, t in enumerate(p["lags"])]
    results = _map(_rho_task, tasks, jobs)
    rows, reps = [], []
    for (nm, t, _, _, _), (val, se, signed, env) in zip(tasks, results):
        rows.append(ResultRow("dependence", f"rho_hat[{nm}]", f"gamma={p['kernel_gamma']:g}",
                              str(t), "rho", val, se, p["n_traj"], base_seed,
                              _fmt(env), "", "analytic envelope"))
    htasks = [(r, s, i, p, base_seed) for i, s in enumerate(p["hmm_sizes"])
              for r in range(p["repetitions"])]
    errs = np.asarray(_map(_hmm_task, htasks, jobs)).reshape(len(p["hmm_sizes"]), p["repetitions"])
    for i, s in enumerate(p["hmm_sizes"]):
        sd = float(errs[i].std(ddof=1)) if p["repetitions"] > 1 else 0.0
        rows.append(ResultRow("dependence", "MMD[hmm]", f"c={p['hmm_c']:g}", str(s),
                              "weight_error_norm", float(errs[i].mean()), sd, p["repetitions"],
                              base_seed, _fmt(bounds.bound_hmm(s, p["hmm_c"], 1)), "",
                              "MMD-distance bound for hidden Markov data"))
        reps += [{"method": "MMD[hmm]", "setting": str(s), "rep": r, "error": float(e)}
                 for r, e in enumerate(errs[i])]
    return rows, reps


RUNNERS = {
    "table1": run_table1,
    "eps_sweep": run_eps_sweep,
    "dim_sweep": run_dim_sweep,
    "mixture": run_mixture,
    "dependence": run_dependence_demo,
}


def _plots(name, rows, out_dir):
    if name == "eps_sweep":
        pts = [r for r in rows if r.metric == "mse"]
        write_line_chart(os.path.join(out_dir, "eps_sweep.svg"),
                         [{"label": "MMD", "x": [float(r.sweep) for r in pts],
                           "y": [r.value for r in pts]}],
                         title="MSE against outlier ratio", xlabel="epsilon", ylabel="MSE")
    elif name == "dim_sweep":
        series = []
        for label in sorted({r.setting for r in rows}):
            pts = [r for r in rows if r.setting == label and r.metric == "sqrt_mse_norm"]
            series.append({"label": label, "x": [math.sqrt(float(r.sweep)) for r in pts],
                           "y": [r.value for r in pts]})
        write_line_chart(os.path.join(out_dir, "dim_sweep.svg"), series,
                         title="Error against sqrt(d)", xlabel="sqrt(d)",
                         ylabel="root MSE (Euclidean norm)")


def run_experiment(name, params=None, base_seed=0, out_dir=None, jobs=1):
    """Run experiment ``name`` and, if ``out_dir`` is given, write its artefacts.

    Files: ``<name>.csv`` (summary rows), ``<name>_reps.csv`` (one row per
    repetition) and, for the sweeps, ``<name>.svg``.
    """
    if name not in RUNNERS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(RUNNERS)}")
    rows, reps = RUNNERS[name](params, base_seed, jobs)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_csv(os.path.join(out_dir, f"{name}.csv"), rows)
        if reps:
            write_csv(os.path.join(out_dir, f"{name}_reps.csv"), reps)
        _plots(name, rows, out_dir)
    return rows, reps
