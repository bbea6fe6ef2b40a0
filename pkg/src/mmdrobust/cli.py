"""Command-line entry point ``mmd-robust``.

Subcommands share ``--config <toml> --seed <u64> --out <dir> [--jobs N]``:

* ``estimate``   fit a model to a CSV data file with PSGA
* ``experiment`` run one of the simulation-study experiments
* ``rho``        estimate rho_t for a process over a list of lags
* ``bounds``     evaluate theoretical bounds listed in the config
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from . import dependence
from .config import load_config, model_from_config
from .errors import ConfigError, MmdRobustError
from .estimator import EstimatorConfig, exact_gradient_descent_uniform, psga
from .experiments import _fmt, rho_envelope, run_experiment, write_csv
from .kernels import Kernel, kernel_from_config
from .models import UniformTranslation


def _read_data(path):
    data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if data.size == 0:
        raise ConfigError(f"{path}: no observations")
    return data


def cmd_estimate(cfg, seed, out, jobs, cfg_dir):
    model = model_from_config(cfg.get("model"))
    if "data" not in cfg:
        raise ConfigError("estimate needs 'data = \"file.csv\"'")
    data_path = cfg["data"] if os.path.isabs(cfg["data"]) else os.path.join(cfg_dir, cfg["data"])
    data = _read_data(data_path)
    k = kernel_from_config(cfg.get("kernel"), model.dim)
    est = dict(cfg.get("estimator", {}))
    init = est.pop("init", None)
    keep = bool(est.pop("trajectory", False))
    ecfg = EstimatorConfig(seed=seed, init=None if init is None else np.asarray(init, dtype=float),
                           keep_trajectory=keep, **est)
    if isinstance(model, UniformTranslation):
        res = exact_gradient_descent_uniform(k, data, ecfg, model.width)
    else:
        res = psga(k, model, data, ecfg)
    cols = [f"theta_{i}" for i in range(len(res.theta_hat))]
    write_csv(os.path.join(out, "estimate.csv"),
              [dict(zip(cols + ["final_crit"], [float(v) for v in res.theta_hat] + [res.final_crit]))])
    if res.trajectory is not None:
        write_csv(os.path.join(out, "trajectory.csv"),
                  [dict(zip(["step"] + cols, [t + 1] + [float(v) for v in row]))
                   for t, row in enumerate(res.trajectory)])
    print(",".join(_fmt(float(v)) for v in res.theta_hat))


def cmd_experiment(cfg, seed, out, jobs, cfg_dir):
    params = dict(cfg)
    name = params.pop("experiment", None)
    if name is None:
        raise ConfigError("config needs 'experiment = \"<name>\"'")
    rows, _ = run_experiment(name, params, seed, out, jobs)
    for r in rows:
        print(f"{r.method:24s} {r.setting:10s} {r.sweep:6s} {r.metric:22s} {_fmt(r.value)}")


def _envelope(proc, k, t):
    names = {dependence.IID: "iid", dependence.VectorAR: "ar", dependence.BinaryHalfAR: "binary_half"}
    name = names.get(type(proc))
    if name is None or (name == "ar" and proc.dim > 1):
        return float("nan")
    try:
        return rho_envelope(name, proc, k, t)
    except ConfigError:
        return float("nan")


def cmd_rho(cfg, seed, out, jobs, cfg_dir):
    proc = dependence.process_from_config(cfg.get("process", {}))
    k = kernel_from_config(cfg.get("kernel"), proc.dim) if "kernel" in cfg else Kernel("gaussian", 1.0)
    lags = [int(t) for t in cfg.get("lags", [1, 2, 4, 8])]
    n_traj = int(cfg.get("n_traj", 100))
    traj_len = int(cfg.get("traj_len", 500))
    rows = []
    for i, t in enumerate(lags):
        est = dependence.rho_hat(proc, k, t, n_traj, traj_len, seed * 10**6 + i)
        bound = _envelope(proc, k, t)
        rows.append({"t": t, "rho_hat": est.value, "stderr": est.stderr, "analytic_bound": bound})
        print(f"t={t:3d} rho_hat={est.value:.6g} stderr={est.stderr:.3g} bound={_fmt(bound)}")
    write_csv(os.path.join(out, "rho.csv"), rows)


def cmd_bounds(cfg, seed, out, jobs, cfg_dir):
    entries = cfg.get("bound", [])
    if not entries:
        raise ConfigError("config needs one or more [[bound]] tables with a 'name'")
    rows = []
    for entry in entries:
        entry = dict(entry)
        name = entry.pop("name")
        rep = bounds_mod.report(name, **entry)
        inputs = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(rep.inputs.items()))
        rows.append({"bound": name, "inputs": inputs, "value": rep.value,
                     "vacuous": rep.vacuous, "uninformative": rep.uninformative, "note": rep.note})
        print(f"{name:18s} {_fmt(rep.value):>14s} {inputs}" + (f"  [{rep.note}]" if rep.note else ""))
    write_csv(os.path.join(out, "bounds.csv"), rows)


COMMANDS = {"estimate": cmd_estimate, "experiment": cmd_experiment,
            "rho": cmd_rho, "bounds": cmd_bounds}


def build_parser():
    parser = argparse.ArgumentParser(prog="mmd-robust", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML configuration file")
        p.add_argument("--seed", type=int, default=0, help="base seed (unsigned 64-bit)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        COMMANDS[args.command](cfg, args.seed, args.out, args.jobs,
                               os.path.dirname(os.path.abspath(args.config)))
    except (MmdRobustError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
