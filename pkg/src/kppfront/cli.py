"""Command line front end: ``kppfront {eigen,dispersion,classify,simulate,front}``.

Exit status 0 on success, 1 on a computation error (``CODE: message`` on
stderr), 2 on configuration errors.  ``KPPFRONT_THREADS`` limits BLAS threads.
"""
from __future__ import annotations

import os

_threads = os.environ.get("KPPFRONT_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse  # noqa: E402
import sys  # noqa: E402
from functools import partial  # noqa: E402

import numpy as np  # noqa: E402

from . import config as cfgmod  # noqa: E402
from .errors import ConfigError, KppError  # noqa: E402
from .output import fmt, header_lines, record, write_csv  # noqa: E402


def _outpath(args, name):
    os.makedirs(args.outdir, exist_ok=True)
    return os.path.join(args.outdir, name)


def cmd_eigen(args, cfg, model):
    from .eigen import eigen_sweep
    e = cfg["eigen"]
    lams = np.linspace(e["lambda_min"], e["lambda_max"], e["samples"])
    rows = eigen_sweep(model, lams)
    write_csv(_outpath(args, "eigen.csv"), header_lines("eigen", cfg),
              ("lambda", "mu", "mu_prime", "nu"), rows)
    print(record("EigenSweep", [("rows", len(rows)), ("lambda_min", e["lambda_min"]),
                                ("lambda_max", e["lambda_max"])]))


def cmd_dispersion(args, cfg, model):
    from .dispersion import analyze_speed
    d = cfg["dispersion"]
    lams = np.linspace(d["lambda_min"], d["lambda_max"], d["samples"])
    an = analyze_speed(model, lams, search_factor=d["search_factor"])
    head = header_lines("dispersion", cfg)
    write_csv(_outpath(args, "dispersion.csv"), head, ("lambda", "k", "k_over_lambda"),
              [(l, k, k / l if l != 0 else float("nan")) for l, k in an.k_samples])
    summary = [("mu0", an.mu0), ("c_star", an.c_star), ("lambda_star", an.lambda_star),
               ("sup_condition", an.sup_condition_holds), ("sup_value", an.sup_value)]
    write_csv(_outpath(args, "dispersion_summary.csv"), head, [k for k, _ in summary],
              [[v for _, v in summary]])
    print(record("Dispersion", summary))


def cmd_classify(args, cfg, model):
    from .dispersion import classify_regime
    c = cfg["classify"]
    v = classify_regime(model, c["decay"], eta_samples=c["eta_samples"],
                        search_factor=cfg["dispersion"]["search_factor"])
    line = record(v.kind, v.fields())
    pairs = [("kind", v.kind), ("decay", v.decay)] + v.fields()
    write_csv(_outpath(args, "classify.csv"), header_lines("classify", cfg),
              [k for k, _ in pairs], [[val for _, val in pairs]])
    print(line)


def cmd_simulate(args, cfg, model):
    from .diagnostics import DIAGNOSTIC_COLUMNS, FrontTrack, observe
    from .ivp import CylinderGrid, make_initial_profile, run
    s = cfg["simulate"]
    dg = cfg["diagnostics"]
    grid = CylinderGrid.for_model(model, s["x_min"], s["x_max"], s["n_x"])
    state = make_initial_profile(grid, s["decay"], s["decay_y"], s["c1"], s["c2"], s["c3"],
                                 s["plateau"])
    obs = partial(observe, model=model, right_offset=dg["right_offset"],
                  right_width=dg["right_width"])
    res = run(state, model, s["t_end"], s["cadence"], dt=s["dt"] or None, dt_max=s["dt_max"],
              cfl=s["cfl"], loss_factor=s["loss_factor"], guard_margin=s["guard_margin"],
              observer=obs, keep_snapshots=True)
    head = header_lines("simulate", cfg)
    write_csv(_outpath(args, "diagnostics.csv"), head, DIAGNOSTIC_COLUMNS,
              [[d[c] for c in DIAGNOSTIC_COLUMNS] for d in res.diagnostics])
    every = max(1, int(round(s["snapshot_every"] / s["cadence"])))
    x, y = grid.x, grid.y
    sx, sy = s["stride_x"], s["stride_y"]

    def snap_rows():
        for k, st in enumerate(res.snapshots):
            if k % every and k != len(res.snapshots) - 1:
                continue
            for i in range(0, grid.n_x, sx):
                for j in range(0, len(y), sy):
                    yield (st.t, x[i], y[j], st.T[i, j], st.Y[i, j])

    write_csv(_outpath(args, "snapshots.csv"), head, ("t", "x", "y", "T", "Y"), snap_rows())
    track = FrontTrack([(d["t"], d["front_pos_T"]) for d in res.diagnostics],
                       fit_window=s["fit_window"])
    try:
        track.fit()
    except KppError:
        pass
    print(record("Simulation", [("t_final", res.final.t), ("dt", res.dt),
                                ("speed", track.speed), ("r2", track.r2),
                                ("partial", res.partial)]))


def cmd_front(args, cfg, model):
    from .diagnostics import left_decay_rate, right_decay_rate, mass_balance_residual
    from .front import minimal_speed_front, solve_front
    f = cfg["front"]
    dg = cfg["diagnostics"]
    kw = dict(max_iter=f["max_iter"], tol=f["tol"], theta=f["theta"], dx=f["dx"],
              margin=f["margin"], ka_offset=f["ka_offset"], t_init=f["t_init"],
              tail_skip=dg["tail_skip"], tail_width=dg["tail_width"])
    if f["minimal"]:
        sol = minimal_speed_front(model, f["half_length"], levels=f["levels"], **kw)
    else:
        sol = solve_front(model, f["speed"], f["half_length"], **kw)
    head = header_lines("front", cfg)
    x, y = sol.grid.x, sol.grid.y
    rows = ((x[i], y[j], sol.T[i, j], sol.Y[i, j])
            for i in range(0, sol.grid.n_x, f["stride_x"]) for j in range(0, len(y), f["stride_y"]))
    write_csv(_outpath(args, "front.csv"), head, ("x", "y", "T", "Y"), rows)

    def safe(fn):
        try:
            return fn()
        except KppError:
            return float("nan")

    summary = list(sol.summary().items()) + [
        ("y_inf_strip", sol.y_inf_strip),
        ("right_decay", safe(lambda: right_decay_rate(sol, offset=dg["right_offset"],
                                                      width=dg["right_width"]))),
        ("left_decay", safe(lambda: left_decay_rate(sol, skip=dg["left_skip"],
                                                    width=dg["left_width"]))),
        ("mass_balance", safe(lambda: mass_balance_residual(sol, model))),
        ("violation", sol.violation)]
    write_csv(_outpath(args, "front_summary.csv"), head, [k for k, _ in summary],
              [[v for _, v in summary]])
    print(record("Front", summary))
    return 0 if sol.converged else 1


COMMANDS = {"eigen": cmd_eigen, "dispersion": cmd_dispersion, "classify": cmd_classify,
            "simulate": cmd_simulate, "front": cmd_front}

# (flag, section, key, type)
FLAGS = {
    "eigen": [("--lambda-min", "eigen", "lambda_min", float),
              ("--lambda-max", "eigen", "lambda_max", float),
              ("--samples", "eigen", "samples", int)],
    "dispersion": [("--lambda-min", "dispersion", "lambda_min", float),
                   ("--lambda-max", "dispersion", "lambda_max", float),
                   ("--samples", "dispersion", "samples", int)],
    "classify": [("--decay", "classify", "decay", float)],
    "simulate": [("--t-end", "simulate", "t_end", float), ("--n-x", "simulate", "n_x", int),
                 ("--decay", "simulate", "decay", float)],
    "front": [("--speed", "front", "speed", float),
              ("--half-length", "front", "half_length", float),
              ("--tol", "front", "tol", float), ("--max-iter", "front", "max_iter", int),
              ("--minimal", "front", "minimal", None)],
}


def make_parser():
    p = argparse.ArgumentParser(prog="kppfront", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="TOML scenario file")
        sp.add_argument("--outdir", default=".", help="directory for CSV outputs")
        for flag, _, key, typ in FLAGS[name]:
            if typ is None:
                sp.add_argument(flag, dest=key, action="store_true", default=None)
            else:
                sp.add_argument(flag, dest=key, type=typ, default=None)
    return p


def run_command(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config)
        for _, section, key, _ in FLAGS[args.command]:
            cfgmod.override(cfg, section, key, getattr(args, key))
        model = cfgmod.build_model_from_config(cfg)
        status = COMMANDS[args.command](args, cfg, model)
        return int(status or 0)
    except ConfigError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except KppError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1


def main():  # pragma: no cover
    sys.exit(run_command())


if __name__ == "__main__":  # pragma: no cover
    main()
