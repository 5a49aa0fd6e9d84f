"""Command-line experiment runner.

Subcommands: simulate, almost-conservation, verify <estimate-id>, covering,
ellipse, plan.  Each run writes its artifacts (CSV tables, JSON reports,
optional PNG figures with --plot) into a fresh directory and finishes with a
manifest listing every produced file with its sha256 content hash.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import shutil
import sys
import time

from .errors import ConfigurationError, ZtorusError

__all__ = ["main", "build_parser", "run"]


def build_parser():
    p = argparse.ArgumentParser(
        prog="ztorus",
        description="desk-scale laboratory for a coupled dispersive system "
                    "on the two-dimensional torus")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="runs", help="output root directory")
    p.add_argument("--threads", type=int, default=0,
                   help="cap for BLAS/FFT thread pools (0 = library default)")
    p.add_argument("--plot", action="store_true",
                   help="render figures next to the CSV artifacts")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate")
    sub.add_parser("almost-conservation")
    v = sub.add_parser("verify")
    v.add_argument("estimate_id")
    v.add_argument("--trials", type=int, default=50)
    sub.add_parser("covering")
    e = sub.add_parser("ellipse")
    e.add_argument("--trials", type=int, default=10 ** 6)
    pl = sub.add_parser("plan")
    pl.add_argument("--point", action="append", default=[],
                    help="s,r pair (repeatable)")
    pl.add_argument("--time", type=float, default=10.0)
    return p


def _limit_threads(n):
    if n > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _run_dir(root, kind, seed):
    stamp = time.strftime("%Y%m%d-%H%M%S")
    short = hashlib.sha256(f"{kind}{stamp}{seed}{os.getpid()}".encode()) \
        .hexdigest()[:8]
    path = os.path.join(root, f"{kind}-{stamp}-{short}")
    os.makedirs(path, exist_ok=False)
    return path


def _write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _finish_manifest(run_dir, seed, config_text=None):
    files = sorted(f for f in os.listdir(run_dir) if f != "manifest.json")
    manifest = {
        "seed": seed,
        "files": {f: _sha256(os.path.join(run_dir, f)) for f in files},
    }
    if config_text is not None:
        manifest["config_sha256"] = hashlib.sha256(
            config_text.encode()).hexdigest()
    _write_json(os.path.join(run_dir, "manifest.json"), manifest)
    return manifest


def _load(args, kind):
    from .config import load_config, loads_config, ExperimentConfig, SCHEMA
    if args.config:
        cfg = load_config(args.config)
        if cfg.kind != kind:
            raise ConfigurationError(
                f"config declares kind {cfg.kind!r} but the "
                f"{kind!r} subcommand was invoked")
        return cfg
    # defaults-only config for the requested kind
    from .config import REQUIRED
    text = f"[experiment]\nkind = {kind}\n"
    for sec in REQUIRED[kind]:
        text += f"\n[{sec}]\n"
    return loads_config(text)


def _state_from_config(cfg, seed):
    import numpy as np
    from .grid import make_grid
    from .dynamics import make_profile
    g = cfg["grid"]
    spec = make_grid(g["gamma1"], g["gamma2"], g["m1"], g["m2"])
    pr = cfg["profile"]
    rng = np.random.default_rng(seed)
    return spec, make_profile(pr["name"], spec, rng=rng,
                              amplitude=pr["amplitude"], width=pr["width"],
                              mode=(pr["mode1"], pr["mode2"]),
                              sobolev=pr["sobolev"])


TRAJECTORY_COLUMNS = ["t", "mass", "H_total", "H_kin", "H_wave",
                      "H_coupling", "Hmod_total", "Hres", "gap_ratio"]


def _cmd_simulate(args, run_dir):
    from .config import ExperimentConfig
    from .dynamics import SolverConfig, evolve, default_dt
    from .energies import (mass, hamiltonian, modified_energy,
                           resonant_energy, fixed_time_gap_ratio)
    from .multipliers import IMultiplierSpec
    from .grid import save_field

    cfg = _load(args, "simulate")
    spec, state = _state_from_config(cfg, args.seed)
    sol = cfg["solver"]
    dt = sol["dt"] if sol["dt"] > 0 else default_dt(spec)
    config = SolverConfig(dt=dt, scheme=sol["scheme"],
                          dealias=sol["dealias"], stride=sol["stride"])
    ispec = IMultiplierSpec(s=cfg["multiplier"]["s"],
                            r=cfg["multiplier"]["r"],
                            N=cfg.n_values()[0])

    def observables(st):
        h = hamiltonian(st)
        hmod = modified_energy(st, ispec)
        hres = resonant_energy(st, ispec)
        try:
            gap = fixed_time_gap_ratio(st, ispec)
        except ConfigurationError:
            gap = float("nan")
        return {"mass": mass(st.u), "H_total": h.total, "H_kin": h.kinetic,
                "H_wave": h.wave, "H_coupling": h.coupling,
                "Hmod_total": hmod.total, "Hres": hres, "gap_ratio": gap}

    traj = evolve(state, sol["t"], config,
                  observers=[("obs", observables)])
    rows = [{"t": rec["t"], **rec["obs"]} for rec in traj.records]
    _write_csv(os.path.join(run_dir, "trajectory.csv"), rows,
               TRAJECTORY_COLUMNS)
    final = traj.states[-1]
    save_field(os.path.join(run_dir, "u_final.bin"), final.u)
    save_field(os.path.join(run_dir, "nplus_final.bin"), final.nplus)
    if args.plot:
        from .plots import plot_trajectory
        plot_trajectory(rows, os.path.join(run_dir, "trajectory.png"))
    return cfg


def _cmd_almost_conservation(args, run_dir):
    from .verify import almost_conservation_sweep

    cfg = _load(args, "almost-conservation")
    spec, state = _state_from_config(cfg, args.seed)
    rep = almost_conservation_sweep(
        state, s=cfg["multiplier"]["s"], r=cfg["multiplier"]["r"],
        N_values=cfg.n_values(), delta=cfg["almost-conservation"]["delta"])
    rows = [{"N": n, "increment": inc, "normalized": nm}
            for n, inc, nm in zip(rep.N_values, rep.increments,
                                  rep.normalized)]
    _write_csv(os.path.join(run_dir, "increments.csv"), rows,
               ["N", "increment", "normalized"])
    _write_json(os.path.join(run_dir, "report.json"), {
        "s": rep.s, "r": rep.r, "delta": rep.delta, "slope": rep.slope,
        "intercept": rep.intercept, "r_squared": rep.r_squared,
        "degenerate": rep.degenerate,
    })
    if args.plot:
        from .plots import plot_slope_fit
        plot_slope_fit(rep.N_values, rep.normalized, rep.slope,
                       rep.intercept, os.path.join(run_dir, "slope.png"))
    return cfg


def _cmd_verify(args, run_dir):
    from .verify import verify_estimate

    cfg = _load(args, "verify") if args.config else None
    estimate_id = args.estimate_id
    trials = args.trials
    seed = args.seed
    if cfg is not None:
        estimate_id = cfg["verifier"]["estimate"]
        trials = cfg["verifier"]["trials"]
        seed = cfg["verifier"]["seed"]
    rep = verify_estimate(estimate_id, trials=trials, seed=seed)
    columns = sorted({k for row in rep.ratios for k in row})
    _write_csv(os.path.join(run_dir, "ratios.csv"), rep.ratios, columns)
    _write_json(os.path.join(run_dir, "report.json"), {
        "estimate": rep.estimate_id, "trials": rep.trials,
        "seed": rep.seed, "max_ratio": rep.max_ratio,
        "argmax": rep.argmax_params, "epsilon": rep.epsilon,
    })
    if args.plot:
        from .plots import plot_ratio_sweep
        plot_ratio_sweep(rep.ratios, os.path.join(run_dir, "ratios.png"),
                         rep.estimate_id)
    return cfg


def _cmd_covering(args, run_dir):
    from .verify import covering_count

    cfg = _load(args, "covering")
    n_list = [int(x) for x in cfg["covering"]["n_list"].split(",")]
    l_list = [int(x) for x in cfg["covering"]["l_list"].split(",")]
    rows = []
    for N in n_list:
        for L in l_list:
            for kmag in (0.0, N / 2.0, float(N), 1.5 * N, 2.0 * N):
                k = (kmag, 0.0)
                for A in (kmag, (kmag + 2.0 * N) / 2.0, 2.0 * N - L):
                    A = max(A, kmag)
                    cnt = covering_count(k, A, L, N)
                    bound = N ** 1.5 * L ** 0.5
                    rows.append({"N": N, "L": L, "kx": k[0], "ky": k[1],
                                 "A": A, "count": cnt, "bound": bound,
                                 "ratio": cnt / bound})
    _write_csv(os.path.join(run_dir, "covering.csv"), rows,
               ["N", "L", "kx", "ky", "A", "count", "bound", "ratio"])
    per_n = {n: max(r["ratio"] for r in rows if r["N"] == n) for n in n_list}
    _write_json(os.path.join(run_dir, "report.json"), {
        "max_ratio": max(r["ratio"] for r in rows),
        "max_ratio_per_N": per_n,
    })
    if args.plot:
        from .plots import plot_covering
        plot_covering(rows, os.path.join(run_dir, "covering.png"))
    return cfg


def _cmd_ellipse(args, run_dir):
    from .verify import ellipse_gap_check

    cfg = _load(args, "ellipse")
    a_list = [float(x) for x in cfg["ellipse"]["a_list"].split(",")]
    b_list = [float(x) for x in cfg["ellipse"]["b_list"].split(",")]
    trials = args.trials if args.trials else cfg["ellipse"]["trials"]
    rows = []
    for a, b in zip(a_list, b_list):
        rep = ellipse_gap_check(a, b, trials=trials, seed=args.seed)
        rows.append(rep)
    _write_csv(os.path.join(run_dir, "ellipse.csv"), rows,
               ["a", "b", "inflation", "trials", "plain_hits",
                "plain_min_gap", "primed_hits", "primed_min_gap", "hits"])
    _write_json(os.path.join(run_dir, "report.json"), {
        "total_hits": sum(r["hits"] for r in rows),
        "cases": rows,
    })
    return cfg


def _cmd_plan(args, run_dir):
    from .planner import (RegularityPoint, admissible, alpha_exponents,
                          iteration_plan)

    cfg = _load(args, "plan")
    points = []
    for raw in args.point:
        s, r = (float(x) for x in raw.split(","))
        points.append(RegularityPoint(s, r))
    if not points:
        pl = cfg["planner"]
        points = [RegularityPoint(pl["s"], pl["r"])]
    horizon = args.time if args.point else cfg["planner"]["t"]
    rows = []
    for p in points:
        rep = admissible(p)
        row = {"s": p.s, "r": p.r, "admissible": rep["ok"]}
        if rep["ok"]:
            al = alpha_exponents(p)
            plan = iteration_plan(p, horizon,
                                  data_scale=cfg["planner"]["data_scale"])
            row.update(alpha0=al["alpha0"], alpha1=al["alpha1"],
                       alpha2=al["alpha2"], N=plan.N, delta=plan.delta,
                       M=plan.M, T_reached=plan.T_reached)
        rows.append(row)
    _write_csv(os.path.join(run_dir, "plan.csv"), rows,
               ["s", "r", "admissible", "alpha0", "alpha1", "alpha2",
                "N", "delta", "M", "T_reached"])
    for row in rows:
        print(" ".join(f"{k}={v}" for k, v in row.items()))
    return cfg


_COMMANDS = {
    "simulate": _cmd_simulate,
    "almost-conservation": _cmd_almost_conservation,
    "verify": _cmd_verify,
    "covering": _cmd_covering,
    "ellipse": _cmd_ellipse,
    "plan": _cmd_plan,
}


def run(args) -> int:
    _limit_threads(args.threads)
    try:
        run_dir = _run_dir(args.out, args.command, args.seed)
    except OSError as exc:
        print(f"error: cannot create run directory: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = _COMMANDS[args.command](args, run_dir)
    except ConfigurationError as exc:
        shutil.rmtree(run_dir, ignore_errors=True)
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ZtorusError as exc:
        shutil.rmtree(run_dir, ignore_errors=True)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    config_text = None
    if cfg is not None:
        from .config import serialize
        config_text = serialize(cfg)
        with open(os.path.join(run_dir, "config.ini"), "w") as fh:
            fh.write(config_text)
    _finish_manifest(run_dir, args.seed, config_text)
    print(run_dir)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
