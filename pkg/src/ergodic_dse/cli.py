"""Command-line entry point.

Subcommands::

    ergodic-dse simulate --config tiny4 --y 2.5,3,1,2 [--trace trace.txt]
    ergodic-dse scan     --config scan12 --random 10 --points 200 --out runs/scan
    ergodic-dse optimize --config tiny4 --alphas 0,1 --starts 8 --budget 100 --out runs/opt
    ergodic-dse anneal   --config tiny4 --runs 10 --budget 1000 --out runs/sa
    ergodic-dse exhaust  --config tiny4 --alphas 0,1 --out runs/brute

``--config`` takes a YAML path or the name of a bundled config (table2,
scan12, tiny4). All randomness derives from ``--seed`` (default: the
config's objective seed). Exit status: 0 success, 2 configuration or input
error, 3 simulation abort, 4 campaign with failed runs.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .characterize import DEFAULT_POINTS, DEFAULT_SEEDS_PER_POINT, random_line, scan_line
from .config import Config, ConfigError, load_config
from .ergodic import derive_seed
from .objective import EvaluationError, cost, exhaustive_table
from .optimize import (DEFAULT_ALPHAS, OptimizerConfig, SAConfig, anneal_campaign, multi_start, parameter_report,
                       summarize, tradeoff_points)
from .report import plot_convergence, plot_scans, plot_tradeoff, write_csv, write_json
from .sim import SimulationAbort, simulate
from .space import PointError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIM = 3
EXIT_CAMPAIGN = 4


class UsageError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _provenance(cfg: Config, seed: int, command: str, settings: dict) -> dict:
    return {"config": cfg.resolved, "seed": seed, "command": command, "settings": settings}


def _design_point(cfg: Config, args) -> np.ndarray:
    if args.y is not None and args.point is not None:
        raise UsageError("give either --y or --point, not both")
    if args.y is not None:
        y = _floats(args.y)
        if len(y) != len(cfg.space):
            raise UsageError(f"--y has {len(y)} values, space has {len(cfg.space)}: {', '.join(cfg.space.names)}")
        y = cfg.space.validate(y)
    elif args.point is not None:
        y = cfg.point(args.point)
    else:
        y = cfg.space.midpoint()
    for item in args.set or []:
        name, _, value = item.partition("=")
        if name not in cfg.space:
            raise PointError(f"unknown parameter {name!r}")
        y[cfg.space.index(name)] = float(value)
    return cfg.space.validate(y)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    seed = cfg.objective["seed"] if args.seed is None else args.seed
    y = _design_point(cfg, args)
    spec = cfg.objective_spec(seed=seed)
    trace_fh = open(args.trace, "w") if args.trace else None
    records = []
    try:
        total = 0
        for k, wl in enumerate(cfg.workloads):
            if trace_fh is not None:
                trace_fh.write(f"# workload {wl.name}\n")
            emit = (lambda line: trace_fh.write(line + "\n")) if trace_fh is not None else None
            res = simulate(cfg.topology, y, wl, derive_seed(seed, "workload", k), max_cycles=spec.max_cycles,
                           deadlock_window=spec.deadlock_window, trace=emit)
            total += res.execution_time
            records.append({"workload": wl.name, "execution_time": res.execution_time,
                            "jobs_completed": res.jobs_completed, "tokens_created": res.tokens_created,
                            "random_draws": res.random_draws, "cycles_processed": res.cycles_processed,
                            "jobs_started": res.jobs_started, "tokens_accepted": res.tokens_accepted,
                            "queue_peaks": res.queue_peaks})
    finally:
        if trace_fh is not None:
            trace_fh.close()
    c = cost(y, cfg.space)
    out = {"point": dict(zip(cfg.space.names, map(float, y))), "execution_time": total, "cost": c,
           "alpha": spec.alpha, "objective": total + spec.alpha * c, "workloads": records}
    print(f"execution_time {total}")
    print(f"cost {c!r}")
    print(f"objective {total + spec.alpha * c!r}")
    if args.out:
        write_json(Path(args.out) / "simulate.json",
                   {**_provenance(cfg, seed, "simulate", {"trace": bool(args.trace)}), "result": out})
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.seeds_per_point < 1:
        raise UsageError("--seeds-per-point must be at least 1")
    cfg = load_config(args.config)
    seed = cfg.objective["seed"] if args.seed is None else args.seed
    spec = cfg.objective_spec(seed=seed)
    if args.line:
        names = args.line.split(":")
        if len(names) != 2:
            raise UsageError("--line takes FROM:TO with two named points")
        lines = [(cfg.point(names[0]), cfg.point(names[1]))]
    else:
        rng = random.Random(derive_seed(seed, "lines"))
        lines = [random_line(cfg.space, rng) for _ in range(args.random)]
    out = Path(args.out)
    settings = {"points": args.points, "seeds_per_point": args.seeds_per_point, "random": args.random,
                "line": args.line}
    prov = _provenance(cfg, seed, "scan", settings)
    scans, files = [], []
    for i, (a, b) in enumerate(lines):
        scan = scan_line(a, b, spec, n_points=args.points, seeds_per_point=args.seeds_per_point, line_id=i,
                         parallel=args.parallel)
        path = write_csv(out / f"line_{i:02d}.csv", scan.header(), scan.rows(), prov)
        scans.append(scan)
        files.append(path.name)
        print(f"line {i}: mean range [{scan.mean.min():.6g}, {scan.mean.max():.6g}], "
              f"max rel stderr {np.max(scan.rel_stderr):.3g}, jump fraction {scan.jump_fraction():.3f}")
    write_json(out / "scan.json", {**prov, "lines": [
        {"line_id": s.line_id, "file": f, "a": s.a, "b": s.b, "jump_fraction": s.jump_fraction(),
         "max_rel_stderr": float(np.max(s.rel_stderr))} for s, f in zip(scans, files)]})
    if not args.no_plots:
        plot_scans(scans, out / "scan_lines.png")
    return EXIT_OK


def _write_campaign(out: Path, name: str, runs, cfg: Config, prov: dict, plots: bool) -> None:
    summaries = summarize(runs)
    ok = [r for r in runs if r.status != "failed"]
    best_reports = {}
    for a in sorted({r.alpha for r in ok}):
        best = min((r for r in ok if r.alpha == a), key=lambda r: r.best_f)
        best_reports[repr(float(a))] = {"run_id": best.run_id,
                                        "parameters": parameter_report(cfg.space, best.best_x, best.rounded_x)}
    points = tradeoff_points(runs)
    write_json(out / f"{name}.json", {**prov, "runs": [r.to_dict() for r in runs],
                                      "summary": [s.to_dict() for s in summaries],
                                      "tradeoff": points, "best_parameters": best_reports})
    conv_rows = [(r.run_id, r.alpha, i, f, b) for r in runs for i, (f, b) in enumerate(zip(r.history, r.best_so_far))]
    write_csv(out / "convergence.csv", ["run_id", "alpha", "eval_index", "objective", "best_so_far"], conv_rows, prov)
    write_csv(out / "summary.csv",
              ["alpha", "n_runs", "n_failed", "best", "worst", "mean", "rel_std", "improvement_min",
               "improvement_max", "best_rounded"],
              [[s.alpha, s.n_runs, s.n_failed, s.best, s.worst, s.mean, s.rel_std, s.improvement_min,
                s.improvement_max, s.best_rounded] for s in summaries], prov)
    write_csv(out / "runs.csv",
              ["run_id", "alpha", "status", "n_evals", "f0", "best_f", "improvement", "rounded_f", "rounding_evals",
               *[f"best:{n}" for n in cfg.space.names], *[f"rounded:{n}" for n in cfg.space.names]],
              [[r.run_id, r.alpha, r.status, r.n_evals, r.f0, r.best_f, r.improvement, r.rounded_f, r.rounding_evals,
                *r.best_x, *(r.rounded_x or [None] * len(cfg.space))] for r in runs], prov)
    write_csv(out / "tradeoff.csv", ["run_id", "alpha", "cost", "execution_time", "objective"],
              [[p["run_id"], p["alpha"], p["cost"], p["execution_time"], p["objective"]] for p in points], prov)
    write_csv(out / "parameters.csv", ["alpha", "name", "kind", "min", "max", "opt", "rounded"],
              [[a, row["name"], row["kind"], row["min"], row["max"], row["opt"], row["rounded"]]
               for a, rep in best_reports.items() for row in rep["parameters"]], prov)
    for s in summaries:
        print(f"alpha {s.alpha:g}: best {s.best:.6g} worst {s.worst:.6g} mean {s.mean:.6g} "
              f"rel std {s.rel_std:.3g} improvement {s.improvement_min:.2f}-{s.improvement_max:.2f} "
              f"failed {s.n_failed}/{s.n_runs}")
    for r in runs:
        if r.status == "failed":
            print(f"run {r.run_id} failed: {r.error}", file=sys.stderr)
    if plots and ok:
        plot_convergence(ok, out / "convergence.png")
        plot_tradeoff(points, out / "tradeoff.png")


def _alphas(args) -> list[float]:
    alphas = list(DEFAULT_ALPHAS) if args.alphas is None else _floats(args.alphas)
    if not alphas or any(a < 0 for a in alphas):
        raise UsageError("--alphas must be a non-empty list of non-negative numbers")
    return alphas


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    seed = cfg.objective["seed"] if args.seed is None else args.seed
    alphas = _alphas(args)
    if args.starts < 1:
        raise UsageError("--starts must be at least 1")
    n = sum(s.width > 0 for s in cfg.space)
    if args.budget < n + 2:
        raise UsageError(f"--budget must be at least {n + 2} (simplex construction)")
    opt = OptimizerConfig(max_evals=args.budget, rho_begin=args.rho_begin, rho_end=args.rho_end)
    runs = multi_start(cfg.objective_spec(seed=seed), alphas, args.starts, opt, master_seed=seed, parallel=args.parallel)
    settings = {"alphas": alphas, "starts": args.starts, "budget": args.budget, "rho_begin": args.rho_begin,
                "rho_end": args.rho_end}
    _write_campaign(Path(args.out), "campaign", runs, cfg, _provenance(cfg, seed, "optimize", settings),
                    not args.no_plots)
    return EXIT_CAMPAIGN if any(r.status == "failed" for r in runs) else EXIT_OK


def cmd_anneal(args) -> int:
    cfg = load_config(args.config)
    seed = cfg.objective["seed"] if args.seed is None else args.seed
    alphas = _alphas(args)
    if args.runs < 1 or args.budget < 1:
        raise UsageError("--runs and --budget must be at least 1")
    sa = SAConfig(max_evals=args.budget)
    runs = anneal_campaign(cfg.objective_spec(seed=seed), alphas, args.runs, sa, master_seed=seed,
                           parallel=args.parallel)
    settings = {"alphas": alphas, "runs": args.runs, "budget": args.budget}
    _write_campaign(Path(args.out), "anneal", runs, cfg, _provenance(cfg, seed, "anneal", settings),
                    not args.no_plots)
    return EXIT_CAMPAIGN if any(r.status == "failed" for r in runs) else EXIT_OK


def cmd_exhaust(args) -> int:
    cfg = load_config(args.config)
    seed = cfg.objective["seed"] if args.seed is None else args.seed
    alphas = _alphas(args)
    spec = cfg.objective_spec(seed=seed)
    if cfg.space.lattice_size > args.max_points:
        raise UsageError(f"lattice has {cfg.space.lattice_size} points (limit {args.max_points})")
    table = exhaustive_table(spec, max_points=args.max_points)
    prov = _provenance(cfg, seed, "exhaust", {"alphas": alphas})
    out = Path(args.out)
    write_csv(out / "lattice.csv", [*cfg.space.names, "execution_time", "cost"],
              [[*map(int, p), t, c] for p, t, c in zip(table.points, table.times, table.costs)], prov)
    optima = []
    for a in alphas:
        i = table.argmin(a)
        optima.append({"alpha": a, "point": dict(zip(cfg.space.names, map(int, table.points[i]))),
                       "objective": float(table.objective(a)[i]), "execution_time": float(table.times[i]),
                       "cost": float(table.costs[i])})
        print(f"alpha {a:g}: optimum {list(map(int, table.points[i]))} objective {table.objective(a)[i]:.6g}")
    write_json(out / "optima.json", {**prov, "optima": optima})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ergodic-dse", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_default: str | None):
        p.add_argument("--config", required=True, help="YAML config path or bundled config name")
        p.add_argument("--seed", type=int, default=None, help="master seed (default: config objective.seed)")
        p.add_argument("--out", default=out_default, help="output directory")
        p.add_argument("--parallel", type=int, default=1, help="worker processes for independent units")

    p = sub.add_parser("simulate", help="simulate one design point")
    common(p, None)
    p.add_argument("--y", help="comma-separated design point in space order")
    p.add_argument("--point", help="named point from the config")
    p.add_argument("--set", action="append", metavar="NAME=VALUE", help="override one parameter")
    p.add_argument("--trace", help="write an event trace to this file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="objective along straight lines through the box")
    common(p, "scan_out")
    p.add_argument("--random", type=int, default=1, metavar="K", help="number of random lines")
    p.add_argument("--line", metavar="FROM:TO", help="scan between two named points instead")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--seeds-per-point", type=int, default=DEFAULT_SEEDS_PER_POINT)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="multi-start continuous optimization with rounding")
    common(p, "optimize_out")
    p.add_argument("--alphas", help="comma-separated cost weights (default 0,1e4,1e5,1e6)")
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--budget", type=int, default=300)
    p.add_argument("--rho-begin", type=float, default=0.25)
    p.add_argument("--rho-end", type=float, default=1e-2)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("anneal", help="simulated annealing over the lattice")
    common(p, "anneal_out")
    p.add_argument("--alphas", help="comma-separated cost weights (default 0,1e4,1e5,1e6)")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("exhaust", help="evaluate every lattice point of a small space")
    common(p, "exhaust_out")
    p.add_argument("--alphas", help="comma-separated cost weights (default 0,1e4,1e5,1e6)")
    p.add_argument("--max-points", type=int, default=100_000)
    p.set_defaults(func=cmd_exhaust)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PointError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationAbort, EvaluationError) as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_SIM


if __name__ == "__main__":
    sys.exit(main())
