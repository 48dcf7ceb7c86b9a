"""Multi-start optimization campaigns over a sweep of cost weights."""

from __future__ import annotations

import dataclasses
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..ergodic import derive_seed
from ..objective import EvaluationError, Objective, ObjectiveSpec
from ..space import ParameterSpace
from .anneal import SAConfig, simulated_annealing
from .cobyla import OptimizerConfig, local_minimize
from .results import RunResult
from .rounding import round_to_discrete

DEFAULT_ALPHAS = (0.0, 1e4, 1e5, 1e6)


def random_start(space: ParameterSpace, seed: int) -> np.ndarray:
    """Uniform point in the open box (degenerate dimensions sit at their bound)."""
    rng = random.Random(seed)
    out = []
    for spec in space:
        if spec.width == 0:
            out.append(float(spec.lower))
            continue
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        out.append(spec.lower + u * spec.width)
    return np.array(out)


def start_seed(master_seed: int, alpha_index: int, run_index: int) -> int:
    return derive_seed(master_seed, "start", alpha_index, run_index)


def _failed(run_id: str, method: str, x0, obj: Objective, exc: Exception) -> RunResult:
    history = [ev.objective for ev in obj.history]
    points = [list(ev.y) for ev in obj.history]
    if history:
        i = int(np.argmin(history))
        best_x, best_f = points[i], history[i]
    else:
        best_x, best_f = list(map(float, x0)), float("nan")
    return RunResult(run_id, method, list(map(float, x0)), best_x, best_f, history, points,
                     status="failed", error=str(exc))


def _attach_best(res: RunResult, obj: Objective) -> None:
    best = min(obj.history[: res.n_evals], key=lambda ev: ev.objective, default=None)
    if best is not None:
        res.extra["best_time"] = best.execution_time
        res.extra["best_cost"] = best.cost


def _run_local(task: tuple) -> RunResult:
    spec, alpha_index, run_index, master_seed, config = task
    alpha = spec.alpha
    run_id = f"a{alpha_index}-r{run_index}"
    space = spec.space
    x0 = random_start(space, start_seed(master_seed, alpha_index, run_index))
    run_spec = dataclasses.replace(spec, master_seed=derive_seed(master_seed, "run", alpha_index, run_index))
    obj = Objective(run_spec)
    try:
        res = local_minimize(obj, space.lower, space.upper, x0, config, run_id=run_id)
    except EvaluationError as exc:
        res = _failed(run_id, "cobyla", x0, obj, exc)
        res.alpha = alpha
        return res
    res.alpha = alpha
    _attach_best(res, obj)
    n_local = len(obj.history)
    try:
        rx, rf, n_round = round_to_discrete(res.best_x, obj.discrete, space.lower, space.upper,
                                            seed=derive_seed(master_seed, "round", alpha_index, run_index))
    except EvaluationError as exc:
        res.status = "failed"
        res.error = f"rounding: {exc}"
        return res
    res.rounded_x, res.rounded_f, res.rounding_evals = rx, rf, n_round
    picked = min(obj.history[n_local:], key=lambda ev: ev.objective)
    res.extra["rounded_time"] = picked.execution_time
    res.extra["rounded_cost"] = picked.cost
    return res


def _run_anneal(task: tuple) -> RunResult:
    spec, alpha_index, run_index, master_seed, config = task
    run_id = f"a{alpha_index}-s{run_index}"
    space = spec.space
    run_spec = dataclasses.replace(spec, master_seed=derive_seed(master_seed, "run", alpha_index, run_index))
    obj = Objective(run_spec)
    seed = derive_seed(master_seed, "sa", alpha_index, run_index)
    x0 = [int(round(v)) for v in random_start(space, start_seed(master_seed, alpha_index, run_index))]
    try:
        res = simulated_annealing(obj.discrete, space.lower, space.upper, config, seed=seed, x0=x0, run_id=run_id)
    except EvaluationError as exc:
        res = _failed(run_id, "sa", x0, obj, exc)
    else:
        _attach_best(res, obj)
        res.rounded_x = [int(v) for v in res.best_x]
        res.rounded_f = res.best_f
    res.alpha = spec.alpha
    return res


def _execute(fn, tasks: list[tuple], parallel: int) -> list[RunResult]:
    if parallel and parallel > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def multi_start(spec: ObjectiveSpec, alphas: Sequence[float] = DEFAULT_ALPHAS, n_starts: int = 8,
                config: OptimizerConfig | None = None, master_seed: int = 0, parallel: int = 1) -> list[RunResult]:
    """``n_starts`` local runs per cost weight, each followed by rounding.

    Runs are independent and identified by ``(alpha index, run index)``, so
    results do not depend on ``parallel``. A run whose simulations abort is
    returned with status ``"failed"`` and the campaign continues.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    cfg = config or OptimizerConfig()
    tasks = [(spec.with_alpha(a), ai, r, master_seed, cfg) for ai, a in enumerate(alphas) for r in range(n_starts)]
    return _execute(_run_local, tasks, parallel)


def anneal_campaign(spec: ObjectiveSpec, alphas: Sequence[float] = DEFAULT_ALPHAS, n_runs: int = 1,
                    config: SAConfig | None = None, master_seed: int = 0, parallel: int = 1) -> list[RunResult]:
    """Discrete annealing baseline with the same bookkeeping as :func:`multi_start`."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    cfg = config or SAConfig()
    tasks = [(spec.with_alpha(a), ai, r, master_seed, cfg) for ai, a in enumerate(alphas) for r in range(n_runs)]
    return _execute(_run_anneal, tasks, parallel)


@dataclass
class AlphaSummary:
    alpha: float
    n_runs: int
    n_failed: int
    best: float
    worst: float
    mean: float
    rel_std: float
    improvement_min: float
    improvement_max: float
    best_rounded: float | None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def summarize(runs: Sequence[RunResult]) -> list[AlphaSummary]:
    """Per-weight statistics of the best objective found by successful runs."""
    out = []
    for alpha in sorted({r.alpha for r in runs}):
        group = [r for r in runs if r.alpha == alpha]
        ok = [r for r in group if r.status != "failed"]
        vals = np.array([r.best_f for r in ok], dtype=float)
        imps = np.array([r.improvement for r in ok], dtype=float)
        rounded = [r.rounded_f for r in ok if r.rounded_f is not None]
        if vals.size:
            mean = float(vals.mean())
            rel = float(vals.std(ddof=1) / mean) if vals.size > 1 and mean != 0 else 0.0
            out.append(AlphaSummary(float(alpha), len(group), len(group) - len(ok), float(vals.min()),
                                    float(vals.max()), mean, rel, float(np.nanmin(imps)), float(np.nanmax(imps)),
                                    min(rounded) if rounded else None))
        else:
            nan = float("nan")
            out.append(AlphaSummary(float(alpha), len(group), len(group), nan, nan, nan, nan, nan, nan, None))
    return out


def tradeoff_points(runs: Sequence[RunResult]) -> list[dict]:
    """(cost, execution time) at each run's best point, one record per run."""
    rows = []
    for r in runs:
        if "best_cost" not in r.extra:
            continue
        rows.append({"run_id": r.run_id, "alpha": r.alpha, "cost": r.extra["best_cost"],
                     "execution_time": r.extra["best_time"], "objective": r.best_f})
    return rows


def parameter_report(space: ParameterSpace, best: Sequence[float], rounded: Sequence[int] | None = None) -> list[dict]:
    """Per-parameter table of bounds, continuous optimum and rounded value."""
    rows = []
    for i, spec in enumerate(space):
        rows.append({"name": spec.name, "kind": spec.kind, "min": spec.lower, "max": spec.upper,
                     "opt": float(best[i]), "rounded": None if rounded is None else int(rounded[i])})
    return rows
