"""Simulated annealing over the integer lattice of a box."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..ergodic import derive_seed
from .results import RunResult


@dataclass
class SAConfig:
    """Annealing schedule.

    ``t_initial=None`` estimates the starting temperature as the mean
    objective change over a short accept-everything warm-up walk.
    Temperature decays geometrically to ``t_final_ratio * t_initial`` over
    the budget. After ``reanneal_after`` evaluations without a new best, the
    walk restarts from the best point at ``reanneal_fraction`` of the
    starting temperature.
    """

    max_evals: int = 1000
    t_initial: float | None = None
    t_final_ratio: float = 1e-3
    jump_prob: float = 0.1
    warmup: int = 10
    reanneal_after: int = 150
    reanneal_fraction: float = 0.3

    def __post_init__(self) -> None:
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")
        if self.t_initial is not None and self.t_initial < 0:
            raise ValueError("t_initial must be non-negative")
        if not 0 < self.t_final_ratio <= 1:
            raise ValueError("t_final_ratio must lie in (0, 1]")
        if not 0 <= self.jump_prob <= 1:
            raise ValueError("jump_prob must lie in [0, 1]")


def _neighbor(x: list[int], lo: list[int], hi: list[int], free: list[int], jump_prob: float,
              rng: random.Random) -> list[int]:
    y = list(x)
    i = free[rng.randrange(len(free))]
    if rng.random() < jump_prob and hi[i] - lo[i] > 1:
        v = rng.randint(lo[i], hi[i] - 1)
        y[i] = v if v < x[i] else v + 1
    else:
        step = 1 if rng.random() < 0.5 else -1
        v = x[i] + step
        if v < lo[i] or v > hi[i]:
            v = x[i] - step
        y[i] = v
    return y


def simulated_annealing(f: Callable[[Sequence[int]], float], lower: Sequence[int], upper: Sequence[int],
                        config: SAConfig | None = None, seed: int = 0, x0: Sequence[int] | None = None,
                        run_id: str = "sa") -> RunResult:
    """Minimize ``f`` over integer points of ``[lower, upper]``.

    Deterministic given ``seed``. Every call of ``f`` counts toward
    ``config.max_evals``. With ``t_initial=0`` no worsening move is ever
    accepted.
    """
    cfg = config or SAConfig()
    lo = [int(v) for v in lower]
    hi = [int(v) for v in upper]
    if len(lo) != len(hi) or any(a > b for a, b in zip(lo, hi)):
        raise ValueError("invalid bounds")
    rng = random.Random(derive_seed(seed, "anneal"))
    free = [i for i in range(len(lo)) if hi[i] > lo[i]]
    if x0 is None:
        x = [rng.randint(a, b) for a, b in zip(lo, hi)]
    else:
        x = [int(round(v)) for v in x0]
        if any(v < a or v > b for v, a, b in zip(x, lo, hi)):
            raise ValueError("x0 outside bounds")
    start = list(x)

    history: list[float] = []
    points: list[list[float]] = []

    def evaluate(p: list[int]) -> float:
        v = float(f(p))
        history.append(v)
        points.append([float(c) for c in p])
        return v

    fx = evaluate(x)
    best_x, best_f = list(x), fx
    accepted = worse_accepted = reanneals = 0

    if not free:
        return RunResult(run_id, "sa", [float(c) for c in start], [float(c) for c in best_x], best_f,
                         history, points, "ok")

    t0 = cfg.t_initial
    if t0 is None:
        deltas = []
        for _ in range(min(cfg.warmup, cfg.max_evals - 1)):
            y = _neighbor(x, lo, hi, free, cfg.jump_prob, rng)
            fy = evaluate(y)
            deltas.append(abs(fy - fx))
            x, fx = y, fy
            if fy < best_f:
                best_x, best_f = list(y), fy
        t0 = float(np.mean(deltas)) if deltas and np.mean(deltas) > 0 else 1.0
        x, fx = list(best_x), best_f
    remaining = max(1, cfg.max_evals - len(history))
    decay = cfg.t_final_ratio ** (1.0 / remaining)
    temp = t0
    since_best = 0
    while len(history) < cfg.max_evals:
        y = _neighbor(x, lo, hi, free, cfg.jump_prob, rng)
        fy = evaluate(y)
        delta = fy - fx
        if delta <= 0:
            take = True
        elif temp <= 0:
            take = False
        else:
            take = rng.random() < math.exp(-delta / temp)
            worse_accepted += take
        if take:
            x, fx = y, fy
            accepted += 1
        if fy < best_f:
            best_x, best_f = list(y), fy
            since_best = 0
        else:
            since_best += 1
        temp *= decay
        if cfg.reanneal_after and since_best >= cfg.reanneal_after:
            temp = max(temp, t0 * cfg.reanneal_fraction)
            x, fx = list(best_x), best_f
            since_best = 0
            reanneals += 1
    return RunResult(run_id, "sa", [float(c) for c in start], [float(c) for c in best_x], best_f,
                     history, points, "ok",
                     extra={"t_initial": t0, "accepted": accepted, "worse_accepted": worse_accepted,
                            "reanneals": reanneals})
