"""Derivative-free local minimization over a box with linear simplex models.

The method follows the structure of Powell's COBYLA specialised to bound
constraints: a simplex of ``n + 1`` evaluated points defines a linear model
of the objective; each iteration minimizes that model over the intersection
of a trust region of radius ``rho`` and the box, evaluates the result and
swaps it into the simplex. When a step fails to reduce the objective the
simplex geometry is repaired or, if it is already well poised, ``rho`` is
halved. Iterates never leave the box; all work is done in coordinates scaled
so that the box is the unit cube.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .results import RunResult

# Poisedness thresholds relative to rho: vertices farther than
# FAR_FACTOR * rho, or closer than FLAT_FACTOR * rho to their opposite face,
# trigger a geometry step.
FAR_FACTOR = 2.1
FLAT_FACTOR = 0.25
POOR_RATIO = 0.1


@dataclass
class OptimizerConfig:
    max_evals: int = 300
    rho_begin: float = 0.25  # as a fraction of each box width
    rho_end: float = 1e-2

    def __post_init__(self) -> None:
        if not 0 < self.rho_end < self.rho_begin:
            raise ValueError("need 0 < rho_end < rho_begin")
        if self.rho_begin > 0.5:
            raise ValueError("rho_begin must not exceed half the box width")
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")


class _BudgetExhausted(Exception):
    pass


def _trust_step(g: np.ndarray, rho: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """argmin g.d subject to |d| <= rho and lo <= d <= hi (lo <= 0 <= hi)."""
    if not np.any(g):
        return np.zeros_like(g)
    corner = np.where(g > 0, lo, np.where(g < 0, hi, 0.0))
    if np.linalg.norm(corner) <= rho:
        return corner

    def step(lam: float) -> np.ndarray:
        return np.clip(-g / lam, lo, hi)

    # |step(lam)| decreases in lam; bracket then bisect in log space.
    a = b = np.linalg.norm(g) / rho
    while np.linalg.norm(step(a)) < rho:
        a *= 0.5
    while np.linalg.norm(step(b)) > rho:
        b *= 2.0
    for _ in range(80):
        mid = np.sqrt(a * b)
        if np.linalg.norm(step(mid)) > rho:
            a = mid
        else:
            b = mid
    return step(b)


def local_minimize(f: Callable[[np.ndarray], float], lower: Sequence[float], upper: Sequence[float],
                   x0: Sequence[float], config: OptimizerConfig | None = None, run_id: str = "run") -> RunResult:
    """Minimize ``f`` over the box ``[lower, upper]`` starting from ``x0``.

    At most ``config.max_evals`` calls of ``f`` are made and every call is at
    a point inside the closed box. The best point seen is returned even if
    later iterates are worse. If the budget runs out before the initial
    simplex is complete the status is ``"budget_before_simplex"``.
    """
    cfg = config or OptimizerConfig()
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if lower.shape != upper.shape or x0.shape != lower.shape:
        raise ValueError("lower, upper and x0 must have the same shape")
    if np.any(lower > upper):
        raise ValueError("lower bound exceeds upper bound")
    if np.any(x0 < lower) or np.any(x0 > upper):
        raise ValueError("x0 lies outside the box")

    width = upper - lower
    free = width > 0
    n = int(free.sum())
    xs_hist: list[list[float]] = []
    fs_hist: list[float] = []

    def to_x(u: np.ndarray) -> np.ndarray:
        x = x0.copy()
        x[free] = lower[free] + np.clip(u, 0.0, 1.0) * width[free]
        return np.clip(x, lower, upper)

    def evaluate(u: np.ndarray) -> float:
        if len(fs_hist) >= cfg.max_evals:
            raise _BudgetExhausted
        x = to_x(u)
        fx = float(f(x))
        xs_hist.append(x.tolist())
        fs_hist.append(fx)
        return fx

    def result(status: str, extra: dict | None = None) -> RunResult:
        if fs_hist:
            i = int(np.argmin(fs_hist))
            best_x, best_f = xs_hist[i], fs_hist[i]
        else:
            best_x, best_f = x0.tolist(), float("nan")
        return RunResult(run_id, "cobyla", x0.tolist(), best_x, best_f, fs_hist, xs_hist, status,
                         extra=extra or {})

    u0 = (x0[free] - lower[free]) / width[free]
    rho = cfg.rho_begin
    n_geometry = n_trust = n_reductions = 0
    try:
        if n == 0:
            evaluate(u0)
            return result("ok")
        verts = [u0.copy()]
        vals = [evaluate(u0)]
        for j in range(n):
            v = u0.copy()
            v[j] = v[j] + rho if v[j] + rho <= 1.0 else v[j] - rho
            verts.append(v)
            vals.append(evaluate(v))
    except _BudgetExhausted:
        return result("budget_before_simplex")

    verts = np.array(verts)
    vals = np.array(vals)
    need_geometry = False
    status = "converged"
    try:
        while True:
            b = int(np.argmin(vals))
            ub, fb = verts[b], vals[b]
            others = [j for j in range(n + 1) if j != b]
            disp = verts[others] - ub
            try:
                dinv = np.linalg.inv(disp)
                if not np.all(np.isfinite(dinv)):
                    raise np.linalg.LinAlgError
            except np.linalg.LinAlgError:
                dinv = np.linalg.pinv(disp)
            dist = np.linalg.norm(disp, axis=1)
            col_norm = np.linalg.norm(dinv, axis=0)
            vsig = np.where(col_norm > 0, 1.0 / np.maximum(col_norm, 1e-300), 0.0)
            acceptable = bool(np.all(dist <= FAR_FACTOR * rho) and np.all(vsig >= FLAT_FACTOR * rho))
            g = dinv @ (vals[others] - fb)

            if need_geometry and not acceptable:
                need_geometry = False
                if np.any(dist > FAR_FACTOR * rho):
                    k = int(np.argmax(dist))
                else:
                    k = int(np.argmin(vsig))
                direction = dinv[:, k]
                norm = np.linalg.norm(direction)
                direction = direction / norm if norm > 0 else np.eye(n)[k]
                sign = -1.0 if g @ direction > 0 else 1.0
                cands = [np.clip(ub + s * rho * direction, 0.0, 1.0) for s in (sign, -sign)]
                # keep the candidate whose displacement retains most of the wanted direction
                gain = [abs((c - ub) @ direction) for c in cands]
                new = cands[int(np.argmax(gain))]
                verts[others[k]] = new
                vals[others[k]] = evaluate(new)
                n_geometry += 1
                continue
            need_geometry = False

            d = _trust_step(g, rho, -ub, 1.0 - ub)
            pred = -float(g @ d)
            if np.linalg.norm(d) < 0.5 * rho or pred <= 0:
                if not acceptable:
                    need_geometry = True
                    continue
                if rho <= cfg.rho_end:
                    break
                rho = cfg.rho_end if 0.5 * rho <= 1.5 * cfg.rho_end else 0.5 * rho
                n_reductions += 1
                continue

            new = np.clip(ub + d, 0.0, 1.0)
            fnew = evaluate(new)
            n_trust += 1
            weights = np.abs(d @ dinv) * np.maximum(1.0, dist / rho) ** 2
            k = int(np.argmax(weights))
            verts[others[k]] = new
            vals[others[k]] = fnew
            if fb - fnew < POOR_RATIO * pred:
                # recompute poisedness for the updated simplex before deciding
                need_geometry = True
                b2 = int(np.argmin(vals))
                disp2 = np.delete(verts, b2, axis=0) - verts[b2]
                try:
                    dinv2 = np.linalg.inv(disp2)
                    ok = bool(np.all(np.linalg.norm(disp2, axis=1) <= FAR_FACTOR * rho)
                              and np.all(1.0 / np.linalg.norm(dinv2, axis=0) >= FLAT_FACTOR * rho))
                except np.linalg.LinAlgError:
                    ok = False
                if ok:
                    need_geometry = False
                    if rho <= cfg.rho_end:
                        break
                    rho = cfg.rho_end if 0.5 * rho <= 1.5 * cfg.rho_end else 0.5 * rho
                    n_reductions += 1
    except _BudgetExhausted:
        status = "budget"
    return result(status, {"rho_final": rho, "trust_steps": n_trust, "geometry_steps": n_geometry,
                           "rho_reductions": n_reductions})
