"""Statistical error at a point and scans along straight lines through the box."""

from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ergodic import derive_seed
from .objective import ObjectiveSpec, cost, execution_time
from .space import ParameterSpace, PointError

DEFAULT_POINTS = 200
DEFAULT_SEEDS_PER_POINT = 5
JUMP_FACTOR = 5.0


def _samples(y: np.ndarray, spec: ObjectiveSpec, seeds: Sequence[int]) -> np.ndarray:
    _, times = execution_time(y, spec, seeds)
    return np.asarray(times, dtype=float) + spec.alpha * cost(y, spec.space)


def estimate_error(y: Sequence[float], n_seeds: int, spec: ObjectiveSpec) -> tuple[float, float, float]:
    """Mean, sample standard deviation and relative standard deviation of the
    objective over ``n_seeds`` independent simulations at ``y``."""
    if n_seeds < 2:
        raise ValueError("n_seeds must be >= 2")
    arr = spec.space.validate(y)
    seeds = [derive_seed(spec.master_seed, "error", k) for k in range(n_seeds)]
    vals = _samples(arr, spec, seeds)
    mean = float(vals.mean())
    std = float(vals.std(ddof=1))
    return mean, std, std / mean if mean else 0.0


def random_line(space: ParameterSpace, rng: random.Random) -> tuple[np.ndarray, np.ndarray]:
    """Two distinct points drawn uniformly in the box."""
    if all(s.width == 0 for s in space):
        raise ValueError("box is a single point")
    while True:
        a = np.array([s.lower + rng.random() * s.width for s in space])
        b = np.array([s.lower + rng.random() * s.width for s in space])
        if not np.array_equal(a, b):
            return a, b


@dataclass
class LineScan:
    """Objective statistics at ``n_points`` equally spaced points of segment AB."""

    line_id: int
    a: np.ndarray
    b: np.ndarray
    space: ParameterSpace
    seeds_per_point: int
    t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    mean: np.ndarray = field(default_factory=lambda: np.zeros(0))
    std: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_points(self) -> int:
        return int(self.t.size)

    @property
    def stderr(self) -> np.ndarray:
        return self.std / np.sqrt(self.seeds_per_point)

    @property
    def rel_stderr(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.mean != 0, self.stderr / self.mean, 0.0)

    def jump_fraction(self, factor: float = JUMP_FACTOR) -> float:
        """Share of adjacent pairs whose difference exceeds ``factor`` pooled standard errors."""
        if self.n_points < 2:
            return 0.0
        diff = np.abs(np.diff(self.mean))
        se = self.stderr
        pooled = np.sqrt(se[:-1] ** 2 + se[1:] ** 2)
        return float(np.mean(diff > factor * pooled))

    def header(self) -> list[str]:
        return ["line_id", "point_index", "t", *self.space.names, "mean", "std_dev", "rel_stderr", "n_seeds"]

    def rows(self) -> list[list]:
        rel = self.rel_stderr
        return [[self.line_id, i, float(self.t[i]), *map(float, self.points[i]), float(self.mean[i]),
                 float(self.std[i]), float(rel[i]), self.seeds_per_point] for i in range(self.n_points)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for row in self.rows():
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()


def _point_stats(task: tuple) -> tuple[float, float]:
    y, spec, seeds = task
    vals = _samples(y, spec, seeds)
    std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return float(vals.mean()), std


def scan_line(a: Sequence[float], b: Sequence[float], spec: ObjectiveSpec, n_points: int = DEFAULT_POINTS,
              seeds_per_point: int = DEFAULT_SEEDS_PER_POINT, line_id: int = 0, parallel: int = 1) -> LineScan:
    """Evaluate the objective along ``Y(t) = A + t (B - A)`` for ``t`` in ``linspace(0, 1, n_points)``.

    Seeds depend only on ``(spec.master_seed, line_id, point index)``, so
    results are identical for any ``parallel`` setting.
    """
    space = spec.space
    a = space.validate(a)
    b = space.validate(b)
    if np.array_equal(a, b):
        raise PointError("line endpoints must differ")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if seeds_per_point < 1:
        raise ValueError("seeds_per_point must be >= 1")
    t = np.linspace(0.0, 1.0, n_points)
    pts = a[None, :] + t[:, None] * (b - a)[None, :]
    pts = np.clip(pts, space.lower, space.upper)
    # snap rounding residue so exact lattice crossings stay exact
    snapped = np.round(pts)
    pts = np.where(np.abs(pts - snapped) < 1e-12, snapped, pts)
    tasks = [(pts[i], spec, [derive_seed(spec.master_seed, "scan", line_id, i, k) for k in range(seeds_per_point)])
             for i in range(n_points)]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            stats = list(pool.map(_point_stats, tasks))
    else:
        stats = [_point_stats(task) for task in tasks]
    mean = np.array([s[0] for s in stats])
    std = np.array([s[1] for s in stats])
    return LineScan(line_id, a, b, space, seeds_per_point, t, pts, mean, std)
