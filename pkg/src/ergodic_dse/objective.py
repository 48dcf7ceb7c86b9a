"""Weighted performance/cost objective over a parameter space."""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

import numpy as np

from .ergodic import derive_seed
from .sim import DEFAULT_DEADLOCK_WINDOW, DEFAULT_MAX_CYCLES, SimulationAbort, simulate
from .space import ParameterSpace, ParameterSpec, PointError
from .topology import Topology
from .workload import Workload


def normalize(value: float, spec: ParameterSpec) -> float:
    """Affine map of ``[min, max]`` onto ``[1, 100]``; a degenerate range maps to 1."""
    if not spec.lower <= value <= spec.upper:
        raise PointError(f"{spec.name}: value {value:g} outside [{spec.lower}, {spec.upper}]")
    if spec.upper == spec.lower:
        return 1.0
    return 1.0 + 99.0 * (value - spec.lower) / (spec.upper - spec.lower)


def cost(y: Sequence[float], space: ParameterSpace) -> float:
    """Sum of normalized non-delay parameters plus ``100 / d`` for each normalized delay.

    Increases as any parameter moves in the direction that improves
    performance: larger capacities and throughputs, smaller delays and
    latencies.
    """
    arr = space.validate(y)
    total = 0.0
    for spec, v in zip(space, arr):
        x = normalize(float(v), spec)
        total += 100.0 / x if spec.is_delay else x
    return total


class EvaluationError(RuntimeError):
    def __init__(self, y, cause: SimulationAbort):
        self.y = list(map(float, y))
        self.cause = cause
        super().__init__(f"simulation failed at Y={self.y}: {cause}")


@dataclass(frozen=True)
class Evaluation:
    index: int
    y: tuple[float, ...]
    execution_time: float
    cost: float
    objective: float
    alpha: float
    seeds: tuple[int, ...]
    times: tuple[int, ...] = ()

    def to_record(self) -> dict:
        return {
            "index": self.index,
            "y": list(self.y),
            "execution_time": self.execution_time,
            "cost": self.cost,
            "objective": self.objective,
            "alpha": self.alpha,
            "seeds": list(self.seeds),
        }


@dataclass
class ObjectiveSpec:
    """What one objective evaluation simulates and how results are weighted.

    ``n_seeds`` > 1 averages execution time over that many seeds; the default
    single run relies on long workloads to keep the statistical error small.
    """

    topology: Topology
    workloads: Sequence[Workload]
    alpha: float = 0.0
    master_seed: int = 0
    n_seeds: int = 1
    max_cycles: int = DEFAULT_MAX_CYCLES
    deadlock_window: int = DEFAULT_DEADLOCK_WINDOW

    def __post_init__(self) -> None:
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a finite non-negative number, got {self.alpha!r}")
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        if not self.workloads:
            raise ValueError("at least one workload is required")

    @property
    def space(self) -> ParameterSpace:
        return self.topology.space

    def with_alpha(self, alpha: float) -> "ObjectiveSpec":
        return ObjectiveSpec(self.topology, self.workloads, alpha, self.master_seed, self.n_seeds,
                             self.max_cycles, self.deadlock_window)

    def seeds_for(self, index: int) -> tuple[int, ...]:
        return tuple(derive_seed(self.master_seed, "eval", index, k) for k in range(self.n_seeds))


def execution_time(y: Sequence[float], spec: ObjectiveSpec, seeds: Sequence[int]) -> tuple[float, tuple[int, ...]]:
    """Sum over the workload suite of execution times, averaged over ``seeds``."""
    times = []
    for seed in seeds:
        total = 0
        for k, wl in enumerate(spec.workloads):
            try:
                res = simulate(spec.topology, y, wl, derive_seed(seed, "workload", k),
                               max_cycles=spec.max_cycles, deadlock_window=spec.deadlock_window)
            except SimulationAbort as exc:
                raise EvaluationError(y, exc) from exc
            total += res.execution_time
        times.append(total)
    return float(np.mean(times)), tuple(times)


def evaluate(y: Sequence[float], spec: ObjectiveSpec, index: int = 0,
             seeds: Sequence[int] | None = None) -> Evaluation:
    arr = spec.space.validate(y)
    seeds = tuple(spec.seeds_for(index) if seeds is None else seeds)
    t, times = execution_time(arr, spec, seeds)
    c = cost(arr, spec.space)
    return Evaluation(index, tuple(float(v) for v in arr), t, c, t + spec.alpha * c, spec.alpha, seeds, times)


class Objective:
    """Counting, logging callable ``f(y) -> float`` around :func:`evaluate`.

    Indices increase with each call and select the evaluation seed, so a
    sequence of calls is reproducible from ``spec.master_seed``. Lattice
    points are deterministic and are memoized when ``cache_lattice`` is set.
    """

    def __init__(self, spec: ObjectiveSpec, log: TextIO | None = None, cache_lattice: bool = True,
                 on_evaluation: Callable[[Evaluation], None] | None = None):
        self.spec = spec
        self.log = log
        self.cache_lattice = cache_lattice
        self.on_evaluation = on_evaluation
        self.history: list[Evaluation] = []
        self._lattice_cache: dict[tuple, tuple[float, tuple[int, ...]]] = {}
        self._lock = threading.Lock()

    @property
    def n_evals(self) -> int:
        return len(self.history)

    def __call__(self, y: Sequence[float]) -> float:
        return self.evaluate(y).objective

    def evaluate(self, y: Sequence[float]) -> Evaluation:
        arr = self.spec.space.validate(y)
        with self._lock:
            index = len(self.history)
        key = tuple(int(v) for v in arr) if self.cache_lattice and np.all(arr == np.floor(arr)) else None
        if key is not None and key in self._lattice_cache:
            t, times = self._lattice_cache[key]
            seeds = self.spec.seeds_for(index)
            c = cost(arr, self.spec.space)
            ev = Evaluation(index, tuple(map(float, arr)), t, c, t + self.spec.alpha * c,
                            self.spec.alpha, seeds, times)
        else:
            ev = evaluate(arr, self.spec, index)
            if key is not None:
                self._lattice_cache[key] = (ev.execution_time, ev.times)
        self._record(ev)
        return ev

    def _record(self, ev: Evaluation) -> None:
        with self._lock:
            self.history.append(ev)
            if self.log is not None:
                self.log.write(json.dumps(ev.to_record(), sort_keys=True) + "\n")
        if self.on_evaluation is not None:
            self.on_evaluation(ev)

    def discrete(self, x: Sequence[int]) -> float:
        """Deterministic objective at a lattice point."""
        arr = np.asarray(x, dtype=float)
        if not np.all(arr == np.round(arr)):
            raise PointError("discrete objective requires an integer point")
        return self(arr)


@dataclass
class LatticeTable:
    """Exhaustive objective data for every lattice point of a small space."""

    space: ParameterSpace
    points: np.ndarray
    times: np.ndarray
    costs: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.costs = np.array([cost(p, self.space) for p in self.points])

    def objective(self, alpha: float) -> np.ndarray:
        return self.times + alpha * self.costs

    def argmin(self, alpha: float) -> int:
        return int(np.argmin(self.objective(alpha)))

    def optimum(self, alpha: float) -> tuple[np.ndarray, float]:
        i = self.argmin(alpha)
        return self.points[i], float(self.objective(alpha)[i])

    def lookup(self, alpha: float) -> Callable[[Sequence[int]], float]:
        index = {tuple(int(v) for v in p): i for i, p in enumerate(self.points)}
        values = self.objective(alpha)
        return lambda x: float(values[index[tuple(int(round(v)) for v in x)]])


def exhaustive_table(spec: ObjectiveSpec, max_points: int = 100_000) -> LatticeTable:
    space = spec.space
    if space.lattice_size > max_points:
        raise ValueError(f"lattice has {space.lattice_size} points, limit {max_points}")
    points = np.array(list(space.lattice()), dtype=float)
    times = np.array([execution_time(p, spec, spec.seeds_for(0))[0] for p in points])
    return LatticeTable(space, points, times)
