from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RunResult:
    """Outcome of one optimization run.

    ``history`` holds the objective value of every evaluation in order;
    ``points`` the matching evaluated points.
    """

    run_id: str
    method: str
    x0: list[float]
    best_x: list[float]
    best_f: float
    history: list[float]
    points: list[list[float]] = field(default_factory=list, repr=False)
    status: str = "ok"
    alpha: float | None = None
    rounded_x: list[int] | None = None
    rounded_f: float | None = None
    rounding_evals: int = 0
    error: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def n_evals(self) -> int:
        return len(self.history)

    @property
    def f0(self) -> float:
        return self.history[0] if self.history else float("nan")

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.history, dtype=float))

    @property
    def improvement(self) -> float:
        """Objective at the initial point divided by the best objective found."""
        if not self.history or self.best_f <= 0:
            return float("nan")
        return self.f0 / self.best_f

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "method": self.method,
            "alpha": self.alpha,
            "status": self.status,
            "error": self.error,
            "x0": self.x0,
            "best_x": self.best_x,
            "best_f": self.best_f,
            "f0": self.f0,
            "improvement": self.improvement,
            "n_evals": self.n_evals,
            "rounded_x": self.rounded_x,
            "rounded_f": self.rounded_f,
            "rounding_evals": self.rounding_evals,
            "history": self.history,
            "extra": self.extra,
        }
