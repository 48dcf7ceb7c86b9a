"""Rounding a continuous optimum to a lattice point."""

from __future__ import annotations

import itertools
import random
from typing import Callable, Sequence

import numpy as np

MAX_EXHAUSTIVE = 12
N_RANDOM_CORNERS = 24


def round_to_discrete(y: Sequence[float], f: Callable[[Sequence[int]], float],
                      lower: Sequence[float] | None = None, upper: Sequence[float] | None = None,
                      max_exhaustive: int = MAX_EXHAUSTIVE, n_random: int = N_RANDOM_CORNERS,
                      seed: int = 0) -> tuple[list[int], float, int]:
    """Best floor/ceil corner of the lattice cell containing ``y``.

    With k fractional coordinates all 2**k corners are evaluated when
    ``k <= max_exhaustive``; otherwise the nearest rounding plus
    ``n_random`` distinct random corners. Returns ``(x, f(x), n_evals)``.
    """
    arr = np.asarray(y, dtype=float)
    if lower is not None and np.any(arr < np.asarray(lower, dtype=float)):
        raise ValueError("point below lower bound")
    if upper is not None and np.any(arr > np.asarray(upper, dtype=float)):
        raise ValueError("point above upper bound")
    lo = np.floor(arr).astype(int)
    frac = [i for i in range(arr.size) if arr[i] != lo[i]]
    k = len(frac)
    if k <= max_exhaustive:
        choices = list(itertools.product((0, 1), repeat=k))
    else:
        rng = random.Random(seed)
        nearest = tuple(int(arr[i] - lo[i] >= 0.5) for i in frac)
        choices = [nearest]
        seen = {nearest}
        while len(choices) < n_random + 1:
            c = tuple(rng.randint(0, 1) for _ in frac)
            if c not in seen:
                seen.add(c)
                choices.append(c)
    best_x: list[int] | None = None
    best_f = float("inf")
    for bits in choices:
        x = lo.copy()
        for i, b in zip(frac, bits):
            x[i] += b
        fx = float(f(x.tolist()))
        if fx < best_f or best_x is None:
            best_x, best_f = x.tolist(), fx
    return best_x, best_f, len(choices)
