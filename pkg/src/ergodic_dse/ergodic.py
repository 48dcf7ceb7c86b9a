"""Randomized integer sampling of real-valued parameters.

A real parameter ``x`` is realized in the discrete simulator as the random
integer ``gamma(frac(x), x)``: ``ceil(x)`` with probability ``frac(x)`` and
``floor(x)`` otherwise. Its expectation is ``x``, so a component resampled
every cycle behaves, on average over a run, like a component with a
fractional parameter.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field


def derive_seed(seed: int, *labels: object) -> int:
    """Map a base seed and a label path to a stable 64-bit child seed."""
    text = ":".join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


@dataclass
class ParamStream:
    """Reproducible uniform stream owned by one parameter instance.

    The generator seed is derived from ``(seed, parameter_id)`` only, so the
    sequence of one parameter never depends on which other parameters exist.
    """

    seed: int
    parameter_id: str
    _rng: random.Random = field(init=False, repr=False)
    draws: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if not self.parameter_id:
            raise ValueError("parameter_id must be non-empty")
        self._rng = random.Random(derive_seed(self.seed, "param", self.parameter_id))

    def uniform(self) -> float:
        self.draws += 1
        return self._rng.random()


@dataclass(frozen=True)
class RealParam:
    """A real parameter value, optionally tied to an entry of a parameter space."""

    value: float
    spec_index: int | None = None
    lower: float | None = None
    upper: float | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"parameter value must be finite, got {self.value!r}")
        if self.lower is not None and self.value < self.lower:
            raise ValueError(f"value {self.value} below lower bound {self.lower}")
        if self.upper is not None and self.value > self.upper:
            raise ValueError(f"value {self.value} above upper bound {self.upper}")

    @property
    def fraction(self) -> float:
        return self.value - math.floor(self.value)

    @property
    def is_integral(self) -> bool:
        return self.value == math.floor(self.value)


def gamma_sample(p: float, x: float, stream: ParamStream) -> int:
    """Return ``ceil(x)`` with probability ``p``, else ``floor(x)``.

    Exactly one uniform is consumed from ``stream`` per call, including the
    degenerate integer case.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p!r}")
    u = stream.uniform()
    return math.ceil(x) if u < p else math.floor(x)


def effective_value(param: RealParam, stream: ParamStream) -> int:
    return gamma_sample(param.fraction, param.value, stream)
