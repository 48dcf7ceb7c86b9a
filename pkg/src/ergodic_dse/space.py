"""Parameter definitions and the continuous box they span."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

KINDS = ("capacity", "throughput", "delay", "latency")
DELAY_KINDS = frozenset({"delay", "latency"})


class PointError(ValueError):
    """A design point is malformed or lies outside the box."""


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    kind: str
    lower: int
    upper: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}, expected one of {KINDS}")
        for bound in (self.lower, self.upper):
            if int(bound) != bound:
                raise ValueError(f"{self.name}: bounds must be integral, got {bound!r}")
        if self.lower < 1:
            raise ValueError(f"{self.name}: lower bound must be >= 1")
        if self.lower > self.upper:
            raise ValueError(f"{self.name}: lower bound {self.lower} exceeds upper bound {self.upper}")
        object.__setattr__(self, "lower", int(self.lower))
        object.__setattr__(self, "upper", int(self.upper))

    @property
    def is_delay(self) -> bool:
        return self.kind in DELAY_KINDS

    @property
    def width(self) -> int:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "min": self.lower, "max": self.upper}

    @classmethod
    def from_dict(cls, data: dict) -> "ParameterSpec":
        return cls(str(data["name"]), str(data["kind"]), data["min"], data["max"])


class ParameterSpace(Sequence[ParameterSpec]):
    """Ordered parameter specs; the box is the product of their intervals."""

    def __init__(self, specs: Iterable[ParameterSpec]):
        self.specs: tuple[ParameterSpec, ...] = tuple(specs)
        names = [s.name for s in self.specs]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ValueError(f"duplicate parameter names: {', '.join(dupes)}")
        self._index = {s.name: i for i, s in enumerate(self.specs)}

    def __getitem__(self, i):
        return self.specs[i]

    def __len__(self) -> int:
        return len(self.specs)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParameterSpace) and self.specs == other.specs

    def __repr__(self) -> str:
        return f"ParameterSpace({len(self)} specs)"

    @property
    def dimension(self) -> int:
        return len(self.specs)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.specs]

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name) -> bool:
        return name in self._index

    @property
    def lower(self) -> np.ndarray:
        return np.array([s.lower for s in self.specs], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([s.upper for s in self.specs], dtype=float)

    @property
    def lattice_size(self) -> int:
        return math.prod(s.width + 1 for s in self.specs)

    def subspace(self, names: Iterable[str]) -> "ParameterSpace":
        return ParameterSpace(self.specs[self.index(n)] for n in names)

    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def validate(self, y: Sequence[float]) -> np.ndarray:
        """Return ``y`` as a float array, raising ``PointError`` naming the first bad coordinate."""
        arr = np.asarray(y, dtype=float)
        if arr.shape != (len(self.specs),):
            raise PointError(f"design point has {arr.size} values, space has {len(self.specs)} parameters")
        for spec, v in zip(self.specs, arr):
            if not math.isfinite(v):
                raise PointError(f"{spec.name}: value {v!r} is not finite")
            if v < spec.lower or v > spec.upper:
                raise PointError(f"{spec.name}: value {v:g} outside [{spec.lower}, {spec.upper}]")
        return arr

    def contains(self, y: Sequence[float]) -> bool:
        try:
            self.validate(y)
        except PointError:
            return False
        return True

    def is_lattice_point(self, y: Sequence[float]) -> bool:
        arr = np.asarray(y, dtype=float)
        return bool(np.all(arr == np.floor(arr)))

    def lattice(self) -> Iterator[tuple[int, ...]]:
        """Enumerate every point of the discrete lattice in lexicographic order."""
        return itertools.product(*(range(s.lower, s.upper + 1) for s in self.specs))

    def as_mapping(self, y: Sequence[float]) -> dict[str, float]:
        return {s.name: float(v) for s, v in zip(self.specs, y)}

    def to_list(self) -> list[dict]:
        return [s.to_dict() for s in self.specs]

    @classmethod
    def from_list(cls, items: Iterable[dict]) -> "ParameterSpace":
        return cls(ParameterSpec.from_dict(d) for d in items)
