"""Synthetic memory-access workloads.

Cache contents are not modeled, so every access carries the level at which
it resolves (L1, L2, L3, local or remote memory), fixed at generation time.
A core issues its accesses in order; an access may not issue before the
accesses it depends on have completed.
"""

from __future__ import annotations

import io
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from .ergodic import derive_seed

LEVELS = ("L1", "L2", "L3", "local", "remote")
ACCESS_KINDS = ("ifetch", "load", "store")
DEFAULT_KIND_MIX = {"ifetch": 2 / 3, "load": 2 / 9, "store": 1 / 9}


class WorkloadError(ValueError):
    pass


@dataclass(frozen=True)
class Access:
    kind: str
    level: str
    deps: tuple[int, ...] = ()


@dataclass(frozen=True)
class Workload:
    name: str
    cores: tuple[tuple[Access, ...], ...]

    def __post_init__(self) -> None:
        for c, jobs in enumerate(self.cores):
            for i, job in enumerate(jobs):
                if job.kind not in ACCESS_KINDS:
                    raise WorkloadError(f"core {c} job {i}: unknown kind {job.kind!r}")
                if job.level not in LEVELS:
                    raise WorkloadError(f"core {c} job {i}: unknown level {job.level!r}")
                for d in job.deps:
                    if not 0 <= d < i:
                        raise WorkloadError(f"core {c} job {i}: dependency {d} is not an earlier job")

    @property
    def n_cores(self) -> int:
        return len(self.cores)

    @property
    def n_jobs(self) -> int:
        return sum(len(j) for j in self.cores)

    def level_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(LEVELS, 0)
        for jobs in self.cores:
            for job in jobs:
                counts[job.level] += 1
        return counts


def _normalize_profile(profile: Mapping[str, float]) -> dict[str, float]:
    unknown = set(profile) - set(LEVELS)
    if unknown:
        raise WorkloadError(f"unknown levels in miss profile: {sorted(unknown)}")
    if any(v < 0 or not math.isfinite(v) for v in profile.values()):
        raise WorkloadError("miss profile fractions must be non-negative")
    total = sum(profile.values())
    if abs(total - 1.0) > 1e-9:
        raise WorkloadError(f"miss profile must sum to 1, got {total}")
    return {lvl: float(profile.get(lvl, 0.0)) for lvl in LEVELS}


def _apportion(fractions: Sequence[float], total: int) -> list[int]:
    """Largest-remainder split of ``total`` items according to ``fractions``."""
    raw = [f * total for f in fractions]
    counts = [math.floor(r) for r in raw]
    order = sorted(range(len(raw)), key=lambda i: (counts[i] - raw[i], i))
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


def memory_test_workload(
    n_cores: int,
    jobs_per_core: int,
    miss_profile: Mapping[str, float],
    seed: int,
    *,
    window: int = 1,
    kind_mix: Mapping[str, float] | None = None,
    order: str = "shuffle",
    name: str = "memtest",
) -> Workload:
    """Per-core access streams with an exact per-level split.

    ``window`` bounds memory-level parallelism: access ``i`` depends on access
    ``i - window``, so ``window=1`` serializes a core completely and
    ``window=0`` removes dependencies. ``order`` is ``"shuffle"`` (seeded
    random interleaving of levels) or ``"cyclic"`` (levels dealt round-robin).
    Each core draws from its own seeded stream.
    """
    if n_cores < 1:
        raise WorkloadError("n_cores must be >= 1")
    if jobs_per_core < 1:
        raise WorkloadError("jobs_per_core must be >= 1")
    if window < 0:
        raise WorkloadError("window must be >= 0")
    if order not in ("shuffle", "cyclic"):
        raise WorkloadError(f"unknown order {order!r}")
    profile = _normalize_profile(miss_profile)
    mix = dict(DEFAULT_KIND_MIX if kind_mix is None else kind_mix)
    if set(mix) - set(ACCESS_KINDS) or abs(sum(mix.values()) - 1.0) > 1e-9 or min(mix.values()) < 0:
        raise WorkloadError("kind mix must be non-negative fractions over ifetch/load/store summing to 1")

    level_counts = _apportion([profile[lvl] for lvl in LEVELS], jobs_per_core)
    kind_counts = _apportion([mix.get(k, 0.0) for k in ACCESS_KINDS], jobs_per_core)
    cores = []
    for c in range(n_cores):
        rng = random.Random(derive_seed(seed, "workload", name, c))
        levels = [lvl for lvl, n in zip(LEVELS, level_counts) for _ in range(n)]
        kinds = [k for k, n in zip(ACCESS_KINDS, kind_counts) for _ in range(n)]
        if order == "shuffle":
            rng.shuffle(levels)
        else:
            levels = _deal(levels)
        rng.shuffle(kinds)
        jobs = tuple(
            Access(kind, level, (i - window,) if window and i >= window else ())
            for i, (kind, level) in enumerate(zip(kinds, levels))
        )
        cores.append(jobs)
    return Workload(name, tuple(cores))


def _deal(items: list[str]) -> list[str]:
    groups: dict[str, list[str]] = {}
    for it in items:
        groups.setdefault(it, []).append(it)
    out: list[str] = []
    while len(out) < len(items):
        for g in groups.values():
            if g:
                out.append(g.pop())
    return out


# Stand-ins for the four benchmark kernels: profile, window and share of
# the base job count.
SUITE_MEMBERS: dict[str, dict] = {
    "compute": {"profile": {"L1": 0.97, "L2": 0.03}, "window": 2, "share": 1.0},
    "bandwidth": {"profile": {"L1": 0.55, "L2": 0.1, "L3": 0.1, "local": 0.25}, "window": 6, "share": 0.5},
    "latency": {"profile": {"L1": 0.6, "L2": 0.1, "L3": 0.15, "local": 0.1, "remote": 0.05}, "window": 1, "share": 0.25},
    "contention": {"profile": {"L1": 0.5, "L3": 0.1, "local": 0.15, "remote": 0.25}, "window": 3, "share": 0.3},
}


def mixed_kernel_suite(scale: int = 1, n_cores: int = 8, seed: int = 0, base_jobs: int = 2000) -> list[Workload]:
    """Four workloads: compute-, bandwidth-, latency- and contention-bound."""
    if scale < 1:
        raise WorkloadError("scale must be >= 1")
    suite = []
    for name, member in SUITE_MEMBERS.items():
        jobs = max(1, int(round(member["share"] * base_jobs * scale)))
        suite.append(memory_test_workload(n_cores, jobs, member["profile"], seed,
                                          window=member["window"], name=name))
    return suite


def serial_chain_workload(n_jobs: int, *, dependent: bool = True, name: str = "serial") -> Workload:
    """One core issuing ``n_jobs`` accesses, each waiting for the previous one when ``dependent``."""
    if n_jobs < 0:
        raise WorkloadError("n_jobs must be >= 0")
    jobs = tuple(Access("load", "L1", (i - 1,) if dependent and i else ()) for i in range(n_jobs))
    return Workload(name, (jobs,))


def dump_workload(wl: Workload, fh: TextIO) -> None:
    """Line format: ``core seq kind level deps`` with deps comma-joined or ``-``."""
    fh.write(f"# workload {wl.name}\n")
    fh.write("# core seq kind level deps\n")
    for c, jobs in enumerate(wl.cores):
        for i, job in enumerate(jobs):
            deps = ",".join(str(d) for d in job.deps) or "-"
            fh.write(f"{c} {i} {job.kind} {job.level} {deps}\n")


def load_workload(fh: TextIO | Iterable[str], name: str | None = None, n_cores: int | None = None) -> Workload:
    found_name = None
    per_core: dict[int, list[Access]] = {}
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "workload":
                found_name = parts[1]
            continue
        fields = line.split()
        if len(fields) != 5:
            raise WorkloadError(f"line {lineno}: expected 5 fields, got {len(fields)}")
        try:
            core, seq = int(fields[0]), int(fields[1])
            deps = () if fields[4] == "-" else tuple(int(d) for d in fields[4].split(","))
        except ValueError:
            raise WorkloadError(f"line {lineno}: malformed integer field") from None
        jobs = per_core.setdefault(core, [])
        if seq != len(jobs):
            raise WorkloadError(f"line {lineno}: core {core} sequence {seq} out of order")
        jobs.append(Access(fields[2], fields[3], deps))
    count = max(per_core, default=-1) + 1 if n_cores is None else n_cores
    cores = tuple(tuple(per_core.get(c, ())) for c in range(count))
    return Workload(name or found_name or "loaded", cores)


def workload_to_text(wl: Workload) -> str:
    buf = io.StringIO()
    dump_workload(wl, buf)
    return buf.getvalue()
