"""Cycle-stepped simulation of queues, modules and wires.

Semantics per cycle:

1. deliveries: jobs whose delay has elapsed and tokens whose wire latency
   has elapsed become visible in their (already reserved) destination queue;
2. admissions, in fixed topology order: sources issue accesses, then
   modules start jobs, then wires accept tokens. Wires feeding a shared
   queue are arbitrated round-robin; a module round-robins over its inputs.

A queue admits a token while ``occupied + reserved < capacity``; a module
starts a job while ``active < throughput`` and a slot in the chosen output
queue can be reserved. Real-valued parameters are realized by
``gamma(frac(x), x)``: capacities and throughputs are resampled once per
cycle (on first use in that cycle), delays and latencies once per job or
token at the moment it is admitted, and then frozen for that job or token.
A shrinking capacity never evicts tokens.

Cycles in which nothing can change are skipped: if an admission pass makes
no progress and no blocked check depended on a random sample, the state is
frozen until the next delivery.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from operator import attrgetter
from typing import Callable, Mapping, Sequence

import numpy as np

from .ergodic import ParamStream
from .topology import Topology
from .workload import Workload

DEFAULT_MAX_CYCLES = 100_000_000
DEFAULT_DEADLOCK_WINDOW = 10_000

_LEVEL_INDEX = {"L1": 1, "L2": 2, "L3": 3, "local": 4, "remote": 4}
_order = attrgetter("order")


class SimulationAbort(RuntimeError):
    """Raised for a detected deadlock or an exceeded cycle budget."""

    def __init__(self, reason: str, cycle: int, detail: str = ""):
        self.reason = reason
        self.cycle = cycle
        self.detail = detail
        msg = f"simulation aborted ({reason}) at cycle {cycle}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True)
class SimResult:
    execution_time: int
    seed: int
    jobs_completed: int
    tokens_created: int
    cycles_processed: int
    random_draws: int
    jobs_started: dict[str, int] = field(default_factory=dict, repr=False)
    tokens_accepted: dict[str, int] = field(default_factory=dict, repr=False)
    queue_peaks: dict[str, int] = field(default_factory=dict, repr=False)


class _Sampler:
    """Integer realization of one real parameter instance."""

    __slots__ = ("value", "lo", "p", "ceil", "stream", "memo_cycle", "memo")

    def __init__(self, value: float, stream_factory: Callable[[], ParamStream]):
        self.value = value
        self.lo = math.floor(value)
        self.p = value - self.lo
        self.ceil = self.lo + 1 if self.p else self.lo
        self.stream = stream_factory() if self.p else None
        self.memo_cycle = -1
        self.memo = self.lo

    def per_cycle(self, cycle: int) -> int:
        if not self.p:
            return self.lo
        if cycle != self.memo_cycle:
            self.memo_cycle = cycle
            self.memo = self.ceil if self.stream.uniform() < self.p else self.lo
        return self.memo

    def fresh(self) -> int:
        if not self.p:
            return self.lo
        return self.ceil if self.stream.uniform() < self.p else self.lo


class _Token:
    __slots__ = ("id", "core", "seq", "kind", "level", "mem", "proc", "issued")

    def __init__(self, tid, core, seq, kind, level, mem, proc, issued):
        self.id = tid
        self.core = core
        self.seq = seq
        self.kind = kind
        self.level = level
        self.mem = mem
        self.proc = proc
        self.issued = issued


class _Queue:
    __slots__ = ("id", "items", "reserved", "cap", "consumer", "peak")

    def __init__(self, qid: str, cap: _Sampler | None):
        self.id = qid
        self.items: deque = deque()
        self.reserved = 0
        self.cap = cap
        self.consumer = None
        self.peak = 0


class _Module:
    __slots__ = ("id", "order", "role", "inputs", "ports", "single", "route", "level",
                 "throughput", "delays", "active", "rr", "started")

    def __init__(self, mid, order, role):
        self.id = mid
        self.order = order
        self.role = role
        self.active = 0
        self.rr = 0
        self.started = 0


class _Wire:
    __slots__ = ("id", "src", "dst", "latency", "accepted", "group")

    def __init__(self, wid, src, dst, latency):
        self.id = wid
        self.src = src
        self.dst = dst
        self.latency = latency
        self.accepted = 0
        self.group = None


class _WireGroup:
    """All wires delivering into one queue, arbitrated round-robin."""

    __slots__ = ("order", "dst", "wires", "rr")

    def __init__(self, order, dst):
        self.order = order
        self.dst = dst
        self.wires: list[_Wire] = []
        self.rr = 0


class _Source:
    __slots__ = ("id", "order", "core", "proc", "jobs", "next", "done", "targets", "remote", "waiting_on")

    def __init__(self, sid, order, core):
        self.id = sid
        self.order = order
        self.core = core
        self.next = 0
        self.waiting_on = -1


def _point_values(topology: Topology, y) -> dict[str, float]:
    space = topology.space
    if isinstance(y, Mapping):
        unknown = set(y) - set(space.names)
        if unknown:
            raise ValueError(f"unknown parameters: {sorted(unknown)}")
        missing = [n for n in space.names if n not in y]
        if missing:
            raise ValueError(f"missing parameters: {missing}")
        arr = [float(y[n]) for n in space.names]
    else:
        arr = np.asarray(y, dtype=float).ravel()
    arr = space.validate(arr)
    return topology.resolve(space.as_mapping(arr))


class SimState:
    """Mutable state of one simulation run. Confined to a single run."""

    def __init__(self, topology: Topology, y, workload: Workload, seed: int = 0, *,
                 max_cycles: int = DEFAULT_MAX_CYCLES, deadlock_window: int = DEFAULT_DEADLOCK_WINDOW,
                 trace: Callable[[str], object] | None = None):
        if workload.n_cores > topology.n_cores:
            raise ValueError(f"workload has {workload.n_cores} cores, topology only {topology.n_cores}")
        self.topology = topology
        self.seed = int(seed)
        self.max_cycles = int(max_cycles)
        self.deadlock_window = int(deadlock_window)
        self.trace = trace
        self.values = _point_values(topology, y)
        self._samplers: list[_Sampler] = []

        info = topology.info_map
        n_per_proc = int(info.get("cores_per_processor", max(1, topology.n_cores)))
        n_proc = int(info.get("processors", 1))

        def sampler(binding, owner: str) -> _Sampler:
            value = float(binding) if isinstance(binding, int) else self.values[binding]
            s = _Sampler(value, lambda: ParamStream(self.seed, owner))
            self._samplers.append(s)
            return s

        self.queues: dict[str, _Queue] = {}
        for q in topology.queues:
            cap = None if q.capacity is None else sampler(q.capacity, f"{q.id}.C")
            self.queues[q.id] = _Queue(q.id, cap)

        order = 0
        self.sources: list[_Source] = []
        for sd in topology.sources:
            src = _Source(sd.id, order, sd.core)
            order += 1
            src.proc = sd.core // n_per_proc
            src.remote = (src.proc + 1) % n_proc
            src.targets = {k: self.queues[q] for k, q in sd.targets}
            c = sd.core
            src.jobs = workload.cores[c] if c < workload.n_cores else ()
            src.done = [False] * len(src.jobs)
            self.sources.append(src)

        self.modules: list[_Module] = []
        for md in topology.modules:
            mod = _Module(md.id, order, md.role)
            order += 1
            mod.inputs = [self.queues[q] for q in md.inputs]
            for q in mod.inputs:
                q.consumer = mod
            mod.ports = {k: self.queues[q] for k, q in md.outputs}
            mod.single = next(iter(mod.ports.values())) if len(mod.ports) == 1 else None
            attrs = md.attr_map
            mod.level = int(attrs.get("level", 0))
            mod.route = _ROUTERS[md.role if md.role != "switch" else f"switch:{attrs.get('route', 'single')}"]
            mod.throughput = sampler(md.throughput, f"{md.id}.N")
            mod.delays = {k: sampler(b, f"{md.id}.D[{k}]") for k, b in md.delays}
            self.modules.append(mod)

        self.wires: list[_Wire] = []
        groups: dict[str, _WireGroup] = {}
        for wd in topology.wires:
            w = _Wire(wd.id, self.queues[wd.src], self.queues[wd.dst], sampler(wd.latency, f"{wd.id}.L"))
            g = groups.get(wd.dst)
            if g is None:
                g = groups[wd.dst] = _WireGroup(order, w.dst)
                order += 1
            g.wires.append(w)
            w.group = g
            w.src.consumer = g
            self.wires.append(w)
        self.groups = list(groups.values())
        self._by_core = {s.core: s for s in self.sources}

        self.cycle = 0
        self.total_jobs = workload.n_jobs
        self.jobs_done = 0
        self.last_completion = 0
        self.tokens_created = 0
        self.tokens_consumed = 0
        self.cycles_processed = 0
        self.last_progress = 0
        self._events: dict[int, list] = {}
        self._event_heap: list[int] = []
        self._pending_events = 0
        self._src_cands = {s for s in self.sources if s.jobs}
        self._mod_cands: set = set()
        self._grp_cands: set = set()

    # -- bookkeeping --------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.jobs_done == self.total_jobs

    @property
    def random_draws(self) -> int:
        return sum(s.stream.draws for s in self._samplers if s.stream is not None)

    def tokens_in_system(self) -> int:
        return sum(len(q.items) for q in self.queues.values()) + self._pending_events

    def _schedule(self, at: int, event: tuple) -> None:
        bucket = self._events.get(at)
        if bucket is None:
            self._events[at] = [event]
            heapq.heappush(self._event_heap, at)
        else:
            bucket.append(event)
        self._pending_events += 1

    def _log(self, comp: str, what: str, token) -> None:
        self.trace(f"{self.cycle} {comp} {what} {token.id}")

    def _push(self, q: _Queue, tok: _Token) -> None:
        if q.cap is None:
            src = self._by_core[tok.core]
            src.done[tok.seq] = True
            self.jobs_done += 1
            self.tokens_consumed += 1
            self.last_completion = self.cycle
            if src.waiting_on == tok.seq:
                src.waiting_on = -1
                self._src_cands.add(src)
            if self.trace:
                self._log(src.id, "complete", tok)
            return
        q.items.append(tok)
        c = q.consumer
        if isinstance(c, _Module):
            self._mod_cands.add(c)
        else:
            self._grp_cands.add(c)

    # -- one cycle ----------------------------------------------------------

    def _deliver(self) -> bool:
        bucket = self._events.pop(self.cycle, None)
        if bucket is None:
            return False
        heapq.heappop(self._event_heap)
        self._pending_events -= len(bucket)
        trace = self.trace
        for comp, tok, q in bucket:
            if isinstance(comp, _Module):
                comp.active -= 1
                if trace:
                    self._log(comp.id, "done", tok)
            elif trace:
                self._log(comp.id, "arrive", tok)
            q.reserved -= 1
            self._push(q, tok)
        return True

    def _admit(self) -> tuple[bool, bool]:
        cycle = self.cycle
        progress = False
        stochastic = False
        trace = self.trace

        if self._src_cands:
            for src in sorted(self._src_cands, key=_order):
                job = src.jobs[src.next]
                done = src.done
                blocker = -1
                for d in job.deps:
                    if not done[d]:
                        blocker = d
                        break
                if blocker >= 0:
                    # sleeps until the awaited access completes
                    src.waiting_on = blocker
                    self._src_cands.discard(src)
                    continue
                q = src.targets[job.kind]
                cap = q.cap
                if cap is not None:
                    occ = len(q.items) + q.reserved
                    if occ >= cap.per_cycle(cycle):
                        stochastic = stochastic or bool(cap.p)
                        continue
                    if occ + 1 > q.peak:
                        q.peak = occ + 1
                level = _LEVEL_INDEX[job.level]
                mem = src.remote if job.level == "remote" else src.proc
                tok = _Token(self.tokens_created, src.core, src.next, job.kind, level, mem, src.proc, cycle)
                self.tokens_created += 1
                src.next += 1
                if src.next == len(src.jobs):
                    self._src_cands.discard(src)
                progress = True
                if trace:
                    self._log(src.id, "issue", tok)
                self._push(q, tok)

        if self._mod_cands:
            for mod in sorted(self._mod_cands, key=_order):
                inputs = mod.inputs
                k = len(inputs)
                ncap = -1
                for off in range(k):
                    i = (mod.rr + off) % k
                    q = inputs[i]
                    if not q.items:
                        continue
                    if ncap < 0:
                        ncap = mod.throughput.per_cycle(cycle)
                    if mod.active >= ncap:
                        stochastic = stochastic or bool(mod.throughput.p)
                        break
                    tok = q.items[0]
                    kind, out = mod.route(mod, tok, i)
                    cap = out.cap
                    if cap is not None:
                        occ = len(out.items) + out.reserved
                        if occ >= cap.per_cycle(cycle):
                            stochastic = stochastic or bool(cap.p)
                            continue
                        if occ + 1 > out.peak:
                            out.peak = occ + 1
                    q.items.popleft()
                    out.reserved += 1
                    mod.active += 1
                    mod.started += 1
                    mod.rr = (i + 1) % k
                    progress = True
                    self._schedule(cycle + mod.delays[kind].fresh(), (mod, tok, out))
                    if trace:
                        self._log(mod.id, f"start:{kind}", tok)
                for q in inputs:
                    if q.items:
                        break
                else:
                    self._mod_cands.discard(mod)

        if self._grp_cands:
            for g in sorted(self._grp_cands, key=_order):
                wires = g.wires
                k = len(wires)
                dst = g.dst
                cap = dst.cap
                for off in range(k):
                    i = (g.rr + off) % k
                    w = wires[i]
                    src_items = w.src.items
                    if not src_items:
                        continue
                    if cap is not None:
                        occ = len(dst.items) + dst.reserved
                        if occ >= cap.per_cycle(cycle):
                            stochastic = stochastic or bool(cap.p)
                            break
                        if occ + 1 > dst.peak:
                            dst.peak = occ + 1
                    tok = src_items.popleft()
                    dst.reserved += 1
                    w.accepted += 1
                    g.rr = (i + 1) % k
                    progress = True
                    self._schedule(cycle + w.latency.fresh(), (w, tok, dst))
                    if trace:
                        self._log(w.id, "accept", tok)
                for w in wires:
                    if w.src.items:
                        break
                else:
                    self._grp_cands.discard(g)
        return progress, stochastic

    def step(self) -> "SimState":
        """Advance exactly one cycle."""
        self._body()
        self.cycle += 1
        return self

    def _body(self) -> tuple[bool, bool]:
        delivered = self._deliver()
        progress, stochastic = self._admit()
        self.cycles_processed += 1
        if delivered or progress:
            self.last_progress = self.cycle
        return delivered or progress, stochastic

    def run(self) -> SimResult:
        while not self.finished:
            if self.cycle > self.max_cycles:
                raise SimulationAbort("cycle budget exceeded", self.cycle, f"limit {self.max_cycles}")
            moved, stochastic = self._body()
            if self.finished:
                break
            if moved or stochastic:
                if self.cycle - self.last_progress > self.deadlock_window:
                    raise SimulationAbort("deadlock", self.cycle, self._diagnose())
                self.cycle += 1
            elif self._event_heap:
                self.cycle = self._event_heap[0]
            else:
                raise SimulationAbort("deadlock", self.cycle, self._diagnose())
        return self.result()

    def result(self) -> SimResult:
        return SimResult(
            execution_time=self.last_completion + 1,
            seed=self.seed,
            jobs_completed=self.jobs_done,
            tokens_created=self.tokens_created,
            cycles_processed=self.cycles_processed,
            random_draws=self.random_draws,
            jobs_started={m.id: m.started for m in self.modules},
            tokens_accepted={w.id: w.accepted for w in self.wires},
            queue_peaks={q.id: q.peak for q in self.queues.values() if q.cap is not None},
        )

    def _diagnose(self) -> str:
        stuck = [f"{q.id}={len(q.items)}+{q.reserved}r" for q in self.queues.values() if q.items][:8]
        waiting = [f"{s.id}@{s.next}/{len(s.jobs)}" for s in self.sources if s.next < len(s.jobs)][:8]
        return (f"{self.jobs_done}/{self.total_jobs} jobs done, {self._pending_events} in flight; "
                f"occupied queues: {', '.join(stuck) or 'none'}; sources waiting: {', '.join(waiting) or 'none'}")


def _route_stage(mod, tok, i):
    return "work", mod.single


def _route_memory(mod, tok, i):
    return "access", mod.single


def _route_cache(mod, tok, i):
    if i == 1:
        return "fill", mod.ports["resp"]
    if tok.level == mod.level:
        return "hit", mod.ports["resp"]
    return "miss", mod.ports["req"]


def _route_single(mod, tok, i):
    return "route", mod.single


def _route_mem(mod, tok, i):
    return "route", mod.ports[f"m{tok.mem}"]


def _route_proc(mod, tok, i):
    return "route", mod.ports[f"p{tok.proc}"]


def _route_core(mod, tok, i):
    return "route", mod.ports[f"c{tok.core}"]


def _route_l1(mod, tok, i):
    return "route", mod.ports["I" if tok.kind == "ifetch" else "D"]


_ROUTERS = {
    "stage": _route_stage,
    "memory": _route_memory,
    "cache": _route_cache,
    "switch:single": _route_single,
    "switch:mem": _route_mem,
    "switch:proc": _route_proc,
    "switch:core": _route_core,
    "switch:l1": _route_l1,
}


def simulate(topology: Topology, y, workload: Workload, seed: int = 0, *,
             max_cycles: int = DEFAULT_MAX_CYCLES, deadlock_window: int = DEFAULT_DEADLOCK_WINDOW,
             trace: Callable[[str], object] | None = None) -> SimResult:
    """Run ``workload`` on ``topology`` at design point ``y`` until every access completes.

    ``execution_time`` counts cycles from cycle 0 through the cycle in which
    the last access completed. At an all-integer point no random draw is
    made, so the result does not depend on ``seed``.
    """
    state = SimState(topology, y, workload, seed, max_cycles=max_cycles,
                     deadlock_window=deadlock_window, trace=trace)
    return state.run()


def simulate_many(topology: Topology, y, workload: Workload, seeds: Sequence[int], **kw) -> list[SimResult]:
    return [simulate(topology, y, workload, s, **kw) for s in seeds]
