"""System graphs of modules, wires and queues, with parameter bindings.

A topology is plain data. Each parameterized field holds a *binding*: either
a fixed integer or the name of a logical parameter. A logical parameter is
resolved at simulation time from the design point (when it belongs to the
topology's parameter space) or from the topology's table of fixed values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from .space import ParameterSpace, ParameterSpec

Binding = Union[int, str]

PORT_LATENCY = 1
SWITCH_DELAY = 1
FILL_DELAY = 1

# name, kind, min, max, value at the reported alpha = 1e5 optimum
TABLE_II: tuple[tuple[str, str, int, int, float], ...] = (
    ("N(L1I)", "throughput", 1, 4, 2.95),
    ("N(L1D)", "throughput", 1, 4, 1.93),
    ("N(L2)", "throughput", 1, 4, 1.27),
    ("N(L3)", "throughput", 1, 4, 1.22),
    ("N(mem)", "throughput", 1, 4, 1.02),
    ("D(L1I)", "delay", 1, 4, 1.70),
    ("D(L1D)", "delay", 1, 4, 3.17),
    ("D(L2)", "delay", 8, 16, 9.33),
    ("D(L3)", "delay", 16, 32, 21.90),
    ("D(mem)", "delay", 64, 128, 80.61),
    ("L(X1)", "latency", 1, 4, 2.18),
    ("C_inQ(X1)", "capacity", 1, 4, 1.00),
    ("C_outQ(X1)", "capacity", 1, 4, 1.00),
    ("L(X2)", "latency", 4, 8, 5.41),
    ("C_inQ(X2)", "capacity", 1, 4, 1.00),
    ("C_outQ(X2)", "capacity", 1, 4, 1.02),
    ("C_inQ(L1I)", "capacity", 1, 4, 1.00),
    ("C_inQ(L1D)", "capacity", 1, 4, 1.06),
    ("C_inQ(L2)", "capacity", 1, 16, 1.12),
    ("C_inQ(L3)", "capacity", 1, 16, 2.22),
    ("C_inQ(mem)", "capacity", 1, 32, 1.00),
    ("C_outQ(L1I)", "capacity", 1, 4, 1.06),
    ("C_outQ(L1D)", "capacity", 1, 4, 1.00),
    ("C_outQ(L2)", "capacity", 2, 16, 2.00),
    ("C_outQ(L3)", "capacity", 4, 16, 4.00),
    ("C_outQ(mem)", "capacity", 4, 32, 4.00),
    ("C_inQ(X3)", "capacity", 1, 8, 1.00),
    ("L(X3_local)", "latency", 16, 64, 62.53),
    ("L(X3_remote)", "latency", 32, 64, 55.27),
    ("C_outQ(X3_local)", "capacity", 1, 16, 1.00),
    ("C_outQ(X3_remote)", "capacity", 1, 16, 1.02),
)

# Values used for NUMA parameters that are not part of the explored space.
NUMA_DEFAULTS: dict[str, int] = {
    "N(L1I)": 2, "N(L1D)": 2, "N(L2)": 2, "N(L3)": 2, "N(mem)": 2,
    "D(L1I)": 2, "D(L1D)": 2, "D(L2)": 12, "D(L3)": 24, "D(mem)": 96,
    "L(X1)": 2, "C_inQ(X1)": 2, "C_outQ(X1)": 2,
    "L(X2)": 6, "C_inQ(X2)": 2, "C_outQ(X2)": 2,
    "C_inQ(L1I)": 2, "C_inQ(L1D)": 2, "C_inQ(L2)": 8, "C_inQ(L3)": 8, "C_inQ(mem)": 16,
    "C_outQ(L1I)": 2, "C_outQ(L1D)": 2, "C_outQ(L2)": 8, "C_outQ(L3)": 8, "C_outQ(mem)": 16,
    "C_inQ(X3)": 4, "L(X3_local)": 32, "L(X3_remote)": 48,
    "C_outQ(X3_local)": 8, "C_outQ(X3_remote)": 8,
}

# Shorthand names that bind both halves of a split component.
NUMA_ALIASES: dict[str, str] = {
    "N(L1I)": "N(L1)", "N(L1D)": "N(L1)",
    "D(L1I)": "D(L1)", "D(L1D)": "D(L1)",
    "C_inQ(L1I)": "C_inQ(L1)", "C_inQ(L1D)": "C_inQ(L1)",
    "C_outQ(L1I)": "C_outQ(L1)", "C_outQ(L1D)": "C_outQ(L1)",
    "L(X3_local)": "L(X3)", "L(X3_remote)": "L(X3)",
    "C_outQ(X3_local)": "C_outQ(X3)", "C_outQ(X3_remote)": "C_outQ(X3)",
}

_ALIAS_KINDS = {
    "N(L1)": "throughput", "D(L1)": "delay", "C_inQ(L1)": "capacity", "C_outQ(L1)": "capacity",
    "L(X3)": "latency", "C_outQ(X3)": "capacity",
}


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class QueueDesc:
    id: str
    capacity: Binding | None  # None: unbounded completion sink


@dataclass(frozen=True)
class ModuleDesc:
    id: str
    role: str
    throughput: Binding
    delays: tuple[tuple[str, Binding], ...]
    inputs: tuple[str, ...]
    outputs: tuple[tuple[str, str], ...]
    attrs: tuple[tuple[str, object], ...] = ()

    def __post_init__(self) -> None:
        # keyed fields are order-free; store them sorted so equality is structural
        for name in ("delays", "outputs", "attrs"):
            object.__setattr__(self, name, tuple(sorted(getattr(self, name))))

    @property
    def delay_map(self) -> dict[str, Binding]:
        return dict(self.delays)

    @property
    def output_map(self) -> dict[str, str]:
        return dict(self.outputs)

    @property
    def attr_map(self) -> dict[str, object]:
        return dict(self.attrs)


@dataclass(frozen=True)
class WireDesc:
    id: str
    latency: Binding
    src: str
    dst: str


@dataclass(frozen=True)
class SourceDesc:
    id: str
    core: int
    targets: tuple[tuple[str, str], ...]  # access kind -> queue id

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(sorted(self.targets)))

    @property
    def target_map(self) -> dict[str, str]:
        return dict(self.targets)


@dataclass(frozen=True)
class Topology:
    name: str
    space: ParameterSpace
    fixed: tuple[tuple[str, int], ...]
    sources: tuple[SourceDesc, ...]
    queues: tuple[QueueDesc, ...]
    modules: tuple[ModuleDesc, ...]
    wires: tuple[WireDesc, ...]
    info: tuple[tuple[str, object], ...] = field(default=())

    def __post_init__(self) -> None:
        validate(self)

    @property
    def fixed_map(self) -> dict[str, int]:
        return dict(self.fixed)

    @property
    def info_map(self) -> dict[str, object]:
        return dict(self.info)

    @property
    def n_cores(self) -> int:
        return len(self.sources)

    def bindings(self) -> list[tuple[str, str, Binding]]:
        """Every parameterized field as ``(component id, field, binding)``."""
        out: list[tuple[str, str, Binding]] = []
        for q in self.queues:
            if q.capacity is not None:
                out.append((q.id, "C", q.capacity))
        for m in self.modules:
            out.append((m.id, "N", m.throughput))
            for kind, b in m.delays:
                out.append((m.id, f"D[{kind}]", b))
        for w in self.wires:
            out.append((w.id, "L", w.latency))
        return out

    def bound_names(self) -> set[str]:
        return {b for _, _, b in self.bindings() if isinstance(b, str)}

    def resolve(self, values: Mapping[str, float]) -> dict[str, float]:
        """Merge design-point values over the fixed table."""
        merged: dict[str, float] = {k: float(v) for k, v in self.fixed}
        merged.update(values)
        return merged


def validate(topo: Topology) -> None:
    qids = [q.id for q in topo.queues]
    if len(set(qids)) != len(qids):
        raise TopologyError("duplicate queue ids")
    ids = qids + [m.id for m in topo.modules] + [w.id for w in topo.wires] + [s.id for s in topo.sources]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise TopologyError(f"duplicate component ids: {dup[:5]}")
    queues = set(qids)
    consumers: dict[str, str] = {}

    def consume(qid: str, who: str) -> None:
        if qid not in queues:
            raise TopologyError(f"{who}: unknown queue {qid!r}")
        if qid in consumers:
            raise TopologyError(f"queue {qid!r} consumed by both {consumers[qid]} and {who}")
        consumers[qid] = who

    for m in topo.modules:
        for qid in m.inputs:
            consume(qid, m.id)
        for _, qid in m.outputs:
            if qid not in queues:
                raise TopologyError(f"{m.id}: unknown output queue {qid!r}")
    for w in topo.wires:
        consume(w.src, w.id)
        if w.dst not in queues:
            raise TopologyError(f"{w.id}: unknown destination queue {w.dst!r}")
    for s in topo.sources:
        for _, qid in s.targets:
            if qid not in queues:
                raise TopologyError(f"{s.id}: unknown target queue {qid!r}")
    for q in topo.queues:
        if q.capacity is None and q.id in consumers:
            raise TopologyError(f"sink queue {q.id!r} must not have a consumer")
        if q.capacity is not None and q.id not in consumers:
            raise TopologyError(f"queue {q.id!r} has no consumer")

    fixed = topo.fixed_map
    space_names = set(topo.space.names)
    both = space_names & set(fixed)
    if both:
        raise TopologyError(f"parameters both fixed and explored: {sorted(both)}")
    used = topo.bound_names()
    unresolved = used - space_names - set(fixed)
    if unresolved:
        raise TopologyError(f"unbound parameter names: {sorted(unresolved)}")
    unused = space_names - used
    if unused:
        raise TopologyError(f"parameters not bound to any component: {sorted(unused)}")
    for name, v in fixed.items():
        if int(v) != v or v < 1:
            raise TopologyError(f"fixed value for {name} must be a positive integer, got {v!r}")
    for cid, fld, b in topo.bindings():
        if isinstance(b, int) and b < 1:
            raise TopologyError(f"{cid}.{fld}: fixed binding must be >= 1")


def table_ii_space() -> ParameterSpace:
    return ParameterSpace(ParameterSpec(n, k, lo, hi) for n, k, lo, hi, _ in TABLE_II)


def table_ii_optimum() -> list[float]:
    return [opt for *_, opt in TABLE_II]


def characterization_space() -> ParameterSpace:
    """The 12 parameters N, D, C_outQ of L1, L2, L3 and memory."""
    ranges = {row[0]: row for row in TABLE_II}
    specs = []
    for comp in ("L1", "L2", "L3", "mem"):
        for prefix in ("N", "D", "C_outQ"):
            src = f"{prefix}(L1D)" if comp == "L1" else f"{prefix}({comp})"
            _, kind, lo, hi, _ = ranges[src]
            specs.append(ParameterSpec(f"{prefix}({comp})", kind, lo, hi))
    return ParameterSpace(specs)


class _Builder:
    def __init__(self, space: ParameterSpace, defaults: Mapping[str, int], aliases: Mapping[str, str]):
        self.space = space
        self.defaults = dict(defaults)
        self.aliases = dict(aliases)
        self.sources: list[SourceDesc] = []
        self.queues: list[QueueDesc] = []
        self.modules: list[ModuleDesc] = []
        self.wires: list[WireDesc] = []
        self.used_fixed: dict[str, int] = {}
        known = set(self.defaults) | set(self.aliases.values())
        unknown = [n for n in space.names if n not in known]
        if unknown:
            raise TopologyError(f"parameters not recognised by this topology: {unknown}")
        for canonical, alias in self.aliases.items():
            if canonical in space and alias in space:
                raise TopologyError(f"duplicate binding: both {canonical} and {alias} given")
        for alias, kind in _ALIAS_KINDS.items():
            if alias in space and space[space.index(alias)].kind != kind:
                raise TopologyError(f"{alias} must have kind {kind}")

    def bind(self, name: str) -> Binding:
        if name in self.space:
            return name
        alias = self.aliases.get(name)
        if alias is not None and alias in self.space:
            return alias
        self.used_fixed[name] = int(self.defaults[name])
        return name

    def queue(self, qid: str, capacity: Binding | None) -> str:
        self.queues.append(QueueDesc(qid, capacity))
        return qid

    def wire(self, wid: str, latency: Binding, src: str, dst: str) -> None:
        self.wires.append(WireDesc(wid, latency, src, dst))

    def module(self, mid, role, throughput, delays, inputs, outputs, **attrs) -> None:
        self.modules.append(ModuleDesc(
            mid, role, throughput, tuple(delays.items()), tuple(inputs),
            tuple(outputs.items()), tuple(sorted(attrs.items()))))

    def crossbar(self, name: str, direction: str, sources: list[tuple[str, str]],
                 dests: list[tuple[str, str, str, str]], route: str, c_in: Binding) -> None:
        """Per-source input buffer and router, per-link output buffer and wire.

        ``sources``: (source key, queue feeding the crossbar). ``dests``:
        (dest key, destination queue, latency param, outQ capacity param).
        Links into a shared destination queue are arbitrated round-robin by
        the kernel.
        """
        for skey, src_q in sources:
            base = f"{name}.{direction}.{skey}"
            inq = self.queue(f"{base}.in", c_in)
            self.wire(f"{base}.port", PORT_LATENCY, src_q, inq)
            outs = {}
            for dkey, dst_q, lat, cap in dests:
                outs[dkey] = self.queue(f"{base}.out.{dkey}", self.bind(cap))
            self.module(f"{base}.sw", "switch", 1, {"route": SWITCH_DELAY}, [inq], outs, route=route)
            for dkey, dst_q, lat, cap in dests:
                self.wire(f"{base}.link.{dkey}", self.bind(lat), outs[dkey], dst_q)

    def finish(self, name: str, info: dict) -> Topology:
        return Topology(
            name=name, space=self.space, fixed=tuple(sorted(self.used_fixed.items())),
            sources=tuple(self.sources), queues=tuple(self.queues), modules=tuple(self.modules),
            wires=tuple(self.wires), info=tuple(sorted(info.items())),
        )


def build_numa_system(m_processors: int, n_cores_per_proc: int, param_space: ParameterSpace,
                      fixed: Mapping[str, int] | None = None) -> Topology:
    """Two-level-crossbar NUMA hierarchy.

    Per core: split L1 (L1I, L1D) and a private L2; per processor: a shared
    L3; one memory module per processor. X1 joins L1 to L2, X2 joins the L2s
    of a processor to its L3, X3 is a full crossbar between all L3s and all
    memories with distinct local and remote link parameters. Requests and
    responses travel on separate crossbar instances bound to the same
    parameters.
    """
    if m_processors < 1 or n_cores_per_proc < 1:
        raise TopologyError("need at least one processor and one core per processor")
    defaults = dict(NUMA_DEFAULTS)
    if fixed:
        unknown = set(fixed) - set(defaults)
        if unknown:
            raise TopologyError(f"unknown fixed parameters: {sorted(unknown)}")
        defaults.update(fixed)
    b = _Builder(param_space, defaults, NUMA_ALIASES)
    m, n = m_processors, n_cores_per_proc
    cores = range(m * n)

    for c in cores:
        done = b.queue(f"core{c}.done", None)
        b.sources.append(SourceDesc(f"core{c}", c, (
            ("ifetch", f"L1I{c}.reqIn"), ("load", f"L1D{c}.reqIn"), ("store", f"L1D{c}.reqIn"))))
        for l1 in ("L1I", "L1D"):
            cid = f"{l1}{c}"
            b.queue(f"{cid}.reqIn", b.bind(f"C_inQ({l1})"))
            b.queue(f"{cid}.respIn", b.bind(f"C_inQ({l1})"))
            b.queue(f"{cid}.reqOut", b.bind(f"C_outQ({l1})"))
            d = b.bind(f"D({l1})")
            b.module(cid, "cache", b.bind(f"N({l1})"), {"hit": d, "miss": d, "fill": FILL_DELAY},
                     [f"{cid}.reqIn", f"{cid}.respIn"], {"req": f"{cid}.reqOut", "resp": done}, level=1)
        cid = f"L2{c}"
        for qn, pname in (("reqIn", "C_inQ(L2)"), ("respIn", "C_inQ(L2)"),
                          ("reqOut", "C_outQ(L2)"), ("respOut", "C_outQ(L2)")):
            b.queue(f"{cid}.{qn}", b.bind(pname))
        d = b.bind("D(L2)")
        b.module(cid, "cache", b.bind("N(L2)"), {"hit": d, "miss": d, "fill": FILL_DELAY},
                 [f"{cid}.reqIn", f"{cid}.respIn"], {"req": f"{cid}.reqOut", "resp": f"{cid}.respOut"}, level=2)

    for p in range(m):
        cid = f"L3{p}"
        for qn, pname in (("reqIn", "C_inQ(L3)"), ("respIn", "C_inQ(L3)"),
                          ("reqOut", "C_outQ(L3)"), ("respOut", "C_outQ(L3)")):
            b.queue(f"{cid}.{qn}", b.bind(pname))
        d = b.bind("D(L3)")
        b.module(cid, "cache", b.bind("N(L3)"), {"hit": d, "miss": d, "fill": FILL_DELAY},
                 [f"{cid}.reqIn", f"{cid}.respIn"], {"req": f"{cid}.reqOut", "resp": f"{cid}.respOut"}, level=3)
    for q in range(m):
        cid = f"mem{q}"
        b.queue(f"{cid}.reqIn", b.bind("C_inQ(mem)"))
        b.queue(f"{cid}.respOut", b.bind("C_outQ(mem)"))
        b.module(cid, "memory", b.bind("N(mem)"), {"access": b.bind("D(mem)")},
                 [f"{cid}.reqIn"], {"resp": f"{cid}.respOut"})

    cx1, cx2, cx3 = b.bind("C_inQ(X1)"), b.bind("C_inQ(X2)"), b.bind("C_inQ(X3)")
    for c in cores:
        b.crossbar(f"X1.{c}", "req", [(l1, f"{l1}{c}.reqOut") for l1 in ("L1I", "L1D")],
                   [(f"L2{c}", f"L2{c}.reqIn", "L(X1)", "C_outQ(X1)")], "single", cx1)
        b.crossbar(f"X1.{c}", "resp", [(f"L2{c}", f"L2{c}.respOut")],
                   [("I", f"L1I{c}.respIn", "L(X1)", "C_outQ(X1)"),
                    ("D", f"L1D{c}.respIn", "L(X1)", "C_outQ(X1)")], "l1", cx1)
    for p in range(m):
        pcores = range(p * n, (p + 1) * n)
        b.crossbar(f"X2.{p}", "req", [(f"L2{c}", f"L2{c}.reqOut") for c in pcores],
                   [(f"L3{p}", f"L3{p}.reqIn", "L(X2)", "C_outQ(X2)")], "single", cx2)
        b.crossbar(f"X2.{p}", "resp", [(f"L3{p}", f"L3{p}.respOut")],
                   [(f"c{c}", f"L2{c}.respIn", "L(X2)", "C_outQ(X2)") for c in pcores], "core", cx2)

    def numa(a: int, z: int) -> str:
        return "local" if a == z else "remote"

    for p in range(m):
        b.crossbar("X3", "req", [(f"L3{p}", f"L3{p}.reqOut")],
                   [(f"m{q}", f"mem{q}.reqIn", f"L(X3_{numa(p, q)})", f"C_outQ(X3_{numa(p, q)})")
                    for q in range(m)], "mem", cx3)
    for q in range(m):
        b.crossbar("X3", "resp", [(f"mem{q}", f"mem{q}.respOut")],
                   [(f"p{p}", f"L3{p}.respIn", f"L(X3_{numa(p, q)})", f"C_outQ(X3_{numa(p, q)})")
                    for p in range(m)], "proc", cx3)

    topo = b.finish("numa", {"builder": "numa", "processors": m, "cores_per_processor": n})
    check_numa_connectivity(topo)
    return topo


def chain_param_names(k_stages: int) -> list[str]:
    names = []
    for i in range(1, k_stages + 1):
        names += [f"N(s{i})", f"D(s{i})", f"C_inQ(s{i})", f"C_outQ(s{i})", f"L(w{i})"]
    return names


def build_chain(k_stages: int, param_space: ParameterSpace, fixed: Mapping[str, int] | None = None) -> Topology:
    """source -> s1 -> w1 -> s2 -> ... -> sk -> wk -> sink."""
    if k_stages < 1:
        raise TopologyError("chain needs at least one stage")
    defaults = {n: 1 for n in chain_param_names(k_stages)}
    for i in range(1, k_stages + 1):
        defaults[f"C_inQ(s{i})"] = 4
        defaults[f"C_outQ(s{i})"] = 4
        defaults[f"N(s{i})"] = 4
    if fixed:
        unknown = set(fixed) - set(defaults)
        if unknown:
            raise TopologyError(f"unknown fixed parameters: {sorted(unknown)}")
        defaults.update(fixed)
    b = _Builder(param_space, defaults, {})
    sink = b.queue("sink", None)
    b.sources.append(SourceDesc("core0", 0, tuple((k, "s1.in") for k in ("ifetch", "load", "store"))))
    for i in range(1, k_stages + 1):
        b.queue(f"s{i}.in", b.bind(f"C_inQ(s{i})"))
        b.queue(f"s{i}.out", b.bind(f"C_outQ(s{i})"))
        b.module(f"s{i}", "stage", b.bind(f"N(s{i})"), {"work": b.bind(f"D(s{i})")},
                 [f"s{i}.in"], {"out": f"s{i}.out"})
    for i in range(1, k_stages + 1):
        dst = f"s{i + 1}.in" if i < k_stages else sink
        b.wire(f"w{i}", b.bind(f"L(w{i})"), f"s{i}.out", dst)
    return b.finish("chain", {"builder": "chain", "stages": k_stages})


def check_numa_connectivity(topo: Topology) -> None:
    """Every core must reach every memory through the request network and back."""
    succ: dict[str, set[str]] = {}

    def edge(a: str, z: str) -> None:
        succ.setdefault(a, set()).add(z)

    for s in topo.sources:
        for _, q in s.targets:
            edge(s.id, q)
    for mod in topo.modules:
        for q in mod.inputs:
            edge(q, mod.id)
        for _, q in mod.outputs:
            edge(mod.id, q)
    for w in topo.wires:
        edge(w.src, w.id)
        edge(w.id, w.dst)

    def reach(start: str) -> set[str]:
        seen, stack = {start}, [start]
        while stack:
            for nxt in succ.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    mems = [mod.id for mod in topo.modules if mod.role == "memory"]
    for s in topo.sources:
        r = reach(s.id)
        missing = [mid for mid in mems if mid not in r]
        if missing:
            raise TopologyError(f"{s.id} cannot reach {missing}")
    for mid in mems:
        r = reach(mid)
        for s in topo.sources:
            if f"core{s.core}.done" not in r:
                raise TopologyError(f"{mid} cannot respond to {s.id}")


def _binding_in(b) -> Binding | None:
    if b is None or isinstance(b, str):
        return b
    if isinstance(b, bool) or int(b) != b:
        raise TopologyError(f"invalid binding {b!r}")
    return int(b)


def topology_to_dict(topo: Topology) -> dict:
    return {
        "name": topo.name,
        "info": dict(topo.info),
        "space": topo.space.to_list(),
        "fixed": dict(topo.fixed),
        "sources": [{"id": s.id, "core": s.core, "targets": dict(s.targets)} for s in topo.sources],
        "queues": [{"id": q.id, "capacity": q.capacity} for q in topo.queues],
        "modules": [{
            "id": mod.id, "role": mod.role, "throughput": mod.throughput,
            "delays": dict(mod.delays), "inputs": list(mod.inputs),
            "outputs": dict(mod.outputs), "attrs": dict(mod.attrs),
        } for mod in topo.modules],
        "wires": [{"id": w.id, "latency": w.latency, "src": w.src, "dst": w.dst} for w in topo.wires],
    }


def topology_from_dict(data: dict) -> Topology:
    try:
        return Topology(
            name=str(data["name"]),
            space=ParameterSpace.from_list(data.get("space", [])),
            fixed=tuple(sorted((str(k), int(v)) for k, v in data.get("fixed", {}).items())),
            sources=tuple(SourceDesc(s["id"], int(s["core"]), tuple(s["targets"].items()))
                          for s in data["sources"]),
            queues=tuple(QueueDesc(q["id"], _binding_in(q["capacity"])) for q in data["queues"]),
            modules=tuple(ModuleDesc(
                m["id"], m["role"], _binding_in(m["throughput"]),
                tuple((k, _binding_in(v)) for k, v in m["delays"].items()),
                tuple(m["inputs"]), tuple(m["outputs"].items()),
                tuple(sorted(m.get("attrs", {}).items())),
            ) for m in data["modules"]),
            wires=tuple(WireDesc(w["id"], _binding_in(w["latency"]), w["src"], w["dst"]) for w in data["wires"]),
            info=tuple(sorted(data.get("info", {}).items())),
        )
    except KeyError as exc:
        raise TopologyError(f"topology description missing field {exc}") from None


def build_from_description(desc: Mapping, space: ParameterSpace) -> Topology:
    """Build from a config ``topology`` block such as ``{kind: numa, processors: 2, cores_per_processor: 4}``."""
    kind = desc.get("kind")
    fixed = desc.get("fixed")
    if kind == "numa":
        return build_numa_system(int(desc.get("processors", 2)), int(desc.get("cores_per_processor", 4)), space, fixed)
    if kind == "chain":
        return build_chain(int(desc.get("stages", 1)), space, fixed)
    if kind == "graph":
        topo = topology_from_dict(desc["graph"])
        if topo.space != space:
            raise TopologyError("graph parameter space differs from the configured space")
        return topo
    raise TopologyError(f"unknown topology kind {kind!r}")
