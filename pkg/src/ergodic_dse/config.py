"""YAML experiment configuration.

A config names a parameter space, a topology, a workload suite, objective
settings, simulation limits and optional named design points::

    name: tiny4
    space:                      # "table2", "characterization" or a list
      - {name: N(L1), kind: throughput, min: 1, max: 4}
    topology: {kind: numa, processors: 1, cores_per_processor: 2}
    workload: {kind: suite, scale: 1, base_jobs: 2000, seed: 0}
    objective: {alpha: 0, n_seeds: 1, seed: 0}
    sim: {max_cycles: 100000000, deadlock_window: 10000}
    points:
      mid: {N(L1): 2.5}

Workload kinds: ``suite`` (the four mixed kernels), ``memtest`` (one
memory-test stream with an explicit miss profile), ``serial`` (a single
dependent chain of accesses) and ``file`` (a dumped workload). Parameters
missing from a named point default to the box midpoint.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .objective import ObjectiveSpec
from .sim import DEFAULT_DEADLOCK_WINDOW, DEFAULT_MAX_CYCLES
from .space import ParameterSpace, PointError
from .topology import Topology, TopologyError, build_from_description, characterization_space, table_ii_space
from .workload import Workload, WorkloadError, load_workload, memory_test_workload, mixed_kernel_suite, serial_chain_workload


class ConfigError(ValueError):
    pass


_TOP_KEYS = {"name", "space", "topology", "workload", "objective", "sim", "points"}
_WORKLOAD_KEYS = {
    "suite": {"kind", "scale", "n_cores", "seed", "base_jobs"},
    "memtest": {"kind", "n_cores", "jobs_per_core", "profile", "seed", "window", "order", "name"},
    "serial": {"kind", "n_jobs", "dependent"},
    "file": {"kind", "path"},
}


@dataclass
class Config:
    """A parsed and resolved configuration."""

    name: str
    resolved: dict
    space: ParameterSpace
    topology: Topology
    workloads: list[Workload]
    source: str = "<dict>"

    @property
    def objective(self) -> dict:
        return self.resolved["objective"]

    def objective_spec(self, alpha: float | None = None, seed: int | None = None,
                       n_seeds: int | None = None) -> ObjectiveSpec:
        obj = self.objective
        sim = self.resolved["sim"]
        return ObjectiveSpec(self.topology, self.workloads,
                             alpha=float(obj["alpha"] if alpha is None else alpha),
                             master_seed=int(obj["seed"] if seed is None else seed),
                             n_seeds=int(obj["n_seeds"] if n_seeds is None else n_seeds),
                             max_cycles=int(sim["max_cycles"]), deadlock_window=int(sim["deadlock_window"]))

    def point(self, name: str) -> np.ndarray:
        points = self.resolved.get("points", {})
        if name not in points:
            raise ConfigError(f"no point named {name!r}; known: {sorted(points)}")
        return self.point_from_mapping(points[name])

    def point_from_mapping(self, values: Mapping[str, float]) -> np.ndarray:
        unknown = [k for k in values if k not in self.space]
        if unknown:
            raise PointError(f"unknown parameters: {unknown}")
        y = self.space.midpoint()
        for k, v in values.items():
            y[self.space.index(k)] = float(v)
        return self.space.validate(y)


def _space(raw: Any) -> tuple[ParameterSpace, Any]:
    if raw == "table2":
        return table_ii_space(), raw
    if raw == "characterization":
        return characterization_space(), raw
    if isinstance(raw, list):
        try:
            space = ParameterSpace.from_list(raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"space: {exc}") from exc
        return space, space.to_list()
    raise ConfigError("space: expected 'table2', 'characterization' or a list of parameter entries")


def _workloads(raw: Mapping, n_cores: int, base: Path | None) -> tuple[list[Workload], dict]:
    kind = raw.get("kind", "suite")
    if kind not in _WORKLOAD_KEYS:
        raise ConfigError(f"workload.kind: unknown kind {kind!r}")
    extra = set(raw) - _WORKLOAD_KEYS[kind]
    if extra:
        raise ConfigError(f"workload: unknown keys for kind {kind}: {sorted(extra)}")
    try:
        if kind == "suite":
            res = {"kind": kind, "scale": int(raw.get("scale", 1)), "n_cores": int(raw.get("n_cores", n_cores)),
                   "seed": int(raw.get("seed", 0)), "base_jobs": int(raw.get("base_jobs", 2000))}
            wls = mixed_kernel_suite(res["scale"], res["n_cores"], res["seed"], res["base_jobs"])
        elif kind == "memtest":
            profile = raw.get("profile")
            if not isinstance(profile, Mapping):
                raise ConfigError("workload.profile: expected a mapping of level to fraction")
            res = {"kind": kind, "n_cores": int(raw.get("n_cores", n_cores)),
                   "jobs_per_core": int(raw.get("jobs_per_core", 1000)), "profile": dict(profile),
                   "seed": int(raw.get("seed", 0)), "window": int(raw.get("window", 1)),
                   "order": str(raw.get("order", "shuffle")), "name": str(raw.get("name", "memtest"))}
            wls = [memory_test_workload(res["n_cores"], res["jobs_per_core"], res["profile"], res["seed"],
                                        window=res["window"], order=res["order"], name=res["name"])]
        elif kind == "serial":
            res = {"kind": kind, "n_jobs": int(raw.get("n_jobs", 1000)), "dependent": bool(raw.get("dependent", True))}
            wls = [serial_chain_workload(res["n_jobs"], dependent=res["dependent"])]
        else:
            if "path" not in raw:
                raise ConfigError("workload.path: required for kind file")
            path = Path(raw["path"])
            if base is not None and not path.is_absolute():
                path = base / path
            with open(path) as fh:
                wls = [load_workload(fh)]
            res = {"kind": kind, "path": str(raw["path"])}
    except (WorkloadError, OSError) as exc:
        raise ConfigError(f"workload: {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"workload: {exc}") from exc
    return wls, res


def from_dict(raw: Mapping, source: str = "<dict>", base: Path | None = None) -> Config:
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{source}: top level must be a mapping")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise ConfigError(f"{source}: unknown top-level keys {sorted(extra)}")
    for key in ("space", "topology"):
        if key not in raw:
            raise ConfigError(f"{source}: missing required key {key!r}")
    space, space_res = _space(raw["space"])
    topo_raw = raw["topology"]
    if not isinstance(topo_raw, Mapping):
        raise ConfigError("topology: expected a mapping")
    try:
        topology = build_from_description(topo_raw, space)
    except (TopologyError, KeyError, TypeError) as exc:
        raise ConfigError(f"topology: {exc}") from exc
    wl_raw = raw.get("workload", {"kind": "suite"})
    if not isinstance(wl_raw, Mapping):
        raise ConfigError("workload: expected a mapping")
    workloads, wl_res = _workloads(wl_raw, topology.n_cores, base)
    for wl in workloads:
        if wl.n_cores > topology.n_cores:
            raise ConfigError(f"workload {wl.name!r} uses {wl.n_cores} cores, topology has {topology.n_cores}")

    obj_raw = dict(raw.get("objective") or {})
    bad = set(obj_raw) - {"alpha", "n_seeds", "seed"}
    if bad:
        raise ConfigError(f"objective: unknown keys {sorted(bad)}")
    obj = {"alpha": float(obj_raw.get("alpha", 0.0)), "n_seeds": int(obj_raw.get("n_seeds", 1)),
           "seed": int(obj_raw.get("seed", 0))}
    if obj["alpha"] < 0 or obj["n_seeds"] < 1:
        raise ConfigError("objective: alpha must be >= 0 and n_seeds >= 1")
    sim_raw = dict(raw.get("sim") or {})
    bad = set(sim_raw) - {"max_cycles", "deadlock_window"}
    if bad:
        raise ConfigError(f"sim: unknown keys {sorted(bad)}")
    sim = {"max_cycles": int(sim_raw.get("max_cycles", DEFAULT_MAX_CYCLES)),
           "deadlock_window": int(sim_raw.get("deadlock_window", DEFAULT_DEADLOCK_WINDOW))}

    points_raw = raw.get("points") or {}
    if not isinstance(points_raw, Mapping):
        raise ConfigError("points: expected a mapping of name to parameter values")
    topo_res = {k: copy.deepcopy(v) for k, v in topo_raw.items()}
    resolved = {"name": str(raw.get("name", "experiment")), "space": space_res, "topology": topo_res,
                "workload": wl_res, "objective": obj, "sim": sim, "points": {}}
    cfg = Config(resolved["name"], resolved, space, topology, workloads, source)
    for pname, values in points_raw.items():
        if isinstance(values, list):
            if len(values) != len(space):
                raise ConfigError(f"points.{pname}: expected {len(space)} values, got {len(values)}")
            values = dict(zip(space.names, values))
        if not isinstance(values, Mapping):
            raise ConfigError(f"points.{pname}: expected a mapping or list")
        try:
            y = cfg.point_from_mapping(values)
        except PointError as exc:
            raise ConfigError(f"points.{pname}: {exc}") from exc
        resolved["points"][str(pname)] = dict(zip(space.names, map(float, y)))
    return cfg


def load_config(path: str | Path) -> Config:
    """Parse a YAML file. A name without a path separator that is not an
    existing file is looked up among the bundled configs."""
    p = Path(path)
    if not p.exists() and p.parent == Path(".") and not p.suffix:
        p = Path(str(resources.files("ergodic_dse") / "configs" / f"{path}.yaml"))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        raise ConfigError(f"{p}:{where} {getattr(exc, 'problem', exc)}") from exc
    return from_dict(raw, str(p), base=p.parent)


def bundled_configs() -> list[str]:
    root = resources.files("ergodic_dse") / "configs"
    return sorted(Path(str(f)).stem for f in root.iterdir() if str(f).endswith(".yaml"))
