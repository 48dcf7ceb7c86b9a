import pytest
import yaml

from ergodic_dse.space import ParameterSpace, ParameterSpec
from ergodic_dse.topology import (NUMA_DEFAULTS, TopologyError, build_chain, build_from_description,
                                  build_numa_system, characterization_space, table_ii_optimum, table_ii_space,
                                  topology_from_dict, topology_to_dict)

# name -> (kind, min, max) transcribed from the design-parameter table
EXPECTED_RANGES = {
    "N(L1I)": ("throughput", 1, 4), "N(L1D)": ("throughput", 1, 4), "N(L2)": ("throughput", 1, 4),
    "N(L3)": ("throughput", 1, 4), "N(mem)": ("throughput", 1, 4),
    "D(L1I)": ("delay", 1, 4), "D(L1D)": ("delay", 1, 4), "D(L2)": ("delay", 8, 16), "D(L3)": ("delay", 16, 32),
    "D(mem)": ("delay", 64, 128),
    "L(X1)": ("latency", 1, 4), "C_inQ(X1)": ("capacity", 1, 4), "C_outQ(X1)": ("capacity", 1, 4),
    "L(X2)": ("latency", 4, 8), "C_inQ(X2)": ("capacity", 1, 4), "C_outQ(X2)": ("capacity", 1, 4),
    "C_inQ(L1I)": ("capacity", 1, 4), "C_inQ(L1D)": ("capacity", 1, 4), "C_inQ(L2)": ("capacity", 1, 16),
    "C_inQ(L3)": ("capacity", 1, 16), "C_inQ(mem)": ("capacity", 1, 32),
    "C_outQ(L1I)": ("capacity", 1, 4), "C_outQ(L1D)": ("capacity", 1, 4), "C_outQ(L2)": ("capacity", 2, 16),
    "C_outQ(L3)": ("capacity", 4, 16), "C_outQ(mem)": ("capacity", 4, 32),
    "C_inQ(X3)": ("capacity", 1, 8), "L(X3_local)": ("latency", 16, 64), "L(X3_remote)": ("latency", 32, 64),
    "C_outQ(X3_local)": ("capacity", 1, 16), "C_outQ(X3_remote)": ("capacity", 1, 16),
}


@pytest.fixture(scope="module")
def numa24():
    return build_numa_system(2, 4, table_ii_space())


def test_table_ii_space_matches_table():
    sp = table_ii_space()
    assert len(sp) == 31
    assert {s.name: (s.kind, s.lower, s.upper) for s in sp} == EXPECTED_RANGES
    assert sum(s.is_delay for s in sp) == 9


def test_builder_binds_exactly_31_parameters(numa24):
    assert numa24.bound_names() == set(EXPECTED_RANGES)
    assert numa24.fixed == ()
    assert numa24.n_cores == 8


def test_numa_component_counts(numa24):
    assert sum(m.role == "cache" for m in numa24.modules) == 8 * 3 + 2
    assert sum(m.role == "memory" for m in numa24.modules) == 2
    assert (len(numa24.queues), len(numa24.modules), len(numa24.wires)) == (194, 66, 94)


def test_every_binding_of_a_name_has_that_names_kind(numa24):
    kinds = {s.name: s.kind for s in numa24.space}
    field_kind = {"C": "capacity", "N": "throughput", "L": "latency"}
    for cid, fld, b in numa24.bindings():
        if isinstance(b, str):
            expected = "delay" if fld.startswith("D[") else field_kind[fld]
            assert kinds[b] == expected, (cid, fld, b)


def test_optimum_column_is_inside_the_box():
    sp = table_ii_space()
    opt = table_ii_optimum()
    assert sp.contains(opt)
    assert dict(zip(sp.names, opt))["N(L1I)"] == 2.95
    assert dict(zip(sp.names, opt))["D(mem)"] == 80.61


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 1), (3, 2)])
def test_numa_shapes_build(m, n):
    topo = build_numa_system(m, n, characterization_space())
    assert topo.n_cores == m * n
    assert sum(mod.role == "memory" for mod in topo.modules) == m


def test_reduced_space_fills_fixed_defaults():
    topo = build_numa_system(1, 1, characterization_space())
    fixed = topo.fixed_map
    assert fixed["L(X1)"] == NUMA_DEFAULTS["L(X1)"]
    assert "N(L1I)" not in fixed  # bound through the N(L1) alias


def test_alias_conflicts_and_unknown_names():
    both = ParameterSpace([ParameterSpec("N(L1)", "throughput", 1, 4), ParameterSpec("N(L1I)", "throughput", 1, 4)])
    with pytest.raises(TopologyError, match="duplicate"):
        build_numa_system(1, 1, both)
    with pytest.raises(TopologyError, match="not recognised"):
        build_numa_system(1, 1, ParameterSpace([ParameterSpec("N(L9)", "throughput", 1, 4)]))
    with pytest.raises(TopologyError, match="kind"):
        build_numa_system(1, 1, ParameterSpace([ParameterSpec("N(L1)", "capacity", 1, 4)]))
    with pytest.raises(TopologyError):
        build_numa_system(0, 1, table_ii_space())
    with pytest.raises(TopologyError):
        build_numa_system(1, 1, ParameterSpace([]), fixed={"Q": 1})


def test_chain_validation():
    with pytest.raises(TopologyError):
        build_chain(0, ParameterSpace([]))
    topo = build_chain(2, ParameterSpace([ParameterSpec("D(s2)", "delay", 1, 9)]))
    assert [m.id for m in topo.modules] == ["s1", "s2"]
    assert topo.fixed_map["D(s1)"] == 1


@pytest.mark.parametrize("builder", [
    lambda: build_numa_system(2, 4, table_ii_space()),
    lambda: build_numa_system(1, 2, characterization_space()),
    lambda: build_chain(3, ParameterSpace([ParameterSpec("L(w2)", "latency", 1, 5)])),
])
def test_round_trip_through_config_text(builder):
    topo = builder()
    text = yaml.safe_dump(topology_to_dict(topo), sort_keys=True)
    assert topology_from_dict(yaml.safe_load(text)) == topo


def test_graph_description():
    topo = build_chain(1, ParameterSpace([ParameterSpec("D(s1)", "delay", 1, 4)]))
    again = build_from_description({"kind": "graph", "graph": topology_to_dict(topo)}, topo.space)
    assert again == topo
    with pytest.raises(TopologyError):
        build_from_description({"kind": "ring"}, topo.space)


def test_validation_catches_broken_graphs():
    topo = build_chain(1, ParameterSpace([]))
    d = topology_to_dict(topo)
    d["wires"][0]["dst"] = "nowhere"
    with pytest.raises(TopologyError, match="unknown"):
        topology_from_dict(d)
    d = topology_to_dict(topo)
    d["wires"].append({"id": "extra", "latency": 1, "src": "s1.out", "dst": "sink"})
    with pytest.raises(TopologyError, match="consumed by both"):
        topology_from_dict(d)
    d = topology_to_dict(topo)
    d["space"] = [{"name": "X", "kind": "delay", "min": 1, "max": 2}]
    with pytest.raises(TopologyError, match="not bound"):
        topology_from_dict(d)
    d = topology_to_dict(topo)
    d["queues"].append({"id": "orphan", "capacity": 2})
    with pytest.raises(TopologyError, match="no consumer"):
        topology_from_dict(d)
    d = topology_to_dict(topo)
    del d["queues"]
    with pytest.raises(TopologyError, match="missing"):
        topology_from_dict(d)
