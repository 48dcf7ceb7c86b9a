import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodic_dse.objective import ObjectiveSpec, exhaustive_table
from ergodic_dse.optimize import (OptimizerConfig, RunResult, SAConfig, anneal_campaign, local_minimize,
                                  multi_start, parameter_report, random_start, round_to_discrete,
                                  simulated_annealing, summarize, tradeoff_points)
from ergodic_dse.space import ParameterSpace, ParameterSpec
from ergodic_dse.topology import build_chain
from ergodic_dse.workload import serial_chain_workload


def sphere(c):
    return lambda x: float(np.sum((np.asarray(x) - c) ** 2))


def rosenbrock(x):
    x = np.asarray(x)
    return float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


# the default trust-region floor sits above simulation noise; smooth analytic
# functions can be resolved further
ANALYTIC = OptimizerConfig(max_evals=300, rho_end=1e-3)


def _counted(f):
    calls = []

    def g(x):
        calls.append(np.array(x, dtype=float))
        return f(x)
    return g, calls


@pytest.mark.parametrize("n", [2, 5, 12])
def test_sphere_reaches_optimum(n):
    rng = np.random.default_rng(n)
    c = rng.uniform(-1, 1, n)
    lo, hi = -2 * np.ones(n), 2 * np.ones(n)
    res = local_minimize(sphere(c), lo, hi, rng.uniform(-2, 2, n), ANALYTIC)
    assert res.n_evals <= 300 and res.best_f <= 1e-3


@pytest.mark.parametrize("n", [2, 5, 12])
def test_sphere_with_active_bounds(n):
    c = np.full(n, 3.0)  # optimum outside the box: the corner at 2 is the constrained optimum
    lo, hi = -2 * np.ones(n), 2 * np.ones(n)
    res = local_minimize(sphere(c), lo, hi, np.zeros(n), ANALYTIC)
    assert res.best_f - n * 1.0 <= 1e-3


@pytest.mark.xfail(strict=True, reason="linear-model trust region cannot resolve the curved valley to 1e-3 in 300 evals")
@pytest.mark.parametrize("n", [2, 5, 12])
def test_rosenbrock_reaches_optimum(n):
    rng = np.random.default_rng(n)
    lo, hi = -2 * np.ones(n), 2 * np.ones(n)
    res = local_minimize(rosenbrock, lo, hi, rng.uniform(-2, 2, n), ANALYTIC)
    assert res.best_f <= 1e-3


def test_convex_quadratic_in_100_evals():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(5, 5))
    h = a @ a.T + np.eye(5)
    c = rng.uniform(0.5, 3.5, 5)
    f = lambda x: float((np.asarray(x) - c) @ h @ (np.asarray(x) - c))
    res = local_minimize(f, np.zeros(5), 4 * np.ones(5), np.full(5, 2.0), OptimizerConfig(max_evals=100))
    assert res.n_evals <= 100 and res.best_f <= 1e-2


@given(st.integers(1, 6), st.integers(1, 80), st.integers(0, 2**31))
@settings(max_examples=40, deadline=None)
def test_budget_feasibility_and_best_seen(n, budget, seed):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(-5, 0, n)
    hi = lo + rng.uniform(0.5, 5, n)
    x0 = lo + rng.uniform(0, 1, n) * (hi - lo)
    c = rng.uniform(-6, 6, n)
    f, calls = _counted(lambda x: float(np.sum(np.abs(np.asarray(x) - c) ** 1.5) + np.sin(5 * np.sum(x))))
    res = local_minimize(f, lo, hi, x0, OptimizerConfig(max_evals=budget))
    assert len(calls) == res.n_evals <= budget
    for x in calls:
        assert np.all(x >= lo) and np.all(x <= hi)
    assert np.all(np.diff(res.best_so_far) <= 0)
    assert res.best_f == min(res.history)


def test_start_on_a_corner_stays_in_box():
    f, calls = _counted(sphere(np.array([5.0, -5.0, 0.0])))
    lo, hi = np.zeros(3), np.ones(3)
    res = local_minimize(f, lo, hi, hi.copy(), OptimizerConfig(max_evals=60))
    assert all(np.all(x >= lo) and np.all(x <= hi) for x in calls)
    np.testing.assert_allclose(res.best_x, [1, 0, 0], atol=1e-2)


def test_budget_smaller_than_simplex():
    res = local_minimize(sphere(np.zeros(5)), -np.ones(5), np.ones(5), np.full(5, 0.5), OptimizerConfig(max_evals=3))
    assert res.status == "budget_before_simplex" and res.n_evals == 3
    assert res.best_f == min(res.history)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        OptimizerConfig(rho_begin=0.1, rho_end=0.2)
    with pytest.raises(ValueError):
        OptimizerConfig(max_evals=0)
    with pytest.raises(ValueError):
        local_minimize(sphere(0), [0, 0], [1, 1], [2, 0])
    with pytest.raises(ValueError):
        local_minimize(sphere(0), [0, 0], [1, 1], [0.5])


def test_degenerate_dimension_is_held_fixed():
    f, calls = _counted(sphere(np.array([0.3, 7.0])))
    local_minimize(f, [0, 2], [1, 2], [0.9, 2], OptimizerConfig(max_evals=40))
    assert all(x[1] == 2 for x in calls)


# rounding -------------------------------------------------------------------

def test_rounding_integer_point_single_eval():
    f, calls = _counted(lambda x: float(sum(x)))
    x, fx, n = round_to_discrete([2, 3, 1], f)
    assert x == [2, 3, 1] and n == 1 and len(calls) == 1


def test_rounding_one_fractional_coordinate():
    f, calls = _counted(lambda x: float((x[0] - 3) ** 2 + x[1]))
    x, fx, n = round_to_discrete([2.4, 1], f)
    assert n == 2 and len(calls) == 2 and x == [3, 1] and fx == 1


def test_rounding_many_fractional_coordinates_is_capped():
    f, calls = _counted(lambda x: float(sum(x)))
    y = np.full(13, 1.5)
    x, fx, n = round_to_discrete(y, f, seed=4)
    assert n == 25 and len(calls) == 25
    assert len({tuple(map(int, c)) for c in calls}) == 25
    assert tuple(calls[0]) == tuple([2] * 13)


@given(st.lists(st.floats(0, 5), min_size=1, max_size=6), st.integers(0, 1000))
def test_rounding_returns_best_corner(y, salt):
    rng = np.random.default_rng(salt)
    table = {}

    def f(x):
        key = tuple(x)
        if key not in table:
            table[key] = float(rng.normal())
        return table[key]
    x, fx, n = round_to_discrete(y, f, [0] * len(y), [5] * len(y))
    assert fx == min(table.values()) and n == len(table)
    assert all(np.floor(v) <= xi <= np.ceil(v) for v, xi in zip(y, x))


# annealing ------------------------------------------------------------------

def bumpy(x):
    a, b = x
    return float((a - 11) ** 2 + (b - 4) ** 2 + 6 * np.cos(2 * a) * np.cos(1.5 * b) + 0.1 * a)


def test_sa_deterministic_given_seed():
    r1 = simulated_annealing(bumpy, [0, 0], [15, 15], SAConfig(max_evals=200), seed=5)
    r2 = simulated_annealing(bumpy, [0, 0], [15, 15], SAConfig(max_evals=200), seed=5)
    r3 = simulated_annealing(bumpy, [0, 0], [15, 15], SAConfig(max_evals=200), seed=6)
    assert r1.history == r2.history and r1.points == r2.points
    assert r1.history != r3.history


def test_sa_budget_and_lattice_feasibility():
    f, calls = _counted(bumpy)
    res = simulated_annealing(f, [0, 0], [15, 15], SAConfig(max_evals=321), seed=1)
    assert len(calls) == res.n_evals == 321
    for x in calls:
        assert np.all(x == np.round(x)) and np.all(x >= 0) and np.all(x <= 15)
    assert res.best_f == min(res.history)


def test_sa_zero_temperature_never_accepts_worse():
    res = simulated_annealing(bumpy, [0, 0], [15, 15], SAConfig(max_evals=300, t_initial=0.0), seed=2)
    assert res.extra["worse_accepted"] == 0 and res.extra["accepted"] > 0


def test_sa_finds_lattice_optimum():
    grid = [(a, b) for a in range(16) for b in range(16)]
    opt = min(bumpy(p) for p in grid)
    hits = sum(simulated_annealing(bumpy, [0, 0], [15, 15], SAConfig(), seed=s).best_f == opt for s in range(10))
    assert hits >= 9


def test_sa_config_validation():
    with pytest.raises(ValueError):
        SAConfig(max_evals=0)
    with pytest.raises(ValueError):
        SAConfig(jump_prob=1.5)


# campaigns ------------------------------------------------------------------

def _fragile_spec():
    # long delays exceed the cycle cap, so some runs fail and others do not
    space = ParameterSpace([ParameterSpec("D(s1)", "delay", 1, 40), ParameterSpec("N(s1)", "throughput", 1, 4)])
    return ObjectiveSpec(build_chain(1, space), [serial_chain_workload(10)], max_cycles=150)


def _small_spec():
    space = ParameterSpace([ParameterSpec("D(s1)", "delay", 1, 6), ParameterSpec("C_inQ(s1)", "capacity", 1, 4)])
    return ObjectiveSpec(build_chain(1, space), [serial_chain_workload(30, dependent=False)])


def test_random_start_is_interior_and_seeded():
    space = _small_spec().space
    a, b = random_start(space, 1), random_start(space, 1)
    assert np.array_equal(a, b)
    assert np.all(a > space.lower) and np.all(a < space.upper)


def test_partial_failures_recorded_and_campaign_continues():
    runs = multi_start(_fragile_spec(), alphas=(0.0,), n_starts=8, config=OptimizerConfig(max_evals=15))
    status = [r.status for r in runs]
    assert len(runs) == 8 and "failed" in status and any(s != "failed" for s in status)
    for r in runs:
        if r.status == "failed":
            assert r.error and "cycle" in r.error
    summary = summarize(runs)[0]
    assert summary.n_failed == status.count("failed") and summary.n_runs == 8


def test_multi_start_improvement_and_rounding():
    spec = _small_spec()
    runs = multi_start(spec, alphas=(0.0, 10.0), n_starts=3, config=OptimizerConfig(max_evals=20))
    assert len(runs) == 6
    for r in runs:
        assert r.status != "failed" and r.improvement >= 1
        assert r.rounded_x is not None and all(isinstance(v, int) for v in r.rounded_x)
        assert r.extra["best_time"] + r.alpha * r.extra["best_cost"] == pytest.approx(r.best_f)
    table = exhaustive_table(spec)
    for r in runs:
        assert r.rounded_f >= table.optimum(r.alpha)[1]
    pts = tradeoff_points(runs)
    assert len(pts) == 6 and {p["alpha"] for p in pts} == {0.0, 10.0}
    s = summarize(runs)
    assert [x.alpha for x in s] == [0.0, 10.0]
    assert all(x.best <= x.mean <= x.worst and x.improvement_min >= 1 for x in s)


def test_campaigns_independent_of_parallelism():
    spec = _small_spec()
    cfg = OptimizerConfig(max_evals=12)
    a = multi_start(spec, alphas=(0.0, 5.0), n_starts=2, config=cfg, master_seed=3)
    b = multi_start(spec, alphas=(0.0, 5.0), n_starts=2, config=cfg, master_seed=3, parallel=2)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    c = multi_start(spec, alphas=(0.0, 5.0), n_starts=2, config=cfg, master_seed=4)
    assert [r.history for r in a] != [r.history for r in c]


def test_anneal_campaign_reaches_lattice_optimum():
    spec = _small_spec()
    runs = anneal_campaign(spec, alphas=(0.0, 10.0), n_runs=2, config=SAConfig(max_evals=60))
    table = exhaustive_table(spec)
    for r in runs:
        assert r.method == "sa" and r.rounded_f == r.best_f
        assert r.best_f == pytest.approx(table.optimum(r.alpha)[1])


def test_multi_start_needs_a_start():
    with pytest.raises(ValueError):
        multi_start(_small_spec(), n_starts=0)


def test_parameter_report():
    space = _small_spec().space
    rows = parameter_report(space, [2.5, 3.0], [3, 3])
    assert rows[0] == {"name": "D(s1)", "kind": "delay", "min": 1, "max": 6, "opt": 2.5, "rounded": 3}
    assert parameter_report(space, [2.5, 3.0])[1]["rounded"] is None


def test_run_result_properties():
    r = RunResult("r", "x", [0.0], [1.0], 2.0, [8.0, 4.0, 5.0, 2.0])
    assert r.improvement == 4.0 and list(r.best_so_far) == [8, 4, 4, 2] and r.f0 == 8.0
