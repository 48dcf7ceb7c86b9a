import random

import numpy as np
import pytest

from ergodic_dse.characterize import LineScan, estimate_error, random_line, scan_line
from ergodic_dse.objective import ObjectiveSpec, evaluate
from ergodic_dse.space import ParameterSpace, ParameterSpec, PointError
from ergodic_dse.topology import build_chain
from ergodic_dse.workload import serial_chain_workload

K = 1000


def _chain_spec(n_jobs=K):
    space = ParameterSpace([ParameterSpec("D(s1)", "delay", 1, 4), ParameterSpec("L(w1)", "latency", 1, 4)])
    return ObjectiveSpec(build_chain(1, space), [serial_chain_workload(n_jobs)])


def test_estimate_error_zero_at_integer_point():
    mean, std, rel = estimate_error([2, 3], 3, _chain_spec(50))
    assert std == 0 and rel == 0
    assert mean == evaluate([2, 3], _chain_spec(50)).objective


def test_estimate_error_positive_at_fractional_point():
    mean, std, rel = estimate_error([2.5, 1], 5, _chain_spec(200))
    assert std > 0 and rel == std / mean


def test_estimate_error_needs_two_seeds():
    with pytest.raises(ValueError):
        estimate_error([2, 2], 1, _chain_spec(10))


def test_random_line_in_box_and_reproducible(tiny4):
    a, b = random_line(tiny4.space, random.Random(3))
    a2, b2 = random_line(tiny4.space, random.Random(3))
    assert np.array_equal(a, a2) and np.array_equal(b, b2)
    assert not np.array_equal(a, b)
    for p in (a, b):
        assert np.all(p >= tiny4.space.lower) and np.all(p <= tiny4.space.upper)


def test_random_line_one_dimensional():
    space = ParameterSpace([ParameterSpec("D(s1)", "delay", 1, 4)])
    a, b = random_line(space, random.Random(0))
    assert a.shape == (1,) and 1 <= a[0] <= 4 and a[0] != b[0]


def test_random_line_degenerate_box():
    with pytest.raises(ValueError):
        random_line(ParameterSpace([ParameterSpec("D(s1)", "delay", 2, 2)]), random.Random(0))


def test_scan_rejects_bad_input():
    spec = _chain_spec(10)
    with pytest.raises(PointError):
        scan_line([2, 2], [2, 2], spec)
    with pytest.raises(ValueError):
        scan_line([1, 1], [2, 2], spec, n_points=1)
    with pytest.raises(PointError):
        scan_line([0, 1], [2, 2], spec)


def test_scan_shape_and_csv():
    scan = scan_line([1, 1], [3, 2], _chain_spec(30), n_points=5, seeds_per_point=2, line_id=4)
    assert isinstance(scan, LineScan) and scan.n_points == 5
    np.testing.assert_allclose(scan.points[2], [2, 1.5])
    lines = scan.to_csv().splitlines()
    assert lines[0] == "line_id,point_index,t,D(s1),L(w1),mean,std_dev,rel_stderr,n_seeds"
    assert len(lines) == 6 and lines[1].startswith("4,0,0.0,")


def test_scan_lattice_crossings_are_exact():
    spec = _chain_spec(100)
    scan = scan_line([1, 1], [4, 4], spec, n_points=4, seeds_per_point=3)
    assert np.all(scan.std == 0)
    for p, m in zip(scan.points, scan.mean):
        assert m == evaluate(p, spec).objective


def test_scan_independent_of_parallelism():
    spec = _chain_spec(50)
    a = scan_line([1, 1], [4, 2.5], spec, n_points=6, seeds_per_point=2)
    b = scan_line([1, 1], [4, 2.5], spec, n_points=6, seeds_per_point=2, parallel=2)
    assert a.to_csv() == b.to_csv()


def test_affine_sweep_matches_expected_interpolation():
    # t = K (D + L) + 1 at integer D; a fractional D averages within a few
    # binomial standard errors of the linear interpolant.
    spec = _chain_spec()
    n_seeds = 5
    scan = scan_line([2, 1], [3, 1], spec, n_points=9, seeds_per_point=n_seeds)
    for d, m in zip(scan.points[:, 0], scan.mean):
        p = d - np.floor(d)
        expected = K * (d + 1) + 1
        sigma = np.sqrt(K * p * (1 - p) / n_seeds)
        assert abs(m - expected) <= 4 * sigma


def test_jump_fraction_on_reference_lines(tiny4):
    # measured on this fixture: no adjacent pair differs by five pooled
    # standard errors, and a handful do at three
    spec = tiny4.objective_spec()
    a, b = random_line(tiny4.space, random.Random(7))
    scan = scan_line(a, b, spec, n_points=40, seeds_per_point=5)
    assert scan.jump_fraction() == 0.0
    assert 0.0 < scan.jump_fraction(3.0) <= 0.1
    assert np.max(scan.rel_stderr) < 0.01


def test_jump_fraction_detects_a_step():
    space = ParameterSpace([ParameterSpec("D(s1)", "delay", 1, 4)])
    t = np.linspace(0, 1, 5)
    scan = LineScan(0, np.array([1.0]), np.array([4.0]), space, 4, t, t[:, None],
                    np.array([10.0, 10.0, 50.0, 50.0, 50.0]), np.ones(5))
    assert scan.jump_fraction() == 0.25
