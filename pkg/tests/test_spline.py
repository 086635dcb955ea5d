import numpy as np
import pytest
from hypothesis import given, strategies as st

from nsgafo.spline import (
    DEGREE,
    BoundaryConditions,
    JointTrajectory,
    KeyPointSeries,
    SplineError,
    basis_functions,
    build_knots,
    collocation_system,
    find_spans,
    interpolate,
)
from nsgafo.robot import load_task, time_vector
from oracles import basis_recursive

PLAN_A = time_vector([2.01, 1.76, 2.02, 0.74, 2.32, 1.63])
TABLE2 = load_task("table2").key_points

times_strategy = st.lists(st.floats(0.5, 10.0), min_size=1, max_size=8).map(lambda d: time_vector(d))


def test_knot_counts():
    k = build_knots([0.0, 1.0])
    assert len(k) == 15 and len(k) - DEGREE - 1 == 8
    assert np.all(k[:7] == 0) and np.all(k[-7:] == 1)
    k = build_knots(PLAN_A)
    assert len(k) == 20 and len(k) - DEGREE - 1 == 13
    assert np.all(k[:7] == 0) and np.all(k[-7:] == PLAN_A[-1])
    assert set(PLAN_A[1:-1]) <= set(k[7:-7])


def test_auxiliary_knot_at_longest_span_midpoint():
    k = build_knots([0.0, 1.0, 4.0, 5.0])
    assert k[7:-7].tolist() == [1.0, 2.5, 4.0]


@given(st.lists(st.integers(1, 40), min_size=1, max_size=8), st.integers(-64, 64))
def test_knots_shift_with_times(steps, shift):
    # quarter-second grid: every shifted value and midpoint is exact
    t = np.concatenate([[0.0], np.cumsum(steps) / 4.0])
    assert np.array_equal(build_knots(t + shift), build_knots(t) + shift)


@given(times_strategy)
def test_knots_valid(t):
    k = build_knots(t)
    assert len(k) == len(t) + 13
    assert np.all(np.diff(k) >= 0)


@pytest.mark.parametrize("bad", [[0.0], [0.0, 0.0], [1.0, 0.5], [0.0, np.nan]])
def test_bad_times_rejected(bad):
    with pytest.raises(ValueError):
        build_knots(bad)


def test_basis_matches_recursive_definition(rng):
    k = build_knots(PLAN_A)
    x = np.concatenate([rng.uniform(0, PLAN_A[-1], 60), PLAN_A])
    span = find_spans(k, DEGREE, x)
    levels = basis_functions(k, DEGREE, x, span)
    for q in range(DEGREE + 1):
        for row, (xi, s) in enumerate(zip(x, span)):
            for a in range(q + 1):
                want = basis_recursive(s - q + a, q, xi, k)
                assert levels[q][row, a] == pytest.approx(want, abs=1e-13)


def test_partition_of_unity(rng):
    k = build_knots(PLAN_A)
    x = rng.uniform(0, PLAN_A[-1], 1000)
    N = basis_functions(k, DEGREE, x, find_spans(k, DEGREE, x))[DEGREE]
    assert np.all(np.abs(N.sum(axis=1) - 1.0) <= 1e-12)


def test_constant_data_gives_zero_derivatives(rng):
    traj = interpolate([0.0, 3.0], [12.5, 12.5])
    t = rng.uniform(0, 3, 100)
    assert np.allclose(traj.evaluate(t, 0), 12.5, rtol=1e-14, atol=0)
    for order in (1, 2, 3):
        assert np.all(traj.evaluate(t, order) == 0.0)


def test_table2_columns_pass_through_on_plan_a():
    traj = interpolate(PLAN_A, TABLE2)
    q = traj.evaluate(PLAN_A, 0)
    assert np.max(np.abs(q - TABLE2)) <= 1e-9 * max(1.0, np.abs(TABLE2).max())
    for t in (PLAN_A[0], PLAN_A[-1]):
        for order in (1, 2, 3):
            assert np.all(np.abs(traj.evaluate(t, order)) <= 1e-6)


def test_joint_one_column_alone():
    traj = KeyPointSeries(PLAN_A, TABLE2[:, 0]).interpolate()
    assert np.max(np.abs(traj.evaluate(PLAN_A) - TABLE2[:, 0])) <= 1e-9 * 84.13


def test_nonzero_boundary_conditions():
    bc = BoundaryConditions(v_start=2.0, v_end=-1.0, a_start=0.5, a_end=0.25, j_start=-0.1, j_end=0.3)
    traj = interpolate(PLAN_A, TABLE2[:, 1], bc)
    start = [traj.evaluate(PLAN_A[0], r) for r in (1, 2, 3)]
    end = [traj.evaluate(PLAN_A[-1], r) for r in (1, 2, 3)]
    assert np.allclose(start, [2.0, 0.5, -0.1], atol=1e-6)
    assert np.allclose(end, [-1.0, 0.25, 0.3], atol=1e-6)


def test_per_joint_boundary_vectors():
    bc = BoundaryConditions(v_start=np.arange(6.0))
    traj = interpolate(PLAN_A, TABLE2, bc)
    assert np.allclose(traj.evaluate(0.0, 1), np.arange(6.0), atol=1e-6)


@given(times_strategy.filter(lambda t: len(t) >= 3), st.integers(0, 2**32))
def test_linear_system_residual(t, seed):
    q = np.random.default_rng(seed).uniform(-100, 100, len(t))
    A, knots = collocation_system(t)
    traj = interpolate(t, q)
    rhs = np.concatenate([q, np.zeros(6)])
    resid = A @ traj.controls - rhs
    assert np.max(np.abs(resid)) <= 1e-10 * max(1.0, np.abs(q).max())
    assert A.shape == (len(t) + 6, len(t) + 6)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_match_central_differences(order, rng):
    traj = interpolate(PLAN_A, TABLE2)
    h = 1e-5
    t = rng.uniform(PLAN_A[0] + 1e-3, PLAN_A[-1] - 1e-3, 100)
    fd = (traj.evaluate(t + h, order - 1) - traj.evaluate(t - h, order - 1)) / (2 * h)
    exact = traj.evaluate(t, order)
    # relative error, floored at 1e-3 of the peak so zero crossings do not blow up
    scale = np.maximum(np.abs(exact), 1e-3 * np.abs(exact).max(axis=0))
    assert np.all(np.abs(fd - exact) <= 1e-4 * scale)


def test_evaluate_all_matches_single_orders(rng):
    traj = interpolate(PLAN_A, TABLE2)
    t = rng.uniform(0, PLAN_A[-1], 30)
    for r, values in enumerate(traj.evaluate_all(t)):
        assert np.array_equal(values, traj.evaluate(t, r))


def test_local_support(rng):
    traj = interpolate(PLAN_A, TABLE2[:, 0])
    j = 6
    bumped = traj.controls.copy()
    bumped[j] += 10.0
    other = JointTrajectory(traj.knots, bumped)
    lo, hi = traj.knots[j], traj.knots[j + DEGREE + 1]
    t = np.linspace(0, PLAN_A[-1], 2001)
    diff = np.abs(other.evaluate(t) - traj.evaluate(t))
    outside = (t < lo) | (t > hi)
    assert np.all(diff[outside] == 0.0)
    assert diff[~outside].max() > 0


def test_continuity_at_interior_knots():
    traj = interpolate(PLAN_A, TABLE2[:, 2])
    for x in np.unique(traj.knots[7:-7]):
        for order in range(4):
            left = traj.evaluate(x - 1e-9, order)
            right = traj.evaluate(x + 1e-9, order)
            assert left == pytest.approx(right, rel=1e-5, abs=1e-5)


def test_domain_checked():
    traj = interpolate(PLAN_A, TABLE2)
    with pytest.raises(ValueError):
        traj.evaluate(-0.01)
    with pytest.raises(ValueError):
        traj.evaluate(PLAN_A[-1] + 0.01, 1)
    with pytest.raises(ValueError):
        traj.evaluate(1.0, 4)
    assert traj.evaluate(PLAN_A[-1]).shape == (6,)


def test_ill_conditioned_system_reported():
    with pytest.raises(SplineError, match="condition number"):
        interpolate([0.0, 1e-6, 1.0], [0.0, 1.0, 2.0])


def test_mismatched_values_rejected():
    with pytest.raises(ValueError):
        interpolate([0.0, 1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        JointTrajectory(np.zeros(10), np.zeros(5))
