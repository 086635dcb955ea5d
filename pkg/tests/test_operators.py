import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from nsgafo.core import polynomial_mutation, sbx_crossover

bounded = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        arrays(float, n, elements=st.floats(0.0, 1.0)),
        arrays(float, n, elements=st.floats(0.0, 1.0)),
        arrays(float, n, elements=st.floats(0.01, 20.0)),
        st.floats(0.0, 100.0),
        st.integers(0, 2**32),
    )
)


@given(bounded)
def test_sbx_children_in_bounds_and_mean_preserved(case):
    fa, fb, width, eta, seed = case
    lo = np.zeros_like(width)
    hi = width
    a, b = fa * width, fb * width
    c1, c2 = sbx_crossover(a, b, lo, hi, eta, np.random.default_rng(seed))
    assert np.all((lo <= c1) & (c1 <= hi) & (lo <= c2) & (c2 <= hi))
    # nonnegative domain: the children's midpoint is the parents' midpoint bit for bit
    assert np.array_equal((c1 + c2) / 2, (a + b) / 2)


def test_sbx_in_bounds_over_many_trials(rng):
    lo = np.array([-5.0, 0.0, 2.0, -1.0])
    hi = np.array([5.0, 1.0, 40.0, -0.5])
    for _ in range(10_000):
        a = rng.uniform(lo, hi)
        b = rng.uniform(lo, hi)
        c1, c2 = sbx_crossover(a, b, lo, hi, 15.0, rng)
        assert np.all((lo <= c1) & (c1 <= hi) & (lo <= c2) & (c2 <= hi))
        # across zero the complement is not always representable
        assert np.allclose((c1 + c2) / 2, (a + b) / 2, rtol=0, atol=1e-14)


@pytest.mark.parametrize("eta", [0.0, 5.0, 1e6])
def test_sbx_fixed_point(eta, rng):
    a = rng.random(7)
    c1, c2 = sbx_crossover(a, a.copy(), np.zeros(7), np.ones(7), eta, rng)
    assert np.array_equal(c1, a) and np.array_equal(c2, a)


def test_sbx_large_eta_keeps_children_at_parents(rng):
    a, b = rng.random(20), rng.random(20)
    c1, c2 = sbx_crossover(a, b, np.zeros(20), np.ones(20), 1e9, rng)
    pair = np.sort(np.stack([a, b]), axis=0)
    kids = np.sort(np.stack([c1, c2]), axis=0)
    assert np.allclose(kids, pair, atol=1e-6)


def test_sbx_consumes_fixed_draws():
    r1, r2 = np.random.default_rng(3), np.random.default_rng(3)
    sbx_crossover(np.zeros(5), np.ones(5), np.zeros(5), np.ones(5), 20, r1)
    r2.random(15)
    assert r1.random() == r2.random()


def test_mutation_zero_probability_is_identity(rng):
    x = rng.random(9)
    y = polynomial_mutation(x, np.zeros(9), np.ones(9), 20.0, 0.0, rng)
    assert np.array_equal(x, y) and y is not x


def test_mutation_at_lower_bound_stays_in_bounds(rng):
    lo, hi = np.full(6, -2.0), np.full(6, 3.0)
    for _ in range(2000):
        y = polynomial_mutation(lo.copy(), lo, hi, rng.uniform(0, 50), 1.0, rng)
        assert np.all(y >= lo) and np.all(y <= hi)


@given(arrays(float, 6, elements=st.floats(0, 1)), st.floats(0, 1), st.floats(0, 80), st.integers(0, 2**32))
def test_mutation_in_bounds(x, prob, eta, seed):
    lo, hi = np.zeros(6), np.ones(6)
    y = polynomial_mutation(x, lo, hi, eta, prob, np.random.default_rng(seed))
    assert np.all((lo <= y) & (y <= hi))


def test_mutation_frequency_is_binomial():
    rng = np.random.default_rng(99)
    n_trials, prob = 100_000, 0.2
    x = np.full(1, 0.5)
    changed = 0
    for _ in range(n_trials):
        changed += polynomial_mutation(x, np.zeros(1), np.ones(1), 20.0, prob, rng)[0] != 0.5
    sigma = np.sqrt(n_trials * prob * (1 - prob))
    assert abs(changed - n_trials * prob) <= 3 * sigma
