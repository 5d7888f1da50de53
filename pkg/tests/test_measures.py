import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvgof.errors import EmptySample, NonFiniteInput, SizeMismatch
from mvgof.measures import EmpiricalMeasure, moment, wasserstein2
from mvgof.oracle import w2_bruteforce


def test_from_samples_sorts():
    mu = EmpiricalMeasure.from_samples([3, 1, 2])
    assert mu.samples.tolist() == [1, 2, 3]
    assert mu.size == 3


def test_singleton_and_coincident_atoms():
    assert EmpiricalMeasure.from_samples([5]).samples.tolist() == [5]
    mu = EmpiricalMeasure.from_samples([0, 0, 0])
    assert mu.size == 3


def test_input_order_irrelevant():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=50)
    a = EmpiricalMeasure.from_samples(vals)
    b = EmpiricalMeasure.from_samples(vals[::-1])
    np.testing.assert_array_equal(a.samples, b.samples)


def test_construction_errors():
    with pytest.raises(EmptySample):
        EmpiricalMeasure.from_samples([])
    with pytest.raises(NonFiniteInput):
        EmpiricalMeasure.from_samples([1.0, np.nan])
    with pytest.raises(NonFiniteInput):
        EmpiricalMeasure.from_samples([np.inf])


def test_w2_identical_is_zero():
    mu = EmpiricalMeasure.from_samples([1.0, 2.5, -3.0])
    assert wasserstein2(mu, mu) == 0.0


def test_w2_point_masses():
    a = EmpiricalMeasure.from_samples([1.5])
    b = EmpiricalMeasure.from_samples([-2.0])
    assert wasserstein2(a, b) == pytest.approx(3.5)


def test_w2_two_atoms_frozen():
    # brute-force assignment: pairing (0,0.5),(1,2) gives (0.25+1)/2
    mu = EmpiricalMeasure.from_samples([0.0, 1.0])
    nu = EmpiricalMeasure.from_samples([0.5, 2.0])
    assert wasserstein2(mu, nu) == pytest.approx(np.sqrt(0.625), abs=1e-15)


def test_w2_size_mismatch():
    with pytest.raises(SizeMismatch):
        wasserstein2(
            EmpiricalMeasure.from_samples([1]),
            EmpiricalMeasure.from_samples([1, 2]),
        )


def test_moment_arithmetic():
    mu = EmpiricalMeasure.from_samples([1, 2, 3])
    assert moment(mu, 2) == pytest.approx(14 / 3)
    zero = EmpiricalMeasure.from_samples([0.0, 0.0])
    assert moment(zero, 1) == 0.0


def test_moment_gaussian_monte_carlo():
    rng = np.random.default_rng(123)
    mu = EmpiricalMeasure.from_samples(rng.standard_normal(100_000))
    assert moment(mu, 2) == pytest.approx(1.0, abs=0.02)


@st.composite
def measures(draw, size):
    vals = draw(
        st.lists(
            st.floats(-100, 100, allow_nan=False),
            min_size=size,
            max_size=size,
        )
    )
    return EmpiricalMeasure.from_samples(vals)


@given(st.integers(2, 12).flatmap(lambda n: st.tuples(measures(n), measures(n), measures(n))))
@settings(max_examples=50, deadline=None)
def test_triangle_inequality(trip):
    mu, nu, rho = trip
    assert wasserstein2(mu, rho) <= wasserstein2(mu, nu) + wasserstein2(nu, rho) + 1e-12


@given(
    st.integers(2, 12).flatmap(lambda n: st.tuples(measures(n), measures(n))),
    st.floats(-50, 50, allow_nan=False),
)
@settings(max_examples=50, deadline=None)
def test_translation_invariance(pair, c):
    mu, nu = pair
    mu_c = EmpiricalMeasure.from_samples(mu.samples + c)
    nu_c = EmpiricalMeasure.from_samples(nu.samples + c)
    assert abs(wasserstein2(mu_c, nu_c) - wasserstein2(mu, nu)) <= 1e-12


def test_sorted_coupling_is_optimal():
    rng = np.random.default_rng(7)
    for _ in range(30):
        size = int(rng.integers(1, 9))
        mu = EmpiricalMeasure.from_samples(rng.normal(size=size))
        nu = EmpiricalMeasure.from_samples(rng.normal(size=size))
        assert wasserstein2(mu, nu) == pytest.approx(
            w2_bruteforce(mu, nu), abs=1e-12
        )
