import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuboid_spectra.core import DIRICHLET, NEUMANN, Cuboid, InvalidInputError, random_unit_cuboids
from cuboid_spectra.spectrum import (
    PI2,
    RieszSpec,
    aizenman_lieb_lift,
    counting_function,
    eigenvalue,
    eigenvalue_average,
    eigenvalue_sum,
    eigenvalues_upto,
    first_reduced_values,
    legendre_sum,
    lift_integral,
    riesz_mean,
)

from oracles import naive_values

Q2 = Cuboid((1.0, 1.0))
Q3 = Cuboid.cube(3)


def test_eigenvalue_examples():
    assert eigenvalue(Q2, DIRICHLET, 1) == pytest.approx(2 * PI2)
    for n in (2, 3, 5):
        assert eigenvalue(Cuboid.cube(n), NEUMANN, 1) == pytest.approx(PI2)
        assert eigenvalue(Cuboid.cube(n), NEUMANN, 0) == 0.0
    assert eigenvalue(Q2, DIRICHLET, 4) == pytest.approx(8 * PI2)
    with pytest.raises(InvalidInputError):
        eigenvalue(Q2, DIRICHLET, 0)


def test_counting_examples():
    assert counting_function(Q2, DIRICHLET, 2 * PI2) == 1
    assert counting_function(Q3, NEUMANN, 0.0) == 1
    assert counting_function(Q2, DIRICHLET, 5 * PI2) == 3
    assert counting_function(Q2, DIRICHLET, 1.999 * PI2) == 0


@pytest.mark.parametrize("bc,first", [(DIRICHLET, 1), (NEUMANN, 0)])
def test_spectrum_against_brute_force(bc, first):
    for R in random_unit_cuboids(3, 4, seed=21):
        want = naive_values(R.sides, 60.0, first)
        got = first_reduced_values(R, bc, len(want))
        assert np.allclose(got, want, rtol=1e-13)
        k = len(want) // 2
        assert eigenvalue(R, bc, k if bc is DIRICHLET else k - 1) == pytest.approx(PI2 * want[k - 1], rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.4, 2.5), min_size=2, max_size=3), st.integers(1, 60))
def test_count_eigenvalue_duality(sides, k):
    R = Cuboid(tuple(sides))
    for bc in (DIRICHLET, NEUMANN):
        lam = eigenvalue(R, bc, k)
        rank = k if bc is DIRICHLET else k + 1
        assert counting_function(R, bc, lam) >= rank
        assert counting_function(R, bc, lam * (1 - 1e-9)) < rank


def test_riesz_examples():
    assert riesz_mean(Q2, RieszSpec(1.0, 3 * PI2, DIRICHLET)) == pytest.approx(PI2)
    assert riesz_mean(Q2, RieszSpec(1.5, 1.0, DIRICHLET)) == 0.0
    assert riesz_mean(Q2, RieszSpec(0.0, 5 * PI2, DIRICHLET)) == 3
    with pytest.raises(InvalidInputError):
        RieszSpec(-1.0, 1.0)


def test_sum_examples():
    assert eigenvalue_sum(Q2, DIRICHLET, 1) == pytest.approx(2 * PI2)
    assert eigenvalue_sum(Q2, DIRICHLET, 4) == pytest.approx(20 * PI2)
    assert eigenvalue_average(Q2, DIRICHLET, 4) == pytest.approx(5 * PI2)
    assert eigenvalue_average(Q2, NEUMANN, 0) == 0.0
    # mu_0 + mu_1 + mu_2 = 0 + 1 + 1
    assert eigenvalue_sum(Q2, NEUMANN, 2) == pytest.approx(2 * PI2)


def test_eigenvalues_upto_sorted_and_scaled():
    R = Cuboid((0.5, 2.0))
    vals = eigenvalues_upto(R, DIRICHLET, 40 * PI2)
    assert np.all(np.diff(vals) >= 0)
    assert len(vals) == counting_function(R, DIRICHLET, 40 * PI2)
    # scaling: lambda_k(tR) = lambda_k(R) / t^2
    assert eigenvalue(R.scaled(2.0), DIRICHLET, 7) == pytest.approx(eigenvalue(R, DIRICHLET, 7) / 4, rel=1e-14)


def test_lift_examples():
    assert aizenman_lieb_lift(Q2, DIRICHLET, 0.0, 1.0, 3 * PI2) == pytest.approx(PI2, rel=1e-8)
    assert aizenman_lieb_lift(Q2, DIRICHLET, 0.0, 1.0, 0.0) == 0.0
    direct = riesz_mean(Q2, RieszSpec(1.5, 5 * PI2, DIRICHLET))
    assert aizenman_lieb_lift(Q2, DIRICHLET, 0.0, 1.5, 5 * PI2) == pytest.approx(direct, rel=1e-6)


def test_lift_integral_smooth_function():
    # a single eigenvalue at 0: order-1 mean x lifts to the order-2 mean x^2
    eta = 3.0
    got = lift_integral(lambda x: np.asarray(x), 1.0, 2.0, eta)
    assert got == pytest.approx(eta**2, rel=1e-10)
    with pytest.raises(InvalidInputError):
        lift_integral(lambda x: x, 1.0, 1.0, eta)


@pytest.mark.parametrize("gamma2", [1.0, 1.5, 2.0])
def test_lift_neumann_and_order_one_base(gamma2):
    R = random_unit_cuboids(3, 1, seed=5)[0]
    eta = 80 * PI2
    direct = riesz_mean(R, RieszSpec(gamma2, eta, NEUMANN))
    assert aizenman_lieb_lift(R, NEUMANN, 0.0, gamma2, eta) == pytest.approx(direct, rel=1e-6)
    if gamma2 > 1.0:
        assert aizenman_lieb_lift(R, NEUMANN, 1.0, gamma2, eta) == pytest.approx(direct, rel=1e-6)


def test_legendre_examples():
    r = legendre_sum(Q2, 1)
    assert r.value == pytest.approx(2 * PI2)
    assert 2 * PI2 <= r.argmax <= 5 * PI2
    assert legendre_sum(Q2, 4).value == pytest.approx(20 * PI2)
    r = legendre_sum(Q2, 2)
    assert r.interval == pytest.approx((5 * PI2, 5 * PI2))
    assert r.argmax == pytest.approx(5 * PI2)


def test_legendre_random():
    for R in random_unit_cuboids(2, 3, seed=9):
        for k in (1, 7, 50, 333):
            r = legendre_sum(R, k)
            assert r.value == pytest.approx(eigenvalue_sum(R, DIRICHLET, k), rel=1e-9)
            assert r.interval[0] <= r.argmax <= r.interval[1]
