import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuboid_spectra.core import (
    DEFAULT_THETA,
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    BoundConstants,
    Cuboid,
    InvalidInputError,
    ThetaTable,
    make_unit_cuboid,
    perimeter,
    random_unit_cuboids,
    semiclassical_constant,
    unit_ball_volume,
    weyl_constant,
)


def test_make_unit_cuboid_examples():
    assert make_unit_cuboid([2, 2]).sides == (1.0, 1.0)
    assert make_unit_cuboid([1, 4]).sides == pytest.approx((0.5, 2.0), rel=1e-15)
    R = make_unit_cuboid([3, 1, 9])
    assert math.prod(R.sides) == pytest.approx(1.0, rel=1e-14)
    assert R.sides == tuple(sorted(R.sides))
    assert R.sides == pytest.approx((1 / 3, 1.0, 3.0), rel=1e-14)


@pytest.mark.parametrize("bad", [[], [1, 0], [1, -2], [1, math.inf], [math.nan, 1]])
def test_make_unit_cuboid_rejects(bad):
    with pytest.raises(InvalidInputError):
        make_unit_cuboid(bad)


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=6))
def test_unit_rescale_property(sides):
    R = make_unit_cuboid(sides)
    assert R.measure == pytest.approx(1.0, rel=1e-12)
    # ratios are preserved
    s = sorted(sides)
    assert R.longest / R.shortest == pytest.approx(s[-1] / s[0], rel=1e-12)


def test_perimeter_examples():
    assert perimeter(Cuboid((1.0, 1.0))) == 4.0
    assert perimeter(Cuboid.cube(3)) == 6.0
    assert perimeter(Cuboid((0.5, 2.0))) == 5.0


@settings(max_examples=50)
@given(st.lists(st.floats(0.2, 5.0), min_size=2, max_size=5))
def test_cube_minimises_perimeter(sides):
    R = make_unit_cuboid(sides)
    assert perimeter(R) >= 2 * R.dim * (1 - 1e-12)


def test_semiclassical_constant_examples():
    assert semiclassical_constant(0, 2) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    assert semiclassical_constant(1, 1) == pytest.approx(1 / (math.sqrt(4 * math.pi) * 0.75 * math.sqrt(math.pi)), rel=1e-14)
    assert semiclassical_constant(1, 1) == pytest.approx(0.2122, abs=1e-4)
    assert semiclassical_constant(0, 0) == 1.0
    with pytest.raises(InvalidInputError):
        semiclassical_constant(-1, 2)


def test_semiclassical_product_rule():
    # L_{0,2} L_{1,1} = L_{1,3}-type telescoping used by the lift: L_{g,m} L_{g',m'} relation
    for g in (0.0, 1.0, 1.5):
        for m in (1, 2, 3):
            lhs = semiclassical_constant(g, m) * semiclassical_constant(g + m / 2, 1)
            assert lhs == pytest.approx(semiclassical_constant(g, m + 1), rel=1e-13)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert unit_ball_volume(3) == pytest.approx(4.18879, abs=1e-5)


def test_weyl_constant_matches_semiclassical():
    for n in range(1, 7):
        # lambda_k ~ (k / L_{0,n})^{2/n}
        assert weyl_constant(n) == pytest.approx(semiclassical_constant(0, n) ** (-2 / n), rel=1e-13)


def test_boundary_condition_parse():
    assert BoundaryCondition.parse("Dirichlet") is DIRICHLET
    assert BoundaryCondition.parse("n") is NEUMANN
    assert DIRICHLET.quadrant == "positive" and NEUMANN.quadrant == "nonnegative"
    with pytest.raises(InvalidInputError):
        BoundaryCondition.parse("robin")


def test_theta_table():
    assert DEFAULT_THETA[2] == pytest.approx(46 / 73)
    assert DEFAULT_THETA.open_ended(2)
    assert DEFAULT_THETA[5] == 3.0
    t = ThetaTable({2: 0.5})
    assert t[2] == 0.5 and not t.open_ended(2)
    with pytest.raises(InvalidInputError):
        ThetaTable({3: 2.5})


def test_bound_constants_validation():
    with pytest.raises(InvalidInputError):
        BoundConstants(2, DIRICHLET, c1=-1.0)
    with pytest.raises(InvalidInputError):
        BoundConstants(2, DIRICHLET, c1=1.0, c2=0.1, b0=1.5)
    assert BoundConstants(2, NEUMANN, c1=0.2).as_dict()["c1"] == 0.2


def test_random_unit_cuboids_deterministic():
    a = random_unit_cuboids(3, 5, seed=7)
    b = random_unit_cuboids(3, 5, seed=7)
    assert a == b
    for R in a:
        assert R.is_unit()
        assert 1 / 3 <= R.shortest and R.longest <= 3
    assert random_unit_cuboids(3, 5, seed=8) != a


def test_cuboid_sorted_and_validated():
    R = Cuboid((2.0, 0.5))
    assert R.sides == (0.5, 2.0)
    with pytest.raises(InvalidInputError):
        Cuboid((1.0, 0.0))
    assert np.allclose(R.weights(), [4.0, 0.25])
