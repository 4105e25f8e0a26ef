import math

import numpy as np
import pytest
from scipy.special import gamma as G

from cuboid_spectra.asymptotics import (
    FitReport,
    block_max_fit,
    default_t_grid,
    fit_convergence_rate,
    fit_remainder_exponent,
    invert_two_term_counting,
    read_sweep_csv,
    second_eigenvalue_coefficient,
    stability_trend,
    two_term_counting,
    two_term_eigenvalue,
    window_median,
)
from cuboid_spectra.core import DEFAULT_THETA, DIRICHLET, NEUMANN, Cuboid, InvalidInputError, perimeter
from cuboid_spectra.spectrum import PI2

Q2, Q3 = Cuboid.cube(2), Cuboid.cube(3)


def test_two_term_counting_examples():
    assert two_term_counting(Q2, DIRICHLET, 100 * PI2) == pytest.approx(25 * math.pi - 10)
    assert two_term_counting(Q2, DIRICHLET, 100 * PI2) == pytest.approx(68.54, abs=0.01)
    assert two_term_counting(Q2, NEUMANN, 100 * PI2) == pytest.approx(25 * math.pi + 10)
    assert two_term_counting(Q3, DIRICHLET, 0.0) == 0.0
    with pytest.raises(InvalidInputError):
        two_term_counting(Q2, DIRICHLET, -1.0)


def test_two_term_eigenvalue_examples():
    assert two_term_eigenvalue(Q2, DIRICHLET, 100) == pytest.approx(400 * math.pi + 80 * math.sqrt(math.pi))
    assert two_term_eigenvalue(Q2, DIRICHLET, 100) == pytest.approx(1398.4, abs=0.05)
    lead = 4 * math.pi * G(2.5) ** (2 / 3) * 100
    d, n = two_term_eigenvalue(Q3, DIRICHLET, 1000), two_term_eigenvalue(Q3, NEUMANN, 1000)
    assert 0.5 * (d + n) == pytest.approx(lead, rel=1e-13)
    assert n < lead < d
    assert second_eigenvalue_coefficient(2) == pytest.approx(2 * math.sqrt(math.pi))


def test_two_term_eigenvalue_scaling():
    R = Cuboid((0.5, 2.0))
    assert two_term_eigenvalue(R.scaled(3.0), DIRICHLET, 50) == pytest.approx(two_term_eigenvalue(R, DIRICHLET, 50) / 9)


@pytest.mark.parametrize("k", [1000, 10000])
@pytest.mark.parametrize("bc", [DIRICHLET, NEUMANN])
def test_inversion_consistency_planar(k, bc):
    lam = invert_two_term_counting(Q2, bc, k)
    second = second_eigenvalue_coefficient(2) * perimeter(Q2) * math.sqrt(k)
    assert abs(lam - two_term_eigenvalue(Q2, bc, k)) <= 0.02 * second


@pytest.mark.parametrize("bc", [DIRICHLET, NEUMANN])
def test_inversion_gap_shrinks_in_three_dims(bc):
    # the gap is a third-order O(1) term: relative to the k^{1/3} second term it decays like k^{-1/3}
    def rel(k):
        lam = invert_two_term_counting(Q3, bc, k)
        return abs(lam - two_term_eigenvalue(Q3, bc, k)) / (second_eigenvalue_coefficient(3) * 6 * k ** (1 / 3))

    assert rel(10000) < rel(1000) < 0.15
    assert rel(10000) == pytest.approx(rel(1000) * 10 ** (-1 / 3), rel=0.1)


def test_rate_fit_synthetic():
    k = np.arange(1, 2001)
    r = fit_convergence_rate(zip(k, k ** (-1 / 8)), "delta", 2)
    assert r.fitted_exponent == pytest.approx(-0.125, abs=1e-6)
    assert r.r_squared == pytest.approx(1.0)
    assert r.reference_exponent == pytest.approx((46 / 73 - 1) / 4)
    assert r.window["k_min"] >= 1000
    r = fit_convergence_rate(zip(k, np.full(len(k), 0.3)), "stability", 3)
    assert r.fitted_exponent == 0.0
    assert r.reference_exponent == pytest.approx((1.5 - 1) / 3)
    assert 0 <= r.r_squared <= 1


def test_rate_fit_zeros_dropped_and_degenerate():
    k = np.arange(1, 41)
    y = np.where(k % 2 == 0, 0.0, 2.0 * k**-0.5)
    r = fit_convergence_rate(zip(k, y), "delta", 2)
    assert r.dropped_zeros > 0
    assert r.fitted_exponent == pytest.approx(-0.5, abs=1e-9)
    assert r.valid
    z = fit_convergence_rate(zip(k, np.zeros(len(k))), "delta", 2)
    assert z.degenerate and not z.valid
    assert "cube always optimal on window" in z.notes
    assert math.isnan(z.fitted_exponent)
    assert z.to_dict()["fitted_exponent"] is None
    with pytest.raises(InvalidInputError):
        fit_convergence_rate([(1, 1.0), (2, 0.5)], "delta", 2)


def test_remainder_fit_full_lattice():
    r = fit_remainder_exponent(Q2, "full-lattice", default_t_grid(8, 4096, 128))
    assert r.fitted_exponent <= 0.8
    assert r.reference_exponent == pytest.approx(46 / 73)
    assert r.window["variable"] == "t"
    assert any("open-ended" in n or "epsilon" in n for n in r.notes)
    assert isinstance(r, FitReport) and r.valid


def test_remainder_fit_counting_residual():
    r = fit_remainder_exponent(Q2, "counting-D", default_t_grid(10, 1000, 128))
    assert r.fitted_exponent < 1.0
    assert r.fitted_exponent <= DEFAULT_THETA[2] / 2 + 0.15
    assert r.window["variable"] == "lambda"


def test_remainder_fit_needs_three_blocks():
    with pytest.raises(InvalidInputError):
        fit_remainder_exponent(Q2, "full-lattice", np.linspace(10, 15, 50))
    with pytest.raises(InvalidInputError):
        fit_remainder_exponent(Q2, "annulus", default_t_grid(8, 64))


def test_block_max_fit_exact_power():
    x = default_t_grid(1, 2**10, 32)
    r = block_max_fit(x, 3 * x**0.7, 0.7, "synthetic")
    assert r.fitted_exponent == pytest.approx(0.7, abs=1e-9)
    assert r.fitted_constant == pytest.approx(3.0, rel=1e-9)


def test_window_median_and_trend():
    k = np.arange(1, 101)
    v = 1.0 / k
    assert window_median(k, v, 51, 100) < window_median(k, v, 1, 50)
    with pytest.raises(InvalidInputError):
        window_median(k, v, 200, 300)
    t = stability_trend(k, np.sin(k) ** 2)
    assert t["no_growth"]
    assert t["last_quartile_max"] <= t["global_max"]
    grow = stability_trend(k, k.astype(float))
    assert grow["tail_to_head_ratio"] > 1


def test_read_sweep_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("# header\nk,n,bc,value\n1,2,dirichlet,3.5\n2,2,dirichlet,4\n")
    d = read_sweep_csv(str(p))
    assert list(d["k"]) == [1, 2]
    assert d["bc"] == ["dirichlet", "dirichlet"]
