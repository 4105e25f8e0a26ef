"""Laplacian spectra of cuboids built on the lattice engine.

Eigenvalues are pi^2 * q for the reduced lattice values q of the Dirichlet
(positive) or Neumann (non-negative) quadrant.  All selection and
comparison happens on q; pi^2 is applied at the output boundary.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import beta as beta_fn, roots_legendre

from .core import (
    DIRICHLET,
    BoundaryCondition,
    Cuboid,
    InvalidInputError,
    NumericError,
    unit_ball_volume,
)
from .lattice import EllipsoidQuery, count_points, enumerate_values

PI2 = math.pi**2
MULTIPLICITY_RTOL = 1e-12


@dataclass(frozen=True)
class RieszSpec:
    gamma: float
    threshold: float
    bc: BoundaryCondition = DIRICHLET

    def __post_init__(self):
        if not (self.gamma >= 0):
            raise InvalidInputError("Riesz order must be non-negative")
        if not (self.threshold >= 0):
            raise InvalidInputError("threshold must be non-negative")
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))


class CuboidSpectrum:
    """Sorted reduced eigenvalues of one cuboid, extended on demand."""

    def __init__(self, cuboid: Cuboid, bc: BoundaryCondition | str, cap: int | None = None):
        self.cuboid = cuboid
        self.bc = BoundaryCondition.parse(bc)
        self.cap = cap
        self._values = np.zeros(0)
        self._covered = -1.0  # every value <= _covered is present

    def values_upto(self, q: float) -> np.ndarray:
        """Sorted reduced values <= q (inclusive, with the lattice boundary guard)."""
        if q > self._covered:
            self._extend(max(q, 1.25 * self._covered))
        hi = np.searchsorted(self._values, q * (1.0 + 4 * np.finfo(float).eps), side="right")
        return self._values[:hi]

    def _extend(self, q: float) -> None:
        query = EllipsoidQuery.from_radius_sq(self.cuboid, q, self.bc.quadrant)
        self._values = enumerate_values(query, cap=self.cap)
        self._covered = q

    def rank_value(self, rank: int) -> float:
        """The rank-th smallest reduced value (1-based, with multiplicity)."""
        if rank < 1:
            raise InvalidInputError("rank must be >= 1")
        if len(self._values) < rank:
            self._extend(_radius_for_rank(self.cuboid, self.bc, rank, self._covered))
        return float(self._values[rank - 1])

    def first_values(self, count: int) -> np.ndarray:
        if count <= 0:
            return self._values[:0]
        self.rank_value(count)
        return self._values[:count]


def _weyl_seed(cuboid: Cuboid, bc: BoundaryCondition, rank: int) -> float:
    n = cuboid.dim
    lead = unit_ball_volume(n) * cuboid.measure / 2**n
    return (rank / lead) ** (2.0 / n)


def _radius_for_rank(cuboid: Cuboid, bc: BoundaryCondition, rank: int, floor: float = 0.0) -> float:
    """Smallest tried q (geometric growth from a Weyl seed) holding >= rank points."""
    q = max(_weyl_seed(cuboid, bc, rank), floor, min(cuboid.weights()))
    for _ in range(200):
        query = EllipsoidQuery.from_radius_sq(cuboid, q, bc.quadrant)
        if count_points(query) >= rank:
            return q
        q *= 1.25**2
    raise NumericError(f"could not bracket rank {rank}")


_CACHE: "OrderedDict[tuple, CuboidSpectrum]" = OrderedDict()
_CACHE_SIZE = 32


def spectrum_of(cuboid: Cuboid, bc: BoundaryCondition | str) -> CuboidSpectrum:
    bc = BoundaryCondition.parse(bc)
    key = (cuboid.sides, bc)
    spec = _CACHE.get(key)
    if spec is None:
        spec = CuboidSpectrum(cuboid, bc)
        _CACHE[key] = spec
        if len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    else:
        _CACHE.move_to_end(key)
    return spec


def _rank(bc: BoundaryCondition, k: int) -> int:
    if bc is DIRICHLET:
        if k < 1:
            raise InvalidInputError("Dirichlet eigenvalues are indexed from k = 1")
        return k
    if k < 0:
        raise InvalidInputError("Neumann eigenvalues are indexed from k = 0")
    return k + 1


def reduced_eigenvalue(R: Cuboid, bc: BoundaryCondition | str, k: int) -> float:
    bc = BoundaryCondition.parse(bc)
    return spectrum_of(R, bc).rank_value(_rank(bc, k))


def eigenvalue(R: Cuboid, bc: BoundaryCondition | str, k: int) -> float:
    """lambda_k (Dirichlet, k >= 1) or mu_k (Neumann, k >= 0, mu_0 = 0)."""
    return PI2 * reduced_eigenvalue(R, bc, k)


def kth_reduced_value(R: Cuboid, bc: BoundaryCondition, k: int) -> float:
    """Uncached k-th value for one-off cuboids (the optimiser's hot path)."""
    rank = _rank(bc, k)
    q = _radius_for_rank(R, bc, rank)
    vals = enumerate_values(EllipsoidQuery.from_radius_sq(R, q, bc.quadrant), sort=False)
    return float(np.partition(vals, rank - 1)[rank - 1])


def first_reduced_values(R: Cuboid, bc: BoundaryCondition, count: int) -> np.ndarray:
    """Uncached sorted first ``count`` reduced values."""
    q = _radius_for_rank(R, bc, count)
    vals = enumerate_values(EllipsoidQuery.from_radius_sq(R, q, bc.quadrant), sort=False)
    return np.sort(np.partition(vals, count - 1)[:count])


def counting_function(R: Cuboid, bc: BoundaryCondition | str, threshold: float) -> int:
    """Number of eigenvalues <= threshold, counted with multiplicity."""
    if not (threshold >= 0):
        raise InvalidInputError("threshold must be non-negative")
    bc = BoundaryCondition.parse(bc)
    return count_points(EllipsoidQuery.from_radius_sq(R, threshold / PI2, bc.quadrant))


def eigenvalues_upto(R: Cuboid, bc: BoundaryCondition | str, threshold: float) -> np.ndarray:
    """Sorted eigenvalues (absolute units) not exceeding threshold."""
    return PI2 * spectrum_of(R, bc).values_upto(threshold / PI2)


def _riesz_from_values(values: np.ndarray, gamma: float, threshold: float) -> float:
    if gamma == 0:
        return float(len(values))
    gaps = np.maximum(threshold - values, 0.0)
    if gamma == 1:
        return math.fsum(gaps)
    return math.fsum(gaps**gamma)


def riesz_mean(R: Cuboid, spec: RieszSpec) -> float:
    """sum_k (threshold - e_k)_+^gamma; gamma = 0 returns the counting function."""
    if spec.gamma == 0:
        return float(counting_function(R, spec.bc, spec.threshold))
    values = eigenvalues_upto(R, spec.bc, spec.threshold)
    return _riesz_from_values(values, spec.gamma, spec.threshold)


def eigenvalue_sum(R: Cuboid, bc: BoundaryCondition | str, k: int) -> float:
    """lambda_1 + ... + lambda_k, or mu_0 + ... + mu_k (k + 1 terms) for Neumann."""
    bc = BoundaryCondition.parse(bc)
    if bc is DIRICHLET and k < 1:
        raise InvalidInputError("need k >= 1")
    if k < 0:
        raise InvalidInputError("need k >= 0")
    count = _rank(bc, k)
    return PI2 * math.fsum(spectrum_of(R, bc).first_values(count))


def eigenvalue_average(R: Cuboid, bc: BoundaryCondition | str, k: int) -> float:
    bc = BoundaryCondition.parse(bc)
    if k == 0 and bc is not DIRICHLET:
        return 0.0
    return eigenvalue_sum(R, bc, k) / k


# ---------------------------------------------------------------------------
# Aizenman--Lieb lift

GL_NODES = 32
_gl_x, _gl_w = roots_legendre(GL_NODES)


def _gauss_legendre(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    x = a + half * (_gl_x + 1.0)
    return half * float(np.dot(_gl_w, f(x)))


def _adaptive(f, a: float, b: float, atol: float, depth: int = 0, max_depth: int = 40) -> tuple[float, float]:
    whole = _gauss_legendre(f, a, b)
    mid = 0.5 * (a + b)
    halves = _gauss_legendre(f, a, mid) + _gauss_legendre(f, mid, b)
    err = abs(halves - whole)
    if err <= atol or depth >= max_depth:
        return halves, err
    l_val, l_err = _adaptive(f, a, mid, 0.5 * atol, depth + 1, max_depth)
    r_val, r_err = _adaptive(f, mid, b, 0.5 * atol, depth + 1, max_depth)
    return l_val + r_val, l_err + r_err


def lift_integral(
    func: Callable[[np.ndarray], np.ndarray],
    gamma1: float,
    gamma2: float,
    eta: float,
    breakpoints: Sequence[float] = (),
    rtol: float = 1e-8,
) -> float:
    """B(1+g1, g2-g1)^{-1} int_0^eta tau^{g2-g1-1} func(eta - tau) dtau.

    ``func`` is the order-gamma1 quantity as a function of the threshold; it
    must be smooth between the given breakpoints (thresholds in [0, eta]).
    Each piece gets 32-node Gauss-Legendre with bisection until the
    halves agree; the tau^{alpha-1} weight on the first piece is absorbed by
    the substitution tau = h s^{1/alpha}.
    """
    if not (gamma2 > gamma1 >= 0):
        raise InvalidInputError("need gamma2 > gamma1 >= 0")
    if eta < 0:
        raise InvalidInputError("eta must be non-negative")
    if eta == 0:
        return 0.0
    alpha = gamma2 - gamma1
    cuts = {eta - float(e) for e in breakpoints if 0.0 <= e <= eta}
    taus = sorted(t for t in cuts | {0.0, eta} if 0.0 <= t <= eta)
    h = taus[1]
    jac = h**alpha / alpha

    def first_piece(s):
        return func(eta - h * s ** (1.0 / alpha))

    def weighted(tau):
        return tau ** (alpha - 1.0) * func(eta - tau)

    pieces = [(first_piece, 0.0, 1.0, jac, h)]
    pieces += [(weighted, a, b, 1.0, b - a) for a, b in zip(taus[1:-1], taus[2:]) if b > a]
    rough = math.fsum(w * _gauss_legendre(f, a, b) for f, a, b, w, _ in pieces)
    budget = rtol * max(abs(rough), 1e-300)
    vals, err_total = [], 0.0
    for f, a, b, w, length in pieces:
        val, err = _adaptive(f, a, b, budget * length / eta / w)
        vals.append(w * val)
        err_total += w * err
    integral = math.fsum(vals)
    achieved = err_total / abs(integral) if integral else err_total
    if achieved > 10 * rtol:
        raise NumericError(f"lift quadrature reached only {achieved:.2e} relative", achieved)
    return integral / beta_fn(1.0 + gamma1, alpha)


def aizenman_lieb_lift(
    R: Cuboid,
    bc: BoundaryCondition | str,
    gamma1: float,
    gamma2: float,
    eta: float,
    rtol: float = 1e-8,
) -> float:
    """Order-gamma2 Riesz mean at eta obtained by integrating order-gamma1 means."""
    bc = BoundaryCondition.parse(bc)
    values = eigenvalues_upto(R, bc, eta)

    def riesz_g1(thresholds: np.ndarray) -> np.ndarray:
        th = np.asarray(thresholds, dtype=float)
        if gamma1 == 0:
            return np.searchsorted(values, th, side="right").astype(float)
        gaps = np.maximum(th[:, None] - values[None, :], 0.0)
        return np.sum(gaps**gamma1, axis=1)

    return lift_integral(riesz_g1, gamma1, gamma2, eta, breakpoints=np.unique(values), rtol=rtol)


@dataclass(frozen=True)
class LegendreResult:
    value: float
    argmax: float
    interval: tuple[float, float]


def legendre_sum(R: Cuboid, k: int) -> LegendreResult:
    """sup_{lambda >= 0} (k lambda - Riesz_1(lambda)) for Dirichlet spectra.

    The function is piecewise linear with slope k - N(lambda), so its
    supremum is attained at the breakpoint where N first reaches k.  The
    value is evaluated at that breakpoint from the Riesz mean, not from the
    eigenvalue sum it is meant to equal.
    """
    if k < 1:
        raise InvalidInputError("need k >= 1")
    spec = spectrum_of(R, DIRICHLET)
    vals = PI2 * spec.first_values(k + 1)
    # breakpoints with their inclusive counts
    counts = np.arange(1, len(vals) + 1)
    slopes_after = k - counts
    # at a run of equal values only the last index carries the true count
    last_in_run = np.append(vals[1:] != vals[:-1], True)
    cand = np.flatnonzero(last_in_run & (slopes_after <= 0))
    j = int(cand[0])
    lam = float(vals[j])
    value = k * lam - riesz_mean(R, RieszSpec(1.0, lam, DIRICHLET))
    return LegendreResult(value, lam, (float(vals[k - 1]), float(vals[k])))
