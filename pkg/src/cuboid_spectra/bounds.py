"""Explicit spectral inequalities for cuboids and their grid verification.

Counting bounds have the shape

    N^D(lam) <= L_{0,n} lam^{n/2} - c1 b L_{0,n-1} lam^{(n-1)/2} / a_1
                + c2 b^2 L_{0,n-2} lam^{(n-2)/2} / a_1^2
    N^N(mu)  >= L_{0,n} mu^{n/2} + c1 L_{0,n-1} mu^{(n-1)/2} / a_1

for unit-measure cuboids with shortest side a_1.  Riesz versions replace
L_{0,m} by L_{gamma,m} and raise every exponent by gamma.  The constants
for n >= 3 come from the one-dimensional Riesz-1 bounds on an interval,
carried through the reduction to one dimension; for n = 2 they are
calibrated numerically (see ``calibrate_planar_constant``).
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .core import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    BoundConstants,
    Cuboid,
    InvalidInputError,
    random_unit_cuboids,
    semiclassical_constant,
    weyl_constant,
)
from .lattice import EllipsoidQuery, count_many, enumerate_values, estimated_count
from .spectrum import PI2, first_reduced_values

SQRT3 = math.sqrt(3.0)

# one-dimensional Riesz-1 constants on the unit interval
ONED_DIRICHLET_C1 = 4.0 / 3.0
ONED_DIRICHLET_C2 = math.pi / 6.0
ONED_DIRICHLET_B0 = 1.0 - math.sqrt((27.0 + SQRT3) / 2.0) / 6.0
ONED_NEUMANN_C1 = (36.0 - SQRT3) / 108.0

# Planar constants, frozen from calibrate_planar_constant() with the
# defaults below (largest passing value on a dyadic search, less 10%).
PLANAR_DIRICHLET_C1 = 0.5
PLANAR_DIRICHLET_C2 = 1.0 / (4.0 * math.pi)
PLANAR_DIRICHLET_B0 = 0.7672253807075322
PLANAR_NEUMANN_C1 = 0.19314165338873865

CALIBRATION_CUBOIDS = 100
CALIBRATION_MAX_THRESHOLD = 1e6
CALIBRATION_SIDE_RANGE = (1.0 / 20.0, 20.0)
CALIBRATION_SHRINK = 0.1
CALIBRATION_DEPTH = 30

DEFAULT_SEED = 0xC0FFEE
SLACK = 1e-9
BOUND_IDS = (
    "polya-D",
    "polya-N",
    "lemma21",
    "lemma22",
    "lemma54",
    "lemma55",
    "lemma56",
    "appendixA1",
    "appendixA2",
)


def polya_bound(n: int, k, measure: float = 1.0):
    """4 pi Gamma(n/2+1)^{2/n} (k/|R|)^{2/n}: lower bound for lambda_k, upper for mu_k."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if not measure > 0:
        raise InvalidInputError("measure must be positive")
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise InvalidInputError("k must be >= 1")
    out = weyl_constant(n) * (k_arr / measure) ** (2.0 / n)
    return float(out) if out.ndim == 0 else out


@functools.lru_cache(maxsize=None)
def derive_bound_constants(n: int, bc: BoundaryCondition | str) -> BoundConstants:
    """Constants of the n-dimensional counting bounds.

    For n >= 3 the count is reduced to Riesz means of order (n-1)/2 over
    the shortest side, which for n >= 4 are lifted from the order-one
    interval bounds.  Each lifted term picks up a ratio of semiclassical
    constants; for the Dirichlet c2 that ratio telescopes to one, and the
    c1 ratio is L_{gamma,0} = 1, so the interval constants survive intact.
    """
    bc = BoundaryCondition.parse(bc)
    if n < 2:
        raise InvalidInputError("bounds are stated for n >= 2")
    if n == 2:
        if bc is DIRICHLET:
            return BoundConstants(2, bc, PLANAR_DIRICHLET_C1, PLANAR_DIRICHLET_C2, PLANAR_DIRICHLET_B0, "calibrated")
        return BoundConstants(2, bc, PLANAR_NEUMANN_C1, source="calibrated")
    g = 0.5 * (n - 1)
    if bc is DIRICHLET:
        c1 = ONED_DIRICHLET_C1 * semiclassical_constant(g, 0)
        c2 = (
            ONED_DIRICHLET_C2
            * semiclassical_constant(0.0, n - 1)
            * semiclassical_constant(g, -1)
            / semiclassical_constant(0.0, n - 2)
        )
        return BoundConstants(n, bc, c1, c2, ONED_DIRICHLET_B0, "derived")
    return BoundConstants(n, bc, ONED_NEUMANN_C1 * semiclassical_constant(g, 0), source="derived")


def _require_unit(R: Cuboid) -> None:
    if not R.is_unit():
        raise InvalidInputError(f"bounds are stated for unit-measure cuboids, |R| = {R.measure!r}")


def _check_b(b: float, consts: BoundConstants) -> None:
    if not (0.0 <= b <= consts.b0 * (1.0 + 1e-12)):
        raise InvalidInputError(f"b must lie in [0, {consts.b0}], got {b!r}")


def _dirichlet_terms(n, a1, lam, gamma, consts, b):
    lam = np.asarray(lam, dtype=float)
    L = semiclassical_constant
    out = L(gamma, n) * lam ** (gamma + 0.5 * n)
    if b:
        root = np.sqrt(lam)
        out = out - consts.c1 * b * L(gamma, n - 1) / a1 * lam ** (gamma + 0.5 * (n - 2)) * root
        out = out + consts.c2 * b * b * L(gamma, n - 2) / (a1 * a1) * lam ** (gamma + 0.5 * (n - 2))
    return out


def _neumann_terms(n, a1, mu, gamma, consts, c1=None):
    mu = np.asarray(mu, dtype=float)
    L = semiclassical_constant
    c1 = consts.c1 if c1 is None else c1
    return L(gamma, n) * mu ** (gamma + 0.5 * n) + c1 * L(gamma, n - 1) / a1 * mu ** (gamma + 0.5 * (n - 1))


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def dirichlet_count_upper(R: Cuboid, lam, b: float, constants: BoundConstants | None = None):
    """Three-term upper bound for N^D(lam, R), valid for 0 <= b <= b0."""
    _require_unit(R)
    consts = constants or derive_bound_constants(R.dim, DIRICHLET)
    _check_b(b, consts)
    if np.any(np.asarray(lam) < 0):
        raise InvalidInputError("threshold must be non-negative")
    return _scalar(_dirichlet_terms(R.dim, R.shortest, lam, 0.0, consts, b))


def neumann_count_lower(R: Cuboid, mu, constants: BoundConstants | None = None):
    """Two-term lower bound for N^N(mu, R)."""
    _require_unit(R)
    consts = constants or derive_bound_constants(R.dim, NEUMANN)
    if np.any(np.asarray(mu) < 0):
        raise InvalidInputError("threshold must be non-negative")
    return _scalar(_neumann_terms(R.dim, R.shortest, mu, 0.0, consts))


def riesz_bound(R: Cuboid, spec, b: float = 0.0, constants: BoundConstants | None = None):
    """Riesz-gamma version of the counting bounds (Dirichlet upper, Neumann lower)."""
    _require_unit(R)
    consts = constants or derive_bound_constants(R.dim, spec.bc)
    if spec.bc is DIRICHLET:
        _check_b(b, consts)
        return _scalar(_dirichlet_terms(R.dim, R.shortest, spec.threshold, spec.gamma, consts, b))
    return _scalar(_neumann_terms(R.dim, R.shortest, spec.threshold, spec.gamma, consts))


def average_coefficients(n: int, constants: BoundConstants | None = None) -> tuple[float, float, float]:
    """(A, C1, C2) with average >= A k^{2/n} + C1 b k^{1/n}/a_1 - C2 b^2/a_1^2."""
    consts = constants or derive_bound_constants(n, DIRICHLET)
    lg = math.lgamma(0.5 * n + 1.0)
    lead = weyl_constant(n) * n / (n + 2.0)
    c1 = consts.c1 * 4.0 * math.pi * math.exp((1.0 + 1.0 / n) * lg - math.lgamma(0.5 * (n + 3)))
    c2 = 4.0 * math.pi * consts.c2
    return lead, c1, c2


def average_lower_bound(R: Cuboid, k, b: float, constants: BoundConstants | None = None):
    """Lower bound for (1/k) sum_{i <= k} lambda_i(R).

    Obtained from the Riesz-1 upper bound through the Legendre transform,
    evaluated at lam = 4 pi Gamma(n/2+1)^{2/n} k^{2/n}.
    """
    _require_unit(R)
    consts = constants or derive_bound_constants(R.dim, DIRICHLET)
    _check_b(b, consts)
    k = np.asarray(k, dtype=float)
    if np.any(k < 1):
        raise InvalidInputError("k must be >= 1")
    n, a1 = R.dim, R.shortest
    lead, c1, c2 = average_coefficients(n, consts)
    return _scalar(lead * k ** (2.0 / n) + c1 * b * k ** (1.0 / n) / a1 - c2 * b * b / (a1 * a1))


# ---------------------------------------------------------------------------
# interval (n = 1) Riesz-1 sums, eigenvalues k^2 on the unit scale


def oned_riesz1_exact(bc: BoundaryCondition | str, lam):
    """sum_{k>=1} (lam - k^2)_+ (Dirichlet) or sum_{k>=0} (Neumann), in closed form."""
    bc = BoundaryCondition.parse(bc)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise InvalidInputError("lam must be non-negative")
    root = np.sqrt(lam)
    r = root - np.floor(root)
    half = 0.5 * lam if bc is NEUMANN else -0.5 * lam
    out = 2.0 / 3.0 * lam * root + half + (r - r * r - 1.0 / 6.0) * root + (r - 3 * r * r + 2 * r**3) / 6.0
    out = np.where(lam == 0, 0.0, out)
    if bc is DIRICHLET:
        out = np.where(lam <= 1.0, 0.0, out)
    return _scalar(out)


def oned_dirichlet_bound(lam, b: float, c1: float = ONED_DIRICHLET_C1, c2: float = ONED_DIRICHLET_C2):
    lam = np.asarray(lam, dtype=float)
    return _scalar(2.0 / 3.0 * lam**1.5 - b * c1 * lam + 4.0 * b * b * c2 / math.pi * np.sqrt(lam))


def oned_dirichlet_majorant(lam):
    """Closed-form sum with the r-dependent terms replaced by their maxima."""
    lam = np.asarray(lam, dtype=float)
    return _scalar(2.0 / 3.0 * lam**1.5 - 0.5 * lam + np.sqrt(lam) / 12.0 + 1.0 / (36.0 * SQRT3))


def oned_neumann_bound(mu, c1: float = ONED_NEUMANN_C1):
    mu = np.asarray(mu, dtype=float)
    return _scalar(2.0 / 3.0 * mu**1.5 + c1 * mu)


def oned_neumann_minorant(mu):
    mu = np.asarray(mu, dtype=float)
    return _scalar(2.0 / 3.0 * mu**1.5 + 0.5 * mu - np.sqrt(mu) / 6.0 - 1.0 / (36.0 * SQRT3))


# ---------------------------------------------------------------------------
# planar calibration


def _distinct_with_counts(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct sorted values and the inclusive count at each."""
    if len(values) == 0:
        return values, np.zeros(0, dtype=np.int64)
    last = np.append(values[1:] != values[:-1], True)
    idx = np.flatnonzero(last)
    return values[idx], idx + 1


def _jump_data(R: Cuboid, bc: BoundaryCondition, q_max: float):
    vals = enumerate_values(EllipsoidQuery.from_radius_sq(R, q_max, bc.quadrant))
    return _distinct_with_counts(vals)


def _planar_passes(data, bc: BoundaryCondition, value: float, lam_max: float) -> bool:
    n = 2
    if bc is DIRICHLET:
        consts = BoundConstants(n, bc, PLANAR_DIRICHLET_C1, PLANAR_DIRICHLET_C2, min(max(value, 1e-300), 1.0))
    else:
        consts = BoundConstants(n, bc, max(value, 1e-300))
    for a1, (u, counts) in data:
        lam = PI2 * u
        if bc is DIRICHLET:
            rhs = _dirichlet_terms(n, a1, lam, 0.0, consts, value)
            if np.any(counts > rhs * (1.0 + SLACK)):
                return False
        else:
            right = np.append(lam[1:], lam_max)
            rhs = _neumann_terms(n, a1, right, 0.0, consts, c1=value)
            if np.any(counts < rhs * (1.0 - SLACK)):
                return False
    return True


def calibrate_planar_constant(
    bc: BoundaryCondition | str,
    n_cuboids: int = CALIBRATION_CUBOIDS,
    max_threshold: float = CALIBRATION_MAX_THRESHOLD,
    seed: int = DEFAULT_SEED,
    depth: int = CALIBRATION_DEPTH,
    shrink: float = CALIBRATION_SHRINK,
) -> dict:
    """Largest b0 (Dirichlet) or c1 (Neumann) passing every jump of the planar bound.

    The test set is the unit square plus seeded random unit rectangles with
    aspect ratio up to 400, checked at every eigenvalue up to
    ``max_threshold``.  A dyadic bisection on [0, 1] finds the largest
    passing value, which is then reduced by ``shrink``.
    """
    bc = BoundaryCondition.parse(bc)
    lo_side, hi_side = CALIBRATION_SIDE_RANGE
    cuboids = [Cuboid.cube(2)] + random_unit_cuboids(2, n_cuboids - 1, seed, lo_side, hi_side)
    data = [(R.shortest, _jump_data(R, bc, max_threshold / PI2)) for R in cuboids]
    lo, hi = 0.0, 1.0
    if _planar_passes(data, bc, hi, max_threshold):
        lo = hi
    else:
        for _ in range(depth):
            mid = 0.5 * (lo + hi)
            if _planar_passes(data, bc, mid, max_threshold):
                lo = mid
            else:
                hi = mid
    return {
        "bc": bc.value,
        "largest_passing": lo,
        "value": lo * (1.0 - shrink),
        "n_cuboids": n_cuboids,
        "max_threshold": max_threshold,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# grid verification


@dataclass
class GridSpec:
    """Sampling grid for verify_bound; ``None`` fields take suite defaults."""

    dims: tuple[int, ...] | None = None
    n_cuboids: int | None = None
    max_threshold: float | None = None  # absolute units
    k_max: int | None = None
    b_fractions: tuple[float, ...] = (0.0, 0.5, 1.0)
    gammas: tuple[float, ...] = (1.0, 1.5)
    grid_points: int = 48
    step: float = 0.1
    seed: int = DEFAULT_SEED
    inflate: float = 1.0
    jump_cap: int = 2_000_000


_SUITE_DEFAULTS = {
    "polya-D": dict(dims=(2, 3), n_cuboids=50, k_max=5000),
    "polya-N": dict(dims=(2, 3), n_cuboids=50, k_max=5000),
    "lemma21": dict(dims=(2, 3, 4, 5), n_cuboids=20, max_threshold=1e4 * PI2),
    "lemma22": dict(dims=(2, 3, 4, 5), n_cuboids=20, max_threshold=1e4 * PI2),
    "lemma54": dict(dims=(2, 3), n_cuboids=10, max_threshold=2e3 * PI2),
    "lemma55": dict(dims=(2, 3), n_cuboids=10, max_threshold=2e3 * PI2),
    "lemma56": dict(dims=(2, 3), n_cuboids=10, k_max=1000),
    "appendixA1": dict(dims=(1,), n_cuboids=1, max_threshold=1e6),
    "appendixA2": dict(dims=(1,), n_cuboids=1, max_threshold=1e6),
}


def resolve_grid(bound_id: str, grid: GridSpec | None = None) -> GridSpec:
    if bound_id not in _SUITE_DEFAULTS:
        raise InvalidInputError(f"unknown bound id {bound_id!r}; expected one of {', '.join(BOUND_IDS)}")
    grid = grid or GridSpec()
    filled = {k: v for k, v in asdict(grid).items()}
    for key, value in _SUITE_DEFAULTS[bound_id].items():
        if filled.get(key) is None:
            filled[key] = value
    filled["dims"] = tuple(filled["dims"])
    filled["b_fractions"] = tuple(filled["b_fractions"])
    filled["gammas"] = tuple(filled["gammas"])
    return GridSpec(**filled)


@dataclass
class BoundReport:
    bound_id: str
    seed: int
    grid: dict
    violations: list[dict]
    max_slack_used: float
    violation_count: int = 0
    warnings: int = 0
    checked: int = 0
    constants: list[dict] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "seed": self.seed,
            "grid": self.grid,
            "violations": self.violations,
            "max_slack_used": self.max_slack_used,
            "violation_count": self.violation_count,
            "warnings": self.warnings,
            "checked": self.checked,
            "constants": self.constants,
            "verified": self.verified,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


MAX_REPORTED_VIOLATIONS = 1000


class _Collector:
    def __init__(self, slack: float = SLACK):
        self.slack = slack
        self.violations: list[tuple[tuple, dict]] = []
        self.max_slack = 0.0
        self.warnings = 0
        self.checked = 0

    def compare(self, lhs, rhs, sense: str, describe: Callable[[int], dict]) -> None:
        """Record points where lhs <= rhs ('upper') or lhs >= rhs ('lower') fails."""
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        excess = lhs - rhs if sense == "upper" else rhs - lhs
        scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
        rel = excess / scale
        self.checked += rel.size
        positive = rel > 0
        if not positive.any():
            return
        within = positive & (rel <= self.slack)
        if within.any():
            self.warnings += int(within.sum())
            self.max_slack = max(self.max_slack, float(rel[within].max()))
        for i in np.flatnonzero(rel > self.slack):
            info = describe(int(i))
            key = tuple(info[k] if not isinstance(info[k], list) else tuple(info[k]) for k in sorted(info))
            record = {"input": info, "lhs": float(lhs[i]), "rhs": float(rhs[i]), "gap": float(rel[i])}
            self.violations.append((key, record))

    def report(self, bound_id: str, grid: GridSpec, constants: list[dict]) -> BoundReport:
        ordered = [rec for _, rec in sorted(self.violations, key=lambda kv: repr(kv[0]))]
        return BoundReport(
            bound_id=bound_id,
            seed=grid.seed,
            grid=asdict(grid),
            violations=ordered[:MAX_REPORTED_VIOLATIONS],
            max_slack_used=self.max_slack,
            violation_count=len(ordered),
            warnings=self.warnings,
            checked=self.checked,
            constants=constants,
        )


def _suite_cuboids(n: int, grid: GridSpec) -> list[Cuboid]:
    count = grid.n_cuboids
    return [Cuboid.cube(n)] + random_unit_cuboids(n, max(count - 1, 0), grid.seed + n)


def _sides(R: Cuboid) -> list[float]:
    return [float(s) for s in R.sides]


def _enumeration_limit(R: Cuboid, bc: BoundaryCondition, q_max: float, cap: int) -> float:
    """Largest reduced threshold <= q_max whose enumeration stays near ``cap`` points."""
    est = estimated_count(EllipsoidQuery.from_radius_sq(R, q_max, bc.quadrant))
    if est <= cap:
        return q_max
    return q_max * (cap / est) ** (2.0 / R.dim)


def _log_grid(lo: float, hi: float, points: int) -> np.ndarray:
    return np.geomspace(lo, hi, points) if hi > lo else np.array([hi])


def _verify_polya(bc: BoundaryCondition, grid: GridSpec, col: _Collector, consts: list) -> None:
    for n in grid.dims:
        for R in _suite_cuboids(n, grid):
            if bc is DIRICHLET:
                vals = PI2 * first_reduced_values(R, bc, grid.k_max)
            else:
                vals = PI2 * first_reduced_values(R, bc, grid.k_max + 1)[1:]
            ks = np.arange(1, grid.k_max + 1)
            rhs = grid.inflate * polya_bound(n, ks)
            sense = "lower" if bc is DIRICHLET else "upper"
            col.compare(vals, rhs, sense, lambda i, n=n, R=R: {"n": n, "sides": _sides(R), "k": int(ks[i])})


def _counting_suite(bc: BoundaryCondition, grid: GridSpec, col: _Collector, consts: list) -> None:
    for n in grid.dims:
        base = derive_bound_constants(n, bc)
        c = BoundConstants(n, bc, base.c1 * grid.inflate, base.c2, base.b0, base.source)
        consts.append(c.as_dict())
        q_max = grid.max_threshold / PI2
        for R in _suite_cuboids(n, grid):
            a1 = R.shortest
            q_jump = _enumeration_limit(R, bc, q_max, grid.jump_cap)
            u, counts = _jump_data(R, bc, q_jump)
            lam = PI2 * u
            g = _log_grid(PI2 * min(R.weights()), grid.max_threshold, grid.grid_points)
            g_counts = count_many(R, g / PI2, bc.quadrant)
            if bc is DIRICHLET:
                for frac in grid.b_fractions:
                    b = frac * c.b0
                    for pts, cnt, tag in ((lam, counts, "jump"), (g, g_counts, "grid")):
                        rhs = _dirichlet_terms(n, a1, pts, 0.0, c, b)
                        col.compare(cnt, rhs, "upper", lambda i, pts=pts, b=b, R=R, tag=tag: {
                            "n": n, "sides": _sides(R), "b": b, "threshold": float(pts[i]), "point": tag})
            else:
                right = np.append(lam[1:], PI2 * q_jump)
                rhs = _neumann_terms(n, a1, right, 0.0, c)
                col.compare(counts, rhs, "lower", lambda i, R=R: {
                    "n": n, "sides": _sides(R), "threshold": float(right[i]), "point": "left-limit"})
                rhs = _neumann_terms(n, a1, g, 0.0, c)
                col.compare(g_counts, rhs, "lower", lambda i, R=R: {
                    "n": n, "sides": _sides(R), "threshold": float(g[i]), "point": "grid"})


def _riesz_at(values: np.ndarray, thresholds: np.ndarray, gamma: float) -> np.ndarray:
    """Riesz means of sorted absolute eigenvalues at each threshold."""
    if gamma == 1.0:
        csum = np.concatenate(([0.0], np.cumsum(values)))
        n = np.searchsorted(values, thresholds, side="right")
        return n * thresholds - csum[n]
    out = np.empty(len(thresholds))
    for i, t in enumerate(thresholds):
        gaps = t - values[: np.searchsorted(values, t, side="right")]
        out[i] = math.fsum(gaps**gamma)
    return out


def _riesz_suite(bc: BoundaryCondition, grid: GridSpec, col: _Collector, consts: list) -> None:
    for n in grid.dims:
        base = derive_bound_constants(n, bc)
        c = BoundConstants(n, bc, base.c1 * grid.inflate, base.c2, base.b0, base.source)
        consts.append(c.as_dict())
        for R in _suite_cuboids(n, grid):
            a1 = R.shortest
            vals = PI2 * enumerate_values(EllipsoidQuery.from_radius_sq(R, grid.max_threshold / PI2, bc.quadrant))
            g = _log_grid(PI2 * min(R.weights()), grid.max_threshold, 4 * grid.grid_points)
            for gamma in grid.gammas:
                pts = g
                if gamma == 1.0:
                    pts = np.union1d(g, vals)
                lhs = _riesz_at(vals, pts, gamma)
                fracs = grid.b_fractions if bc is DIRICHLET else (0.0,)
                for frac in fracs:
                    b = frac * c.b0
                    if bc is DIRICHLET:
                        rhs, sense = _dirichlet_terms(n, a1, pts, gamma, c, b), "upper"
                    else:
                        rhs, sense = _neumann_terms(n, a1, pts, gamma, c), "lower"
                    col.compare(lhs, rhs, sense, lambda i, pts=pts, b=b, gamma=gamma, R=R: {
                        "n": n, "sides": _sides(R), "gamma": gamma, "b": b, "threshold": float(pts[i])})


def _average_suite(grid: GridSpec, col: _Collector, consts: list) -> None:
    for n in grid.dims:
        base = derive_bound_constants(n, DIRICHLET)
        c = BoundConstants(n, DIRICHLET, base.c1 * grid.inflate, base.c2, base.b0, base.source)
        consts.append(c.as_dict())
        ks = np.arange(1, grid.k_max + 1)
        for R in _suite_cuboids(n, grid):
            vals = PI2 * first_reduced_values(R, DIRICHLET, grid.k_max)
            avg = np.cumsum(vals) / ks
            for frac in grid.b_fractions:
                b = frac * c.b0
                rhs = average_lower_bound(R, ks, b, c)
                col.compare(avg, rhs, "lower", lambda i, b=b, R=R: {
                    "n": n, "sides": _sides(R), "b": b, "k": int(ks[i])})


_CHUNK = 1_000_000


def _lambda_chunks(grid: GridSpec):
    m = int(round(grid.max_threshold / grid.step))
    for start in range(0, m + 1, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, m + 1))
        yield idx * grid.step


def _appendix_a1(grid: GridSpec, col: _Collector, consts: list) -> None:
    c1 = ONED_DIRICHLET_C1 * grid.inflate
    consts.append({"dim": 1, "bc": "dirichlet", "c1": c1, "c2": ONED_DIRICHLET_C2, "b0": ONED_DIRICHLET_B0})
    for lam in _lambda_chunks(grid):
        exact = oned_riesz1_exact(DIRICHLET, lam)
        major = oned_dirichlet_majorant(lam)
        col.compare(exact, major, "upper", lambda i, lam=lam: {"check": "majorant", "threshold": float(lam[i])})
        above = lam > 1.0
        for frac in grid.b_fractions:
            b = frac * ONED_DIRICHLET_B0
            rhs = oned_dirichlet_bound(lam, b, c1)
            col.compare(exact, rhs, "upper", lambda i, lam=lam, b=b: {
                "check": "bound", "b": b, "threshold": float(lam[i])})
            la = lam[above]
            col.compare(major[above], rhs[above], "upper", lambda i, la=la, b=b: {
                "check": "majorant-vs-bound", "b": b, "threshold": float(la[i])})


def _appendix_a2(grid: GridSpec, col: _Collector, consts: list) -> None:
    c1 = ONED_NEUMANN_C1 * grid.inflate
    consts.append({"dim": 1, "bc": "neumann", "c1": c1})
    for mu in _lambda_chunks(grid):
        exact = oned_riesz1_exact(NEUMANN, mu)
        minor = oned_neumann_minorant(mu)
        rhs = oned_neumann_bound(mu, c1)
        col.compare(exact, minor, "lower", lambda i, mu=mu: {"check": "minorant", "threshold": float(mu[i])})
        col.compare(exact, rhs, "lower", lambda i, mu=mu: {"check": "bound", "threshold": float(mu[i])})
        above = mu >= 1.0
        ma = mu[above]
        col.compare(minor[above], rhs[above], "lower", lambda i, ma=ma: {
            "check": "minorant-vs-bound", "threshold": float(ma[i])})


def verify_bound(bound_id: str, grid: GridSpec | None = None, slack: float = SLACK) -> BoundReport:
    """Evaluate one inequality family over a seeded grid and collect violations.

    ``grid.inflate`` multiplies the constant under test (the Weyl constant
    for the Polya suites, c1 otherwise) and exists for negative controls.
    """
    grid = resolve_grid(bound_id, grid)
    col = _Collector(slack)
    consts: list[dict] = []
    if bound_id == "polya-D":
        _verify_polya(DIRICHLET, grid, col, consts)
    elif bound_id == "polya-N":
        _verify_polya(NEUMANN, grid, col, consts)
    elif bound_id == "lemma21":
        _counting_suite(DIRICHLET, grid, col, consts)
    elif bound_id == "lemma22":
        _counting_suite(NEUMANN, grid, col, consts)
    elif bound_id == "lemma54":
        _riesz_suite(DIRICHLET, grid, col, consts)
    elif bound_id == "lemma55":
        _riesz_suite(NEUMANN, grid, col, consts)
    elif bound_id == "lemma56":
        _average_suite(grid, col, consts)
    elif bound_id == "appendixA1":
        _appendix_a1(grid, col, consts)
    else:
        _appendix_a2(grid, col, consts)
    return col.report(bound_id, grid, consts)
