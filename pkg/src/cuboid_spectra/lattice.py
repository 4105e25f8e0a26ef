"""Counting and enumerating integer points in axis-aligned ellipsoids.

The ellipsoid attached to a cuboid R and a reduced radius t is
``sum_j x_j^2 / a_j^2 <= t^2``.  Points on the boundary are counted; a
point is accepted when its reduced value q satisfies
``q <= t^2 * (1 + 4 eps)`` so that thresholds which are themselves lattice
values are never lost to rounding.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import Cuboid, CountOverflowError, InvalidInputError, ResourceError, unit_ball_volume

QUADRANTS = {"full": _kernels.FULL, "positive": _kernels.POSITIVE, "nonnegative": _kernels.NONNEGATIVE}

BOUNDARY_RTOL = 4.0 * np.finfo(float).eps
COUNT_LIMIT = 2**62
DEFAULT_ENUMERATION_CAP = 10**8
# below this estimated count the serial kernel wins over thread start-up
PARALLEL_THRESHOLD = 2_000_000


@dataclass(frozen=True)
class EllipsoidQuery:
    cuboid: Cuboid
    t: float
    quadrant: str = "positive"
    radius_sq: float = field(default=None, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self.quadrant not in QUADRANTS:
            raise InvalidInputError(f"unknown quadrant {self.quadrant!r}")
        if not (self.t >= 0) or not math.isfinite(self.t):
            raise InvalidInputError(f"radius must be non-negative, got {self.t!r}")
        if self.radius_sq is None:
            object.__setattr__(self, "radius_sq", float(self.t) * float(self.t))

    @classmethod
    def from_radius_sq(cls, cuboid: Cuboid, t2: float, quadrant: str = "positive") -> "EllipsoidQuery":
        """Build from t^2 directly, avoiding a sqrt/square round trip."""
        if not (t2 >= 0):
            raise InvalidInputError(f"squared radius must be non-negative, got {t2!r}")
        return cls(cuboid, math.sqrt(t2), quadrant, float(t2))

    @property
    def threshold(self) -> float:
        return self.radius_sq * (1.0 + BOUNDARY_RTOL)


def _iteration_weights(cuboid: Cuboid) -> np.ndarray:
    # longest side outermost, second-longest resolved in closed form
    sides = cuboid.sides
    if len(sides) <= 2:
        order = list(reversed(range(len(sides))))
    else:
        order = [len(sides) - 1] + list(range(len(sides) - 2)) + [len(sides) - 2]
    return np.array([1.0 / (sides[j] * sides[j]) for j in order])


def estimated_count(query: EllipsoidQuery) -> float:
    """Volume heuristic for the number of points, generous for small radii."""
    R = query.cuboid
    n = R.dim
    vol = unit_ball_volume(n) * query.t**n * R.measure
    if query.quadrant == "full":
        pad = math.prod(2.0 * query.t * a + 1.0 for a in R.sides)
    else:
        vol /= 2**n
        pad = math.prod(query.t * a + 1.0 for a in R.sides)
    return max(vol, min(pad, 4.0 * vol + 1.0))


def _check_overflow(query: EllipsoidQuery) -> None:
    est = unit_ball_volume(query.cuboid.dim) * query.t**query.cuboid.dim * query.cuboid.measure
    if query.quadrant == "full":
        est = math.prod(2.0 * query.t * a + 1.0 for a in query.cuboid.sides)
    if est >= COUNT_LIMIT:
        raise CountOverflowError(f"estimated count {est:.3g} exceeds 2^62")


def count_points(query: EllipsoidQuery) -> int:
    """Exact number of lattice points of the chosen quadrant in the closed ellipsoid."""
    _check_overflow(query)
    w = _iteration_weights(query.cuboid)
    mode = QUADRANTS[query.quadrant]
    if estimated_count(query) > PARALLEL_THRESHOLD:
        return int(_kernels.count_parallel(w, query.threshold, mode))
    return int(_kernels.count_serial(w, query.threshold, mode))


def count_many(cuboid: Cuboid, radii_sq, quadrant: str = "positive") -> np.ndarray:
    """Counts at several squared radii, as an int64 array in input order."""
    t2 = np.asarray(radii_sq, dtype=float)
    out = np.empty(t2.shape, dtype=np.int64)
    for i, r2 in enumerate(t2.flat):
        out.flat[i] = count_points(EllipsoidQuery.from_radius_sq(cuboid, float(r2), quadrant))
    return out


def enumerate_values(query: EllipsoidQuery, cap: int | None = None, sort: bool = True) -> np.ndarray:
    """Reduced values q <= t^2 of the quadrant, one entry per lattice point.

    Returned ascending unless ``sort=False`` (then in a fixed kernel order).
    """
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    est = estimated_count(query)
    if est > 4 * cap:
        raise ResourceError(f"enumeration would produce about {est:.3g} values (cap {cap})")
    exact = count_points(query)
    if exact > cap:
        raise ResourceError(f"enumeration would produce {exact} values (cap {cap})")
    values = _kernels.enumerate_values(_iteration_weights(query.cuboid), query.threshold, QUADRANTS[query.quadrant])
    if sort:
        values.sort(kind="stable")
    return values


@dataclass(frozen=True)
class DecompositionCheck:
    full: int
    reconstructed: int
    positive: int
    facet_counts: dict[int, int]

    @property
    def ok(self) -> bool:
        return self.full == self.reconstructed


DECOMPOSITION_MAX_DIM = 6
DECOMPOSITION_MAX_POINTS = 5 * 10**7


def symmetric_decomposition_check(cuboid: Cuboid, t: float) -> DecompositionCheck:
    """Rebuild #(Z^n in E) from 2^n #(N^n in E) plus the coordinate sections.

    Points with at least one zero coordinate form the union of the sections
    E_i = E cap {x_i = 0}; inclusion-exclusion over index sets I counts that
    union from the full-lattice counts of the lower-dimensional ellipsoids
    E_I.  ``facet_counts[k]`` is the summed section count over all |I| = k.
    """
    n = cuboid.dim
    if n > DECOMPOSITION_MAX_DIM:
        raise ResourceError(f"decomposition check limited to n <= {DECOMPOSITION_MAX_DIM}")
    query = EllipsoidQuery(cuboid, t, "full")
    if estimated_count(query) > DECOMPOSITION_MAX_POINTS:
        raise ResourceError(f"radius {t} too large for the decomposition check")
    t2 = query.radius_sq
    full = count_points(query)
    positive = count_points(EllipsoidQuery.from_radius_sq(cuboid, t2, "positive"))
    facet_counts: dict[int, int] = {}
    union = 0
    for k in range(1, n + 1):
        subtotal = 0
        for removed in itertools.combinations(range(n), k):
            kept = tuple(a for j, a in enumerate(cuboid.sides) if j not in removed)
            if kept:
                subtotal += count_points(EllipsoidQuery.from_radius_sq(Cuboid(kept), t2, "full"))
            else:
                subtotal += 1  # the origin
        facet_counts[k] = subtotal
        union += (-1) ** (k + 1) * subtotal
    return DecompositionCheck(full, 2**n * positive + union, positive, facet_counts)


def set_workers(workers: int | str | None) -> int:
    """Configure the kernel thread count; returns the count actually used."""
    import numba

    if workers in (None, "auto"):
        env = os.environ.get("CUBOID_SPECTRA_WORKERS")
        workers = int(env) if env and env != "auto" else numba.config.NUMBA_NUM_THREADS
    workers = int(workers)
    if workers < 1:
        raise InvalidInputError("workers must be >= 1")
    used = min(workers, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(used)
    return used
