"""Domain types and special-function constants shared by every module."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

UNIT_MEASURE_TOL = 1e-12


class CuboidSpectraError(Exception):
    """Base class for all library errors."""


class InvalidInputError(CuboidSpectraError, ValueError):
    pass


class ResourceError(CuboidSpectraError):
    """A computation would exceed a configured size cap or integer width."""


class CountOverflowError(ResourceError, OverflowError):
    pass


class NumericError(CuboidSpectraError, ArithmeticError):
    """An iterative numerical routine did not reach its tolerance."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @classmethod
    def parse(cls, value: "BoundaryCondition | str") -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for bc in cls:
            if key in (bc.value, bc.value[0]):
                return bc
        raise InvalidInputError(f"unknown boundary condition {value!r}")

    @property
    def quadrant(self) -> str:
        # Dirichlet indices are positive, Neumann indices non-negative.
        return "positive" if self is BoundaryCondition.DIRICHLET else "nonnegative"

    @property
    def first_index(self) -> int:
        return 1 if self is BoundaryCondition.DIRICHLET else 0

    def __str__(self) -> str:
        return self.value


DIRICHLET = BoundaryCondition.DIRICHLET
NEUMANN = BoundaryCondition.NEUMANN


@dataclass(frozen=True)
class Cuboid:
    """Axis-aligned box prod (0, a_i) with sides kept in non-decreasing order."""

    sides: tuple[float, ...]

    def __post_init__(self):
        raw = tuple(float(s) for s in self.sides)
        if not raw:
            raise InvalidInputError("a cuboid needs at least one side")
        for s in raw:
            if not (s > 0.0) or not math.isfinite(s):
                raise InvalidInputError(f"side lengths must be positive and finite, got {s!r}")
        object.__setattr__(self, "sides", tuple(sorted(raw)))

    @classmethod
    def cube(cls, n: int) -> "Cuboid":
        if n < 1:
            raise InvalidInputError("dimension must be >= 1")
        return cls((1.0,) * n)

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def measure(self) -> float:
        return math.prod(self.sides)

    @property
    def shortest(self) -> float:
        return self.sides[0]

    @property
    def longest(self) -> float:
        return self.sides[-1]

    def is_unit(self, tol: float = UNIT_MEASURE_TOL) -> bool:
        return abs(self.measure - 1.0) <= tol

    def is_cube(self) -> bool:
        return all(s == 1.0 for s in self.sides)

    def scaled(self, t: float) -> "Cuboid":
        return Cuboid(tuple(t * s for s in self.sides))

    def weights(self) -> np.ndarray:
        """Inverse squared sides, the coefficients of the reduced quadratic form."""
        return np.array([1.0 / (s * s) for s in self.sides])

    def __str__(self) -> str:
        return "(" + ", ".join(f"{s:.12g}" for s in self.sides) + ")"


def make_unit_cuboid(raw_sides: Iterable[float]) -> Cuboid:
    """Rescale positive side lengths so that their product is one."""
    sides = [float(s) for s in raw_sides]
    if not sides:
        raise InvalidInputError("empty side sequence")
    if any(not (s > 0.0) or not math.isfinite(s) for s in sides):
        raise InvalidInputError(f"side lengths must be positive and finite: {sides}")
    n = len(sides)
    # geometric mean in log space avoids overflow for long or extreme inputs
    log_mean = math.fsum(math.log(s) for s in sides) / n
    scaled = sorted(math.exp(math.log(s) - log_mean) for s in sides)
    if all(s == sides[0] for s in sides):
        scaled = [1.0] * n
    return Cuboid(tuple(scaled))


def perimeter(R: Cuboid) -> float:
    """Surface measure 2 * sum_i prod_{j != i} a_j."""
    sides = R.sides
    total = math.fsum(math.prod(sides[:i] + sides[i + 1:]) for i in range(len(sides)))
    return 2.0 * total


def semiclassical_constant(gamma: float, m: int) -> float:
    """L_{gamma,m} = Gamma(gamma+1) / ((4 pi)^{m/2} Gamma(gamma + m/2 + 1)).

    ``m`` may be zero or negative; the only requirement is that the second
    Gamma argument is positive.
    """
    if gamma < 0:
        raise InvalidInputError("gamma must be non-negative")
    arg = gamma + 0.5 * m + 1.0
    if arg <= 0:
        raise InvalidInputError(f"Gamma pole: gamma + m/2 + 1 = {arg} <= 0")
    log_val = math.lgamma(gamma + 1.0) - 0.5 * m * math.log(4.0 * math.pi) - math.lgamma(arg)
    return math.exp(log_val)


def unit_ball_volume(n: int) -> float:
    if n < 1:
        raise InvalidInputError("dimension must be >= 1")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def weyl_constant(n: int) -> float:
    """4 pi Gamma(n/2 + 1)^{2/n}, the leading coefficient of lambda_k ~ C k^{2/n}."""
    return 4.0 * math.pi * math.exp(2.0 / n * math.lgamma(0.5 * n + 1.0))


_THETA_DEFAULTS = {2: 46.0 / 73.0, 3: 1.5, 4: 12.0 / 5.0}


@dataclass
class ThetaTable:
    """Uniform lattice-remainder exponents theta_n, overridable per dimension.

    The n=2 entry is Huxley's 46/73 with the ``+ epsilon`` dropped; the true
    admissible exponent is open-ended above it.
    """

    overrides: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for n, value in self.overrides.items():
            self._check(int(n), float(value))

    @staticmethod
    def _check(n: int, value: float) -> None:
        if n < 2:
            raise InvalidInputError("theta_n is defined for n >= 2")
        if not (n - 2 <= value < n - 1):
            raise InvalidInputError(f"theta_{n} must lie in [{n - 2}, {n - 1}), got {value}")

    def __getitem__(self, n: int) -> float:
        if n in self.overrides:
            return float(self.overrides[n])
        if n < 2:
            raise InvalidInputError("theta_n is defined for n >= 2")
        return _THETA_DEFAULTS.get(n, float(n - 2))

    def open_ended(self, n: int) -> bool:
        """True when the stored value stands for ``value + epsilon``."""
        return n == 2 and n not in self.overrides

    def as_dict(self, dims: Sequence[int] = (2, 3, 4, 5, 6)) -> dict[int, float]:
        return {n: self[n] for n in dims}

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "ThetaTable":
        return cls({int(k): float(v) for k, v in mapping.items()})


DEFAULT_THETA = ThetaTable()


@dataclass(frozen=True)
class BoundConstants:
    dim: int
    bc: BoundaryCondition
    c1: float
    c2: float = 0.0
    b0: float = 1.0
    source: str = "derived"

    def __post_init__(self):
        if not self.c1 > 0:
            raise InvalidInputError("c1 must be positive")
        if self.bc is DIRICHLET:
            if self.c2 < 0:
                raise InvalidInputError("c2 must be non-negative")
            if not (0 < self.b0 <= 1):
                raise InvalidInputError("b0 must lie in (0, 1]")

    def as_dict(self) -> dict:
        out = {"dim": self.dim, "bc": self.bc.value, "c1": self.c1, "source": self.source}
        if self.bc is DIRICHLET:
            out.update(c2=self.c2, b0=self.b0)
        return out


def random_unit_cuboids(
    n: int,
    count: int,
    seed: int,
    lo: float = 1.0 / 3.0,
    hi: float = 3.0,
) -> list[Cuboid]:
    """Seeded unit-measure cuboids with every side in [lo, hi].

    Log-sides are drawn uniformly and normalised to zero sum; draws that
    leave the box are rejected.
    """
    if n < 1 or count < 0:
        raise InvalidInputError("need n >= 1 and count >= 0")
    if n == 1:
        return [Cuboid((1.0,))] * count
    rng = np.random.default_rng(seed)
    span = math.log(hi) - math.log(lo)
    out: list[Cuboid] = []
    while len(out) < count:
        v = rng.uniform(-0.5 * span, 0.5 * span, size=n)
        v -= v.mean()
        sides = np.exp(v)
        if sides.min() < lo or sides.max() > hi:
            continue
        out.append(make_unit_cuboid(sides))
    return out
