"""Laplacian spectra of cuboids: lattice counts, Riesz means, bounds and extremal shapes."""

import warnings

# numba emits a one-off warning when the TBB threading layer is too old; the workqueue layer is used instead
warnings.filterwarnings("ignore", message=".*TBB.*")

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    Cuboid,
    CuboidSpectraError,
    InvalidInputError,
    ResourceError,
    make_unit_cuboid,
)
from .spectrum import counting_function, eigenvalue, riesz_mean, RieszSpec  # noqa: E402

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "BoundaryCondition",
    "Cuboid",
    "CuboidSpectraError",
    "InvalidInputError",
    "ResourceError",
    "RieszSpec",
    "counting_function",
    "eigenvalue",
    "make_unit_cuboid",
    "riesz_mean",
]
