"""fracleib: pseudospectral fractional-Leibniz toolkit.

Periodic grids and discrete Fourier calculus (`grid`), linear and bilinear
frequency multipliers with Littlewood-Paley families (`multipliers`),
Muckenhoupt weights and averaging operators (`weights`), weighted / variable /
Lorentz / Morrey norms (`spaces`), fractional Leibniz decompositions and
commutator expansions (`katoponce`), and a seeded verification harness with a
CLI (`harness`, `cli`).
"""

from . import grid, harness, katoponce, kernels, multipliers, spaces, weights
from .grid import (
    FREQUENCY,
    SPACE,
    GridFunction,
    GridSpec,
    fourier,
    inverse_fourier,
    make_test_function,
)

__version__ = "0.1.0"

__all__ = [
    "FREQUENCY",
    "SPACE",
    "GridFunction",
    "GridSpec",
    "fourier",
    "grid",
    "harness",
    "inverse_fourier",
    "katoponce",
    "kernels",
    "make_test_function",
    "multipliers",
    "spaces",
    "weights",
    "__version__",
]
