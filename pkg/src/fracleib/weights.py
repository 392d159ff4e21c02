"""Muckenhoupt weights, maximal averages, and the bounded-iteration machinery.

Cube families are grid-aligned non-wrapping windows (intervals in 1-d,
axis-aligned squares in 2-d) with discrete uniform averages; the scans run in
`fracleib.kernels`.  Power weights |x|^a regularize the origin sample by the
exact average of |x|^a over the origin cell, so characteristics stay finite at
every resolution while keeping the continuum admissibility dichotomy.
"""

import dataclasses
import json
import math

import numpy as np

from . import kernels
from .grid import SPACE, GridFunction, GridSpec, space_function


class WeightOverflowError(ArithmeticError):
    """A characteristic or dual-power computation left the float range."""


@dataclasses.dataclass(frozen=True, eq=False)
class Weight:
    """Positive samples of a weight on a grid."""

    spec: GridSpec
    array: np.ndarray
    kind: str = "custom"
    params: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=np.float64)
        if arr.shape != self.spec.shape:
            raise ValueError("weight samples do not match the grid shape")
        if not np.isfinite(arr).all() or (arr <= 0).any():
            raise ValueError("weights must be strictly positive and finite")
        object.__setattr__(self, "array", arr)

    def as_grid_function(self):
        return space_function(self.spec, self.array)


def _origin_cell_average_1d(h, a):
    # (1/h) * integral_{-h/2}^{h/2} |x|^a dx, finite for a > -1
    return (h / 2.0) ** a / (a + 1.0)


_GL_NODES = np.polynomial.legendre.leggauss(64)


def _origin_cell_average_2d(h, a):
    # (1/h^2) * integral over the origin cell of |x|^a, finite for a > -2
    x, w = _GL_NODES
    pts = 0.5 * h * x  # cell [-h/2, h/2]^2 mapped from [-1, 1]^2
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    vals = (X * X + Y * Y) ** (a / 2.0)
    wts = np.outer(w, w) * (0.5 * h) ** 2
    return float(np.sum(vals * wts)) / h**2


def power_weight(spec, a):
    """w(x) = |x|^a with the origin sample replaced by its cell average."""
    a = float(a)
    if a <= -spec.n:
        raise ValueError(f"power weight requires a > -n = {-spec.n}, got {a}")
    meshes = spec.points()
    r2 = np.zeros(spec.shape)
    for m in meshes:
        r2 = r2 + m * m
    r = np.sqrt(r2)
    with np.errstate(divide="ignore"):
        vals = np.where(r > 0, np.where(r > 0, r, 1.0) ** a, 1.0)
    origin = tuple([spec.N // 2] * spec.n)
    if a != 0:
        if spec.n == 1:
            vals[origin] = _origin_cell_average_1d(spec.h, a)
        else:
            vals[origin] = _origin_cell_average_2d(spec.h, a)
    if not np.isfinite(vals).all():
        raise WeightOverflowError(f"|x|^{a} overflows on this grid")
    return Weight(spec, vals, "power", {"a": a})


def two_value_weight(spec, t, split=0.0):
    """w = 1 where x_0 < split, t where x_0 >= split."""
    t = float(t)
    if not (t > 0 and np.isfinite(t)):
        raise ValueError("two-value weight needs t > 0")
    first = spec.points()[0]
    vals = np.where(first >= split, t, 1.0)
    return Weight(spec, vals, "two_value", {"t": t, "split": float(split)})


def custom_weight(spec, values, name="custom", **params):
    return Weight(spec, np.asarray(values, dtype=float), name, params)


def maximal(f):
    """Discrete Hardy-Littlewood maximal function over non-wrapping cubes."""
    if f.domain != SPACE:
        raise ValueError("maximal expects a space-domain function")
    return space_function(f.spec, kernels.maximal(np.abs(f.values)))


@dataclasses.dataclass(frozen=True)
class ApReport:
    """A_p characteristic with the witness cube that attains it."""

    p: float
    characteristic: float
    witness_start: tuple
    witness_length: int
    grid: GridSpec
    weight_kind: str
    weight_params: dict


def ap_characteristic(w, p):
    """[w]_{A_p} = sup over cubes of (avg w)(avg w^{-1/(p-1)})^{p-1}; p = 1 uses
    (avg w) * sup_Q w^{-1}."""
    p = float(p)
    if p < 1:
        raise ValueError(f"A_p needs p >= 1, got {p}")
    if p == 1:
        best, start, ell = kernels.a1_scan(w.array)
    else:
        with np.errstate(over="raise", divide="raise"):
            try:
                sigma = w.array ** (-1.0 / (p - 1.0))
            except FloatingPointError as exc:
                raise WeightOverflowError(
                    f"w^(-1/(p-1)) overflows for p={p}; characteristic not representable"
                ) from exc
        if not np.isfinite(sigma).all():
            raise WeightOverflowError(
                f"w^(-1/(p-1)) overflows for p={p}; characteristic not representable"
            )
        best, start, ell = kernels.ap_product_scan(w.array, sigma, p - 1.0)
    if not math.isfinite(best):
        raise WeightOverflowError(f"A_{p} characteristic overflowed on this grid")
    return ApReport(p, float(best), start, ell, w.spec, w.kind, dict(w.params))


def ap_report_json(report):
    payload = {
        "p": report.p,
        "characteristic": report.characteristic,
        "witness": {"start": list(report.witness_start), "length": report.witness_length},
        "grid": {"n": report.grid.n, "N": report.grid.N, "L": report.grid.L},
        "weight": {"kind": report.weight_kind, "params": report.weight_params},
    }
    return json.dumps(payload, sort_keys=True)


def average_over_ball(f, center, radius):
    """Mean of f over the periodic-metric ball B(center, radius); radius in [h, L/2]."""
    if f.domain != SPACE:
        raise ValueError("average_over_ball expects a space-domain function")
    spec = f.spec
    radius = float(radius)
    if radius < spec.h * (1 - 1e-12):
        raise ValueError(f"radius must be at least one cell, h = {spec.h}")
    if radius > spec.L / 2:
        raise ValueError(f"radius must be at most L/2 = {spec.L / 2}")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (spec.n,):
        raise ValueError(f"center must be a scalar or length-{spec.n} point")
    d2 = np.zeros(spec.shape)
    for mesh, c in zip(spec.points(), center):
        delta = np.abs(mesh - c) % spec.L
        delta = np.minimum(delta, spec.L - delta)
        d2 = d2 + delta * delta
    mask = np.sqrt(d2) <= radius
    count = int(mask.sum())
    if count == 0:
        raise ValueError("ball contains no grid samples")
    return complex(f.values[mask].mean())


def rademacher(k, t):
    """k-th Rademacher function on [0, 1): -1 on the first half of each dyadic cell."""
    k = int(k)
    if k < 0:
        raise ValueError("index must be nonnegative")
    t = np.asarray(t, dtype=float)
    if (t < 0).any() or (t >= 1).any():
        raise ValueError("arguments must lie in [0, 1)")
    bits = np.floor(t * 2.0 ** (k + 1)).astype(np.int64) & 1
    return np.where(bits == 0, -1.0, 1.0)


def rademacher_nodes(m=4096):
    """Midpoint quadrature nodes on [0, 1); exact for Rademacher products up to
    index log2(m) - 1."""
    return (np.arange(m) + 0.5) / m


def _resolve_norm(norm):
    if callable(norm):
        return norm
    from . import spaces

    if isinstance(norm, spaces.ExponentFunction):
        return lambda f: spaces.variable_norm(f, norm)
    raise TypeError("norm must be a callable or an ExponentFunction")


@dataclasses.dataclass(frozen=True)
class RubioResult:
    """Truncated bounded-iteration majorant R tau = sum_k M^k tau / (2A)^k."""

    function: GridFunction
    tail_bound: float
    a_bound: float
    k_terms: int
    last_power: GridFunction  # M^K tau, undivided, for certificate checks


def rubio_iterate(tau, norm, a_bound, k_terms=12):
    """Sum k = 0..K of M^k tau / (2A)^k; reports the geometric tail bound
    2 ||M^K tau|| / (2A)^K in the supplied norm.

    Guarantees by construction: R tau >= tau pointwise, ||R tau|| <= 2 ||tau||
    whenever ||M|| <= A in the same norm, and M(R tau) <= 2A R tau + the tail
    correction (M^{K+1} tau)/(2A)^K.
    """
    if tau.domain != SPACE:
        raise ValueError("rubio_iterate expects a space-domain function")
    vals = tau.values
    if np.abs(vals.imag).max() > 1e-12 * max(np.abs(vals).max(), 1e-300):
        raise ValueError("tau must be real and nonnegative")
    cur = np.abs(vals.real)
    if (vals.real < 0).any():
        raise ValueError("tau must be nonnegative")
    a_bound = float(a_bound)
    if a_bound < 1:
        raise ValueError("the maximal-operator bound must be >= 1")
    norm_fn = _resolve_norm(norm)
    acc = cur.copy()
    scale = 1.0
    for _ in range(int(k_terms)):
        cur = kernels.maximal(cur)
        scale /= 2.0 * a_bound
        acc += cur * scale
    last = space_function(tau.spec, cur)
    tail = 2.0 * scale * norm_fn(last)
    return RubioResult(space_function(tau.spec, acc), tail, a_bound, int(k_terms), last)


def estimate_maximal_norm(spec, norm, n_probes=100, seed=0, inflate=1.5):
    """Probe ||M f|| / ||f|| on random nonnegative band-limited functions and
    inflate the max; a practical stand-in for the operator norm."""
    from .grid import make_test_function

    norm_fn = _resolve_norm(norm)
    rng = np.random.default_rng(seed)
    best = 1.0
    for _ in range(int(n_probes)):
        f = make_test_function(spec, "random_bandlimited", seed=int(rng.integers(2**63)))
        g = space_function(spec, np.abs(f.values))
        denom = norm_fn(g)
        if denom == 0:
            continue
        best = max(best, norm_fn(maximal(g)) / denom)
    return best * inflate
