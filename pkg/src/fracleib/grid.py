"""Periodic grids, discrete Fourier calculus, and grid-function containers.

All downstream modules work on samples of smooth periodic functions over the
box [-L/2, L/2)^n, n in {1, 2}.  The transform convention is

    F(xi) = integral f(x) exp(-2 pi i x.xi) dx,

discretized by the trapezoid rule h^n * sum, which is spectrally accurate for
smooth periodic integrands.  Sample points are x = h*(i - N/2); frequencies
live on the lattice (1/L)*Z^n and are stored centered, index j along an axis
meaning xi = (j - N/2)/L.  The index-0 bin along each frequency axis is the
unpaired -N/2 Nyquist mode.
"""

import csv
import dataclasses
import struct

import numpy as np

SPACE = "space"
FREQUENCY = "frequency"

_HEADER = struct.Struct("<BIdB")
_DOMAIN_CODE = {SPACE: 0, FREQUENCY: 1}
_DOMAIN_NAME = {0: SPACE, 1: FREQUENCY}


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: dimension n, N samples per axis, box side L."""

    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if self.N < 8 or self.N % 2:
            raise ValueError(f"N must be even and >= 8, got {self.N}")
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValueError(f"box side must be positive and finite, got {self.L}")
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self):
        return self.L / self.N

    @property
    def shape(self):
        return (self.N,) * self.n

    def axis_points(self):
        return (np.arange(self.N) - self.N // 2) * self.h

    def axis_freqs(self):
        return (np.arange(self.N) - self.N // 2) / self.L

    def points(self):
        """Tuple of n coordinate meshes (ij indexing)."""
        ax = self.axis_points()
        if self.n == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))

    def freqs(self):
        ax = self.axis_freqs()
        if self.n == 1:
            return (ax,)
        return tuple(np.meshgrid(ax, ax, indexing="ij"))

    def refined(self, factor=2):
        return GridSpec(self.n, self.N * int(factor), self.L)


@dataclasses.dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a grid, tagged space or frequency."""

    spec: GridSpec
    values: np.ndarray
    domain: str = SPACE

    def __post_init__(self):
        if self.domain not in (SPACE, FREQUENCY):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.spec.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.spec.shape}"
            )
        object.__setattr__(self, "values", vals)

    def with_values(self, values, domain=None):
        return GridFunction(self.spec, values, domain or self.domain)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._combine(other, lambda a, b: b * a)

    def __neg__(self):
        return self.with_values(-self.values)

    def _combine(self, other, op):
        if isinstance(other, GridFunction):
            if other.spec != self.spec or other.domain != self.domain:
                raise ValueError("operands live on different grids or domains")
            return self.with_values(op(self.values, other.values))
        if np.isscalar(other):
            return self.with_values(op(self.values, other))
        return NotImplemented


def space_function(spec, values):
    return GridFunction(spec, values, SPACE)


def freq_function(spec, values):
    return GridFunction(spec, values, FREQUENCY)


def fourier(f):
    """Forward transform, h^n-weighted centered DFT."""
    if f.domain != SPACE:
        raise ValueError("fourier expects a space-domain function")
    vals = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    return GridFunction(f.spec, vals * f.spec.h**f.spec.n, FREQUENCY)


def inverse_fourier(F):
    if F.domain != FREQUENCY:
        raise ValueError("inverse_fourier expects a frequency-domain function")
    vals = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(F.values)))
    return GridFunction(F.spec, vals / F.spec.h**F.spec.n, SPACE)


def integral(f):
    """h^n * sum of samples (trapezoid rule on the torus)."""
    if f.domain != SPACE:
        raise ValueError("integral expects a space-domain function")
    return complex(f.values.sum()) * f.spec.h**f.spec.n


def l2_norm(f):
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2).real * f.spec.h**f.spec.n))


def pointwise_product(f, g):
    if f.spec != g.spec:
        raise ValueError("operands live on different grids")
    if f.domain != SPACE or g.domain != SPACE:
        raise ValueError("pointwise products are for space-domain functions")
    return f.with_values(f.values * g.values)


def pointwise_combine(op, *fs):
    """Apply `op` to the value arrays of space functions on one grid."""
    if not fs:
        raise ValueError("need at least one operand")
    spec = fs[0].spec
    for f in fs:
        if f.spec != spec or f.domain != SPACE:
            raise ValueError("operands live on different grids or domains")
    return GridFunction(spec, op(*[f.values for f in fs]), SPACE)


def shift(f, a):
    """g(x) = f(x - a), exact roll for grid-multiple shifts, spectral otherwise."""
    if f.domain != SPACE:
        raise ValueError("shift expects a space-domain function")
    spec = f.spec
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.shape != (spec.n,):
        raise ValueError(f"shift vector must have length {spec.n}")
    steps = a / spec.h
    rounded = np.round(steps)
    if np.max(np.abs(steps - rounded)) < 1e-12:
        vals = f.values
        for axis, r in enumerate(rounded.astype(int)):
            vals = np.roll(vals, r, axis=axis)
        return f.with_values(vals)
    F = fourier(f)
    phase = np.zeros(spec.shape)
    for mesh, ai in zip(spec.freqs(), a):
        phase = phase + mesh * ai
    return inverse_fourier(F.with_values(F.values * np.exp(-2j * np.pi * phase)))


def refine(f, factor=2):
    """Resample on an N*factor grid by spectral zero padding.

    Band-limited inputs are reproduced exactly at the new sample points; smooth
    inputs to spectral accuracy.
    """
    if f.domain != SPACE:
        raise ValueError("refine expects a space-domain function")
    factor = int(factor)
    if factor < 1:
        raise ValueError("refinement factor must be a positive integer")
    if factor == 1:
        return f
    spec = f.spec
    spec2 = spec.refined(factor)
    F = fourier(f).values
    out = np.zeros(spec2.shape, dtype=np.complex128)
    off = (spec2.N - spec.N) // 2
    sl = tuple(slice(off, off + spec.N) for _ in range(spec.n))
    out[sl] = F
    return inverse_fourier(freq_function(spec2, out))


def make_test_function(spec, kind, **params):
    """Deterministic periodic test functions.

    kinds: gaussian(center, width, amplitude), modulated_gaussian(freq, ...),
    bump_sum(centers, widths, amplitudes), random_bandlimited(seed, band,
    real).  Gaussians are narrow relative to the box so their periodization
    error sits at machine precision.
    """
    builders = {
        "gaussian": _gaussian,
        "modulated_gaussian": _modulated_gaussian,
        "bump_sum": _bump_sum,
        "random_bandlimited": _random_bandlimited,
    }
    if kind not in builders:
        raise ValueError(f"unknown test function kind {kind!r}; have {sorted(builders)}")
    return builders[kind](spec, **params)


def _as_vector(spec, v, name):
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape == (1,) and spec.n == 2:
        arr = np.full(2, arr[0])
    if arr.shape != (spec.n,):
        raise ValueError(f"{name} must be a scalar or length-{spec.n} sequence")
    return arr


def _gaussian_values(spec, center, width):
    if not 0 < width <= spec.L / 8:
        raise ValueError(f"width must lie in (0, L/8] = (0, {spec.L / 8}], got {width}")
    r2 = np.zeros(spec.shape)
    for mesh, c in zip(spec.points(), center):
        r2 = r2 + (mesh - c) ** 2
    return np.exp(-np.pi * r2 / width**2)


def _gaussian(spec, center=0.0, width=1.0, amplitude=1.0):
    center = _as_vector(spec, center, "center")
    return space_function(spec, amplitude * _gaussian_values(spec, center, width))


def _modulated_gaussian(spec, freq=3.0, center=0.0, width=1.0, amplitude=1.0):
    center = _as_vector(spec, center, "center")
    freq = _as_vector(spec, freq, "freq")
    phase = np.zeros(spec.shape)
    for mesh, k in zip(spec.points(), freq):
        phase = phase + mesh * k
    vals = amplitude * _gaussian_values(spec, center, 1.0 if width is None else width)
    return space_function(spec, vals * np.exp(2j * np.pi * phase))


def _bump_sum(spec, centers, widths, amplitudes):
    if not (len(centers) == len(widths) == len(amplitudes)):
        raise ValueError("centers, widths, amplitudes must have equal length")
    vals = np.zeros(spec.shape, dtype=np.complex128)
    for c, w, a in zip(centers, widths, amplitudes):
        vals += a * _gaussian_values(spec, _as_vector(spec, c, "center"), w)
    return space_function(spec, vals)


def _random_bandlimited(spec, seed=0, band=None, real=False):
    """Random trig polynomial with spectrum in |xi| <= band (default N/(4L)).

    The default band keeps products of two draws representable on the grid
    without aliasing.  Normalized to unit L2 norm.
    """
    rng = np.random.default_rng(seed)
    if band is None:
        band = spec.N / (4 * spec.L)
    r2 = np.zeros(spec.shape)
    for mesh in spec.freqs():
        r2 = r2 + mesh**2
    r = np.sqrt(r2)
    mask = r <= band
    for axis in range(spec.n):
        sl = [slice(None)] * spec.n
        sl[axis] = 0
        mask[tuple(sl)] = False
    coeffs = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    envelope = np.exp(-2.0 * (r / band) ** 2)
    vals = np.where(mask, coeffs * envelope, 0.0)
    if real:
        flipped = vals.copy()
        for axis in range(spec.n):
            flipped = np.flip(flipped, axis=axis)
        # index 0 rows are already zero, so the pure flip pairs +xi with -xi
        vals = 0.5 * (vals + np.conj(flipped))
    f = inverse_fourier(freq_function(spec, vals))
    if real:
        f = f.with_values(f.values.real)
    nrm = l2_norm(f)
    if nrm == 0:
        raise ValueError("degenerate draw: empty band")
    return f.with_values(f.values / nrm)


def to_bytes(f):
    """Flat binary container: little-endian header (n, N, L, domain) + complex128 samples."""
    head = _HEADER.pack(f.spec.n, f.spec.N, f.spec.L, _DOMAIN_CODE[f.domain])
    return head + np.ascontiguousarray(f.values, dtype="<c16").tobytes()


def from_bytes(buf):
    if len(buf) < _HEADER.size:
        raise ValueError("buffer too short for header")
    n, N, L, dom = _HEADER.unpack_from(buf)
    if dom not in _DOMAIN_NAME:
        raise ValueError(f"unknown domain code {dom}")
    spec = GridSpec(n, N, L)
    expect = _HEADER.size + 16 * N**n
    if len(buf) != expect:
        raise ValueError(f"expected {expect} bytes for a {n}-d N={N} grid, got {len(buf)}")
    vals = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size).reshape(spec.shape)
    return GridFunction(spec, vals.astype(np.complex128), _DOMAIN_NAME[dom])


def save(f, path):
    with open(path, "wb") as fh:
        fh.write(to_bytes(f))
    return path


def load(path):
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def to_csv(f, path):
    """Row-major CSV dump for inspection: coordinates, re, im."""
    base = "xi" if f.domain == FREQUENCY else "x"
    if f.spec.n == 1:
        header = [base, "re", "im"]
        axis = f.spec.axis_points() if f.domain == SPACE else f.spec.axis_freqs()
        coords = [(c,) for c in axis]
    else:
        header = [base + "0", base + "1", "re", "im"]
        meshes = f.spec.points() if f.domain == SPACE else f.spec.freqs()
        coords = list(zip(meshes[0].ravel(), meshes[1].ravel()))
    flat = f.values.ravel()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for c, v in zip(coords, flat):
            writer.writerow(
                [repr(float(x)) for x in c] + [repr(float(v.real)), repr(float(v.imag))]
            )
    return path
