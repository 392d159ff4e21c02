"""Frequency multipliers: linear and bilinear symbols, Littlewood-Paley
families, translated-kernel convolutions, and multiplier-size functionals.

The smooth bump underlying everything is S(u) = c * integral_{-1}^{u}
exp(-1/(1-t^2)) dt, normalized so S(1) = 1, tabulated once on 2^14+1 nodes
with a cumulative Simpson rule and interpolated by a clamped cubic spline
(value error ~1e-15, smooth enough for finite-difference derivative probes).
phi_hat(r) = S(3-2r) equals 1 on r <= 1 and vanishes for r >= 2;
psi(r) = phi_hat(r) - phi_hat(2r) is supported on 1/2 <= r <= 2.  Scaling by
exact powers of two makes the dyadic telescoping sum cancel bitwise.
"""

import dataclasses
import itertools
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import (
    FREQUENCY,
    SPACE,
    GridFunction,
    GridSpec,
    fourier,
    freq_function,
    inverse_fourier,
    load,
    space_function,
)

_SMOOTH_NODES = 2**14 + 1
_smoothstep_spline = None


def _build_smoothstep():
    t = np.linspace(-1.0, 1.0, _SMOOTH_NODES)
    inner = 1.0 - t * t
    y = np.zeros(_SMOOTH_NODES)
    pos = inner > 0
    y[pos] = np.exp(-1.0 / inner[pos])
    h = t[1] - t[0]
    cum = np.empty(_SMOOTH_NODES)
    cum[0] = 0.0
    pair = (h / 3.0) * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    cum[2::2] = np.cumsum(pair)
    cum[1::2] = cum[0:-1:2] + (h / 12.0) * (5.0 * y[0:-2:2] + 8.0 * y[1::2] - y[2::2])
    cum /= cum[-1]
    return CubicSpline(t, cum, bc_type="clamped")


def smoothstep(u):
    """Normalized C-infinity step: 0 for u <= -1, 1 for u >= 1."""
    global _smoothstep_spline
    if _smoothstep_spline is None:
        _smoothstep_spline = _build_smoothstep()
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty_like(arr)
    low = arr <= -1.0
    high = arr >= 1.0
    mid = ~(low | high)
    out[low] = 0.0
    out[high] = 1.0
    if mid.any():
        out[mid] = np.clip(_smoothstep_spline(arr[mid]), 0.0, 1.0)
    return out if np.ndim(u) else float(out[0])


def phi_profile(r):
    """Radial low-pass profile: 1 on r <= 1, supported in r <= 2, nonincreasing."""
    return smoothstep(3.0 - 2.0 * np.asarray(r, dtype=float))


def psi_profile(r):
    """Annulus profile phi(r) - phi(2r), supported in 1/2 <= r <= 2, equals 1 at r = 1."""
    r = np.asarray(r, dtype=float)
    return phi_profile(r) - phi_profile(2.0 * r)


def _sqrt_psi_profile(r):
    return np.sqrt(np.clip(psi_profile(r), 0.0, None))


def _sqrt_phi_profile(r):
    return np.sqrt(np.clip(phi_profile(r), 0.0, None))


@dataclasses.dataclass(frozen=True)
class LittlewoodPaleyFamily:
    """Radial dyadic family; psi at scale k means psi(2^-k |xi|).

    kind "telescoping": sum_k psi(2^-k r) telescopes to phi_hat(2^-M r)
    exactly.  kind "squared_normalized": the squares sum to c_phi = 1.
    """

    kind: str
    phi_hat: object
    psi: object
    c_phi: float


def build_lp_family(kind="telescoping"):
    if kind == "telescoping":
        return LittlewoodPaleyFamily(kind, phi_profile, psi_profile, 1.0)
    if kind == "squared_normalized":
        return LittlewoodPaleyFamily(kind, _sqrt_phi_profile, _sqrt_psi_profile, 1.0)
    raise ValueError(f"unknown family kind {kind!r}")


def dyadic_scale_range(spec, margin=3):
    """Scales k whose annuli can meet the grid's frequency lattice, padded."""
    rmin = 1.0 / spec.L
    rmax = math.sqrt(spec.n) * (spec.N / 2) / spec.L
    kmin = math.floor(math.log2(rmin)) - 1 - margin
    kmax = math.ceil(math.log2(rmax)) + 1 + margin
    return range(kmin, kmax + 1)


def scale_arg(r, k):
    """2^-k r as an exact power-of-two scaling."""
    return np.ldexp(np.asarray(r, dtype=float), -k)


def _radius(meshes):
    if len(meshes) == 1:
        return np.abs(np.asarray(meshes[0], dtype=float))
    r2 = np.zeros(np.broadcast(*meshes).shape)
    for m in meshes:
        r2 = r2 + np.asarray(m, dtype=float) ** 2
    return np.sqrt(r2)


def _zero_nyquist(arr, n):
    for axis in range(n):
        sl = [slice(None)] * n
        sl[axis] = 0
        arr[tuple(sl)] = 0


def zero_nyquist(F):
    """Zero the unpaired -N/2 modes of a frequency-domain function."""
    if F.domain != FREQUENCY:
        raise ValueError("zero_nyquist expects a frequency-domain function")
    vals = F.values.copy()
    _zero_nyquist(vals, F.spec.n)
    return F.with_values(vals)


@dataclasses.dataclass(frozen=True)
class LinearSymbol:
    """Fourier multiplier m(xi); rule takes the n frequency meshes."""

    kind: str
    rule: object
    s: float = None
    params: dict = dataclasses.field(default_factory=dict)


def ds(s):
    """|xi|^s, with the origin mapped to 0 for s != 0 and to 1 for s = 0."""
    s = float(s)

    def rule(*meshes):
        r = _radius(meshes)
        if s == 0:
            return np.ones_like(r)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, safe**s, 0.0)

    return LinearSymbol("Ds", rule, s)


def js(s):
    s = float(s)

    def rule(*meshes):
        r = _radius(meshes)
        return (1.0 + r * r) ** (s / 2.0)

    return LinearSymbol("Js", rule, s)


def riesz(axis=0):
    """xi_axis / |xi|, set to 0 at the origin."""

    def rule(*meshes):
        r = _radius(meshes)
        m = np.asarray(meshes[axis], dtype=float)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, m / safe, 0.0)

    return LinearSymbol("riesz_Gk", rule, None, {"axis": axis})


def riesz_smoothed(axis, s):
    """xi_axis (1+|xi|^2)^{(1-s)/2} ((1+|xi|^2)^{s/2} - 1) / |xi|^2, 0 at the origin."""
    s = float(s)

    def rule(*meshes):
        r = _radius(meshes)
        m = np.asarray(meshes[axis], dtype=float)
        one = 1.0 + r * r
        safe = np.where(r > 0, r * r, 1.0)
        val = m * one ** ((1.0 - s) / 2.0) * (one ** (s / 2.0) - 1.0) / safe
        return np.where(r > 0, val, 0.0)

    return LinearSymbol("Gk_tilde", rule, s, {"axis": axis})


def lp_phi(k, family=None):
    fam = family or build_lp_family()

    def rule(*meshes):
        return fam.phi_hat(scale_arg(_radius(meshes), k))

    return LinearSymbol("lp_phi_k", rule, None, {"k": k, "family": fam.kind})


def lp_psi(k, family=None):
    fam = family or build_lp_family()

    def rule(*meshes):
        return fam.psi(scale_arg(_radius(meshes), k))

    return LinearSymbol("lp_psi_k", rule, None, {"k": k, "family": fam.kind})


def partial_derivative(axis=0):
    def rule(*meshes):
        return 2j * np.pi * np.asarray(meshes[axis], dtype=float)

    return LinearSymbol("custom", rule, None, {"name": "partial", "axis": axis})


def custom_linear(name, rule, s=None, **params):
    return LinearSymbol("custom", rule, s, {"name": name, **params})


def apply_linear(f, sym):
    """Multiply the spectrum by sym and transform back; unpaired modes zeroed."""
    spec = f.spec
    F = fourier(f)
    vals = np.broadcast_to(np.asarray(sym.rule(*spec.freqs())), spec.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = tuple(np.argwhere(bad)[0])
        freq = tuple(float(spec.axis_freqs()[i]) for i in idx)
        raise ValueError(f"symbol {sym.kind!r} is singular at grid frequency {freq}")
    out = F.values * vals
    _zero_nyquist(out, spec.n)
    return inverse_fourier(F.with_values(out))


@dataclasses.dataclass(frozen=True)
class BilinearSymbol:
    """sigma(xi, eta); rule takes 2n broadcastable arrays (xi..., eta...)."""

    name: str
    n: int
    rule: object
    params: dict = dataclasses.field(default_factory=dict)


_PHASE_CACHE = {}


def _phase_matrix(N):
    # phase[a, m] = exp(2 pi i (a - N/2)(m - N/2) / N) = exp(2 pi i x_m eta_a)
    if N not in _PHASE_CACHE:
        if len(_PHASE_CACHE) >= 4:
            _PHASE_CACHE.pop(next(iter(_PHASE_CACHE)))
        idx = np.arange(N) - N // 2
        _PHASE_CACHE[N] = np.exp(2j * np.pi * np.outer(idx, idx) / N)
    return _PHASE_CACHE[N]


def _check_bilinear_operands(f, g, sym):
    if f.spec != g.spec:
        raise ValueError("operands live on different grids")
    if f.domain != SPACE or g.domain != SPACE:
        raise ValueError("bilinear operators act on space-domain functions")
    if sym.n != f.spec.n:
        raise ValueError(f"symbol is {sym.n}-d but the grid is {f.spec.n}-d")


def _centered_ifft(arr, axis):
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(arr, axes=axis), axis=axis), axes=axis)


def apply_bilinear(f, g, sym):
    """T_sigma(f, g)(x) = (1/L^2n) sum_{xi, eta} sigma f^(xi) g^(eta) e^{2 pi i x.(xi+eta)}.

    Exact double Fourier sum (no aliasing in the evaluation); the unpaired
    -N/2 input modes are dropped.  1-d runs vectorized over eta, 2-d loops
    over the active eta lattice.
    """
    _check_bilinear_operands(f, g, sym)
    spec = f.spec
    if spec.n == 1:
        return _apply_bilinear_1d(f, g, sym)
    return _apply_bilinear_2d(f, g, sym)


def _symbol_values_1d(spec, sym):
    ax = spec.axis_freqs()
    S = np.asarray(sym.rule(ax[None, :], ax[:, None]))
    S = np.broadcast_to(S, (spec.N, spec.N))
    if not np.isfinite(S).all():
        raise ValueError(f"bilinear symbol {sym.name!r} is singular on the grid lattice")
    return S


def _apply_bilinear_1d(f, g, sym, symbol_values=None):
    spec = f.spec
    N = spec.N
    S = _symbol_values_1d(spec, sym) if symbol_values is None else symbol_values
    fh = fourier(f).values.copy()
    gh = fourier(g).values.copy()
    fh[0] = 0.0
    gh[0] = 0.0
    A = _centered_ifft(S * fh[None, :], axis=1) / spec.h
    out = np.einsum("a,am,am->m", gh, _phase_matrix(N), A) / spec.L
    return space_function(spec, out)


def _apply_bilinear_2d(f, g, sym, rel_prune=1e-18):
    spec = f.spec
    N = spec.N
    fh = fourier(f).values.copy()
    gh = fourier(g).values.copy()
    _zero_nyquist(fh, 2)
    _zero_nyquist(gh, 2)
    XI0, XI1 = spec.freqs()
    ax = spec.axis_freqs()
    P = _phase_matrix(N)
    gmax = np.max(np.abs(gh))
    if gmax == 0:
        return space_function(spec, np.zeros(spec.shape, dtype=np.complex128))
    active = np.argwhere(np.abs(gh) > gmax * rel_prune)
    acc = np.zeros(spec.shape, dtype=np.complex128)
    h2 = spec.h**2
    for a0, a1 in active:
        S = np.broadcast_to(np.asarray(sym.rule(XI0, XI1, ax[a0], ax[a1])), spec.shape)
        if not np.isfinite(S).all():
            raise ValueError(f"bilinear symbol {sym.name!r} is singular on the grid lattice")
        u = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(S * fh))) / h2
        acc += gh[a0, a1] * u * np.outer(P[a0], P[a1])
    return space_function(spec, acc / spec.L**2)


def bilinear_from_rule(name, rule, n=1, **params):
    return BilinearSymbol(name, n, rule, params)


def separable_symbol(a_sym, b_sym, n=1):
    """sigma(xi, eta) = a(xi) b(eta) from two linear symbols."""

    def rule(*args):
        return np.asarray(a_sym.rule(*args[:n])) * np.asarray(b_sym.rule(*args[n:]))

    return BilinearSymbol(f"separable({a_sym.kind},{b_sym.kind})", n, rule)


# ---------------------------------------------------------------------------
# translated kernels and square functions


@dataclasses.dataclass(frozen=True)
class TranslatedKernelFamily:
    """Kernels 2^{kn} Psi(2^k (x + z(k, m))); spectral profile is radial.

    The convolution multiplier is exp(2 pi i z.xi) profile(2^-k |xi|).
    """

    profile: object
    z_rule: object
    name: str = "psi-translated"


def default_z_rule(k, m):
    return np.ldexp(np.atleast_1d(np.asarray(m, dtype=float)), -k)


def make_translated_family(profile=None, z_rule=None, name="psi-translated"):
    return TranslatedKernelFamily(profile or psi_profile, z_rule or default_z_rule, name)


def resolvable_scales(spec):
    """|k| <= log2(N)/2: annulus 2^k representable and kernel width resolvable."""
    kmax = int(math.floor(math.log2(spec.N) / 2))
    return range(-kmax, kmax + 1)


def translated_convolution(f, fam, k, m):
    spec = f.spec
    kmax = math.log2(spec.N) / 2
    if abs(k) > kmax + 1e-9:
        raise ValueError(f"scale k={k} outside resolvable range |k| <= log2(N)/2 = {kmax}")
    z = np.atleast_1d(np.asarray(fam.z_rule(k, m), dtype=float))
    if z.shape != (spec.n,):
        raise ValueError(f"z rule must produce a length-{spec.n} shift")
    F = fourier(f)
    meshes = spec.freqs()
    mult = fam.profile(scale_arg(_radius(meshes), k)).astype(np.complex128)
    phase = np.zeros(spec.shape)
    for mesh, zi in zip(meshes, z):
        phase = phase + mesh * zi
    out = F.values * mult * np.exp(2j * np.pi * phase)
    _zero_nyquist(out, spec.n)
    return inverse_fourier(F.with_values(out))


def square_function(f, fam=None, m=0, scales=None):
    """S_m f = (sum_k |Psi_{k,m} * f|^2)^{1/2} over the resolvable scales."""
    fam = fam or make_translated_family()
    scales = resolvable_scales(f.spec) if scales is None else scales
    acc = np.zeros(f.spec.shape)
    for k in scales:
        acc += np.abs(translated_convolution(f, fam, k, m).values) ** 2
    return space_function(f.spec, np.sqrt(acc))


def tm_operator(f, g, m=0, fam1=None, fam2=None, scales=None):
    """T_m(f, g) = sum_k (Psi^1_{k,m} * f)(Psi^2_{k,m} * g)."""
    if f.spec != g.spec:
        raise ValueError("operands live on different grids")
    fam1 = fam1 or make_translated_family()
    fam2 = fam2 or fam1
    scales = resolvable_scales(f.spec) if scales is None else scales
    acc = np.zeros(f.spec.shape, dtype=np.complex128)
    for k in scales:
        acc += translated_convolution(f, fam1, k, m).values * translated_convolution(g, fam2, k, m).values
    return space_function(f.spec, acc)


def tm_series(f, g, coeff_decay, m_max, fam1=None, fam2=None, scales=None):
    """sum_m c_m T_m with c_m = (1 + |m|)^{-(n+s)}, m over the integer lattice.

    coeff_decay is the pair (n, s); m ranges over {-m_max..m_max}^n.
    """
    ndim, s = coeff_decay
    spec = f.spec
    if ndim != spec.n:
        raise ValueError("coefficient decay dimension does not match the grid")
    rng = range(-int(m_max), int(m_max) + 1)
    lattice = [(m,) for m in rng] if spec.n == 1 else list(itertools.product(rng, rng))
    acc = np.zeros(spec.shape, dtype=np.complex128)
    for m in lattice:
        c = (1.0 + float(np.linalg.norm(m))) ** (-(ndim + s))
        acc += c * tm_operator(f, g, np.asarray(m, dtype=float), fam1, fam2, scales).values
    return space_function(spec, acc)


# ---------------------------------------------------------------------------
# multiplier-size functionals


def _fd_stencil(d):
    """Symmetric offsets and weights for the d-th derivative, order >= 2."""
    if d == 0:
        return np.array([0]), np.array([1.0])
    npts = d + 2 if d % 2 else d + 3
    half = (npts - 1) // 2
    off = np.arange(-half, half + 1, dtype=float)
    M = np.vstack([off**j for j in range(npts)])
    rhs = np.zeros(npts)
    rhs[d] = math.factorial(d)
    return off, np.linalg.solve(M, rhs)


def _mixed_partial(rule, pts, beta, h):
    """Tensor finite-difference estimate of the mixed partial at sample points."""
    active = [i for i, b in enumerate(beta) if b > 0]
    stencils = [_fd_stencil(b) for b in (beta[i] for i in active)]
    total = np.zeros(pts[0].shape, dtype=np.complex128)
    for combo in itertools.product(*[range(len(st[0])) for st in stencils]):
        coords = list(pts)
        wgt = np.ones_like(h)
        for var, st, ci in zip(active, stencils, combo):
            coords[var] = coords[var] + st[0][ci] * h
            wgt = wgt * st[1][ci]
        total += wgt * np.asarray(rule(*coords))
    return total / h ** sum(beta)


def _cm_sample_points(n, radii, n_dirs, seed):
    if radii is None:
        radii = np.geomspace(0.05, 50.0, 24)
    dim = 2 * n
    rng = np.random.default_rng(seed)
    if n == 1:
        angles = np.linspace(0.0, 2.0 * np.pi, n_dirs, endpoint=False)
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        dirs = rng.standard_normal((n_dirs, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    dirs = np.vstack([dirs, axes])
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)
    return [np.ascontiguousarray(pts[:, i]) for i in range(dim)]


def cm_seminorm(sym, max_order=None, radii=None, n_dirs=48, h_rel=1e-3, seed=0):
    """Coifman-Meyer size: max over |beta| <= max_order of
    sup (|xi| + |eta|)^{|beta|} |d^beta sigma| on dyadic annuli.

    Derivatives are central finite differences with step h_rel * (|xi|+|eta|),
    Richardson-extrapolated once.  max_order defaults to 2n+1.
    """
    n = sym.n
    if max_order is None:
        max_order = 2 * n + 1
    pts = _cm_sample_points(n, radii, n_dirs, seed)
    if n == 1:
        scale = np.abs(pts[0]) + np.abs(pts[1])
    else:
        scale = np.hypot(pts[0], pts[1]) + np.hypot(pts[2], pts[3])
    vals0 = np.abs(np.asarray(sym.rule(*pts)))
    if not np.isfinite(vals0).all():
        raise ValueError("symbol is not finite on the sample annuli")
    best = float(vals0.max())
    dim = 2 * n
    h = h_rel * scale
    for total in range(1, max_order + 1):
        for beta in itertools.product(range(total + 1), repeat=dim):
            if sum(beta) != total:
                continue
            d1 = _mixed_partial(sym.rule, pts, beta, h)
            d2 = _mixed_partial(sym.rule, pts, beta, 0.5 * h)
            dval = (4.0 * d2 - d1) / 3.0
            if not np.isfinite(dval).all():
                raise ValueError(f"derivative estimate not finite for multi-index {beta}")
            best = max(best, float(np.max(scale**total * np.abs(dval))))
    return best


_HST_DEFAULT_GRID = GridSpec(2, 256, 16.0)


def hst_norm(sym, s, t, k=0, window=None, eval_grid=None):
    """Weighted-Sobolev size of the k-th dyadic dilate of a 1-d bilinear symbol.

    Samples sigma(2^k xi, 2^k eta) * window(|(xi, eta)|) on a 2-d evaluation
    box, transforms, and returns the (s, t)-weighted L2 norm of the transform.
    The window must vanish at the origin and before the box edge.
    """
    if sym.n != 1:
        raise ValueError("hst_norm evaluates 1-d bilinear symbols on a 2-d (xi, eta) box")
    grid = eval_grid or _HST_DEFAULT_GRID
    window = window or psi_profile
    U, V = grid.points()
    R = np.hypot(U, V)
    W = np.asarray(window(R), dtype=float)
    if W.max() <= 0:
        raise ValueError("window vanishes identically on the evaluation box")
    origin = np.unravel_index(np.argmin(R), R.shape)
    if W[origin] != 0 or W[R >= 0.45 * grid.L].max() > 0:
        raise ValueError("window must be annulus-supported: zero at the origin and before the box edge")
    vals = np.asarray(sym.rule(np.ldexp(U, k), np.ldexp(V, k))) * W
    if not np.isfinite(vals).all():
        raise ValueError("symbol is not finite on the windowed evaluation box")
    F = fourier(space_function(grid, vals))
    T0, T1 = grid.freqs()
    wts = (1.0 + T0 * T0) ** s * (1.0 + T1 * T1) ** t
    return float(np.sqrt(np.sum(wts * np.abs(F.values) ** 2) / grid.L**2))


# ---------------------------------------------------------------------------
# named bilinear symbols for configs


def _one_symbol(n=1):
    def rule(*args):
        return np.ones(np.broadcast(*args).shape)

    return BilinearSymbol("one", n, rule)


def _degree_zero_symbol(n=1):
    """xi.eta / (|xi|^2 + |eta|^2): homogeneous of degree 0, smooth off the origin."""

    def rule(*args):
        xi, eta = args[:n], args[n:]
        dot = np.zeros(np.broadcast(*args).shape)
        r2 = np.zeros_like(dot)
        for a, b in zip(xi, eta):
            dot = dot + np.asarray(a, float) * np.asarray(b, float)
            r2 = r2 + np.asarray(a, float) ** 2 + np.asarray(b, float) ** 2
        safe = np.where(r2 > 0, r2, 1.0)
        return np.where(r2 > 0, dot / safe, 0.0)

    return BilinearSymbol("degree_zero", n, rule)


def _separable_gaussian_symbol(n=1, a=4.0, b=3.0):
    def rule(*args):
        xi, eta = args[:n], args[n:]
        return np.exp(-(_radius(xi) / a) ** 2) * np.exp(-(_radius(eta) / b) ** 2)

    return BilinearSymbol("separable_gaussian", n, rule, {"a": a, "b": b})


def _table_symbol(path):
    """Bilinear symbol sampled on a stored frequency lattice.

    The container must hold a 2-d frequency-domain function whose axes are the
    (xi, eta) lattice of the 1-d experiment grid; values[i, j] = sigma(xi_i,
    eta_j).  Lookups off the lattice raise.
    """
    table = load(path)
    if table.spec.n != 2 or table.domain != FREQUENCY:
        raise ValueError("symbol table must be a 2-d frequency-domain container")
    N, L = table.spec.N, table.spec.L
    vals = table.values

    def lookup(v):
        idx = np.asarray(v, dtype=float) * L + N // 2
        near = np.rint(idx)
        if np.max(np.abs(idx - near)) > 1e-9 or near.min() < 0 or near.max() >= N:
            raise ValueError("sampled symbol defined only on its stored frequency lattice")
        return near.astype(np.intp)

    def rule(xi, eta):
        i, j = lookup(xi), lookup(eta)
        return vals[i, j]

    return BilinearSymbol("from_table", 1, rule, {"path": str(path)})


_BILINEAR_FACTORIES = {
    "one": _one_symbol,
    "degree_zero": _degree_zero_symbol,
    "separable_gaussian": _separable_gaussian_symbol,
    "from_table": _table_symbol,
}


def register_bilinear_symbol(name, factory):
    _BILINEAR_FACTORIES[name] = factory


def make_bilinear_symbol(name, **params):
    if name not in _BILINEAR_FACTORIES:
        raise ValueError(f"unknown bilinear symbol {name!r}; have {sorted(_BILINEAR_FACTORIES)}")
    return _BILINEAR_FACTORIES[name](**params)
