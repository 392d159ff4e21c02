"""Paraproduct decompositions of fractional Leibniz operators and the
associated commutator expansions.

The bilinear symbols split the frequency plane into a high-low piece (Phi1,
supported where |eta| <= |xi|/8), a low-high piece (Phi2, mirrored), and a
diagonal piece (Phi3, |xi| and |eta| within a factor 2^5 of each other), with
Phi1 + Phi2 + Phi3 = 1 away from the joint origin.  On top of that partition
sit three families of exact operator identities:

  * D^s(fg) and J^s(fg) as sums of three smoothed paraproduct pieces;
  * the commutator D^s(fg) - f D^s g as three localized difference pieces;
  * Q1 rewritten through Riesz transforms and Q2 expanded as a binomial
    series in (|xi|^2 + 2 xi.eta)/|eta|^2, whose ratio stays below 17/64 on
    supp Phi2, with a computable remainder bound after truncation.

All identities here are exact in exact arithmetic; tolerances in the tests
only absorb floating-point rounding.
"""

import dataclasses

import numpy as np

from .grid import fourier, l2_norm, pointwise_product, space_function
from .multipliers import (
    BilinearSymbol,
    TranslatedKernelFamily,
    _apply_bilinear_1d,
    _radius,
    apply_bilinear,
    apply_linear,
    build_lp_family,
    ds,
    dyadic_scale_range,
    js,
    make_translated_family,
    partial_derivative,
    register_bilinear_symbol,
    resolvable_scales,
    riesz,
    riesz_smoothed,
    scale_arg,
    square_function,
    tm_operator,
    tm_series,
    translated_convolution,
)

__all__ = [
    "BAND",
    "FLAVORS",
    "SHIFT",
    "ParaproductSymbols",
    "SeriesSpec",
    "TranslatedKernelFamily",
    "binom",
    "commutator",
    "commutator_piece_symbol",
    "commutator_pieces",
    "commutator_second_order",
    "kp_full_symbol",
    "kp_piece_symbol",
    "kp_pieces",
    "kp_reference",
    "leibniz_second_order",
    "make_paraproduct_symbols",
    "make_series_spec",
    "make_translated_family",
    "paraproduct_partition_defect",
    "paraproduct_symbol",
    "q1_riesz_form",
    "q2_series",
    "q2_terms",
    "resolvable_scales",
    "riesz_pair_symbol",
    "series_remainder_bound",
    "series_symbol",
    "square_function",
    "tm_operator",
    "tm_series",
    "translated_convolution",
]

SHIFT = 5
BAND = 4

FLAVORS = ("homogeneous", "inhomogeneous")


def _check_flavor(flavor):
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; have {FLAVORS}")


def binom(s_half, j):
    """Generalized binomial coefficient (s_half choose j) by the product
    formula; integer s_half gives exact zeros past j = s_half."""
    if j < 0 or j != int(j):
        raise ValueError(f"need an integer j >= 0, got {j}")
    out = 1.0
    for i in range(int(j)):
        out *= (float(s_half) - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# paraproduct symbols


def _k_span(r):
    """Dyadic scales whose psi annulus can meet the positive values of r."""
    r = np.asarray(r, dtype=float)
    pos = r[r > 0]
    if pos.size == 0:
        return range(0)
    kmin = int(np.floor(np.log2(float(pos.min())))) - 1
    kmax = int(np.ceil(np.log2(float(pos.max())))) + 1
    return range(kmin, kmax + 1)


def _phi1_values(family, rxi, reta):
    out = 0.0
    for k in _k_span(rxi):
        out = out + family.psi(scale_arg(rxi, k)) * family.phi_hat(scale_arg(reta, k - SHIFT))
    return np.asarray(out, dtype=float)


def _phi2_values(family, rxi, reta):
    out = 0.0
    for k in _k_span(reta):
        out = out + family.phi_hat(scale_arg(rxi, k - SHIFT)) * family.psi(scale_arg(reta, k))
    return np.asarray(out, dtype=float)


def _phi3_values(family, rxi, reta):
    # sum over |l| <= BAND of psi_k(xi) psi_{k+l}(eta); the eta sum telescopes
    # to a difference of two low-pass profiles
    out = 0.0
    for k in _k_span(rxi):
        band = family.phi_hat(scale_arg(reta, k + BAND)) - family.phi_hat(
            scale_arg(reta, k - SHIFT)
        )
        out = out + family.psi(scale_arg(rxi, k)) * band
    return np.asarray(out, dtype=float)


_PHI_VALUES = (_phi1_values, _phi2_values, _phi3_values)


@dataclasses.dataclass(frozen=True, eq=False)
class ParaproductSymbols:
    """The three partition symbols as bilinear multipliers."""

    phi1: BilinearSymbol
    phi2: BilinearSymbol
    phi3: BilinearSymbol
    n: int
    shift: int = SHIFT
    band: int = BAND
    family_kind: str = "telescoping"

    def __iter__(self):
        return iter((self.phi1, self.phi2, self.phi3))


def paraproduct_symbol(index, n=1, family=None):
    """Phi_index as a BilinearSymbol; index in {1, 2, 3}."""
    if index not in (1, 2, 3):
        raise ValueError(f"index must be 1, 2 or 3, got {index}")
    family = family or build_lp_family()
    values = _PHI_VALUES[index - 1]

    def rule(*args):
        rxi = _radius(args[:n])
        reta = _radius(args[n:])
        return values(family, rxi, reta)

    return BilinearSymbol(f"phi{index}", n, rule, {"shift": SHIFT, "band": BAND})


def make_paraproduct_symbols(n=1, family=None):
    family = family or build_lp_family()
    syms = [paraproduct_symbol(i, n, family) for i in (1, 2, 3)]
    return ParaproductSymbols(*syms, n=n, family_kind=family.kind)


def paraproduct_partition_defect(spec, family=None):
    """max |Phi1 + Phi2 + Phi3 - 1| over grid frequency pairs, excluding the
    joint origin (where all three symbols vanish).  2-d grids are checked on
    an axis subsample that always contains frequency zero."""
    family = family or build_lp_family()
    if spec.n == 1:
        p1, p2, p3, rxi, reta, _ = _phi_dense_1d(spec, family)
        total = p1 + p2 + p3
        joint = np.broadcast_to(rxi + reta, total.shape)
    else:
        sub = spec.axis_freqs()[:: max(1, spec.N // 16)]
        rxi = np.sqrt(sub[:, None, None, None] ** 2 + sub[None, :, None, None] ** 2)
        reta = np.sqrt(sub[None, None, :, None] ** 2 + sub[None, None, None, :] ** 2)
        total = sum(v(family, rxi, reta) for v in _PHI_VALUES)
        joint = rxi + reta
    defect = np.where(joint > 0, np.abs(total - 1.0), 0.0)
    return float(defect.max())


# ---------------------------------------------------------------------------
# dense 1-d evaluation cache

_DENSE_CACHE = {}
_DENSE_CAP = 3


def _phi_dense_1d(spec, family):
    """(Phi1, Phi2, Phi3, rxi, reta, rsum) on the (eta, xi) lattice."""
    key = (spec, family.kind)
    if key in _DENSE_CACHE:
        return _DENSE_CACHE[key]
    ax = spec.axis_freqs()
    absax = np.abs(ax)
    N = spec.N
    p1 = np.zeros((N, N))
    p2 = np.zeros((N, N))
    p3 = np.zeros((N, N))
    for k in dyadic_scale_range(spec):
        psi_k = family.psi(scale_arg(absax, k))
        low_k = family.phi_hat(scale_arg(absax, k - SHIFT))
        band_k = family.phi_hat(scale_arg(absax, k + BAND)) - low_k
        p1 += np.outer(low_k, psi_k)
        p2 += np.outer(psi_k, low_k)
        p3 += np.outer(band_k, psi_k)
    rxi = absax[None, :]
    reta = absax[:, None]
    rsum = np.abs(ax[None, :] + ax[:, None])
    entry = (p1, p2, p3, rxi, reta, rsum)
    if len(_DENSE_CACHE) >= _DENSE_CAP:
        _DENSE_CACHE.pop(next(iter(_DENSE_CACHE)))
    _DENSE_CACHE[key] = entry
    return entry


def _power(r, s):
    """r**s with 0 mapped to 0 for s > 0 and to 1 for s = 0."""
    r = np.asarray(r, dtype=float)
    if s == 0:
        return np.ones_like(r)
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, safe**s, 0.0)


def _origin_mask(rxi, reta):
    return ((rxi == 0) & (reta == 0)).astype(float)


def _piece_quotient(i, s, flavor, rxi, reta, rsum, support):
    den = rxi if i == 1 else reta
    if flavor == "homogeneous":
        if s == 0:
            return np.ones(support.shape)
        num = _power(rsum, s)
        # den vanishes on the support only at the constant pair, where the
        # numerator vanishes too; guard it so the quotient stays finite
        safe = np.where(support & (den > 0), den, 1.0) ** s
        return np.where(support, num / safe, 0.0)
    return ((1.0 + rsum**2) / (1.0 + den**2)) ** (s / 2.0)


def _piece_values(i, s, flavor, family, rxi, reta, rsum, phi=None):
    phi = _PHI_VALUES[i - 1](family, rxi, reta) if phi is None else phi
    if i == 3:
        # the constant pair (0,0) rides with the diagonal piece: its quotient
        # is 1 whenever the identity convention keeps the constant mode
        phi = phi + _origin_mask(rxi, reta)
    support = phi != 0
    return phi * _piece_quotient(i, s, flavor, rxi, reta, rsum, support)


def kp_piece_symbol(i, s, flavor="homogeneous", n=1, family=None):
    """The smoothed paraproduct symbol Phi_i |xi+eta|^s / |den|^s (or the
    (1+|.|^2)^{s/2} quotient for the inhomogeneous flavor)."""
    _check_flavor(flavor)
    if i not in (1, 2, 3):
        raise ValueError(f"piece index must be 1, 2 or 3, got {i}")
    s = float(s)
    if s < 0:
        raise ValueError(f"need s >= 0, got {s}")
    family = family or build_lp_family()

    def rule(*args):
        xi = args[:n]
        eta = args[n:]
        rxi = _radius(xi)
        reta = _radius(eta)
        rsum = _radius(tuple(x + e for x, e in zip(xi, eta)))
        return _piece_values(i, s, flavor, family, rxi, reta, rsum)

    return BilinearSymbol(f"kp-piece{i}", n, rule, {"s": s, "flavor": flavor})


def kp_full_symbol(s, flavor="homogeneous", n=1):
    """|xi+eta|^s resp. (1+|xi+eta|^2)^{s/2} as a bilinear symbol."""
    _check_flavor(flavor)
    s = float(s)

    def rule(*args):
        rsum = _radius(tuple(x + e for x, e in zip(args[:n], args[n:])))
        if flavor == "homogeneous":
            return _power(rsum, s)
        return (1.0 + rsum**2) ** (s / 2.0)

    return BilinearSymbol("kp-full", n, rule, {"s": s, "flavor": flavor})


def _smoother(s, flavor):
    return ds(s) if flavor == "homogeneous" else js(s)


def kp_pieces(f, g, s, flavor="homogeneous", family=None):
    """(P1, P2, P3) with P1 = T_1(D^s f, g), P2 = T_2(f, D^s g),
    P3 = T_3(f, D^s g); their sum reproduces D^s(fg) (J^s for the
    inhomogeneous flavor) exactly."""
    _check_flavor(flavor)
    s = float(s)
    if s < 0:
        raise ValueError(f"need s >= 0, got {s}")
    family = family or build_lp_family()
    spec = f.spec
    op = _smoother(s, flavor)
    sf = apply_linear(f, op)
    sg = apply_linear(g, op)
    operands = ((sf, g), (f, sg), (f, sg))
    if spec.n == 1:
        p1, p2, p3, rxi, reta, rsum = _phi_dense_1d(spec, family)
        out = []
        for i, phi in enumerate((p1, p2, p3), start=1):
            sig = _piece_values(i, s, flavor, family, rxi, reta, rsum, phi=phi)
            sym = kp_piece_symbol(i, s, flavor, 1, family)
            out.append(_apply_bilinear_1d(*operands[i - 1], sym, symbol_values=sig))
        return tuple(out)
    return tuple(
        apply_bilinear(*operands[i - 1], kp_piece_symbol(i, s, flavor, spec.n, family))
        for i in (1, 2, 3)
    )


def kp_reference(f, g, s, flavor="homogeneous"):
    """Oracle route: pointwise product on the grid, then the linear
    multiplier.  Exact for operands whose spectra stay inside half the
    frequency box (no products fold past the unpaired mode)."""
    _check_flavor(flavor)
    return apply_linear(pointwise_product(f, g), _smoother(float(s), flavor))


def leibniz_second_order(f, g):
    """(D^2 f) g + f (D^2 g) - (2 pi^2)^{-1} grad f . grad g, which equals
    D^2(fg) since D^2 = -(4 pi^2)^{-1} Laplacian."""
    spec = f.spec
    d2 = ds(2.0)
    out = pointwise_product(apply_linear(f, d2), g) + pointwise_product(f, apply_linear(g, d2))
    grad = space_function(spec, np.zeros(spec.shape, dtype=np.complex128))
    for axis in range(spec.n):
        grad = grad + pointwise_product(
            apply_linear(f, partial_derivative(axis)), apply_linear(g, partial_derivative(axis))
        )
    return out - (1.0 / (2.0 * np.pi**2)) * grad


# ---------------------------------------------------------------------------
# commutator decomposition


def commutator(f, g, s, flavor="homogeneous"):
    """D^s(fg) - f D^s(g) (or the J^s analog), computed on the grid."""
    _check_flavor(flavor)
    op = _smoother(float(s), flavor)
    return apply_linear(pointwise_product(f, g), op) - pointwise_product(f, apply_linear(g, op))


def _difference_factor(s, flavor, reta, rsum):
    if flavor == "homogeneous":
        return _power(rsum, s) - _power(reta, s)
    return (1.0 + rsum**2) ** (s / 2.0) - (1.0 + reta**2) ** (s / 2.0)


def commutator_piece_symbol(i, s, flavor="homogeneous", n=1, family=None):
    """Phi_i (|xi+eta|^s - |eta|^s), resp. the inhomogeneous difference."""
    _check_flavor(flavor)
    s = float(s)
    family = family or build_lp_family()

    def rule(*args):
        xi = args[:n]
        eta = args[n:]
        rxi = _radius(xi)
        reta = _radius(eta)
        rsum = _radius(tuple(x + e for x, e in zip(xi, eta)))
        phi = _PHI_VALUES[i - 1](family, rxi, reta)
        return phi * _difference_factor(s, flavor, reta, rsum)

    return BilinearSymbol(f"commutator-piece{i}", n, rule, {"s": s, "flavor": flavor})


def commutator_pieces(f, g, s, flavor="homogeneous", family=None):
    """(Q1, Q2, Q3): the partition pieces of the commutator symbol."""
    _check_flavor(flavor)
    s = float(s)
    if s < 0:
        raise ValueError(f"need s >= 0, got {s}")
    family = family or build_lp_family()
    spec = f.spec
    if spec.n == 1:
        p1, p2, p3, rxi, reta, rsum = _phi_dense_1d(spec, family)
        diff = _difference_factor(s, flavor, reta, rsum)
        out = []
        for i, phi in enumerate((p1, p2, p3), start=1):
            sym = commutator_piece_symbol(i, s, flavor, 1, family)
            out.append(_apply_bilinear_1d(f, g, sym, symbol_values=phi * diff))
        return tuple(out)
    return tuple(
        apply_bilinear(f, g, commutator_piece_symbol(i, s, flavor, spec.n, family))
        for i in (1, 2, 3)
    )


def commutator_second_order(f, g):
    """[D^2, f]g = (D^2 f) g - (2 pi^2)^{-1} grad f . grad g exactly."""
    spec = f.spec
    out = pointwise_product(apply_linear(f, ds(2.0)), g)
    grad = space_function(spec, np.zeros(spec.shape, dtype=np.complex128))
    for axis in range(spec.n):
        grad = grad + pointwise_product(
            apply_linear(f, partial_derivative(axis)), apply_linear(g, partial_derivative(axis))
        )
    return out - (1.0 / (2.0 * np.pi**2)) * grad


# ---------------------------------------------------------------------------
# Q1 through Riesz transforms


def _q1_head_symbol(s, flavor, n, family):
    """Symbol multiplying (D^s f, g): the T_1 quotient for the homogeneous
    flavor, and Phi1 ((1+|xi+eta|^2)^{s/2} - 1)/(1+|xi|^2)^{s/2} for the
    inhomogeneous one (the -1 is what closes the identity)."""
    if flavor == "homogeneous":
        return kp_piece_symbol(1, s, flavor, n, family)

    def rule(*args):
        xi = args[:n]
        eta = args[n:]
        rxi = _radius(xi)
        reta = _radius(eta)
        rsum = _radius(tuple(x + e for x, e in zip(xi, eta)))
        phi = _phi1_values(family, rxi, reta)
        return phi * ((1.0 + rsum**2) ** (s / 2.0) - 1.0) / (1.0 + rxi**2) ** (s / 2.0)

    return BilinearSymbol("q1-head", n, rule, {"s": s, "flavor": flavor})


def riesz_pair_symbol(j, k, n=1, family=None):
    """(2 pi i)^{-1} Phi1 xi_j eta_k / |xi|^2; contracting it against
    gradient and Riesz-smoothed operands rebuilds Phi1 |eta|^s."""
    family = family or build_lp_family()

    def rule(*args):
        xi = args[:n]
        eta = args[n:]
        rxi = _radius(xi)
        reta = _radius(eta)
        phi = _phi1_values(family, rxi, reta)
        support = phi != 0
        safe = np.where(support, rxi, 1.0)
        quotient = np.where(support, (xi[j] * eta[k]) / safe**2, 0.0)
        return phi * quotient / (2j * np.pi)

    return BilinearSymbol(f"riesz-pair{j}{k}", n, rule, {"j": j, "k": k})


def q1_riesz_form(f, g, s, flavor="homogeneous", family=None):
    """Q1 rebuilt from its Riesz-transform factorization:
    head(D^s f, g) - sum_{j,k} pair_{j,k}(d_j f, G_k D^{s-1} g)."""
    _check_flavor(flavor)
    s = float(s)
    if s < 1:
        raise ValueError(f"the Riesz form needs s >= 1, got {s}")
    family = family or build_lp_family()
    spec = f.spec
    n = spec.n
    head_op = _smoother(s, flavor)
    head = apply_bilinear(apply_linear(f, head_op), g, _q1_head_symbol(s, flavor, n, family))
    for j in range(n):
        fj = apply_linear(f, partial_derivative(j))
        for k in range(n):
            if flavor == "homogeneous":
                gk = apply_linear(apply_linear(g, ds(s - 1.0)), riesz(k))
            else:
                gk = apply_linear(apply_linear(g, js(s - 1.0)), riesz_smoothed(k, s))
            head = head - apply_bilinear(fj, gk, riesz_pair_symbol(j, k, n, family))
    return head


# ---------------------------------------------------------------------------
# Q2 binomial series

_RATIO_BOUND = 17.0 / 64.0


@dataclasses.dataclass(frozen=True)
class SeriesSpec:
    """Truncated binomial expansion data for the Q2 series.

    coefficients[j-1] = (s/2 choose j); tail_bound sums
    |c_j| ((17/64)^j + (17/32)^j) over the dropped orders j > j_max.
    """

    s: float
    j_max: int
    coefficients: tuple
    tail_bound: float


def make_series_spec(s, j_max=8):
    s = float(s)
    if s < 1:
        raise ValueError(f"the series expansion needs s >= 1, got {s}")
    if j_max < 1:
        raise ValueError(f"need j_max >= 1, got {j_max}")
    coeffs = []
    c = 1.0
    for j in range(1, int(j_max) + 1):
        c *= (s / 2.0 - (j - 1)) / j
        coeffs.append(c)
    tail = 0.0
    j = int(j_max)
    while True:
        j += 1
        c *= (s / 2.0 - (j - 1)) / j
        term = abs(c) * (_RATIO_BOUND**j + (2.0 * _RATIO_BOUND) ** j)
        tail += term
        if c == 0.0 or (j > 2 * j_max + 8 and term < 1e-300):
            break
        if j > 10000:
            break
    return SeriesSpec(s, int(j_max), tuple(coeffs), tail)


def series_symbol(jj, nu=0, flavor="homogeneous", n=1, family=None):
    """sigma_{j,nu} = Phi2 (|xi|^2 + 2 xi.eta)^{j-1} (xi_nu + 2 eta_nu)
    / |eta|^{2j-1} (inhomogeneous: / (1+|eta|^2)^{j-1/2})."""
    _check_flavor(flavor)
    if jj < 1:
        raise ValueError(f"series order starts at 1, got {jj}")
    family = family or build_lp_family()

    def rule(*args):
        xi = args[:n]
        eta = args[n:]
        rxi = _radius(xi)
        reta = _radius(eta)
        phi = _phi2_values(family, rxi, reta)
        support = phi != 0
        cross = rxi**2 + 2.0 * sum(x * e for x, e in zip(xi, eta))
        if flavor == "homogeneous":
            den = np.where(support, reta, 1.0) ** (2 * jj - 1)
            core = np.where(support, cross ** (jj - 1) / den, 0.0)
        else:
            core = cross ** (jj - 1) / (1.0 + reta**2) ** (jj - 0.5)
        return phi * core * (xi[nu] + 2.0 * eta[nu])

    return BilinearSymbol(f"sigma-{jj}-{nu}", n, rule, {"j": jj, "nu": nu, "flavor": flavor})


def q2_terms(f, g, s, j_max=8, flavor="homogeneous", family=None, series=None):
    """Per-order contributions (c_j / 2 pi i) sum_nu T_{sigma_{j,nu}}(d_nu f,
    D^{s-1} g); their cumulative sums converge to Q2 geometrically."""
    _check_flavor(flavor)
    series = series or make_series_spec(s, j_max)
    family = family or build_lp_family()
    spec = f.spec
    n = spec.n
    sg = apply_linear(g, ds(series.s - 1.0) if flavor == "homogeneous" else js(series.s - 1.0))
    grads = [apply_linear(f, partial_derivative(axis)) for axis in range(n)]
    terms = []
    for jj in range(1, series.j_max + 1):
        c = series.coefficients[jj - 1]
        acc = space_function(spec, np.zeros(spec.shape, dtype=np.complex128))
        if c != 0.0:
            for nu in range(n):
                acc = acc + apply_bilinear(grads[nu], sg, series_symbol(jj, nu, flavor, n, family))
        terms.append((c / (2j * np.pi)) * acc)
    return terms


def q2_series(f, g, s, j_max=8, flavor="homogeneous", family=None, series=None):
    """Truncated series for Q2; remainder controlled by series_remainder_bound."""
    terms = q2_terms(f, g, s, j_max, flavor, family, series)
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def series_remainder_bound(series, f, g, flavor="homogeneous"):
    """Rigorous l2 bound on ||Q2 - truncation||: the dropped symbol is at most
    tail_bound * weight(eta) on supp Phi2, so Young's inequality gives
    tail_bound * (||f^||_1 / L^n) * ||D^s g||_2 (J^s for inhomogeneous)."""
    _check_flavor(flavor)
    spec = f.spec
    fh = fourier(f)
    l1 = float(np.sum(np.abs(fh.values))) / spec.L**spec.n
    op = ds(series.s) if flavor == "homogeneous" else js(series.s)
    return series.tail_bound * l1 * l2_norm(apply_linear(g, op))


register_bilinear_symbol("phi1", lambda n=1: paraproduct_symbol(1, n))
register_bilinear_symbol("phi2", lambda n=1: paraproduct_symbol(2, n))
register_bilinear_symbol("phi3", lambda n=1: paraproduct_symbol(3, n))
register_bilinear_symbol(
    "kp_piece", lambda i=1, s=1.0, flavor="homogeneous", n=1: kp_piece_symbol(i, s, flavor, n)
)
register_bilinear_symbol(
    "sigma_series", lambda j=1, nu=0, flavor="homogeneous", n=1: series_symbol(j, nu, flavor, n)
)
