"""Function-space norms: weighted Lebesgue, variable-exponent Lebesgue
(Luxemburg norms), weighted Lorentz, and Morrey.

Variable norms are computed by bisection on the modular h^n sum |f/lam|^p(x);
the bracket starts at ||f||_{p-} + ||f||_{p+} + 1 and is grown geometrically
if needed, so the invariant "modular(hi) <= 1 < modular(lo)" holds throughout.
Lorentz norms use the exact closed form for the step-function decreasing
rearrangement of grid samples.  Morrey suprema run over grid-aligned cubes via
the scan kernels.
"""

import dataclasses

import numpy as np

from . import kernels
from .grid import SPACE, GridSpec, space_function
from .weights import Weight


@dataclasses.dataclass(frozen=True, eq=False)
class ExponentFunction:
    """Samples of a positive exponent p(x) on a grid.

    loghoelder, when present, is a certificate (c0, c_inf, p_inf) asserting
    the local modulus |p(x)-p(y)| <= c0 / (-log|x-y|) for 0 < |x-y| < 1/2 and
    the decay |p(x)-p_inf| <= c_inf / log(e+|x|); it is validated against the
    samples at construction.
    """

    spec: GridSpec
    values: np.ndarray
    kind: str = "custom"
    params: dict = dataclasses.field(default_factory=dict)
    loghoelder: tuple = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.spec.shape:
            raise ValueError("exponent samples do not match the grid shape")
        if not np.isfinite(vals).all() or (vals <= 0).any():
            raise ValueError("exponents must be strictly positive and finite")
        object.__setattr__(self, "values", vals)
        if self.loghoelder is not None:
            _check_log_hoelder(self, *self.loghoelder)

    @property
    def p_minus(self):
        return float(self.values.min())

    @property
    def p_plus(self):
        return float(self.values.max())


def _pair_deviation(spec, vals):
    """max over grid pairs with 0 < |x-y| < 1/2 of |p(x)-p(y)| * (-log|x-y|).

    Pairs are taken in the periodic metric; offsets below 1/2 never reach the
    half-period on supported grids, so the distance is just |offset| * h.
    """
    h = spec.h
    dmax = min(int(np.floor(0.5 / h)), spec.N // 2)
    worst = 0.0
    if spec.n == 1:
        offsets = [(d,) for d in range(1, dmax + 1)]
    else:
        offsets = [
            (dx, dy)
            for dx in range(0, dmax + 1)
            for dy in range(-dmax, dmax + 1)
            if (dx, dy) != (0, 0) and not (dx == 0 and dy < 0)
        ]
    for off in offsets:
        dist = h * float(np.hypot(*off)) if len(off) == 2 else h * off[0]
        if not 0 < dist < 0.5:
            continue
        gap = np.abs(vals - np.roll(vals, off, axis=tuple(range(len(off))))).max()
        worst = max(worst, gap * (-np.log(dist)))
    return worst


def _decay_deviation(spec, vals, p_inf):
    r = np.zeros(spec.shape)
    for mesh in spec.points():
        r = r + mesh**2
    r = np.sqrt(r)
    return float((np.abs(vals - p_inf) * np.log(np.e + r)).max())


def _check_log_hoelder(exp_fn, c0, c_inf, p_inf):
    local = _pair_deviation(exp_fn.spec, exp_fn.values)
    if local > c0 * (1 + 1e-12) + 1e-15:
        raise ValueError(
            f"log-Hoelder certificate violated: local modulus needs c0 >= {local}, got {c0}"
        )
    decay = _decay_deviation(exp_fn.spec, exp_fn.values, p_inf)
    if decay > c_inf * (1 + 1e-12) + 1e-15:
        raise ValueError(
            f"log-Hoelder certificate violated: decay needs c_inf >= {decay}, got {c_inf}"
        )


def verify_log_hoelder(exp_fn, p_inf=None):
    """Smallest certificate constants realized on the grid; returns (c0, c_inf, p_inf)."""
    if p_inf is None:
        r = np.zeros(exp_fn.spec.shape)
        for mesh in exp_fn.spec.points():
            r = r + mesh**2
        p_inf = float(exp_fn.values[np.unravel_index(np.argmax(r), r.shape)])
    return (
        _pair_deviation(exp_fn.spec, exp_fn.values),
        _decay_deviation(exp_fn.spec, exp_fn.values, p_inf),
        p_inf,
    )


def make_exponent(spec, kind, **params):
    """kinds: constant(p0), two_value(p1, p2, split), smooth_loghoelder(p_inf,
    c_inf, c0)."""
    if kind == "constant":
        p0 = float(params.pop("p0"))
        _no_extra(params)
        return ExponentFunction(spec, np.full(spec.shape, p0), "constant", {"p0": p0})
    if kind == "two_value":
        p1 = float(params.pop("p1"))
        p2 = float(params.pop("p2"))
        split = float(params.pop("split", 0.0))
        _no_extra(params)
        first = spec.points()[0]
        vals = np.where(first >= split, p2, p1)
        return ExponentFunction(
            spec, vals, "two_value", {"p1": p1, "p2": p2, "split": split}
        )
    if kind == "smooth_loghoelder":
        p_inf = float(params.pop("p_inf"))
        c_inf = float(params.pop("c_inf"))
        c0 = params.pop("c0", None)
        _no_extra(params)
        r = np.zeros(spec.shape)
        for mesh in spec.points():
            r = r + mesh**2
        r = np.sqrt(r)
        vals = p_inf + c_inf / np.log(np.e + r)
        probe = ExponentFunction(spec, vals, "smooth_loghoelder", {"p_inf": p_inf, "c_inf": c_inf})
        if c0 is None:
            c0 = verify_log_hoelder(probe, p_inf)[0]
        return ExponentFunction(
            spec,
            vals,
            "smooth_loghoelder",
            {"p_inf": p_inf, "c_inf": c_inf, "c0": float(c0)},
            (float(c0), c_inf, p_inf),
        )
    raise ValueError(f"unknown exponent kind {kind!r}")


def _no_extra(params):
    if params:
        raise ValueError(f"unexpected parameters {sorted(params)}")


def exponent_from_values(spec, values, kind="custom", **params):
    return ExponentFunction(spec, values, kind, params)


def conjugate_exponent(exp_fn):
    if exp_fn.p_minus <= 1:
        raise ValueError("conjugate exponent needs p(x) > 1 everywhere")
    vals = exp_fn.values / (exp_fn.values - 1.0)
    return ExponentFunction(exp_fn.spec, vals, f"conjugate({exp_fn.kind})")


def harmonic_exponent(pe, qe):
    """r(.) with 1/r = 1/p + 1/q pointwise."""
    if pe.spec != qe.spec:
        raise ValueError("exponents live on different grids")
    vals = 1.0 / (1.0 / pe.values + 1.0 / qe.values)
    return ExponentFunction(pe.spec, vals, f"harmonic({pe.kind},{qe.kind})")


def weighted_lp_norm(f, p, w=None):
    """(h^n sum w |f|^p)^(1/p) over the grid; w defaults to 1."""
    p = float(p)
    if not p > 0:
        raise ValueError(f"need p > 0, got {p}")
    if f.domain != SPACE:
        raise ValueError("norms act on space-domain functions")
    wa = 1.0 if w is None else _weight_array(f, w)
    total = np.sum(wa * np.abs(f.values) ** p) * f.spec.h**f.spec.n
    return float(total ** (1.0 / p))


def _weight_array(f, w):
    if not isinstance(w, Weight):
        raise TypeError("w must be a Weight")
    if w.spec != f.spec:
        raise ValueError("weight and function live on different grids")
    return w.array


def variable_modular(f, exp_fn, lam=1.0):
    """rho(f/lam) = h^n sum |f(x)/lam|^p(x); may overflow to inf for small lam."""
    if f.spec != exp_fn.spec:
        raise ValueError("function and exponent live on different grids")
    a = np.abs(f.values) / lam
    with np.errstate(over="ignore"):
        vals = a**exp_fn.values
    return float(np.sum(vals) * f.spec.h**f.spec.n)


def variable_norm(f, exp_fn, rel_tol=1e-10):
    """Luxemburg norm inf{lam > 0 : rho(f/lam) <= 1} by bracketed bisection."""
    if f.domain != SPACE:
        raise ValueError("norms act on space-domain functions")
    a = np.abs(f.values)
    if a.max() == 0:
        return 0.0
    hi = weighted_lp_norm(f, exp_fn.p_minus) + weighted_lp_norm(f, exp_fn.p_plus) + 1.0
    for _ in range(200):
        if variable_modular(f, exp_fn, hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("modular does not drop below 1 at any bracket scale")
    lo = np.finfo(float).eps
    if variable_modular(f, exp_fn, lo) <= 1.0:
        return float(lo)
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (hi + lo)
        if variable_modular(f, exp_fn, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return float(hi)


def lorentz_norm(f, p, a, w=None):
    """Weighted Lorentz norm from the exact step-function rearrangement.

    Finite a: (sum_j v_j^a (p/a)(W_j^{a/p} - W_{j-1}^{a/p}))^{1/a} over the
    descending samples v_j with cumulative weighted measure W_j; a = inf gives
    max_j W_j^{1/p} v_j.  With a = p this reproduces the weighted L^p norm
    exactly.
    """
    p = float(p)
    if not p > 0:
        raise ValueError(f"need p > 0, got {p}")
    if not (a == np.inf or a > 0):
        raise ValueError(f"need a > 0 or inf, got {a}")
    if f.domain != SPACE:
        raise ValueError("norms act on space-domain functions")
    cell = f.spec.h**f.spec.n
    vals = np.abs(f.values).ravel()
    wts = np.full(vals.shape, cell) if w is None else _weight_array(f, w).ravel() * cell
    order = np.argsort(vals, kind="stable")[::-1]
    v = vals[order]
    W = np.cumsum(wts[order])
    if np.isinf(a):
        return float(np.max(v * W ** (1.0 / p)))
    a = float(a)
    Wprev = np.concatenate([[0.0], W[:-1]])
    pos = v > 0
    terms = v[pos] ** a * (p / a) * (W[pos] ** (a / p) - Wprev[pos] ** (a / p))
    return float(np.sum(terms) ** (1.0 / a))


def morrey_norm(f, p, kappa):
    """sup over grid cubes B of (|B|^{kappa/n - 1} integral_B |f|^p)^{1/p}, 0 < kappa <= n.

    kappa = n recovers the plain L^p norm exactly (the full box is a cube).
    """
    p = float(p)
    kappa = float(kappa)
    spec = f.spec
    if not p > 0:
        raise ValueError(f"need p > 0, got {p}")
    if not 0 < kappa <= spec.n:
        raise ValueError(f"need 0 < kappa <= n = {spec.n}, got {kappa}")
    if f.domain != SPACE:
        raise ValueError("norms act on space-domain functions")
    g = np.abs(f.values) ** p
    sums, _ = kernels.window_sum_max(g)
    sides = np.arange(1, spec.N + 1) * spec.h
    measures = sides**spec.n
    best = np.max(measures ** (kappa / spec.n - 1.0) * (spec.h**spec.n * sums))
    return float(best ** (1.0 / p))


def dual_norm_estimate(f, exp_fn, n_witnesses=8, seed=0):
    """Lower estimate of ||f||_{p(.)} by pairing against unit-ball witnesses of
    the conjugate space: sup h^n sum |f| g / ||g||_{p'(.)}."""
    from .grid import make_test_function

    pprime = conjugate_exponent(exp_fn)
    cell = f.spec.h**f.spec.n
    a = np.abs(f.values)
    witnesses = [np.where(a > 0, a, 0.0) ** (exp_fn.values - 1.0)]
    rng = np.random.default_rng(seed)
    for _ in range(int(n_witnesses)):
        g = make_test_function(f.spec, "random_bandlimited", seed=int(rng.integers(2**63)))
        witnesses.append(np.abs(g.values))
    best = 0.0
    for gv in witnesses:
        gf = space_function(f.spec, gv)
        denom = variable_norm(gf, pprime)
        if denom == 0:
            continue
        best = max(best, float(np.sum(a * gv) * cell) / denom)
    return best


def holder_defect(f, g, pe, qe, re=None):
    """||fg||_{r(.)} / (||f||_{p(.)} ||g||_{q(.)}) with 1/r = 1/p + 1/q pointwise."""
    re = re or harmonic_exponent(pe, qe)
    identity = np.abs(1.0 / re.values - 1.0 / pe.values - 1.0 / qe.values)
    if identity.max() > 1e-12:
        raise ValueError("exponent identity 1/r = 1/p + 1/q violated on the grid")
    prod = space_function(f.spec, f.values * g.values)
    denom = variable_norm(f, pe) * variable_norm(g, qe)
    if denom == 0:
        raise ValueError("Hoelder defect undefined for zero operands")
    return variable_norm(prod, re) / denom


_FAMILIES = ("weighted_lp", "variable", "lorentz", "morrey")


@dataclasses.dataclass(frozen=True, eq=False)
class NormSpec:
    """Declarative norm choice, dispatched by evaluate()."""

    family: str
    p: float = None
    a: float = None
    kappa: float = None
    weight: Weight = None
    exponent: ExponentFunction = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown norm family {self.family!r}; have {_FAMILIES}")
        if self.family == "variable":
            if self.exponent is None:
                raise ValueError("variable norms need an exponent function")
        elif self.family == "weighted_lp":
            if not (self.p and self.p > 0):
                raise ValueError("weighted_lp needs p > 0")
        elif self.family == "lorentz":
            if not (self.p and self.p > 0):
                raise ValueError("lorentz needs p > 0")
            if self.a is None or not (self.a == np.inf or self.a > 0):
                raise ValueError("lorentz needs a > 0 or inf")
        elif self.family == "morrey":
            if not (self.p and self.p > 0) or self.kappa is None:
                raise ValueError("morrey needs p > 0 and kappa")

    def evaluate(self, f):
        if self.family == "weighted_lp":
            return weighted_lp_norm(f, self.p, self.weight)
        if self.family == "variable":
            return variable_norm(f, self.exponent)
        if self.family == "lorentz":
            return lorentz_norm(f, self.p, self.a, self.weight)
        return morrey_norm(f, self.p, self.kappa)


def evaluate_norm(f, norm_spec):
    return norm_spec.evaluate(f)
