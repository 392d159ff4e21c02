"""Experiment runner, extrapolation proof tracer, and report emission.

Each experiment kind evaluates the exact left- and right-hand sides of one
boundedness statement over a seeded family of test functions and reports the
ratio rows plus aggregates.  Before any ratio is measured the kind's runner
must pass at least one exact-identity gate at 1e-8 (a decomposition identity,
the second-order Leibniz rule, constant-exponent consistency, ...); those
identities hold in exact arithmetic, so a gate failure means the operators
are broken and the run aborts instead of producing ratios.

Reports are pure functions of (config, seed): samples are drawn once on the
base grid and refinement resamples those very functions by spectral zero
padding, so a refinement sweep compares the same family at two resolutions.
Emission is byte-stable: identical configs produce identical files.
"""

import dataclasses
import hashlib
import json
import math
import time

import numpy as np

from .grid import (
    GridSpec,
    fourier,
    freq_function,
    inverse_fourier,
    l2_norm,
    make_test_function,
    pointwise_product,
    refine,
    space_function,
)
from . import katoponce, multipliers, spaces, weights
from .multipliers import apply_linear, ds, js, partial_derivative


class HarnessError(Exception):
    """Base class for harness failures."""


class InadmissibleConfigError(HarnessError):
    """Config violates a hypothesis of the targeted inequality; the message
    names the violated constraint.  CLI exit code 3."""

    exit_code = 3


class IdentityGateError(HarnessError):
    """An exact-identity cross-check failed before ratio measurement.  CLI
    exit code 2."""

    exit_code = 2


KINDS = (
    "kp-d",
    "kp-j",
    "kp-variable",
    "kp-lorentz",
    "kp-morrey",
    "commutator",
    "fefferman-stein",
    "lp-equivalence",
    "square-uniformity",
    "lp-sum",
    "translated-bound",
    "ball-average",
    "cm-multiplier",
    "hst-multiplier",
)

KIND_DESCRIPTIONS = {
    "kp-d": "fractional Leibniz ratio for D^s on weighted Lebesgue spaces",
    "kp-j": "fractional Leibniz ratio for J^s on weighted Lebesgue spaces",
    "kp-variable": "fractional Leibniz ratio on variable Lebesgue spaces",
    "kp-lorentz": "fractional Leibniz ratio on weighted Lorentz spaces",
    "kp-morrey": "fractional Leibniz ratio on Morrey spaces",
    "commutator": "commutator D^s(fg) - f D^s g against the gradient form",
    "fefferman-stein": "vector-valued maximal inequality on L^p(w)",
    "lp-equivalence": "two-sided square-function equivalence on L^p(w)",
    "square-uniformity": "translated square-function norms swept over m",
    "lp-sum": "sum of annulus convolutions against the square function",
    "translated-bound": "single translated convolution against [w]^{1/p}",
    "ball-average": "sliding ball averages against [w]^{1/p}",
    "cm-multiplier": "smooth degree-zero bilinear multiplier ratio",
    "hst-multiplier": "Sobolev-condition bilinear multiplier ratio",
}


# ---------------------------------------------------------------------------
# configuration


_KIND_DEFAULTS = {
    "kp-d": {
        "s": 1.0,
        "flavor": "homogeneous",
        "p": 4.0,
        "q": 4.0,
        "weight_v": {"kind": "power", "a": 0.5},
        "weight_w": {"kind": "power", "a": 0.5},
    },
    "kp-j": {
        "s": 1.0,
        "flavor": "inhomogeneous",
        "p": 4.0,
        "q": 4.0,
        "weight_v": {"kind": "power", "a": 0.5},
        "weight_w": {"kind": "power", "a": 0.5},
    },
    "kp-variable": {
        "s": 1.0,
        "flavor": "homogeneous",
        "exponent_p": {"kind": "two_value", "p1": 3.6, "p2": 4.4, "split": 0.0},
        "exponent_q": {"kind": "two_value", "p1": 4.4, "p2": 3.6, "split": 1.0},
    },
    "kp-lorentz": {
        "s": 1.0,
        "flavor": "homogeneous",
        "p": 4.0,
        "q": 4.0,
        "weight_w": {"kind": "power", "a": 0.5},
    },
    "kp-morrey": {
        "s": 1.0,
        "flavor": "homogeneous",
        "p": 4.0,
        "q": 4.0,
        "kappa": 0.5,
    },
    "commutator": {
        "s": 1.5,
        "flavor": "homogeneous",
        "p": 4.0,
        "q": 4.0,
        "weight_v": {"kind": "power", "a": 0.5},
        "weight_w": {"kind": "power", "a": 0.5},
    },
    "fefferman-stein": {"p": 2.0, "q": 2.0, "weight_w": {"kind": "power", "a": 0.5}},
    "lp-equivalence": {"p": 2.0, "weight_w": {"kind": "power", "a": 0.5}},
    "square-uniformity": {
        "p": 2.0,
        "weight_w": {"kind": "power", "a": 0.5},
        "m_max": 64,
        "family_size": 30,
    },
    "lp-sum": {"p": 2.0, "weight_w": {"kind": "power", "a": 0.5}},
    "translated-bound": {"p": 2.0, "weight_w": {"kind": "power", "a": 0.5}, "m_max": 64},
    "ball-average": {"p": 2.0, "weight_w": {"kind": "power", "a": 0.5}},
    "cm-multiplier": {
        "p": 4.0,
        "q": 4.0,
        "weight_v": {"kind": "power", "a": 0.5},
        "weight_w": {"kind": "power", "a": 0.5},
        "symbol": "degree_zero",
    },
    "hst-multiplier": {
        "p": 4.0,
        "q": 4.0,
        "sob_s": 0.9,
        "sob_t": 0.9,
        "weight_v": {"kind": "power", "a": 0.5},
        "weight_w": {"kind": "power", "a": 0.5},
        "symbol": "degree_zero",
    },
}

_DEFAULT_GRID = GridSpec(1, 1024, 32.0)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; reports are pure functions of this object.

    Weight and exponent constructors are stored as plain dicts (for example
    {"kind": "power", "a": 0.5}) so a config can round-trip through JSON and
    be rebuilt on a refined grid.  Admissibility is checked against the
    hypotheses of the targeted inequality before anything runs.
    """

    kind: str
    grid: GridSpec = _DEFAULT_GRID
    family_size: int = 100
    seed: int = 0
    s: float = 1.0
    flavor: str = "homogeneous"
    p: float = 2.0
    q: float = 2.0
    r: float = None
    a: float = None
    b: float = None
    c: float = None
    kappa: float = None
    weight_v: dict = None
    weight_w: dict = None
    exponent_p: dict = None
    exponent_q: dict = None
    m_max: int = 16
    j_max: int = 8
    seq_len: int = 8
    symbol: str = "degree_zero"
    sob_s: float = 0.9
    sob_t: float = 0.9
    lp_kind: str = "telescoping"

    def __post_init__(self):
        object.__setattr__(self, "kind", str(self.kind).lower())
        if self.kind not in KINDS:
            raise InadmissibleConfigError(
                f"unknown experiment kind {self.kind!r}; run list-kinds for the catalog"
            )
        if not isinstance(self.grid, GridSpec):
            raise InadmissibleConfigError("grid must be a GridSpec")
        if int(self.family_size) < 1:
            raise InadmissibleConfigError("family_size must be a positive integer")
        object.__setattr__(self, "family_size", int(self.family_size))
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise InadmissibleConfigError("seed must fit in 64 bits")
        object.__setattr__(self, "seed", seed)
        if self.flavor not in katoponce.FLAVORS:
            raise InadmissibleConfigError(
                f"unknown flavor {self.flavor!r}; have {katoponce.FLAVORS}"
            )

    def to_dict(self):
        d = {}
        for field in dataclasses.fields(self):
            v = getattr(self, field.name)
            if field.name == "grid":
                v = {"n": v.n, "N": v.N, "L": float(v.L)}
            d[field.name] = v
        return d

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if "kind" not in data:
            raise InadmissibleConfigError("config needs a 'kind' field")
        kind = str(data.pop("kind")).lower()
        merged = dict(_KIND_DEFAULTS.get(kind, {}))
        merged.update(data)
        grid = merged.pop("grid", None)
        if grid is None:
            grid = _DEFAULT_GRID
        elif isinstance(grid, dict):
            grid = GridSpec(int(grid["n"]), int(grid["N"]), float(grid["L"]))
        elif isinstance(grid, (list, tuple)):
            grid = GridSpec(int(grid[0]), int(grid[1]), float(grid[2]))
        elif not isinstance(grid, GridSpec):
            raise InadmissibleConfigError("grid must be {n, N, L} or [n, N, L]")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(merged) - names)
        if unknown:
            raise InadmissibleConfigError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(kind=kind, grid=grid, **merged)


def config_hash(cfg):
    payload = json.dumps(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# constructors referenced by configs


def _build_weight(spec, wdict):
    if wdict is None:
        return None
    kind = wdict.get("kind")
    if kind == "power":
        return weights.power_weight(spec, float(wdict["a"]))
    if kind == "two_value":
        return weights.two_value_weight(spec, float(wdict["t"]), float(wdict.get("split", 0.0)))
    if kind == "ones":
        return weights.custom_weight(spec, np.ones(spec.shape), name="ones")
    raise InadmissibleConfigError(f"unknown weight constructor {kind!r}")


def _build_exponent(spec, edict):
    if edict is None:
        raise InadmissibleConfigError("this kind needs exponent constructors")
    params = dict(edict)
    kind = params.pop("kind", None)
    try:
        return spaces.make_exponent(spec, kind, **params)
    except (ValueError, KeyError, TypeError) as exc:
        raise InadmissibleConfigError(f"bad exponent constructor {edict!r}: {exc}") from exc


def _require(cond, message):
    if not cond:
        raise InadmissibleConfigError(message)


def _resolve_r(cfg):
    derived = 1.0 / (1.0 / cfg.p + 1.0 / cfg.q)
    if cfg.r is None:
        return derived
    r = float(cfg.r)
    _require(
        abs(1.0 / cfg.p + 1.0 / cfg.q - 1.0 / r) <= 1e-12,
        f"exponents violate the scaling identity 1/r = 1/p + 1/q: "
        f"1/{cfg.p} + 1/{cfg.q} != 1/{r}",
    )
    return r


def _is_even_integer(s):
    return abs(s - round(s)) <= 1e-12 and int(round(s)) % 2 == 0 and s >= -1e-12


def _check_order(s, n, r):
    _require(s >= 0, f"operator order s = {s} must be nonnegative")
    if _is_even_integer(s):
        return
    lim = max(0.0, n * (1.0 / r - 1.0))
    _require(
        s > lim + 1e-12,
        f"s = {s} violates s > max(0, n(1/r - 1)) = {lim:g} "
        "(and s is not a non-negative even integer)",
    )


def _check_weight_dict(wdict, p, n, label):
    if wdict is None:
        return
    kind = wdict.get("kind")
    if kind == "power":
        a = float(wdict["a"])
        lo, hi = -float(n), float(n) * (p - 1.0)
        _require(
            lo < a < hi,
            f"power weight {label}: exponent a = {a:g} outside the A_{p:g} "
            f"admissible range (-n, n(p-1)) = ({lo:g}, {hi:g})",
        )
    elif kind == "two_value":
        _require(float(wdict["t"]) > 0, f"two-value weight {label}: t must be positive")
    elif kind != "ones":
        raise InadmissibleConfigError(f"unknown weight constructor {kind!r} for {label}")


# ---------------------------------------------------------------------------
# seeded function families


def _child_seed(seed, *tags):
    text = "/".join(str(t) for t in tags) + f"#{seed}"
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 2


_DRAW_CYCLE = ("random_bandlimited", "modulated_gaussian", "bump_sum", "gaussian")


def _draw_one(spec, rng, style):
    kind = _DRAW_CYCLE[style % len(_DRAW_CYCLE)]
    if kind == "random_bandlimited":
        return make_test_function(
            spec,
            "random_bandlimited",
            seed=int(rng.integers(2**62)),
            band=spec.N / (4.0 * spec.L),
            real=True,
        )
    if kind == "modulated_gaussian":
        freq = rng.uniform(0.75, 6.0, size=spec.n)
        return make_test_function(
            spec,
            "modulated_gaussian",
            freq=freq,
            center=rng.uniform(-spec.L / 6, spec.L / 6, size=spec.n),
            width=float(rng.uniform(0.7, 1.6)),
            amplitude=float(rng.uniform(0.5, 2.0)),
        )
    if kind == "bump_sum":
        k = 3
        return make_test_function(
            spec,
            "bump_sum",
            centers=[rng.uniform(-spec.L / 4, spec.L / 4, size=spec.n) for _ in range(k)],
            widths=[float(rng.uniform(0.5, 1.4)) for _ in range(k)],
            amplitudes=[float(rng.uniform(-1.5, 1.5)) for _ in range(k)],
        )
    return make_test_function(
        spec,
        "gaussian",
        center=rng.uniform(-spec.L / 4, spec.L / 4, size=spec.n),
        width=float(rng.uniform(0.6, 1.8)),
        amplitude=float(rng.uniform(0.5, 2.0)),
    )


def _project_covered_band(f):
    """Sharp projection onto the dyadic band covered by the resolvable
    translated-kernel scales; on that band the scale partitions are exact."""
    spec = f.spec
    kmax = max(multipliers.resolvable_scales(spec))
    r = np.sqrt(sum(m * m for m in spec.freqs()))
    mask = (r >= 2.0 ** (-kmax)) & (r <= 2.0**kmax)
    return inverse_fourier(freq_function(spec, fourier(f).values * mask))


def _draw_banded(spec, rng, make_real):
    """Sum of two modulated bumps projected onto the covered dyadic band.

    Centers are spread over the whole torus so a max-over-family statistic
    sees every alignment of the bumps with a weight's singular set.
    """
    vals = np.zeros(spec.shape, dtype=np.complex128)
    for _ in range(2):
        freq = rng.uniform(0.75, 6.0) * _random_direction(spec.n, rng)
        f = make_test_function(
            spec,
            "modulated_gaussian",
            freq=freq,
            center=rng.uniform(-spec.L / 2, spec.L / 2, size=spec.n),
            width=float(rng.uniform(0.7, 1.5)),
            amplitude=float(rng.uniform(0.5, 1.5)),
        )
        vals = vals + f.values
    if make_real:
        vals = vals.real
    return _project_covered_band(space_function(spec, vals))


def _draw_delocalized(spec, rng):
    """Covered-band random draw with mass spread over the whole torus.

    Concentrated bumps near a power weight's zero make translated norms
    scale like (|shift| / width)^(1/4), so a fair uniformity statistic
    needs translation-stationary draws rather than localized ones.  The
    draws stay complex: their envelope fluctuates less than a real draw's,
    which sharpens the per-m max statistic.
    """
    f = make_test_function(
        spec,
        "random_bandlimited",
        seed=int(rng.integers(2**62)),
        band=spec.N / (4.0 * spec.L),
        real=False,
    )
    return _project_covered_band(f)


def _random_direction(n, rng):
    if n == 1:
        return np.array([1.0 if rng.uniform() < 0.5 else -1.0])
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _gate_pair(spec, seed):
    # band N/(5L): products of two draws then stay strictly below the fold
    # line, so multiplier-route references match the exact double sums
    band = spec.N / (5.0 * spec.L)
    f = make_test_function(
        spec, "random_bandlimited", seed=_child_seed(seed, "gate-f"), band=band, real=True
    )
    g = make_test_function(
        spec, "random_bandlimited", seed=_child_seed(seed, "gate-g"), band=band, real=True
    )
    return f, g


# ---------------------------------------------------------------------------
# rows, gates, reports


@dataclasses.dataclass(frozen=True)
class GateCheck:
    name: str
    defect: float
    tol: float
    passed: bool


def _gate(name, defect, tol=1e-8):
    defect = float(defect)
    return GateCheck(name, defect, tol, defect <= tol)


@dataclasses.dataclass(frozen=True)
class SampleRow:
    sample_id: str
    lhs: float
    rhs: float
    ratio: float
    params: dict


def _row(sample_id, lhs, rhs, params):
    lhs = float(lhs)
    rhs = float(rhs)
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = 0.0 if lhs == 0 else math.inf
    return SampleRow(str(sample_id), lhs, rhs, ratio, dict(params))


@dataclasses.dataclass(frozen=True)
class Sample:
    functions: dict
    params: dict


def _refine_sample(sample, factor):
    fns = {k: refine(v, factor) for k, v in sample.functions.items()}
    return Sample(fns, dict(sample.params))


@dataclasses.dataclass(frozen=True)
class InequalityReport:
    """Ratio rows plus aggregates; runtime is informational and excluded
    from serialized output so emission stays byte-stable."""

    config: dict
    config_hash: str
    gates: tuple
    rows: tuple
    max_ratio: float
    mean_ratio: float
    min_ratio: float
    refinement_stability: float
    extras: dict
    runtime_seconds: float

    def __post_init__(self):
        for row in self.rows:
            if row.ratio > self.max_ratio:
                raise HarnessError("aggregate max ratio fell below a row ratio")

    @property
    def kind(self):
        return self.config["kind"]


def _assemble(cfg, gates, rows, extras, stability, runtime):
    ratios = [row.ratio for row in rows]
    return InequalityReport(
        config=cfg.to_dict(),
        config_hash=config_hash(cfg),
        gates=tuple(gates),
        rows=tuple(rows),
        max_ratio=float(max(ratios)),
        mean_ratio=float(sum(ratios) / len(ratios)),
        min_ratio=float(min(ratios)),
        refinement_stability=None if stability is None else float(stability),
        extras=dict(extras),
        runtime_seconds=float(runtime),
    )


def _rel_defect(got, want):
    denom = l2_norm(want)
    return float(l2_norm(got - want) / (denom if denom > 0 else 1.0))


def _norm_lp(f, p, w=None):
    return spaces.weighted_lp_norm(f, p, w)


def _combined_weight(spec, v, w, r, p, q):
    if v is None and w is None:
        return None
    arr = np.ones(spec.shape)
    if v is not None:
        arr = arr * v.array ** (r / p)
    if w is not None:
        arr = arr * w.array ** (r / q)
    return weights.custom_weight(spec, arr, name="combined")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [float(x) for x in value.ravel()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


# ---------------------------------------------------------------------------
# experiment kinds


_RUNNERS = {}


def _register(cls):
    _RUNNERS[cls.kind] = cls()
    return cls


class _Runner:
    kind = None

    def check(self, cfg):
        raise NotImplementedError

    def context(self, cfg, spec):
        return {}

    def gates(self, cfg, spec, ctx):
        raise NotImplementedError

    def draws(self, cfg):
        raise NotImplementedError

    def rows(self, cfg, spec, ctx, samples):
        out = []
        for i, sample in enumerate(samples):
            lhs, rhs = self.evaluate(cfg, spec, ctx, sample)
            out.append(_row(i, lhs, rhs, sample.params))
        return out, {}

    def evaluate(self, cfg, spec, ctx, sample):
        raise NotImplementedError


def _pair_draws(cfg):
    out = []
    for i in range(cfg.family_size):
        rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "pair", i))
        f = _draw_one(cfg.grid, rng, i)
        g = _draw_one(cfg.grid, rng, i + 1)
        out.append(Sample({"f": f, "g": g}, {"draw": _DRAW_CYCLE[i % 4]}))
    return out


def _smoother(s, flavor):
    return ds(s) if flavor == "homogeneous" else js(s)


def _leibniz_gate(spec, seed):
    f, g = _gate_pair(spec, seed)
    got = katoponce.leibniz_second_order(f, g)
    want = katoponce.kp_reference(f, g, 2.0, "homogeneous")
    return _gate("s=2 Leibniz identity", _rel_defect(got, want))


def _kp_identity_gate(spec, seed, s, flavor):
    f, g = _gate_pair(spec, seed)
    p1, p2, p3 = katoponce.kp_pieces(f, g, s, flavor)
    want = katoponce.kp_reference(f, g, s, flavor)
    return _gate(f"decomposition identity (s={s:g}, {flavor})", _rel_defect(p1 + p2 + p3, want))


def _gradient_magnitude(f):
    acc = np.zeros(f.spec.shape)
    for axis in range(f.spec.n):
        acc = acc + np.abs(apply_linear(f, partial_derivative(axis)).values) ** 2
    return space_function(f.spec, np.sqrt(acc))


class _KPWeightedBase(_Runner):
    flavor_required = None

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(cfg.q > 1, f"q = {cfg.q:g} violates 1 < q < inf")
        r = _resolve_r(cfg)
        _require(r > 0.5, f"r = {r:g} violates 1/2 < r < inf")
        if self.flavor_required is not None:
            _require(
                cfg.flavor == self.flavor_required,
                f"kind {cfg.kind} is the {self.flavor_required} statement; "
                f"got flavor {cfg.flavor!r}",
            )
        _check_order(cfg.s, cfg.grid.n, r)
        _check_weight_dict(cfg.weight_v, cfg.p, cfg.grid.n, "v")
        _check_weight_dict(cfg.weight_w, cfg.q, cfg.grid.n, "w")

    def context(self, cfg, spec):
        r = _resolve_r(cfg)
        v = _build_weight(spec, cfg.weight_v)
        w = _build_weight(spec, cfg.weight_w)
        return {"r": r, "v": v, "w": w, "u": _combined_weight(spec, v, w, r, cfg.p, cfg.q)}

    def gates(self, cfg, spec, ctx):
        return [
            _leibniz_gate(spec, cfg.seed),
            _kp_identity_gate(spec, cfg.seed, cfg.s, cfg.flavor),
        ]

    def draws(self, cfg):
        return _pair_draws(cfg)

    def evaluate(self, cfg, spec, ctx, sample):
        f, g = sample.functions["f"], sample.functions["g"]
        sm = _smoother(cfg.s, cfg.flavor)
        lhs = _norm_lp(katoponce.kp_reference(f, g, cfg.s, cfg.flavor), ctx["r"], ctx["u"])
        dsf = apply_linear(f, sm)
        dsg = apply_linear(g, sm)
        rhs = _norm_lp(dsf, cfg.p, ctx["v"]) * _norm_lp(g, cfg.q, ctx["w"]) + _norm_lp(
            f, cfg.p, ctx["v"]
        ) * _norm_lp(dsg, cfg.q, ctx["w"])
        return lhs, rhs


@_register
class _KPD(_KPWeightedBase):
    kind = "kp-d"
    flavor_required = "homogeneous"


@_register
class _KPJ(_KPWeightedBase):
    kind = "kp-j"
    flavor_required = "inhomogeneous"


@_register
class _Commutator(_KPWeightedBase):
    kind = "commutator"
    flavor_required = None

    def check(self, cfg):
        super().check(cfg)
        _require(cfg.s >= 1, f"s = {cfg.s:g} violates s >= 1 (the gradient form needs one full derivative)")

    def gates(self, cfg, spec, ctx):
        f, g = _gate_pair(spec, cfg.seed)
        got = katoponce.commutator_second_order(f, g)
        want = katoponce.commutator(f, g, 2.0, "homogeneous")
        second = _gate("s=2 commutator identity", _rel_defect(got, want))
        q1, q2, q3 = katoponce.commutator_pieces(f, g, cfg.s, cfg.flavor)
        direct = katoponce.commutator(f, g, cfg.s, cfg.flavor)
        pieces = _gate(
            f"commutator decomposition (s={cfg.s:g}, {cfg.flavor})",
            _rel_defect(q1 + q2 + q3, direct),
        )
        return [second, pieces]

    def evaluate(self, cfg, spec, ctx, sample):
        f, g = sample.functions["f"], sample.functions["g"]
        lhs = _norm_lp(katoponce.commutator(f, g, cfg.s, cfg.flavor), ctx["r"], ctx["u"])
        dsf = apply_linear(f, _smoother(cfg.s, cfg.flavor))
        lower = apply_linear(g, _smoother(cfg.s - 1.0, cfg.flavor))
        rhs = _norm_lp(dsf, cfg.p, ctx["v"]) * _norm_lp(g, cfg.q, ctx["w"]) + _norm_lp(
            _gradient_magnitude(f), cfg.p, ctx["v"]
        ) * _norm_lp(lower, cfg.q, ctx["w"])
        return lhs, rhs


@_register
class _KPVariable(_Runner):
    kind = "kp-variable"

    def check(self, cfg):
        pe = _build_exponent(cfg.grid, cfg.exponent_p)
        qe = _build_exponent(cfg.grid, cfg.exponent_q)
        _require(pe.p_minus > 1, f"exponent p(.): p_- = {pe.p_minus:g} violates p_- > 1")
        _require(qe.p_minus > 1, f"exponent q(.): q_- = {qe.p_minus:g} violates q_- > 1")
        # the hypothesis asks for scalars p < p_-, q < q_-; the best reachable
        # scaling exponent is 1/p_- + 1/q_-, and the order constraint is open
        r_best = 1.0 / (1.0 / pe.p_minus + 1.0 / qe.p_minus)
        _check_order(cfg.s, cfg.grid.n, r_best)

    def context(self, cfg, spec):
        pe = _build_exponent(spec, cfg.exponent_p)
        qe = _build_exponent(spec, cfg.exponent_q)
        return {"pe": pe, "qe": qe, "re": spaces.harmonic_exponent(pe, qe)}

    def gates(self, cfg, spec, ctx):
        f, _ = _gate_pair(spec, cfg.seed)
        const = spaces.make_exponent(spec, "constant", p0=2.3)
        classical = _norm_lp(f, 2.3)
        defect = abs(spaces.variable_norm(f, const) - classical) / classical
        return [
            _gate("constant-exponent consistency", defect),
            _kp_identity_gate(spec, cfg.seed, cfg.s, cfg.flavor),
        ]

    def draws(self, cfg):
        return _pair_draws(cfg)

    def evaluate(self, cfg, spec, ctx, sample):
        f, g = sample.functions["f"], sample.functions["g"]
        sm = _smoother(cfg.s, cfg.flavor)
        lhs = spaces.variable_norm(katoponce.kp_reference(f, g, cfg.s, cfg.flavor), ctx["re"])
        pe, qe = ctx["pe"], ctx["qe"]
        rhs = spaces.variable_norm(apply_linear(f, sm), pe) * spaces.variable_norm(
            g, qe
        ) + spaces.variable_norm(f, pe) * spaces.variable_norm(apply_linear(g, sm), qe)
        return lhs, rhs


@_register
class _KPLorentz(_Runner):
    kind = "kp-lorentz"

    def _indices(self, cfg):
        b = cfg.p if cfg.b is None else float(cfg.b)
        c = cfg.q if cfg.c is None else float(cfg.c)
        a = 1.0 / (1.0 / b + 1.0 / c) if cfg.a is None else float(cfg.a)
        return a, b, c

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(cfg.q > 1, f"q = {cfg.q:g} violates 1 < q < inf")
        r = _resolve_r(cfg)
        _require(r > 0.5, f"r = {r:g} violates 1/2 < r < inf")
        a, b, c = self._indices(cfg)
        _require(a > 0 and b > 0 and c > 0, "Lorentz secondary indices must be positive")
        _require(
            abs(1.0 / b + 1.0 / c - 1.0 / a) <= 1e-12,
            f"Lorentz indices violate 1/a = 1/b + 1/c: 1/{b:g} + 1/{c:g} != 1/{a:g}",
        )
        _check_order(cfg.s, cfg.grid.n, r)
        _check_weight_dict(cfg.weight_w, min(cfg.p, cfg.q), cfg.grid.n, "w (A_{min(p,q)})")

    def context(self, cfg, spec):
        a, b, c = self._indices(cfg)
        return {"r": _resolve_r(cfg), "a": a, "b": b, "c": c, "w": _build_weight(spec, cfg.weight_w)}

    def gates(self, cfg, spec, ctx):
        f, _ = _gate_pair(spec, cfg.seed)
        classical = _norm_lp(f, cfg.p, ctx["w"])
        defect = abs(spaces.lorentz_norm(f, cfg.p, cfg.p, ctx["w"]) - classical) / classical
        return [
            _gate("diagonal Lorentz consistency", defect),
            _leibniz_gate(spec, cfg.seed),
        ]

    def draws(self, cfg):
        return _pair_draws(cfg)

    def evaluate(self, cfg, spec, ctx, sample):
        f, g = sample.functions["f"], sample.functions["g"]
        sm = _smoother(cfg.s, cfg.flavor)
        w = ctx["w"]
        lhs = spaces.lorentz_norm(
            katoponce.kp_reference(f, g, cfg.s, cfg.flavor), ctx["r"], ctx["a"], w
        )
        rhs = spaces.lorentz_norm(apply_linear(f, sm), cfg.p, ctx["b"], w) * spaces.lorentz_norm(
            g, cfg.q, ctx["c"], w
        ) + spaces.lorentz_norm(f, cfg.p, ctx["b"], w) * spaces.lorentz_norm(
            apply_linear(g, sm), cfg.q, ctx["c"], w
        )
        return lhs, rhs

    def rows(self, cfg, spec, ctx, samples):
        rows, _ = super().rows(cfg, spec, ctx, samples)
        return rows, {"lorentz_indices": {"a": ctx["a"], "b": ctx["b"], "c": ctx["c"]}}


@_register
class _KPMorrey(_Runner):
    kind = "kp-morrey"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(cfg.q > 1, f"q = {cfg.q:g} violates 1 < q < inf")
        r = _resolve_r(cfg)
        _require(r > 0.5, f"r = {r:g} violates 1/2 < r < inf")
        _require(cfg.kappa is not None, "kp-morrey needs kappa")
        _require(
            0 < float(cfg.kappa) <= cfg.grid.n,
            f"kappa = {cfg.kappa:g} violates 0 < kappa <= n = {cfg.grid.n}",
        )
        _check_order(cfg.s, cfg.grid.n, r)

    def context(self, cfg, spec):
        return {"r": _resolve_r(cfg), "kappa": float(cfg.kappa)}

    def gates(self, cfg, spec, ctx):
        f, _ = _gate_pair(spec, cfg.seed)
        classical = _norm_lp(f, cfg.p)
        defect = abs(spaces.morrey_norm(f, cfg.p, spec.n) - classical) / classical
        return [
            _gate("kappa=n Morrey consistency", defect),
            _leibniz_gate(spec, cfg.seed),
        ]

    def draws(self, cfg):
        return _pair_draws(cfg)

    def evaluate(self, cfg, spec, ctx, sample):
        f, g = sample.functions["f"], sample.functions["g"]
        sm = _smoother(cfg.s, cfg.flavor)
        kappa = ctx["kappa"]
        lhs = spaces.morrey_norm(katoponce.kp_reference(f, g, cfg.s, cfg.flavor), ctx["r"], kappa)
        rhs = spaces.morrey_norm(apply_linear(f, sm), cfg.p, kappa) * spaces.morrey_norm(
            g, cfg.q, kappa
        ) + spaces.morrey_norm(f, cfg.p, kappa) * spaces.morrey_norm(
            apply_linear(g, sm), cfg.q, kappa
        )
        return lhs, rhs


@_register
class _FeffermanStein(_Runner):
    kind = "fefferman-stein"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(cfg.q > 1, f"sequence exponent q = {cfg.q:g} violates 1 < q < inf")
        _require(int(cfg.seq_len) >= 1, "seq_len must be a positive integer")
        _check_weight_dict(cfg.weight_w, cfg.p, cfg.grid.n, "w")

    def context(self, cfg, spec):
        return {"w": _build_weight(spec, cfg.weight_w)}

    def gates(self, cfg, spec, ctx):
        ones = space_function(spec, np.ones(spec.shape))
        defect = float(np.abs(weights.maximal(ones).values - 1.0).max())
        return [_gate("maximal of a constant", defect)]

    def draws(self, cfg):
        out = []
        for i in range(cfg.family_size):
            rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "stack", i))
            fns = {
                f"f{j}": _draw_one(cfg.grid, rng, i + j) for j in range(int(cfg.seq_len))
            }
            out.append(Sample(fns, {"seq_len": int(cfg.seq_len)}))
        return out

    def evaluate(self, cfg, spec, ctx, sample):
        q = cfg.q
        num = np.zeros(spec.shape)
        den = np.zeros(spec.shape)
        for fk in sample.functions.values():
            num += np.abs(weights.maximal(fk).values) ** q
            den += np.abs(fk.values) ** q
        lhs = _norm_lp(space_function(spec, num ** (1.0 / q)), cfg.p, ctx["w"])
        rhs = _norm_lp(space_function(spec, den ** (1.0 / q)), cfg.p, ctx["w"])
        return lhs, rhs


def _squared_family():
    return multipliers.make_translated_family(
        profile=multipliers.build_lp_family("squared_normalized").psi
    )


def _single_harmonic(spec, radius=3.0):
    j0 = int(round(radius * spec.L))
    xi0 = j0 / spec.L
    phase = spec.points()[0] * xi0
    return space_function(spec, np.exp(2j * np.pi * phase))


@_register
class _LPEquivalence(_Runner):
    kind = "lp-equivalence"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _check_weight_dict(cfg.weight_w, cfg.p, cfg.grid.n, "w")

    def context(self, cfg, spec):
        return {"w": _build_weight(spec, cfg.weight_w), "fam": _squared_family()}

    def gates(self, cfg, spec, ctx):
        f = _single_harmonic(spec)
        sf = multipliers.square_function(f, ctx["fam"], m=0)
        return [_gate("square-function isometry on a single harmonic", float(np.abs(sf.values - 1.0).max()))]

    def draws(self, cfg):
        out = []
        for i in range(cfg.family_size):
            rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "band", i))
            if i % 3 == 2:
                f = _draw_banded(cfg.grid, rng, True)
            else:
                f = _draw_delocalized(cfg.grid, rng)
            out.append(Sample({"f": f}, {}))
        return out

    def evaluate(self, cfg, spec, ctx, sample):
        f = sample.functions["f"]
        sf = multipliers.square_function(f, ctx["fam"], m=0)
        return _norm_lp(sf, cfg.p, ctx["w"]), _norm_lp(f, cfg.p, ctx["w"])


@_register
class _SquareUniformity(_Runner):
    kind = "square-uniformity"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(int(cfg.m_max) >= 1, "m_max must be >= 1")
        _check_weight_dict(cfg.weight_w, cfg.p, cfg.grid.n, "w")

    def context(self, cfg, spec):
        return {"w": _build_weight(spec, cfg.weight_w), "fam": _squared_family()}

    def gates(self, cfg, spec, ctx):
        f = _single_harmonic(spec)
        worst = 0.0
        for m in (0, min(7, int(cfg.m_max)), -int(cfg.m_max)):
            mv = np.zeros(spec.n)
            mv[0] = m
            sf = multipliers.square_function(f, ctx["fam"], m=mv)
            worst = max(worst, float(np.abs(sf.values - 1.0).max()))
        return [_gate("translated square function on a single harmonic", worst)]

    def draws(self, cfg):
        out = []
        for i in range(cfg.family_size):
            rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "band", i))
            out.append(Sample({"f": _draw_delocalized(cfg.grid, rng)}, {}))
        return out

    def rows(self, cfg, spec, ctx, samples):
        # rows are indexed by the translation parameter m; each row keeps the
        # worst ratio over the whole family so the profile is a max-profile
        w, fam = ctx["w"], ctx["fam"]
        base = [_norm_lp(s.functions["f"], cfg.p, w) for s in samples]
        rows = []
        profile = []
        for m in range(-int(cfg.m_max), int(cfg.m_max) + 1):
            mv = np.zeros(spec.n)
            mv[0] = m
            best = (-1.0, 0.0, 1.0)
            for s, denom in zip(samples, base):
                sf = multipliers.square_function(s.functions["f"], fam, m=mv)
                lhs = _norm_lp(sf, cfg.p, w)
                ratio = lhs / denom
                if ratio > best[0]:
                    best = (ratio, lhs, denom)
            rows.append(_row(f"m={m}", best[1], best[2], {"m": m}))
            profile.append(best[0])
        profile = np.asarray(profile)
        ms = np.arange(-int(cfg.m_max), int(cfg.m_max) + 1)
        design = np.vstack([np.log1p(np.abs(ms)), np.ones_like(profile)]).T
        slope = float(np.linalg.lstsq(design, profile, rcond=None)[0][0])
        m0 = float(profile[int(cfg.m_max)])
        extras = {
            "profile_max": float(profile.max()),
            "profile_min": float(profile.min()),
            "profile_flatness": float(profile.max() / profile.min()),
            "m0_ratio": m0,
            "trend_slope": slope,
            "trend_slope_relative": slope / m0,
        }
        return rows, extras


@_register
class _LPSum(_Runner):
    kind = "lp-sum"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _check_weight_dict(cfg.weight_w, cfg.p, cfg.grid.n, "w")

    def context(self, cfg, spec):
        return {"w": _build_weight(spec, cfg.weight_w), "fam": _squared_family()}

    def gates(self, cfg, spec, ctx):
        # telescoping profile: summing the annulus convolutions of one banded
        # function over every resolvable scale must reproduce the function
        fam = multipliers.make_translated_family(profile=multipliers.psi_profile)
        rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "gate"))
        f = _draw_banded(spec, rng, True)
        acc = np.zeros(spec.shape, dtype=np.complex128)
        for k in multipliers.resolvable_scales(spec):
            acc += multipliers.translated_convolution(f, fam, k, 0).values
        return [_gate("annulus telescoping", _rel_defect(space_function(spec, acc), f))]

    def draws(self, cfg):
        scales = tuple(multipliers.resolvable_scales(cfg.grid))
        out = []
        for i in range(cfg.family_size):
            rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "stack", i))
            fns = {f"f{k}": _draw_one(cfg.grid, rng, i + j) for j, k in enumerate(scales)}
            out.append(Sample(fns, {"scales": scales}))
        return out

    def evaluate(self, cfg, spec, ctx, sample):
        fam, w = ctx["fam"], ctx["w"]
        acc = np.zeros(spec.shape, dtype=np.complex128)
        sq = np.zeros(spec.shape)
        for k in sample.params["scales"]:
            fk = sample.functions[f"f{k}"]
            acc += multipliers.translated_convolution(fk, fam, k, 0).values
            sq += np.abs(fk.values) ** 2
        lhs = _norm_lp(space_function(spec, acc), cfg.p, w)
        rhs = _norm_lp(space_function(spec, np.sqrt(sq)), cfg.p, w)
        return lhs, rhs


@_register
class _TranslatedBound(_Runner):
    kind = "translated-bound"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(int(cfg.m_max) >= 1, "m_max must be >= 1")
        _check_weight_dict(cfg.weight_w, cfg.p, cfg.grid.n, "w")

    def context(self, cfg, spec):
        w = _build_weight(spec, cfg.weight_w)
        fam = multipliers.make_translated_family()
        if w is None:
            ap = 1.0
        else:
            ap = weights.ap_characteristic(w, cfg.p).characteristic
        return {"w": w, "fam": fam, "ap": ap}

    def gates(self, cfg, spec, ctx):
        f, _ = _gate_pair(spec, cfg.seed)
        ref = l2_norm(multipliers.translated_convolution(f, ctx["fam"], 1, 0))
        worst = 0.0
        for m in (3, -int(cfg.m_max)):
            got = l2_norm(multipliers.translated_convolution(f, ctx["fam"], 1, m))
            worst = max(worst, abs(got - ref) / ref)
        return [_gate("plain-L2 translation invariance", worst)]

    def draws(self, cfg):
        scales = tuple(multipliers.resolvable_scales(cfg.grid))
        out = []
        for i in range(cfg.family_size):
            rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "draw", i))
            k = int(scales[int(rng.integers(len(scales)))])
            m = rng.integers(-int(cfg.m_max), int(cfg.m_max) + 1, size=cfg.grid.n)
            out.append(
                Sample(
                    {"f": _draw_one(cfg.grid, rng, i)},
                    {"k": k, "m": [int(x) for x in m]},
                )
            )
        return out

    def evaluate(self, cfg, spec, ctx, sample):
        f = sample.functions["f"]
        conv = multipliers.translated_convolution(
            f, ctx["fam"], sample.params["k"], np.asarray(sample.params["m"], dtype=float)
        )
        lhs = _norm_lp(conv, cfg.p, ctx["w"])
        rhs = ctx["ap"] ** (1.0 / cfg.p) * _norm_lp(f, cfg.p, ctx["w"])
        return lhs, rhs

    def rows(self, cfg, spec, ctx, samples):
        rows, _ = super().rows(cfg, spec, ctx, samples)
        return rows, {"ap_characteristic": float(ctx["ap"])}


def sliding_ball_average(f, center, radius):
    """|B|^{-1} (chi_B * f) on the torus for the ball B(center, radius).

    The kernel is the indicator of the periodic ball sampled on the
    displacement lattice, normalized by its sample count so that averaging a
    constant returns the constant exactly.
    """
    spec = f.spec
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.shape != (spec.n,):
        raise ValueError(f"center must be a scalar or length-{spec.n} point")
    radius = float(radius)
    if radius < spec.h * math.sqrt(spec.n):
        raise ValueError(f"radius must cover at least one lattice cell, got {radius}")
    if radius > spec.L / 2:
        raise ValueError(f"radius must be at most L/2 = {spec.L / 2}")
    axis = (np.arange(spec.N) * spec.h + spec.L / 2) % spec.L - spec.L / 2
    meshes = np.meshgrid(*[axis] * spec.n, indexing="ij")
    d2 = np.zeros(spec.shape)
    for mesh, ci in zip(meshes, center):
        delta = np.abs(mesh - ci) % spec.L
        delta = np.minimum(delta, spec.L - delta)
        d2 = d2 + delta * delta
    mask = (np.sqrt(d2) <= radius).astype(np.float64)
    count = mask.sum()
    if count == 0:
        raise ValueError("ball contains no displacement samples")
    conv = np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(mask)) / count
    if np.isrealobj(f.values):
        conv = conv.real
    return space_function(spec, conv)


@_register
class _BallAverage(_Runner):
    kind = "ball-average"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _check_weight_dict(cfg.weight_w, cfg.p, cfg.grid.n, "w")

    def context(self, cfg, spec):
        w = _build_weight(spec, cfg.weight_w)
        ap = 1.0 if w is None else weights.ap_characteristic(w, cfg.p).characteristic
        return {"w": w, "ap": ap}

    def gates(self, cfg, spec, ctx):
        ones = space_function(spec, np.ones(spec.shape))
        avg = sliding_ball_average(ones, np.zeros(spec.n), spec.L / 8)
        return [_gate("ball average of a constant", float(np.abs(avg.values - 1.0).max()))]

    def draws(self, cfg):
        spec = cfg.grid
        lo = max(2 * spec.h * math.sqrt(spec.n), spec.L / 64)
        out = []
        for i in range(cfg.family_size):
            rng = np.random.default_rng(_child_seed(cfg.seed, cfg.kind, "draw", i))
            radius = float(np.exp(rng.uniform(np.log(lo), np.log(spec.L / 2))))
            center = rng.uniform(-spec.L / 2, spec.L / 2, size=spec.n)
            out.append(
                Sample(
                    {"f": _draw_one(spec, rng, i)},
                    {"radius": radius, "center": [float(x) for x in center]},
                )
            )
        return out

    def evaluate(self, cfg, spec, ctx, sample):
        f = sample.functions["f"]
        avg = sliding_ball_average(f, sample.params["center"], sample.params["radius"])
        lhs = _norm_lp(avg, cfg.p, ctx["w"])
        rhs = ctx["ap"] ** (1.0 / cfg.p) * _norm_lp(f, cfg.p, ctx["w"])
        return lhs, rhs

    def rows(self, cfg, spec, ctx, samples):
        rows, _ = super().rows(cfg, spec, ctx, samples)
        return rows, {"ap_characteristic": float(ctx["ap"])}


class _MultiplierBase(_Runner):
    def _symbol(self, cfg, spec):
        try:
            return multipliers.make_bilinear_symbol(cfg.symbol, n=spec.n)
        except Exception as exc:
            raise InadmissibleConfigError(
                f"unknown or unbuildable symbol constructor {cfg.symbol!r}: {exc}"
            ) from exc

    def _apply(self, ctx, f, g):
        sym = ctx["sym"]
        if f.spec.n == 1:
            return multipliers._apply_bilinear_1d(f, g, sym, symbol_values=ctx["sym_vals"])
        return multipliers.apply_bilinear(f, g, sym)

    def base_context(self, cfg, spec):
        r = _resolve_r(cfg)
        v = _build_weight(spec, cfg.weight_v)
        w = _build_weight(spec, cfg.weight_w)
        sym = self._symbol(cfg, spec)
        sym_vals = multipliers._symbol_values_1d(spec, sym) if spec.n == 1 else None
        return {
            "r": r,
            "v": v,
            "w": w,
            "u": _combined_weight(spec, v, w, r, cfg.p, cfg.q),
            "sym": sym,
            "sym_vals": sym_vals,
        }

    def product_identity_gate(self, cfg, spec):
        f, g = _gate_pair(spec, cfg.seed)
        one = multipliers.make_bilinear_symbol("one", n=spec.n)
        got = multipliers.apply_bilinear(f, g, one)
        return _gate("unit-symbol product identity", _rel_defect(got, pointwise_product(f, g)))

    def separable_identity_gate(self, cfg, spec):
        f, g = _gate_pair(spec, cfg.seed)
        a, b = js(0.7), js(-0.4)
        sep = multipliers.separable_symbol(a, b, n=spec.n)
        got = multipliers.apply_bilinear(f, g, sep)
        want = pointwise_product(apply_linear(f, a), apply_linear(g, b))
        return _gate("separable-symbol factorization", _rel_defect(got, want))

    def draws(self, cfg):
        return _pair_draws(cfg)

    def evaluate(self, cfg, spec, ctx, sample):
        f, g = sample.functions["f"], sample.functions["g"]
        lhs = _norm_lp(self._apply(ctx, f, g), ctx["r"], ctx["u"])
        rhs = _norm_lp(f, cfg.p, ctx["v"]) * _norm_lp(g, cfg.q, ctx["w"])
        return lhs, rhs


@_register
class _CMMultiplier(_MultiplierBase):
    kind = "cm-multiplier"

    def check(self, cfg):
        _require(cfg.p > 1, f"p = {cfg.p:g} violates 1 < p < inf")
        _require(cfg.q > 1, f"q = {cfg.q:g} violates 1 < q < inf")
        r = _resolve_r(cfg)
        _require(r > 0.5, f"r = {r:g} violates 1/2 < r < inf")
        _check_weight_dict(cfg.weight_v, cfg.p, cfg.grid.n, "v")
        _check_weight_dict(cfg.weight_w, cfg.q, cfg.grid.n, "w")
        self._symbol(cfg, cfg.grid)

    def context(self, cfg, spec):
        return self.base_context(cfg, spec)

    def gates(self, cfg, spec, ctx):
        return [self.separable_identity_gate(cfg, spec)]

    def rows(self, cfg, spec, ctx, samples):
        rows, _ = super().rows(cfg, spec, ctx, samples)
        semi = multipliers.cm_seminorm(ctx["sym"], n_dirs=24)
        return rows, {"cm_seminorm": float(semi)}


@_register
class _HSTMultiplier(_MultiplierBase):
    kind = "hst-multiplier"

    def check(self, cfg):
        n = cfg.grid.n
        _require(n == 1, "the Sobolev multiplier functional is implemented for n = 1 grids")
        _require(
            n / 2.0 < cfg.sob_s <= n,
            f"Sobolev index s = {cfg.sob_s:g} violates n/2 < s <= n = ({n / 2.0:g}, {n}]",
        )
        _require(
            n / 2.0 < cfg.sob_t <= n,
            f"Sobolev index t = {cfg.sob_t:g} violates n/2 < t <= n = ({n / 2.0:g}, {n}]",
        )
        _require(cfg.p > n / cfg.sob_s, f"p = {cfg.p:g} violates p > n/s = {n / cfg.sob_s:g}")
        _require(cfg.q > n / cfg.sob_t, f"q = {cfg.q:g} violates q > n/t = {n / cfg.sob_t:g}")
        r = _resolve_r(cfg)
        _require(r > 0.5, f"r = {r:g} violates 1/2 < r < inf")
        _check_weight_dict(cfg.weight_v, cfg.p * cfg.sob_s / n, cfg.grid.n, "v (A_{ps/n})")
        _check_weight_dict(cfg.weight_w, cfg.q * cfg.sob_t / n, cfg.grid.n, "w (A_{qt/n})")
        self._symbol(cfg, cfg.grid)

    def context(self, cfg, spec):
        return self.base_context(cfg, spec)

    def gates(self, cfg, spec, ctx):
        probe = multipliers.make_bilinear_symbol("degree_zero", n=spec.n)
        base = multipliers.hst_norm(probe, cfg.sob_s, cfg.sob_t, k=0)
        drift = abs(multipliers.hst_norm(probe, cfg.sob_s, cfg.sob_t, k=2) - base) / base
        return [
            self.product_identity_gate(cfg, spec),
            _gate("degree-zero dyadic-block invariance", drift),
        ]

    def rows(self, cfg, spec, ctx, samples):
        rows, _ = super().rows(cfg, spec, ctx, samples)
        sup = max(
            multipliers.hst_norm(ctx["sym"], cfg.sob_s, cfg.sob_t, k=k) for k in range(-2, 3)
        )
        return rows, {"hst_sup": float(sup)}


# ---------------------------------------------------------------------------
# the runner front end


def _runner_for(kind):
    kind = str(kind).lower()
    if kind not in _RUNNERS:
        raise InadmissibleConfigError(
            f"unknown experiment kind {kind!r}; run list-kinds for the catalog"
        )
    return _RUNNERS[kind]


def _execute(cfg, spec, samples, gate_tag=""):
    runner = _runner_for(cfg.kind)
    ctx = runner.context(cfg, spec)
    gates = runner.gates(cfg, spec, ctx)
    if gate_tag:
        gates = [GateCheck(g.name + gate_tag, g.defect, g.tol, g.passed) for g in gates]
    for g in gates:
        if not g.passed:
            raise IdentityGateError(
                f"identity gate {g.name!r} failed on N={spec.N}: "
                f"defect {g.defect:.3e} exceeds {g.tol:.1e}"
            )
    rows, extras = runner.rows(cfg, spec, ctx, samples)
    return gates, rows, extras


def run_experiment(cfg):
    """Run one experiment kind; deterministic given (config, seed)."""
    runner = _runner_for(cfg.kind)
    runner.check(cfg)
    t0 = time.perf_counter()
    samples = runner.draws(cfg)
    gates, rows, extras = _execute(cfg, cfg.grid, samples)
    return _assemble(cfg, gates, rows, extras, None, time.perf_counter() - t0)


def sweep_refinement(cfg, factor=2):
    """Run the same sampled family at N and factor*N and report stability.

    The refined pass resamples the exact base-grid draws by spectral zero
    padding, so the two maxima measure the same functions at two resolutions.
    """
    runner = _runner_for(cfg.kind)
    runner.check(cfg)
    t0 = time.perf_counter()
    samples = runner.draws(cfg)
    gates1, rows1, extras1 = _execute(cfg, cfg.grid, samples)
    spec2 = cfg.grid.refined(int(factor))
    refined = [_refine_sample(s, int(factor)) for s in samples]
    gates2, rows2, _ = _execute(cfg, spec2, refined, gate_tag=f" [N={spec2.N}]")
    max1 = max(row.ratio for row in rows1)
    max2 = max(row.ratio for row in rows2)
    stability = abs(max2 - max1) / max1 if max1 > 0 else math.inf
    extras = dict(extras1)
    extras.update(
        {
            "base_max_ratio": float(max1),
            "refined_max_ratio": float(max2),
            "refined_N": spec2.N,
            "refinement_factor": int(factor),
        }
    )
    runtime = time.perf_counter() - t0
    return _assemble(cfg, tuple(gates1) + tuple(gates2), rows1, extras, stability, runtime)


# ---------------------------------------------------------------------------
# extrapolation tracer

_TRACE_NOTE = (
    "finite grid: every norm is finite, so the a-priori finiteness hypothesis "
    "on the lefthand side holds without the truncation-and-limit step"
)


@dataclasses.dataclass(frozen=True)
class TraceStep:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool


@dataclasses.dataclass(frozen=True)
class TraceReport:
    steps: tuple
    extras: dict
    note: str

    @property
    def passed(self):
        return all(step.passed for step in self.steps)


def _trace_step(name, lhs, rhs):
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    return TraceStep(name, lhs, rhs, slack, slack >= 0)


def _scaled_exponent(exp_fn, scalar, tag):
    return spaces.ExponentFunction(
        exp_fn.spec, exp_fn.values / scalar, f"{tag}({exp_fn.kind})"
    )


def trace_extrapolation(h, f, g, p, q, r, pe, qe, tau, a_pbar, a_qbar, k_terms=12):
    """Walk the proof chain of the variable-space bound for the triple
    (h, f, g), reporting each link as a numeric (lhs, rhs) pair.

    Steps: (i) the exponent split theta1 + theta2 = 1; (ii) pointwise
    domination by the iterated majorants; (iii) dual normalization
    ||tau^{r'/p'}||_{p'} <= 1; (iv) the weighted hypothesis with the
    iterated weights (exact discrete Hoelder when h = fg); (v) the final
    bound with the variable Hoelder constants.  a_pbar and a_qbar bound the
    maximal operator on the conjugate quotient spaces and drive the
    iteration; magnitudes of h, f, g, tau are used throughout.
    """
    spec = h.spec
    if f.spec != spec or g.spec != spec or tau.spec != spec:
        raise ValueError("all tracer inputs must share one grid")
    p, q, r = float(p), float(q), float(r)
    _require(
        abs(1.0 / p + 1.0 / q - 1.0 / r) <= 1e-12,
        f"scalars violate the scaling identity 1/r = 1/p + 1/q: 1/{p:g} + 1/{q:g} != 1/{r:g}",
    )
    _require(pe.p_minus > p, f"need p < p_-: p = {p:g}, p_- = {pe.p_minus:g}")
    _require(qe.p_minus > q, f"need q < q_-: q = {q:g}, q_- = {qe.p_minus:g}")
    re = spaces.harmonic_exponent(pe, qe)

    pbar = _scaled_exponent(pe, p, "bar")
    qbar = _scaled_exponent(qe, q, "bar")
    rbar = _scaled_exponent(re, r, "bar")
    pbarc = spaces.conjugate_exponent(pbar)
    qbarc = spaces.conjugate_exponent(qbar)
    rbarc = spaces.conjugate_exponent(rbar)

    theta1 = r * rbarc.values / (p * pbarc.values)
    theta2 = r * rbarc.values / (q * qbarc.values)
    step1 = _trace_step(
        "exponent split theta1 + theta2 = 1",
        float(np.abs(theta1 + theta2 - 1.0).max()),
        1e-12,
    )

    tau_vals = np.abs(tau.values)
    if tau_vals.max() == 0:
        raise ValueError("tau must not vanish identically")
    tau_gf = space_function(spec, tau_vals)
    tau_norm = spaces.variable_norm(tau_gf, rbarc)
    that = space_function(spec, tau_vals / tau_norm)

    u1 = space_function(spec, that.values.real ** (rbarc.values / pbarc.values))
    u2 = space_function(spec, that.values.real ** (rbarc.values / qbarc.values))
    res1 = weights.rubio_iterate(u1, pbarc, a_pbar, k_terms=k_terms)
    res2 = weights.rubio_iterate(u2, qbarc, a_qbar, k_terms=k_terms)
    big_v = res1.function.values.real
    big_w = res2.function.values.real

    hmag = np.abs(h.values)
    cell = spec.h**spec.n
    i_tau = float(np.sum(hmag**r * that.values.real) * cell)
    i_weighted = float(np.sum(hmag**r * big_v ** (r / p) * big_w ** (r / q)) * cell)
    step2 = _trace_step("pointwise domination by the iterated majorants", i_tau, i_weighted)

    n1 = spaces.variable_norm(u1, pbarc)
    n2 = spaces.variable_norm(u2, qbarc)
    step3 = _trace_step("dual normalization of the split powers", max(n1, n2), 1.0 + 1e-9)

    fint = float(np.sum(np.abs(f.values) ** p * big_v) * cell)
    gint = float(np.sum(np.abs(g.values) ** q * big_w) * cell)
    step4 = _trace_step(
        "weighted hypothesis with the iterated weights",
        i_weighted,
        fint ** (r / p) * gint ** (r / q),
    )

    k_p = float(np.max(1.0 / pbar.values) + np.max(1.0 / pbarc.values))
    k_q = float(np.max(1.0 / qbar.values) + np.max(1.0 / qbarc.values))
    fnorm = spaces.variable_norm(space_function(spec, np.abs(f.values)), pe)
    gnorm = spaces.variable_norm(space_function(spec, np.abs(g.values)), qe)
    final_rhs = (2.0 * k_p) ** (r / p) * (2.0 * k_q) ** (r / q) * fnorm**r * gnorm**r
    step5 = _trace_step("final bound with the variable Hoelder constants", i_tau, final_rhs)

    vmax = float(np.max(np.abs(weights.maximal(res1.function).values) / big_v))
    wmax = float(np.max(np.abs(weights.maximal(res2.function).values) / big_w))
    extras = {
        "tau_norm": float(tau_norm),
        "a1_certificate_v": vmax,
        "a1_certificate_w": wmax,
        "a1_bound_v": 2.0 * float(a_pbar),
        "a1_bound_w": 2.0 * float(a_qbar),
        "rubio_tail_v": float(res1.tail_bound),
        "rubio_tail_w": float(res2.tail_bound),
        "norm_v": float(spaces.variable_norm(res1.function, pbarc)),
        "norm_w": float(spaces.variable_norm(res2.function, qbarc)),
        "holder_constant_p": k_p,
        "holder_constant_q": k_q,
    }
    return TraceReport((step1, step2, step3, step4, step5), extras, _TRACE_NOTE)


def run_trace_family(grid=None, instances=50, seed=0, p=2.0, q=2.0, probes=16):
    """Run the tracer on seeded (fg, f, g) triples, alternating constant and
    two-value exponent pairs; returns the per-instance reports."""
    spec = grid or _DEFAULT_GRID
    r = 1.0 / (1.0 / p + 1.0 / q)
    reports = []
    for i in range(int(instances)):
        rng = np.random.default_rng(_child_seed(seed, "trace", i))
        if i % 2 == 0:
            pe = spaces.make_exponent(spec, "constant", p0=2.0 * p)
            qe = spaces.make_exponent(spec, "constant", p0=2.0 * q)
        else:
            lo = float(rng.uniform(-spec.L / 4, spec.L / 4))
            hi = float(rng.uniform(-spec.L / 4, spec.L / 4))
            pe = spaces.make_exponent(
                spec, "two_value", p1=1.8 * p, p2=2.2 * p, split=lo
            )
            qe = spaces.make_exponent(
                spec, "two_value", p1=2.3 * q, p2=1.9 * q, split=hi
            )
        f = space_function(spec, np.abs(_draw_one(spec, rng, i).values) + 0.05)
        g = space_function(spec, np.abs(_draw_one(spec, rng, i + 1).values) + 0.05)
        h = pointwise_product(f, g)
        tau = space_function(spec, np.abs(_draw_one(spec, rng, i + 2).values))
        pbarc = spaces.conjugate_exponent(_scaled_exponent(pe, p, "bar"))
        qbarc = spaces.conjugate_exponent(_scaled_exponent(qe, q, "bar"))
        a_p = weights.estimate_maximal_norm(
            spec, pbarc, n_probes=probes, seed=_child_seed(seed, "mnorm-p", i)
        )
        a_q = weights.estimate_maximal_norm(
            spec, qbarc, n_probes=probes, seed=_child_seed(seed, "mnorm-q", i)
        )
        reports.append(trace_extrapolation(h, f, g, p, q, r, pe, qe, tau, a_p, a_q))
    return reports


# ---------------------------------------------------------------------------
# emission


def _fmt_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return ";".join(_fmt_cell(v) for v in value)
    return str(value)


def _report_json_payload(report):
    return {
        "kind": report.kind,
        "config": report.config,
        "config_hash": report.config_hash,
        "gates": [
            {"name": g.name, "defect": g.defect, "tol": g.tol, "passed": g.passed}
            for g in report.gates
        ],
        "aggregates": {
            "max_ratio": report.max_ratio,
            "mean_ratio": report.mean_ratio,
            "min_ratio": report.min_ratio,
            "refinement_stability": report.refinement_stability,
            "n_rows": len(report.rows),
        },
        "extras": {k: _jsonable(v) for k, v in sorted(report.extras.items())},
    }


def emit(report, fmt, path):
    """Write an InequalityReport to disk; byte-stable for a fixed config.

    CSV carries the per-sample rows (columns kind, sample_id, lhs, rhs,
    ratio, then the union of per-row parameter names); JSON carries the
    config, its hash, the gates, and the aggregates.  Runtime is excluded.
    """
    fmt = str(fmt).lower()
    if fmt == "csv":
        keys = sorted({k for row in report.rows for k in row.params})
        lines = [",".join(["kind", "sample_id", "lhs", "rhs", "ratio"] + keys)]
        for row in report.rows:
            cells = [
                report.kind,
                row.sample_id,
                _fmt_cell(row.lhs),
                _fmt_cell(row.rhs),
                _fmt_cell(row.ratio),
            ]
            cells += [_fmt_cell(row.params.get(k)) for k in keys]
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps(_report_json_payload(report), sort_keys=True, indent=2) + "\n"
    else:
        raise ValueError(f"unknown emit format {fmt!r}; have csv, json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def emit_trace(reports, fmt, path):
    """Write tracer step tables; same stability contract as emit."""
    fmt = str(fmt).lower()
    if fmt == "csv":
        lines = ["instance,step,lhs,rhs,slack,passed"]
        for i, rep in enumerate(reports):
            for step in rep.steps:
                lines.append(
                    ",".join(
                        [
                            str(i),
                            step.name,
                            _fmt_cell(step.lhs),
                            _fmt_cell(step.rhs),
                            _fmt_cell(step.slack),
                            _fmt_cell(step.passed),
                        ]
                    )
                )
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = [
            {
                "instance": i,
                "steps": [dataclasses.asdict(step) for step in rep.steps],
                "extras": {k: _jsonable(v) for k, v in sorted(rep.extras.items())},
                "note": rep.note,
                "passed": rep.passed,
            }
            for i, rep in enumerate(reports)
        ]
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        raise ValueError(f"unknown emit format {fmt!r}; have csv, json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path
