"""Backend dispatch for the cube-scan kernels.

Prefers the compiled `fracleib._scan` extension and falls back to the pure
numpy `fracleib._scan_py` when the extension is missing (source checkout
without a build step).  Set FRACLEIB_FORCE_FALLBACK=1 to force the fallback,
e.g. when benchmarking one backend against the other.
"""

import os

import numpy as np

from . import _scan_py

if os.environ.get("FRACLEIB_FORCE_FALLBACK"):
    _impl = _scan_py
    _BACKEND = "fallback"
else:
    try:
        from . import _scan as _impl

        _BACKEND = "compiled"
    except ImportError:
        _impl = _scan_py
        _BACKEND = "fallback"


def backend_name():
    return _BACKEND


def available_backends():
    """name -> module, for cross-backend tests and benchmarks."""
    out = {"fallback": _scan_py}
    try:
        from . import _scan

        out["compiled"] = _scan
    except ImportError:
        pass
    return out


def _as1d(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError("expected a 1-d array")
    return a


def _as2d(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square 2-d array")
    return a


def maximal(a, impl=None):
    """Discrete maximal function of a nonnegative sample array (1-d or 2-d)."""
    mod = impl or _impl
    a = np.asarray(a)
    if a.ndim == 1:
        return mod.maximal_1d(_as1d(a))
    return mod.maximal_2d(_as2d(a))


def ap_product_scan(w, sigma, pm1, impl=None):
    """Best (mean w)(mean sigma)^pm1 over cubes; returns (value, start_tuple, ell)."""
    mod = impl or _impl
    w = np.asarray(w)
    if w.ndim == 1:
        best, s, ell = mod.ap_product_scan_1d(_as1d(w), _as1d(sigma), float(pm1))
        return best, (int(s),), int(ell)
    best, i, j, ell = mod.ap_product_scan_2d(_as2d(w), _as2d(sigma), float(pm1))
    return best, (int(i), int(j)), int(ell)


def a1_scan(w, impl=None):
    """Best (mean w)/(min w) over cubes; returns (value, start_tuple, ell)."""
    mod = impl or _impl
    w = np.asarray(w)
    if w.ndim == 1:
        best, s, ell = mod.a1_scan_1d(_as1d(w))
        return best, (int(s),), int(ell)
    best, i, j, ell = mod.a1_scan_2d(_as2d(w))
    return best, (int(i), int(j)), int(ell)


def window_sum_max(g, impl=None):
    """Largest window sum per cube side 1..N.

    Returns (sums, starts) where starts is a list of start tuples, indexed by
    side length minus one.
    """
    mod = impl or _impl
    g = np.asarray(g)
    if g.ndim == 1:
        sums, starts = mod.window_sum_max_1d(_as1d(g))
        return sums, [(int(s),) for s in starts]
    sums, i0, j0 = mod.window_sum_max_2d(_as2d(g))
    return sums, [(int(i), int(j)) for i, j in zip(i0, j0)]
