"""Pure numpy cube-scan kernels: reference backend for `fracleib.kernels`.

Same contracts as the compiled `fracleib._scan` extension.  All scans range
over axis-aligned windows fully inside the box (no wraparound), window lengths
1..N, with discrete uniform averages over the samples they contain.

Tie-breaking is pinned so both backends return identical witnesses: scans go
ell ascending, then start index ascending (row-major in 2-d), and a candidate
replaces the incumbent only on strict improvement.  Window sums come from
prefix sums in both backends, so pow-free scans agree bit for bit, and so do
product scans with exponent in {-1, 0, 1/2, 1, 2} (reduced to correctly
rounded primitives on both sides).  Other exponents may differ by an ulp
between vectorized and scalar libm pow.
"""

import numpy as np


def _window_max_ending(y, ell, axis=0):
    # t[i] = max(y[max(0, i-ell+1) : i+1]) along `axis`, via the two-pass
    # block trick (per-block prefix/suffix maxima), O(n) per call.
    y = np.moveaxis(np.asarray(y, dtype=np.float64), axis, 0)
    n = y.shape[0]
    if ell <= 1:
        return np.moveaxis(y.copy(), 0, axis)
    pad = (-n) % ell
    if pad:
        z = np.concatenate([y, np.full((pad,) + y.shape[1:], -np.inf)], axis=0)
    else:
        z = y
    blocks = z.reshape(-1, ell, *y.shape[1:])
    prefix = np.maximum.accumulate(blocks, axis=1).reshape(z.shape)[:n]
    suffix = np.maximum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].reshape(z.shape)
    out = prefix.copy()
    idx = np.arange(ell - 1, n)
    out[idx] = np.maximum(suffix[idx - ell + 1], prefix[idx])
    return np.moveaxis(out, 0, axis)


def _window_min_starting(y, ell, axis=0):
    # s[j] = min(y[j : j+ell]) along `axis`, defined for j <= n-ell.
    y = np.moveaxis(np.asarray(y, dtype=np.float64), axis, 0)
    n = y.shape[0]
    if ell <= 1:
        return np.moveaxis(y.copy(), 0, axis)
    pad = (-n) % ell
    if pad:
        z = np.concatenate([y, np.full((pad,) + y.shape[1:], np.inf)], axis=0)
    else:
        z = y
    blocks = z.reshape(-1, ell, *y.shape[1:])
    prefix = np.minimum.accumulate(blocks, axis=1).reshape(z.shape)[:n]
    suffix = np.minimum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].reshape(z.shape)
    idx = np.arange(ell - 1, n)
    ends = np.minimum(suffix[idx - ell + 1], prefix[idx])
    return np.moveaxis(ends, 0, axis)


def _powm(x, e):
    # same scalar fast paths as the compiled backend: reduce the common
    # exponents to correctly rounded primitives, fall back to libm pow
    if e == 2.0:
        return np.square(x)
    if e == 1.0:
        return +x
    if e == 0.5:
        return np.sqrt(x)
    if e == 0.0:
        return np.ones_like(x)
    if e == -1.0:
        return 1.0 / x
    return np.power(x, e)


def _prefix_1d(a):
    p = np.empty(a.size + 1, dtype=np.float64)
    p[0] = 0.0
    np.cumsum(a, out=p[1:])
    return p


def _prefix_2d(a):
    n0, n1 = a.shape
    p = np.zeros((n0 + 1, n1 + 1), dtype=np.float64)
    np.cumsum(a, axis=0, out=p[1:, 1:])
    np.cumsum(p[1:, 1:], axis=1, out=p[1:, 1:])
    return p


def _window_sums_2d(p, ell):
    return p[ell:, ell:] - p[:-ell, ell:] - p[ell:, :-ell] + p[:-ell, :-ell]


def maximal_1d(a):
    """Hardy-Littlewood maximal function over intervals, out[i] = sup averages."""
    a = np.asarray(a, dtype=np.float64)
    n = a.size
    p = _prefix_1d(a)
    out = a.copy()
    for ell in range(2, n + 1):
        means = (p[ell:] - p[:-ell]) * (1.0 / ell)
        padded = np.concatenate([means, np.full(ell - 1, -np.inf)])
        np.maximum(out, _window_max_ending(padded, ell), out=out)
    return out


def maximal_2d(a):
    """Maximal function over axis-aligned squares fully inside the box."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    p = _prefix_2d(a)
    out = a.copy()
    for ell in range(2, n + 1):
        means = _window_sums_2d(p, ell) * (1.0 / (ell * ell))
        nst = n - ell + 1
        padded = np.full((n, n), -np.inf)
        padded[:nst, :nst] = means
        t = _window_max_ending(padded, ell, axis=0)
        t = _window_max_ending(t, ell, axis=1)
        np.maximum(out, t, out=out)
    return out


def ap_product_scan_1d(w, sigma, pm1):
    """max over windows of (mean w) * (mean sigma)**pm1; returns (best, start, ell)."""
    w = np.asarray(w, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    n = w.size
    pw = _prefix_1d(w)
    ps = _prefix_1d(sigma)
    best = -np.inf
    bs = bl = 0
    for ell in range(1, n + 1):
        inv = 1.0 / ell
        mw = (pw[ell:] - pw[:-ell]) * inv
        ms = (ps[ell:] - ps[:-ell]) * inv
        prod = mw * _powm(ms, pm1)
        s = int(np.argmax(prod))
        if prod[s] > best:
            best = float(prod[s])
            bs, bl = s, ell
    return best, bs, bl


def a1_scan_1d(w):
    """max over windows of (mean w) / (min w); returns (best, start, ell)."""
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    pw = _prefix_1d(w)
    best = -np.inf
    bs = bl = 0
    for ell in range(1, n + 1):
        inv = 1.0 / ell
        mw = (pw[ell:] - pw[:-ell]) * inv
        mn = _window_min_starting(w, ell)
        prod = mw / mn
        s = int(np.argmax(prod))
        if prod[s] > best:
            best = float(prod[s])
            bs, bl = s, ell
    return best, bs, bl


def ap_product_scan_2d(w, sigma, pm1):
    """2-d analogue of ap_product_scan_1d over squares; returns (best, i, j, ell)."""
    w = np.asarray(w, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    n = w.shape[0]
    pw = _prefix_2d(w)
    ps = _prefix_2d(sigma)
    best = -np.inf
    bi = bj = bl = 0
    for ell in range(1, n + 1):
        inv = 1.0 / (ell * ell)
        mw = _window_sums_2d(pw, ell) * inv
        ms = _window_sums_2d(ps, ell) * inv
        prod = mw * _powm(ms, pm1)
        flat = int(np.argmax(prod))
        i, j = divmod(flat, prod.shape[1])
        if prod[i, j] > best:
            best = float(prod[i, j])
            bi, bj, bl = i, j, ell
    return best, bi, bj, bl


def a1_scan_2d(w):
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    pw = _prefix_2d(w)
    best = -np.inf
    bi = bj = bl = 0
    for ell in range(1, n + 1):
        inv = 1.0 / (ell * ell)
        mw = _window_sums_2d(pw, ell) * inv
        mn = _window_min_starting(w, ell, axis=0)
        mn = _window_min_starting(mn, ell, axis=1)
        prod = mw / mn
        flat = int(np.argmax(prod))
        i, j = divmod(flat, prod.shape[1])
        if prod[i, j] > best:
            best = float(prod[i, j])
            bi, bj, bl = i, j, ell
    return best, bi, bj, bl


def window_sum_max_1d(g):
    """Per window length ell=1..N: the largest window sum and its start index."""
    g = np.asarray(g, dtype=np.float64)
    n = g.size
    p = _prefix_1d(g)
    sums = np.empty(n)
    starts = np.empty(n, dtype=np.intp)
    for ell in range(1, n + 1):
        s = p[ell:] - p[:-ell]
        k = int(np.argmax(s))
        sums[ell - 1] = s[k]
        starts[ell - 1] = k
    return sums, starts


def window_sum_max_2d(g):
    g = np.asarray(g, dtype=np.float64)
    n = g.shape[0]
    p = _prefix_2d(g)
    sums = np.empty(n)
    i0 = np.empty(n, dtype=np.intp)
    j0 = np.empty(n, dtype=np.intp)
    for ell in range(1, n + 1):
        s = _window_sums_2d(p, ell)
        flat = int(np.argmax(s))
        i, j = divmod(flat, s.shape[1])
        sums[ell - 1] = s[i, j]
        i0[ell - 1] = i
        j0[ell - 1] = j
    return sums, i0, j0
