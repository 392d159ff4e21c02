# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cube-scan kernels.

Same contracts and tie-breaking as `fracleib._scan_py` (the reference
backend); window sums come from the same prefix-sum arithmetic, so the
pow-free scans agree bit for bit, as do product scans whose exponent is in
the fast-path set {-1, 0, 1/2, 1, 2} (everything p - 1 reaches for the p in
actual use).  Product scans at other exponents can drift by an ulp where
vectorized and scalar libm pow round differently.  The sliding maxima use a
monotonic index deque, O(N^2) total in 1-d and O(N^3) in 2-d, which keeps
the Muckenhoupt and Morrey sweeps cheap inside property tests.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()


cdef inline double _powm(double x, double e) noexcept:
    # mirror the scalar fast paths of the numpy power operator (square,
    # identity, sqrt, ones, reciprocal) so both backends reduce the common
    # exponents to the same correctly rounded primitive; libm pow is not
    # correctly rounded and drifts from x*x by an ulp on ~0.1% of inputs
    if e == 2.0:
        return x * x
    if e == 1.0:
        return x
    if e == 0.5:
        return sqrt(x)
    if e == 0.0:
        return 1.0
    if e == -1.0:
        return 1.0 / x
    return pow(x, e)


cdef void _prefix1(const double[::1] a, double[::1] p) noexcept:
    cdef Py_ssize_t i, n = a.shape[0]
    p[0] = 0.0
    for i in range(n):
        p[i + 1] = p[i] + a[i]


cdef void _prefix2(const double[:, ::1] a, double[:, ::1] p) noexcept:
    # two sequential passes (cumsum along axis 0, then axis 1) so the float
    # association matches the numpy fallback bit for bit
    cdef Py_ssize_t i, j, n0 = a.shape[0], n1 = a.shape[1]
    for j in range(n1 + 1):
        p[0, j] = 0.0
    for i in range(n0):
        p[i + 1, 0] = 0.0
        for j in range(n1):
            p[i + 1, j + 1] = p[i, j + 1] + a[i, j]
    for i in range(n0):
        for j in range(n1):
            p[i + 1, j + 1] = p[i + 1, j] + p[i + 1, j + 1]


def maximal_1d(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] av = a
    cdef Py_ssize_t n = av.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    pre_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] pre = pre_arr
    mean_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] means = mean_arr
    deq_arr = np.empty(n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] deq = deq_arr
    cdef Py_ssize_t ell, i, nst, head, tail
    cdef double inv, v
    _prefix1(av, pre)
    for i in range(n):
        out[i] = av[i]
    for ell in range(2, n + 1):
        inv = 1.0 / ell
        nst = n - ell + 1
        for i in range(nst):
            means[i] = (pre[i + ell] - pre[i]) * inv
        head = 0
        tail = 0
        for i in range(n):
            if i < nst:
                v = means[i]
                while tail > head and means[deq[tail - 1]] <= v:
                    tail -= 1
                deq[tail] = i
                tail += 1
            while tail > head and deq[head] < i - ell + 1:
                head += 1
            if tail > head:
                v = means[deq[head]]
                if v > out[i]:
                    out[i] = v
    return out_arr


def maximal_2d(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] av = a
    cdef Py_ssize_t n = av.shape[0]
    out_arr = np.array(a, dtype=np.float64, copy=True)
    cdef double[:, ::1] out = out_arr
    pre_arr = np.empty((n + 1, n + 1), dtype=np.float64)
    cdef double[:, ::1] pre = pre_arr
    w_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] wm = w_arr
    t_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] tm = t_arr
    deq_arr = np.empty(n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] deq = deq_arr
    cdef Py_ssize_t ell, i, j, nst, head, tail
    cdef double inv, v
    _prefix2(av, pre)
    for ell in range(2, n + 1):
        inv = 1.0 / (ell * ell)
        nst = n - ell + 1
        for i in range(nst):
            for j in range(nst):
                wm[i, j] = (pre[i + ell, j + ell] - pre[i, j + ell]
                            - pre[i + ell, j] + pre[i, j]) * inv
        # vertical trailing max: tm[i, j] = max over s0 in [i-ell+1, i] cap [0, nst)
        for j in range(nst):
            head = 0
            tail = 0
            for i in range(n):
                if i < nst:
                    v = wm[i, j]
                    while tail > head and wm[deq[tail - 1], j] <= v:
                        tail -= 1
                    deq[tail] = i
                    tail += 1
                while tail > head and deq[head] < i - ell + 1:
                    head += 1
                if tail > head:
                    tm[i, j] = wm[deq[head], j]
                else:
                    tm[i, j] = -np.inf
        # horizontal trailing max into out
        for i in range(n):
            head = 0
            tail = 0
            for j in range(n):
                if j < nst:
                    v = tm[i, j]
                    while tail > head and tm[i, deq[tail - 1]] <= v:
                        tail -= 1
                    deq[tail] = j
                    tail += 1
                while tail > head and deq[head] < j - ell + 1:
                    head += 1
                if tail > head:
                    v = tm[i, deq[head]]
                    if v > out[i, j]:
                        out[i, j] = v
    return out_arr


def ap_product_scan_1d(w, sigma, double pm1):
    w = np.ascontiguousarray(w, dtype=np.float64)
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    cdef const double[::1] wv = w
    cdef const double[::1] sv = sigma
    cdef Py_ssize_t n = wv.shape[0]
    pw_arr = np.empty(n + 1, dtype=np.float64)
    ps_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] pw = pw_arr
    cdef double[::1] ps = ps_arr
    cdef Py_ssize_t ell, s, bs = 0, bl = 0
    cdef double inv, mw, ms, v, best = -np.inf
    _prefix1(wv, pw)
    _prefix1(sv, ps)
    for ell in range(1, n + 1):
        inv = 1.0 / ell
        for s in range(n - ell + 1):
            mw = (pw[s + ell] - pw[s]) * inv
            ms = (ps[s + ell] - ps[s]) * inv
            v = mw * _powm(ms, pm1)
            if v > best:
                best = v
                bs = s
                bl = ell
    return best, bs, bl


def a1_scan_1d(w):
    w = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[::1] wv = w
    cdef Py_ssize_t n = wv.shape[0]
    pw_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] pw = pw_arr
    deq_arr = np.empty(n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] deq = deq_arr
    cdef Py_ssize_t ell, i, s, head, tail, bs = 0, bl = 0
    cdef double inv, v, best = -np.inf
    _prefix1(wv, pw)
    for ell in range(1, n + 1):
        inv = 1.0 / ell
        head = 0
        tail = 0
        for i in range(n):
            v = wv[i]
            while tail > head and wv[deq[tail - 1]] >= v:
                tail -= 1
            deq[tail] = i
            tail += 1
            while tail > head and deq[head] < i - ell + 1:
                head += 1
            if i >= ell - 1:
                s = i - ell + 1
                v = ((pw[s + ell] - pw[s]) * inv) / wv[deq[head]]
                if v > best:
                    best = v
                    bs = s
                    bl = ell
    return best, bs, bl


def ap_product_scan_2d(w, sigma, double pm1):
    w = np.ascontiguousarray(w, dtype=np.float64)
    sigma = np.ascontiguousarray(sigma, dtype=np.float64)
    cdef const double[:, ::1] wv = w
    cdef const double[:, ::1] sv = sigma
    cdef Py_ssize_t n = wv.shape[0]
    pw_arr = np.empty((n + 1, n + 1), dtype=np.float64)
    ps_arr = np.empty((n + 1, n + 1), dtype=np.float64)
    cdef double[:, ::1] pw = pw_arr
    cdef double[:, ::1] ps = ps_arr
    cdef Py_ssize_t ell, i, j, nst, bi = 0, bj = 0, bl = 0
    cdef double inv, mw, ms, v, best = -np.inf
    _prefix2(wv, pw)
    _prefix2(sv, ps)
    for ell in range(1, n + 1):
        inv = 1.0 / (ell * ell)
        nst = n - ell + 1
        for i in range(nst):
            for j in range(nst):
                mw = (pw[i + ell, j + ell] - pw[i, j + ell]
                      - pw[i + ell, j] + pw[i, j]) * inv
                ms = (ps[i + ell, j + ell] - ps[i, j + ell]
                      - ps[i + ell, j] + ps[i, j]) * inv
                v = mw * _powm(ms, pm1)
                if v > best:
                    best = v
                    bi = i
                    bj = j
                    bl = ell
    return best, bi, bj, bl


def a1_scan_2d(w):
    w = np.ascontiguousarray(w, dtype=np.float64)
    cdef const double[:, ::1] wv = w
    cdef Py_ssize_t n = wv.shape[0]
    pw_arr = np.empty((n + 1, n + 1), dtype=np.float64)
    cdef double[:, ::1] pw = pw_arr
    m0_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] m0 = m0_arr
    deq_arr = np.empty(n + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] deq = deq_arr
    cdef Py_ssize_t ell, i, j, s, head, tail, nst, bi = 0, bj = 0, bl = 0
    cdef double inv, v, mn, best = -np.inf
    _prefix2(wv, pw)
    for ell in range(1, n + 1):
        inv = 1.0 / (ell * ell)
        nst = n - ell + 1
        # vertical window min starting at s0: m0[s0, j]
        for j in range(n):
            head = 0
            tail = 0
            for i in range(n):
                v = wv[i, j]
                while tail > head and wv[deq[tail - 1], j] >= v:
                    tail -= 1
                deq[tail] = i
                tail += 1
                while tail > head and deq[head] < i - ell + 1:
                    head += 1
                if i >= ell - 1:
                    m0[i - ell + 1, j] = wv[deq[head], j]
        for i in range(nst):
            head = 0
            tail = 0
            for j in range(n):
                v = m0[i, j]
                while tail > head and m0[i, deq[tail - 1]] >= v:
                    tail -= 1
                deq[tail] = j
                tail += 1
                while tail > head and deq[head] < j - ell + 1:
                    head += 1
                if j >= ell - 1:
                    s = j - ell + 1
                    mn = m0[i, deq[head]]
                    v = ((pw[i + ell, s + ell] - pw[i, s + ell]
                          - pw[i + ell, s] + pw[i, s]) * inv) / mn
                    if v > best:
                        best = v
                        bi = i
                        bj = s
                        bl = ell
    return best, bi, bj, bl


def window_sum_max_1d(g):
    g = np.ascontiguousarray(g, dtype=np.float64)
    cdef const double[::1] gv = g
    cdef Py_ssize_t n = gv.shape[0]
    p_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] p = p_arr
    sums_arr = np.empty(n, dtype=np.float64)
    starts_arr = np.empty(n, dtype=np.intp)
    cdef double[::1] sums = sums_arr
    cdef Py_ssize_t[::1] starts = starts_arr
    cdef Py_ssize_t ell, s, bs
    cdef double v, best
    _prefix1(gv, p)
    for ell in range(1, n + 1):
        best = -np.inf
        bs = 0
        for s in range(n - ell + 1):
            v = p[s + ell] - p[s]
            if v > best:
                best = v
                bs = s
        sums[ell - 1] = best
        starts[ell - 1] = bs
    return sums_arr, starts_arr


def window_sum_max_2d(g):
    g = np.ascontiguousarray(g, dtype=np.float64)
    cdef const double[:, ::1] gv = g
    cdef Py_ssize_t n = gv.shape[0]
    p_arr = np.empty((n + 1, n + 1), dtype=np.float64)
    cdef double[:, ::1] p = p_arr
    sums_arr = np.empty(n, dtype=np.float64)
    i0_arr = np.empty(n, dtype=np.intp)
    j0_arr = np.empty(n, dtype=np.intp)
    cdef double[::1] sums = sums_arr
    cdef Py_ssize_t[::1] i0 = i0_arr
    cdef Py_ssize_t[::1] j0 = j0_arr
    cdef Py_ssize_t ell, i, j, nst, bi, bj
    cdef double v, best
    _prefix2(gv, p)
    for ell in range(1, n + 1):
        best = -np.inf
        bi = 0
        bj = 0
        nst = n - ell + 1
        for i in range(nst):
            for j in range(nst):
                v = (p[i + ell, j + ell] - p[i, j + ell]
                     - p[i + ell, j] + p[i, j])
                if v > best:
                    best = v
                    bi = i
                    bj = j
        sums[ell - 1] = best
        i0[ell - 1] = bi
        j0[ell - 1] = bj
    return sums_arr, i0_arr, j0_arr
