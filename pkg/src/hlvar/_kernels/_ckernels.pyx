# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of ``_pykernels``; same signatures, same results."""

import numpy as np

cdef extern from *:
    ctypedef long long i128 "__int128"

cdef enum:
    ZERO_LIMIT = -1
    INFINITY_LIMIT = -2


cdef inline i128 _antider(const long long[::1] bps, const long long[::1] vals,
                          Py_ssize_t n, i128 y) nogil:
    cdef Py_ssize_t i
    cdef i128 acc = 0
    if n == 0:
        return <i128>vals[0] * y
    if y < bps[0]:
        return <i128>vals[0] * (y - bps[0])
    i = 0
    while i + 1 < n and bps[i + 1] <= y:
        acc += <i128>vals[i + 1] * (bps[i + 1] - bps[i])
        i += 1
    return acc + <i128>vals[i + 1] * (y - bps[i])


def centered_argmax(bps_in, vals_in, xs_in):
    cdef const long long[::1] bps = np.ascontiguousarray(bps_in, dtype=np.int64)
    cdef const long long[::1] vals = np.ascontiguousarray(vals_in, dtype=np.int64)
    cdef const long long[::1] xs = np.ascontiguousarray(xs_in, dtype=np.int64)
    cdef Py_ssize_t n = bps.shape[0], m = xs.shape[0], i, j, k
    cdef long long x, r, vl, vr
    cdef i128 num, den, best_num, best_den
    cdef long long best
    out = np.empty(m, dtype=np.int64)
    cdef long long[::1] res = out
    with nogil:
        for k in range(m):
            x = xs[k]
            j = 0
            while j < n and bps[j] < x:
                j += 1
            vl = vals[j]
            if j < n and bps[j] == x:
                vr = vals[j + 1]
            else:
                vr = vals[j]
            best_num = <i128>vl + vr
            best_den = 2
            best = ZERO_LIMIT
            for i in range(n):
                r = x - bps[i] if x > bps[i] else bps[i] - x
                if r == 0:
                    continue
                num = _antider(bps, vals, n, <i128>x + r) - _antider(bps, vals, n, <i128>x - r)
                den = 2 * <i128>r
                if num * best_den > best_num * den:
                    best_num = num
                    best_den = den
                    best = i
            num = <i128>vals[0] + vals[n]
            if num * best_den > best_num * 2:
                best = INFINITY_LIMIT
            res[k] = best
    return [int(v) for v in out]


def discrete_max(vals_in, long long lo, long long left, long long right, ns_in):
    cdef const long long[::1] vals = np.ascontiguousarray(vals_in, dtype=np.int64)
    cdef const long long[::1] ns = np.ascontiguousarray(ns_in, dtype=np.int64)
    cdef Py_ssize_t m = ns.shape[0], k
    cdef long long hi = lo + vals.shape[0] - 1
    cdef long long n, r, r_cover, s, den, best_num, best_den, a, b
    nums = np.empty(m, dtype=np.int64)
    dens = np.empty(m, dtype=np.int64)
    cdef long long[::1] nv = nums
    cdef long long[::1] dv = dens
    with nogil:
        for k in range(m):
            n = ns[k]
            r_cover = n - lo
            if hi - n > r_cover:
                r_cover = hi - n
            if r_cover < 0:
                r_cover = 0
            s = _at(vals, lo, hi, left, right, n)
            best_num = s
            best_den = 1
            for r in range(1, r_cover + 1):
                s += _at(vals, lo, hi, left, right, n - r) + _at(vals, lo, hi, left, right, n + r)
                den = 2 * r + 1
                if s * best_den > best_num * den:
                    best_num = s
                    best_den = den
            if (left + right) * best_den > best_num * 2:
                best_num = left + right
                best_den = 2
            nv[k] = best_num
            dv[k] = best_den
    return [int(v) for v in nums], [int(v) for v in dens]


cdef inline long long _at(const long long[::1] vals, long long lo, long long hi,
                          long long left, long long right, long long m) nogil:
    if m < lo:
        return left
    if m > hi:
        return right
    return vals[m - lo]


def window_averages(bps_in, vals_in, double x, radii_in):
    cdef const double[::1] bps = np.ascontiguousarray(bps_in, dtype=np.float64)
    cdef const double[::1] vals = np.ascontiguousarray(vals_in, dtype=np.float64)
    cdef const double[::1] radii = np.ascontiguousarray(radii_in, dtype=np.float64)
    cdef Py_ssize_t n = bps.shape[0], m = radii.shape[0], k
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    cdef double r
    with nogil:
        for k in range(m):
            r = radii[k]
            res[k] = (_fantider(bps, vals, n, x + r) - _fantider(bps, vals, n, x - r)) / (2.0 * r)
    return out


cdef inline double _fantider(const double[::1] bps, const double[::1] vals,
                             Py_ssize_t n, double y) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    if n == 0:
        return vals[0] * y
    if y < bps[0]:
        return vals[0] * (y - bps[0])
    i = 0
    while i + 1 < n and bps[i + 1] <= y:
        acc += vals[i + 1] * (bps[i + 1] - bps[i])
        i += 1
    return acc + vals[i + 1] * (y - bps[i])
