# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; operation-for-operation mirror of ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, log, sqrt, floor, rint, fabs
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef double PI = 3.141592653589793
cdef double TWO_PI = 2.0 * 3.141592653589793
cdef double SINGULAR_SIN = 1e-8
cdef double POISSON_INVERSION_MAX = 10.0
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline double _fringe(double alpha, long n, double r) noexcept nogil:
    cdef double red = alpha - PI * rint(alpha / PI)
    cdef double s = sin(red)
    cdef double y = n * red
    cdef double ratio, x, env
    if fabs(s) < SINGULAR_SIN:
        ratio = 1.0 if y == 0.0 else sin(y) / y
    else:
        ratio = sin(y) / s / n
    x = r * alpha
    if x == 0.0:
        env = 1.0
    else:
        env = sin(x) / x
    return (env * env) * (ratio * ratio)


def fringe_scalar(double alpha, long n, double r):
    return _fringe(alpha, n, r)


def fringe_array(alpha, long n, double r):
    cdef double[::1] a = np.ascontiguousarray(alpha, dtype=np.float64).ravel()
    out = np.empty(a.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(a.shape[0]):
            o[i] = _fringe(a[i], n, r)
    return out.reshape(np.shape(alpha))


cdef inline double _power_level(double value, double k) noexcept nogil:
    if value <= 0.0:
        return -0.5
    return exp(k * log(value)) - 0.5


def half_width(long n, double r, double k, double tol=1e-12):
    cdef double hi = PI / n * (1.0 - 1e-9)
    cdef double lo = 0.0
    cdef double mid, g
    cdef int i, sign, prev = 1, flips = 0
    with nogil:
        for i in range(1, 65):
            g = _power_level(_fringe(hi * i / 64.0, n, r), k)
            sign = 1 if g > 0.0 else -1
            if sign != prev:
                flips += 1
                prev = sign
    if flips != 1 or prev != -1:
        return -1.0
    with nogil:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _power_level(_fringe(mid, n, r), k) > 0.0:
                lo = mid
            else:
                hi = mid
    return 0.5 * (lo + hi)


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t counter) noexcept nogil:
    cdef uint64_t z = _mix64(key + (counter + 1) * GOLDEN)
    return (<double>(z >> 11) + 0.5) * INV_2_53


cdef inline int64_t _poisson(uint64_t key, double lam) noexcept nogil:
    cdef double u, p, cdf, sl, u1, u2, z, x
    cdef int64_t k
    cdef uint64_t d
    if lam <= 0.0:
        return 0
    if lam < POISSON_INVERSION_MAX:
        u = _uniform(key, 0)
        k = 0
        p = exp(-lam)
        cdf = p
        while u > cdf and p > 0.0:
            k += 1
            p = p * lam / k
            cdf += p
        return k
    sl = sqrt(lam)
    d = 0
    while True:
        u1 = _uniform(key, d)
        u2 = _uniform(key, d + 1)
        z = sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)
        x = floor(lam + sl * z + 0.5)
        if x >= 0.0:
            return <int64_t>x
        d += 2


cdef inline uint64_t _root_key(uint64_t seed) noexcept nogil:
    return _mix64(seed + GOLDEN)


def poisson_counts(lam, uint64_t seed, uint64_t point_offset, uint64_t trial, uint64_t port):
    cdef double[::1] l = np.ascontiguousarray(lam, dtype=np.float64).ravel()
    out = np.empty(l.shape[0], dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef uint64_t root = _root_key(seed)
    cdef uint64_t key
    cdef Py_ssize_t j
    with nogil:
        for j in range(l.shape[0]):
            key = _mix64(root + (point_offset + j + 1) * GOLDEN)
            key = _mix64(key + (trial + 1) * GOLDEN)
            key = _mix64(key + (port + 1) * GOLDEN)
            o[j] = _poisson(key, l[j])
    return out


def product_estimates(intensity, double mean_photons, long k, long trials,
                      uint64_t seed, uint64_t point_offset=0):
    cdef double[::1] inten = np.ascontiguousarray(intensity, dtype=np.float64).ravel()
    cdef Py_ssize_t npts = inten.shape[0]
    out = np.empty((trials, npts), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double scale = mean_photons / k
    cdef uint64_t root = _root_key(seed)
    cdef uint64_t pkey, tkey, key
    cdef double lam, est
    cdef Py_ssize_t j, t, p
    with nogil:
        for j in range(npts):
            lam = inten[j] * mean_photons / k
            pkey = _mix64(root + (point_offset + j + 1) * GOLDEN)
            for t in range(trials):
                tkey = _mix64(pkey + (t + 1) * GOLDEN)
                est = 1.0
                for p in range(k):
                    key = _mix64(tkey + (p + 1) * GOLDEN)
                    est = est * (<double>_poisson(key, lam) / scale)
                o[t, j] = est
    return out
