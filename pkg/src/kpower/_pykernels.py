"""Pure-Python/numpy kernels.

Reference implementation of the hot loops. ``_ckernels.pyx`` mirrors every
function here operation for operation, so both backends draw the same
photon counts for the same seed.
"""
import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_PI = 2.0 * math.pi
SINGULAR_SIN = 1e-8
POISSON_INVERSION_MAX = 10.0

_G = np.uint64(GOLDEN)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


# --- fringe law -----------------------------------------------------------

def fringe_scalar(alpha, n, r):
    """Normalized N-slit intensity at one phase, in [0, 1]."""
    # Interference term has period pi; reducing first keeps sin(N a)/sin(a)
    # well conditioned next to the principal maxima.
    m = round(alpha / math.pi)
    red = alpha - math.pi * m
    s = math.sin(red)
    if abs(s) < SINGULAR_SIN:
        # sin(red) == red to double precision here, so the ratio is sinc(N red)
        y = n * red
        ratio = 1.0 if y == 0.0 else math.sin(y) / y
    else:
        ratio = math.sin(n * red) / s / n
    x = r * alpha
    env = 1.0 if x == 0.0 else math.sin(x) / x
    return (env * env) * (ratio * ratio)


def fringe_array(alpha, n, r):
    alpha = np.asarray(alpha, dtype=np.float64)
    red = alpha - math.pi * np.rint(alpha / math.pi)
    s = np.sin(red)
    sing = np.abs(s) < SINGULAR_SIN
    y = n * red
    sy = np.sin(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sing, np.where(y == 0.0, 1.0, sy / y), sy / s / n)
    x = r * alpha
    nz = x != 0.0
    env = np.ones_like(x)
    env[nz] = np.sin(x[nz]) / x[nz]
    return (env * env) * (ratio * ratio)


def _power_level(value, k):
    if value <= 0.0:
        return -0.5
    return math.exp(k * math.log(value)) - 0.5


def half_width(n, r, k, tol=1e-12):
    """Half width at half maximum of the K-th power fringe by bisection.

    Returns -1.0 when the bracket (0, pi/N) shows a sign pattern that is
    not a single + to - transition; the caller turns that into an error.
    """
    hi = math.pi / n * (1.0 - 1e-9)
    lo = 0.0
    # coarse scan: the level function must change sign exactly once
    prev = 1
    flips = 0
    for i in range(1, 65):
        g = _power_level(fringe_scalar(hi * i / 64.0, n, r), k)
        sign = 1 if g > 0.0 else -1
        if sign != prev:
            flips += 1
            prev = sign
    if flips != 1 or prev != -1:
        return -1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _power_level(fringe_scalar(mid, n, r), k) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- counter-based random streams -----------------------------------------

def mix64(z):
    z = (z ^ (z >> 30)) * MIX1 & MASK64
    z = (z ^ (z >> 27)) * MIX2 & MASK64
    return z ^ (z >> 31)


def root_key(seed):
    return mix64((seed + GOLDEN) & MASK64)


def child_key(key, index):
    return mix64((key + (index + 1) * GOLDEN) & MASK64)


def uniform_at(key, counter):
    """Uniform double in the open interval (0, 1)."""
    z = mix64((key + (counter + 1) * GOLDEN) & MASK64)
    return ((z >> 11) + 0.5) * (1.0 / 9007199254740992.0)


def poisson_from_uniforms(lam, next_uniform):
    """One Poisson draw; ``next_uniform`` yields successive stream uniforms."""
    if lam <= 0.0:
        return 0
    if lam < POISSON_INVERSION_MAX:
        u = next_uniform()
        k = 0
        p = math.exp(-lam)
        cdf = p
        while u > cdf and p > 0.0:
            k += 1
            p = p * lam / k
            cdf += p
        return k
    sl = math.sqrt(lam)
    while True:
        u1 = next_uniform()
        u2 = next_uniform()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)
        x = math.floor(lam + sl * z + 0.5)
        if x >= 0.0:
            return int(x)


def _mix64_arr(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _uniform_arr(keys, counter):
    z = _mix64_arr(keys + np.uint64((counter + 1) * GOLDEN & MASK64))
    return ((z >> _S11).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def _poisson_arr(keys, lam):
    out = np.zeros(keys.shape, dtype=np.int64)

    small = (lam > 0.0) & (lam < POISSON_INVERSION_MAX)
    if small.any():
        ks = keys[small]
        ls = lam[small]
        u = _uniform_arr(ks, 0)
        p = np.exp(-ls)
        cdf = p.copy()
        cnt = np.zeros(ks.shape, dtype=np.int64)
        active = (u > cdf) & (p > 0.0)
        while active.any():
            cnt[active] += 1
            p[active] = p[active] * ls[active] / cnt[active]
            cdf[active] += p[active]
            active &= (u > cdf) & (p > 0.0)
        out[small] = cnt

    big = lam >= POISSON_INVERSION_MAX
    if big.any():
        kb = keys[big]
        lb = lam[big]
        sl = np.sqrt(lb)
        res = np.empty(kb.shape, dtype=np.int64)
        todo = np.arange(kb.size)
        d = 0
        while todo.size:
            u1 = _uniform_arr(kb[todo], d)
            u2 = _uniform_arr(kb[todo], d + 1)
            z = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
            x = np.floor(lb[todo] + sl[todo] * z + 0.5)
            ok = x >= 0.0
            res[todo[ok]] = x[ok].astype(np.int64)
            todo = todo[~ok]
            d += 2
        out[big] = res
    return out


def poisson_counts(lam, seed, point_offset, trial, port):
    """Counts for one (trial, port) over a run of phase points (test hook)."""
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    keys = _point_keys(seed, point_offset, lam.size)
    keys = _mix64_arr(keys + np.uint64((trial + 1) * GOLDEN & MASK64))
    keys = _mix64_arr(keys + np.uint64((port + 1) * GOLDEN & MASK64))
    return _poisson_arr(keys, lam)


def _point_keys(seed, point_offset, npoints):
    idx = np.arange(point_offset, point_offset + npoints, dtype=np.uint64)
    return _mix64_arr(np.uint64(root_key(seed)) + (idx + np.uint64(1)) * _G)


def product_estimates(intensity, mean_photons, k, trials, seed, point_offset=0):
    """Per-trial K-port product estimates, shape (trials, npoints)."""
    intensity = np.ascontiguousarray(intensity, dtype=np.float64)
    npts = intensity.size
    lam = intensity * mean_photons / k
    scale = mean_photons / k
    pkeys = _point_keys(seed, point_offset, npts)
    tidx = np.arange(trials, dtype=np.uint64)[:, None]
    tkeys = _mix64_arr(pkeys[None, :] + (tidx + np.uint64(1)) * _G)
    lam2 = np.broadcast_to(lam, (trials, npts)).ravel()
    est = np.ones(trials * npts, dtype=np.float64)
    for port in range(k):
        keys = _mix64_arr(tkeys + np.uint64((port + 1) * GOLDEN & MASK64)).ravel()
        counts = _poisson_arr(keys, lam2)
        est = est * (counts / scale)
    return est.reshape(trials, npts)
