"""K-th power post-processing of fringes and FWHM line-width measurement."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ._backend import kernels
from .errors import BracketError, ContractError, DomainError, FitError, LineUnresolvedError, PeakClippedError
from .fringe_model import FringeCurve, FringeParams

__all__ = [
    "KPowerSpec",
    "LineWidthResult",
    "ScalingFit",
    "SweepRow",
    "kth_power",
    "power_values",
    "fwhm_grid",
    "fwhm_exact",
    "sweep_fwhm",
    "snl_fit",
    "snl_law",
    "ASYMPTOTIC_WIDTH_PRODUCT",
    "asymptotic_width_product",
]

MAX_ORDER = 10**6
# small-angle limit of fwhm * sqrt(K) * N for N -> infinity
ASYMPTOTIC_WIDTH_PRODUCT = 2.0 * math.sqrt(3.0 * math.log(2.0))
BISECTION_TOL = 1e-12
_NORMALIZED_SLACK = 1e-12


@dataclass(frozen=True)
class KPowerSpec:
    order: int

    def __post_init__(self):
        if isinstance(self.order, bool) or int(self.order) != self.order:
            raise DomainError(f"order must be an integer, got {self.order!r}")
        if not 1 <= self.order <= MAX_ORDER:
            raise DomainError(f"order must lie in [1, {MAX_ORDER}], got {self.order}")
        object.__setattr__(self, "order", int(self.order))


@dataclass(frozen=True)
class LineWidthResult:
    fwhm: float
    peak_location: float
    peak_value: float
    method: str  # "grid-interpolated" | "bisection-exact"


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of width = amplitude * K**(-exponent)."""

    amplitude: float
    exponent: float
    max_relative_deviation: float


class SweepRow(NamedTuple):
    n: int
    k: int
    fwhm: float


def power_values(values: np.ndarray, k: int) -> np.ndarray:
    """v -> v**k through exp(k ln v); zeros stay zero, k=1 is returned untouched."""
    values = np.asarray(values, dtype=np.float64)
    if k == 1:
        return values.copy()
    out = np.zeros_like(values)
    pos = values > 0.0
    out[pos] = np.exp(k * np.log(values[pos]))
    return out


def kth_power(curve: FringeCurve, spec: KPowerSpec) -> FringeCurve:
    """Intensity product of K identical detector splits, i.e. the K-th power."""
    if not curve.normalized:
        raise ContractError("kth_power needs a normalized curve (values in [0, 1])")
    v = curve.values
    if v.size and (v.min() < 0.0 or v.max() > 1.0 + _NORMALIZED_SLACK):
        raise ContractError("normalized curve has values outside [0, 1]")
    return FringeCurve(curve.grid, power_values(v, spec.order), True, curve.phases)


def _principal_peak(values: np.ndarray) -> int:
    vmax = values.max()
    ties = np.flatnonzero(values >= vmax * (1.0 - 1e-12))
    center = 0.5 * (values.size - 1)
    return int(ties[np.argmin(np.abs(ties - center))])


def fwhm_grid(curve: FringeCurve) -> LineWidthResult:
    """FWHM of the principal peak from linearly interpolated half crossings.

    Works on any non-negative curve; the half level is half of the curve's
    own maximum.
    """
    v = curve.values
    x = curve.phases
    if not np.all(np.isfinite(v)):
        raise DomainError("curve contains non-finite values")
    p = _principal_peak(v)
    peak = float(v[p])
    if p == 0 or p == v.size - 1:
        raise PeakClippedError(f"principal peak at grid boundary (phase {x[p]:.6g})")
    if peak <= 0.0:
        raise LineUnresolvedError("curve has no positive peak")
    half = 0.5 * peak

    below = np.flatnonzero(v[:p] <= half)
    if below.size == 0:
        raise LineUnresolvedError("no half-maximum crossing left of the peak; widen the grid")
    i = below[-1]
    left = x[i] + (half - v[i]) * (x[i + 1] - x[i]) / (v[i + 1] - v[i])

    below = np.flatnonzero(v[p + 1:] <= half)
    if below.size == 0:
        raise LineUnresolvedError("no half-maximum crossing right of the peak; widen the grid")
    j = p + 1 + below[0]
    right = x[j - 1] + (half - v[j - 1]) * (x[j] - x[j - 1]) / (v[j] - v[j - 1])

    return LineWidthResult(float(right - left), float(x[p]), peak, "grid-interpolated")


def fwhm_exact(params: FringeParams, spec: KPowerSpec) -> LineWidthResult:
    """Grid-free FWHM of the normalized K-th power fringe.

    Bisection on the half-maximum condition over (0, pi/N), where the
    normalized fringe falls monotonically from 1 to 0 provided the
    envelope's first zero lies beyond pi/N (r < N).
    """
    n, r = params.n_slits, params.envelope_ratio
    if n == 1 and r == 0.0:
        raise LineUnresolvedError("a single slit without envelope is flat; no line to measure")
    if n > 1 and r >= n:
        raise BracketError(f"envelope zero at pi/r lies inside (0, pi/N) for r={r}, N={n}")
    if n == 1:
        # pure sinc^2: the first zero is at pi/r, the interference term is flat
        return _fwhm_single_slit(r, spec.order)
    half = kernels.half_width(n, r, float(spec.order), BISECTION_TOL)
    if half < 0.0:
        raise BracketError(f"half-maximum level not bracketed once on (0, pi/N) for N={n}, r={r}, K={spec.order}")
    return LineWidthResult(2.0 * half, 0.0, 1.0, "bisection-exact")


def _fwhm_single_slit(r: float, k: int) -> LineWidthResult:
    # interference term is identically 1; bisect sinc^2(r a)^k = 1/2 on (0, pi/r)
    lo, hi = 0.0, math.pi / r * (1.0 - 1e-9)
    level = 0.5 ** (1.0 / k)
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        x = r * mid
        s = math.sin(x) / x if x else 1.0
        if s * s > level:
            lo = mid
        else:
            hi = mid
    return LineWidthResult(lo + hi, 0.0, 1.0, "bisection-exact")


def sweep_fwhm(n_list: Sequence[int], k_list: Sequence[int], r: float = 0.0) -> list[SweepRow]:
    """Exact widths over the N x K lattice, N-major in input order."""
    if not len(n_list) or not len(k_list):
        raise DomainError("sweep needs non-empty N and K lists")
    specs = [KPowerSpec(k) for k in k_list]
    rows = []
    for n in n_list:
        params = FringeParams(n, r)
        for spec in specs:
            rows.append(SweepRow(params.n_slits, spec.order, fwhm_exact(params, spec).fwhm))
    return rows


def snl_law(width_k1: float, k) -> np.ndarray:
    """Shot-noise-limit reference: width(K) = width(1) / sqrt(K)."""
    return width_k1 / np.sqrt(np.asarray(k, dtype=np.float64))


def snl_fit(k_values: Sequence[float], widths: Sequence[float]) -> ScalingFit:
    """Fit width = c * K**(-p) by least squares in log-log space."""
    k = np.asarray(k_values, dtype=np.float64)
    w = np.asarray(widths, dtype=np.float64)
    if k.shape != w.shape or k.ndim != 1:
        raise FitError("K and width samples must be 1-d and equally long")
    if k.size < 3 or np.unique(k).size < 3:
        raise FitError("need at least 3 samples with distinct K")
    if np.any(k <= 0) or np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise FitError("K and widths must be positive and finite")
    slope, intercept = np.polyfit(np.log(k), np.log(w), 1)
    c = math.exp(intercept)
    p = -slope
    model = c * k ** (-p)
    dev = float(np.max(np.abs(w / model - 1.0)))
    return ScalingFit(c, float(p) + 0.0, dev)  # + 0.0 folds -0.0


def asymptotic_width_product(n: int) -> float:
    """Large-K limit of fwhm * sqrt(K) * N for the r=0 fringe.

    From 1 - I(a) ~ (N^2 - 1) a^2 / 3 near the principal peak.
    """
    if n < 2:
        raise DomainError("asymptotic width needs N >= 2")
    return ASYMPTOTIC_WIDTH_PRODUCT * n / math.sqrt(n * n - 1.0)
