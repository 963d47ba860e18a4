"""Two-frequency resolvability behind an N-slit interferometer.

A frequency f maps to fringe phase alpha = 2 pi f dT. Two lines are called
resolved when their phase separation is at least the FWHM of one K-th power
fringe. A dip test on the incoherent sum of both fringes (saddle at most
0.81 of the lower peak) serves as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IndeterminateError
from .fringe_model import DEFAULT_GRID, FringeCurve, FringeParams, PhaseGrid, alpha_from_frequency, normalized_array
from .kpower_metrics import KPowerSpec, fwhm_exact, power_values

__all__ = [
    "SpectralPair",
    "ResolvabilityReport",
    "DIP_THRESHOLD",
    "peak_separation",
    "resolvable",
    "min_resolvable_df",
    "line_centers",
    "composite_curve",
    "dip_verdict",
    "dip_resolvable",
]

DIP_THRESHOLD = 0.81  # ~8/pi^2, saddle of two sinc^2 lines at Rayleigh separation


@dataclass(frozen=True)
class SpectralPair:
    f0: float
    f1: float
    delta_t: float

    def __post_init__(self):
        for name in ("f0", "f1", "delta_t"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")

    @classmethod
    def from_ratio(cls, ratio: float, f0: float = 1.0, delta_t: float | None = None) -> "SpectralPair":
        """Pair (f0, ratio*f0); the delay defaults to one optical period 1/f0."""
        return cls(f0, ratio * f0, 1.0 / f0 if delta_t is None else delta_t)


@dataclass(frozen=True)
class ResolvabilityReport:
    peak_separation: float
    fwhm: float
    margin: float
    resolvable: bool
    min_resolvable_df: float

    def to_dict(self) -> dict:
        return {
            "peak_separation_rad": self.peak_separation,
            "fwhm_rad": self.fwhm,
            "margin": self.margin,
            "resolvable": self.resolvable,
            "min_resolvable_df_hz": self.min_resolvable_df,
        }


def peak_separation(pair: SpectralPair) -> float:
    return 2.0 * math.pi * abs(pair.f1 - pair.f0) * pair.delta_t


def min_resolvable_df(params: FringeParams, spec: KPowerSpec, delta_t: float) -> float:
    """Smallest frequency difference whose phase separation reaches one FWHM."""
    if not (math.isfinite(delta_t) and delta_t > 0):
        raise DomainError(f"delta_t must be finite and > 0, got {delta_t!r}")
    return fwhm_exact(params, spec).fwhm / (2.0 * math.pi * delta_t)


def resolvable(pair: SpectralPair, params: FringeParams, spec: KPowerSpec) -> ResolvabilityReport:
    width = fwhm_exact(params, spec).fwhm
    sep = peak_separation(pair)
    margin = sep / width
    return ResolvabilityReport(
        peak_separation=sep,
        fwhm=width,
        margin=margin,
        resolvable=margin >= 1.0,
        min_resolvable_df=width / (2.0 * math.pi * pair.delta_t),
    )


def _wrap(alpha: float) -> float:
    # principal maxima repeat every pi; fold into [-pi/2, pi/2]
    return alpha - math.pi * round(alpha / math.pi)


def line_centers(pair: SpectralPair) -> tuple[float, float]:
    """Principal-peak phases of the two lines, folded into [-pi/2, pi/2]."""
    return (_wrap(alpha_from_frequency(pair.f0, pair.delta_t)),
            _wrap(alpha_from_frequency(pair.f1, pair.delta_t)))


def composite_curve(pair: SpectralPair, params: FringeParams, spec: KPowerSpec,
                    grid: PhaseGrid = DEFAULT_GRID) -> FringeCurve:
    """Incoherent sum of the two K-th power fringes on one phase axis."""
    phases = grid.points()
    total = np.zeros(grid.n_points)
    for c in line_centers(pair):
        total = total + power_values(normalized_array(params, phases - c), spec.order)
    return FringeCurve(grid, total, normalized=False, phases=phases)


def dip_verdict(values: np.ndarray, i0: int, i1: int, threshold: float = DIP_THRESHOLD) -> bool:
    """True when the curve dips to ``threshold`` x the lower of the two peaks between them."""
    lo, hi = sorted((i0, i1))
    if hi - lo < 2:
        raise IndeterminateError("line centres closer than two grid steps")
    lower = min(values[lo], values[hi])
    return bool(values[lo + 1:hi].min() <= threshold * lower)


def dip_resolvable(pair: SpectralPair, params: FringeParams, spec: KPowerSpec,
                   grid: PhaseGrid = DEFAULT_GRID) -> bool:
    if pair.f1 == pair.f0:
        return False
    curve = composite_curve(pair, params, spec, grid)
    idx = []
    for c in line_centers(pair):
        if not grid.start <= c <= grid.end:
            raise IndeterminateError(f"line centre {c:.6g} outside the grid")
        idx.append(int(round((c - grid.start) / grid.step)))
    return dip_verdict(curve.values, idx[0], idx[1])
