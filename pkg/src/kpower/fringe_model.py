"""N-slit interference intensity on phase grids.

The intensity of N equally spaced slits of width b and pitch a is

    I_N(alpha) = sinc^2(beta) * (sin(N alpha) / sin(alpha))^2,   beta = r * alpha,

with r = b/a and the unnormalized convention sinc(x) = sin(x)/x. The
normalized form divides by the principal-maximum value N^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DomainError

__all__ = [
    "FringeParams",
    "PhysicalGeometry",
    "PhaseGrid",
    "FringeCurve",
    "DEFAULT_GRID",
    "intensity_at",
    "normalized_intensity_at",
    "normalized_array",
    "sample_curve",
    "alpha_from_geometry",
    "alpha_from_frequency",
]


@dataclass(frozen=True)
class FringeParams:
    """Slit count N and envelope ratio r = beta/alpha = b/a.

    ``envelope_ratio=0`` switches the single-slit envelope off.
    """

    n_slits: int
    envelope_ratio: float = 0.0

    def __post_init__(self):
        if isinstance(self.n_slits, bool) or int(self.n_slits) != self.n_slits:
            raise DomainError(f"n_slits must be an integer, got {self.n_slits!r}")
        if self.n_slits < 1:
            raise DomainError(f"n_slits must be >= 1, got {self.n_slits}")
        object.__setattr__(self, "n_slits", int(self.n_slits))
        r = float(self.envelope_ratio)
        if not math.isfinite(r) or r < 0:
            raise DomainError(f"envelope_ratio must be finite and >= 0, got {self.envelope_ratio!r}")
        object.__setattr__(self, "envelope_ratio", r)


@dataclass(frozen=True)
class PhysicalGeometry:
    slit_separation: float  # a, metres
    slit_width: float  # b, metres
    wavelength: float  # lambda, metres

    def __post_init__(self):
        for name in ("slit_separation", "slit_width", "wavelength"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def envelope_ratio(self) -> float:
        return self.slit_width / self.slit_separation


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform phase axis, endpoints included."""

    start: float
    end: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise DomainError("grid bounds must be finite")
        if not self.start < self.end:
            raise DomainError(f"grid needs start < end, got [{self.start}, {self.end}]")
        if isinstance(self.n_points, bool) or int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError(f"grid needs an integer n_points >= 2, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def step(self) -> float:
        return (self.end - self.start) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        # endpoint blend: symmetric grids mirror exactly and hit 0 at the centre
        i = np.arange(self.n_points, dtype=np.float64)
        m = self.n_points - 1
        return (self.start * (m - i) + self.end * i) / m


DEFAULT_GRID = PhaseGrid(-math.pi / 2, math.pi / 2, 100_001)


@dataclass
class FringeCurve:
    grid: PhaseGrid
    values: np.ndarray
    normalized: bool = True
    phases: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.phases is None:
            self.phases = self.grid.points()
        if self.values.shape != (self.grid.n_points,):
            raise DomainError(
                f"curve has {self.values.size} values for a {self.grid.n_points}-point grid"
            )


def _check_alpha(alpha):
    if not math.isfinite(alpha):
        raise DomainError(f"phase must be finite, got {alpha!r}")


def normalized_intensity_at(params: FringeParams, alpha: float) -> float:
    _check_alpha(alpha)
    return kernels.fringe_scalar(float(alpha), params.n_slits, params.envelope_ratio)


def intensity_at(params: FringeParams, alpha: float) -> float:
    """Unnormalized intensity, in [0, N^2]."""
    n = params.n_slits
    return n * n * normalized_intensity_at(params, alpha)


def normalized_array(params: FringeParams, alpha) -> np.ndarray:
    """Vectorized normalized intensity at arbitrary phases."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if not np.all(np.isfinite(alpha)):
        raise DomainError("phases must be finite")
    return kernels.fringe_array(alpha, params.n_slits, params.envelope_ratio)


def sample_curve(params: FringeParams, grid: PhaseGrid = DEFAULT_GRID, normalized: bool = True) -> FringeCurve:
    phases = grid.points()
    values = normalized_array(params, phases)
    if not normalized:
        values = values * float(params.n_slits * params.n_slits)
    return FringeCurve(grid, values, normalized, phases)


def alpha_from_geometry(geom: PhysicalGeometry, theta: float) -> tuple[float, float]:
    """Map a diffraction angle to the (alpha, beta) phase pair."""
    if not abs(theta) <= math.pi / 2:
        raise DomainError(f"|theta| must be <= pi/2, got {theta!r}")
    s = math.sin(theta)
    alpha = math.pi * geom.slit_separation / geom.wavelength * s
    beta = math.pi * geom.slit_width / geom.wavelength * s
    return alpha, beta


def alpha_from_frequency(f: float, delta_t: float) -> float:
    """Fringe phase for optical frequency ``f`` behind an arm delay ``delta_t``."""
    if not (f >= 0 and delta_t >= 0):
        raise DomainError("frequency and delay must be >= 0")
    return 2.0 * math.pi * f * delta_t
