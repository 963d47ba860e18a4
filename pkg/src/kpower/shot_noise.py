"""Photon-counting model of the K-way detector split.

One interferometer output is divided into K equal ports; each port sees a
Poisson count with mean I * n / K. The product of the K rescaled counts is
an unbiased estimator of I**K, so averaging it over trials reproduces the
deterministic K-th power fringe.

Random numbers come from counter-based streams: every (seed, phase index,
trial, port) tuple owns its own SplitMix64 sequence, so results do not
depend on evaluation order or chunking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import _pykernels
from ._backend import kernels
from .errors import ContractError, DomainError, EstimatorError
from .fringe_model import FringeCurve, FringeParams, PhaseGrid, normalized_array
from .kpower_metrics import KPowerSpec, fwhm_grid

__all__ = [
    "NoiseConfig",
    "EnsembleResult",
    "CounterStream",
    "WidthRow",
    "NOISE_GRID",
    "sample_poisson",
    "port_means",
    "split_detect",
    "product_estimator",
    "ensemble_estimates",
    "ensemble_fringe",
    "bootstrap_fwhm",
    "width_error_scaling",
]

NOISE_GRID = PhaseGrid(-math.pi / 2, math.pi / 2, 2001)
BOOTSTRAP_RESAMPLES = 200
_CHUNK_CELLS = 4_000_000  # trials * points per kernel call


@dataclass(frozen=True)
class NoiseConfig:
    mean_photons: float
    trials: int
    seed: int
    split_k: int

    def __post_init__(self):
        n = float(self.mean_photons)
        if not (math.isfinite(n) and n >= 0):
            raise DomainError(f"mean_photons must be finite and >= 0, got {self.mean_photons!r}")
        object.__setattr__(self, "mean_photons", n)
        for name in ("trials", "split_k"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise DomainError(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        KPowerSpec(self.split_k)
        if isinstance(self.seed, bool) or int(self.seed) != self.seed:
            raise DomainError(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed) & _pykernels.MASK64)

    @property
    def port_mean_scale(self) -> float:
        return self.mean_photons / self.split_k


@dataclass
class EnsembleResult:
    mean_curve: np.ndarray
    stderr_curve: np.ndarray
    trials_used: int

    def as_curve(self, grid: PhaseGrid) -> FringeCurve:
        return FringeCurve(grid, self.mean_curve, normalized=False)


class CounterStream:
    """Stateless-keyed uniform stream; ``spawn`` derives independent children.

    The key chain seed -> phase index -> trial -> port is the same one the
    vectorized kernels use, so scalar draws reproduce ensemble draws.
    """

    def __init__(self, seed: int, _key: int | None = None):
        self.seed = int(seed) & _pykernels.MASK64
        self.key = _pykernels.root_key(self.seed) if _key is None else _key
        self.counter = 0

    def spawn(self, index: int) -> "CounterStream":
        return CounterStream(self.seed, _pykernels.child_key(self.key, int(index)))

    def uniform(self) -> float:
        u = _pykernels.uniform_at(self.key, self.counter)
        self.counter += 1
        return u


def sample_poisson(expected: float, stream: CounterStream) -> int:
    """Poisson draw: inversion below mean 10, rounded normal deviate above.

    Negative normal deviates are rejected and redrawn.
    """
    if not (math.isfinite(expected) and expected >= 0):
        raise DomainError(f"Poisson mean must be finite and >= 0, got {expected!r}")
    return _pykernels.poisson_from_uniforms(float(expected), stream.uniform)


def _check_intensity(intensity):
    if not (0.0 <= intensity <= 1.0):
        raise ContractError(f"normalized intensity must lie in [0, 1], got {intensity!r}")


def port_means(intensity: float, cfg: NoiseConfig) -> np.ndarray:
    _check_intensity(intensity)
    return np.full(cfg.split_k, intensity * cfg.mean_photons / cfg.split_k)


def split_detect(intensity: float, cfg: NoiseConfig, stream: CounterStream) -> list[int]:
    """K independent port counts for one exposure at normalized intensity."""
    _check_intensity(intensity)
    lam = intensity * cfg.mean_photons / cfg.split_k
    return [sample_poisson(lam, stream.spawn(p)) for p in range(cfg.split_k)]


def product_estimator(counts: Sequence[int], cfg: NoiseConfig) -> float:
    if cfg.mean_photons == 0:
        raise EstimatorError("product estimator undefined for zero mean photon number")
    if len(counts) != cfg.split_k:
        raise ContractError(f"expected {cfg.split_k} port counts, got {len(counts)}")
    scale = cfg.port_mean_scale
    est = 1.0
    for c in counts:
        est = est * (c / scale)
    return est


def ensemble_estimates(intensity: np.ndarray, cfg: NoiseConfig) -> np.ndarray:
    """Per-trial product estimates, shape (trials, points)."""
    if cfg.mean_photons == 0:
        raise EstimatorError("product estimator undefined for zero mean photon number")
    intensity = np.ascontiguousarray(intensity, dtype=np.float64)
    if intensity.size and (intensity.min() < 0.0 or intensity.max() > 1.0):
        raise ContractError("normalized intensity must lie in [0, 1]")
    step = max(1, _CHUNK_CELLS // cfg.trials)
    out = np.empty((cfg.trials, intensity.size))
    for lo in range(0, intensity.size, step):
        hi = min(intensity.size, lo + step)
        out[:, lo:hi] = kernels.product_estimates(
            intensity[lo:hi], cfg.mean_photons, cfg.split_k, cfg.trials, cfg.seed, lo
        )
    return out


def _reduce(est: np.ndarray) -> EnsembleResult:
    trials = est.shape[0]
    mean = est.mean(axis=0)
    if trials > 1:
        stderr = est.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        stderr = np.zeros_like(mean)
    return EnsembleResult(mean, stderr, trials)


def ensemble_fringe(params: FringeParams, grid: PhaseGrid, cfg: NoiseConfig) -> EnsembleResult:
    """Monte Carlo K-port product fringe: mean and standard error per phase."""
    if cfg.mean_photons == 0:
        raise EstimatorError("product estimator undefined for zero mean photon number")
    intensity = np.clip(normalized_array(params, grid.points()), 0.0, 1.0)
    trials = cfg.trials
    step = max(1, _CHUNK_CELLS // trials)
    mean = np.empty(grid.n_points)
    stderr = np.empty(grid.n_points)
    # chunk over phase points: keys are global indices, so chunking is invisible
    for lo in range(0, grid.n_points, step):
        hi = min(grid.n_points, lo + step)
        est = kernels.product_estimates(
            intensity[lo:hi], cfg.mean_photons, cfg.split_k, trials, cfg.seed, lo
        )
        part = _reduce(est)
        mean[lo:hi] = part.mean_curve
        stderr[lo:hi] = part.stderr_curve
    return EnsembleResult(mean, stderr, trials)


def bootstrap_fwhm(estimates: np.ndarray, grid: PhaseGrid, n_resamples: int = BOOTSTRAP_RESAMPLES,
                   seed: int = 0) -> tuple[float, float]:
    """FWHM of the trial-mean curve and its bootstrap standard error.

    Trials are resampled with replacement; each resample is a multinomial
    weight vector, so all resampled mean curves come from one matrix product.
    """
    estimates = np.asarray(estimates, dtype=np.float64)
    trials = estimates.shape[0]
    width = fwhm_grid(FringeCurve(grid, estimates.mean(axis=0), normalized=False)).fwhm
    if trials < 2:
        return width, 0.0
    rng = np.random.default_rng(seed)
    weights = rng.multinomial(trials, np.full(trials, 1.0 / trials), size=n_resamples)
    boot_means = weights @ estimates / trials
    widths = np.array([
        fwhm_grid(FringeCurve(grid, row, normalized=False)).fwhm for row in boot_means
    ])
    return width, float(widths.std(ddof=1))


class WidthRow(NamedTuple):
    k: int
    fwhm: float
    stderr: float


def width_error_scaling(params: FringeParams, cfg: NoiseConfig, k_list: Sequence[int],
                        grid: PhaseGrid = NOISE_GRID,
                        n_resamples: int = BOOTSTRAP_RESAMPLES) -> list[WidthRow]:
    """Empirical FWHM of the ensemble fringe per K, with bootstrap errors."""
    if not len(k_list):
        raise DomainError("k_list must not be empty")
    intensity = np.clip(normalized_array(params, grid.points()), 0.0, 1.0)
    rows = []
    for k in k_list:
        cfg_k = replace(cfg, split_k=k)
        est = ensemble_estimates(intensity, cfg_k)
        width, se = bootstrap_fwhm(est, grid, n_resamples, seed=cfg.seed + k)
        rows.append(WidthRow(cfg_k.split_k, width, se))
    return rows
