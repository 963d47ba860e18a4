"""K-th power line narrowing for N-slit interference fringes.

Modules
-------
fringe_model
    N-slit intensity law and phase mappings.
kpower_metrics
    K-th power post-processing, FWHM measurement, sqrt(K) scaling fits.
resolvability
    Two-frequency resolvability verdicts and minimum resolvable spacing.
shot_noise
    Poisson photon-counting model of the K-port detector split.
cli
    ``kpower`` command line front end.

Hot loops live in a compiled extension (``_ckernels``) when it was built;
otherwise the numpy reference kernels in ``_pykernels`` are used. Check
``kpower.BACKEND`` to see which one is active.
"""
from ._backend import BACKEND
from .errors import KPowerError
from .fringe_model import (
    DEFAULT_GRID,
    FringeCurve,
    FringeParams,
    PhaseGrid,
    PhysicalGeometry,
    alpha_from_frequency,
    alpha_from_geometry,
    intensity_at,
    normalized_intensity_at,
    sample_curve,
)
from .kpower_metrics import KPowerSpec, fwhm_exact, fwhm_grid, kth_power, snl_fit, sweep_fwhm
from .resolvability import SpectralPair, dip_resolvable, min_resolvable_df, peak_separation, resolvable
from .shot_noise import NoiseConfig, ensemble_fringe, width_error_scaling

__version__ = "0.1.0"
