import math

import numpy as np
import pytest

from kpower.errors import DomainError, IndeterminateError
from kpower.fringe_model import FringeParams, PhaseGrid, normalized_array
from kpower.kpower_metrics import KPowerSpec, fwhm_exact, power_values
from kpower.resolvability import (
    DIP_THRESHOLD,
    SpectralPair,
    composite_curve,
    dip_resolvable,
    dip_verdict,
    line_centers,
    min_resolvable_df,
    peak_separation,
    resolvable,
)

F0 = 4.7e14  # Hz; only ratios matter


def pair(ratio, delta_t=None):
    return SpectralPair.from_ratio(ratio, F0, delta_t)


def two_slit_width(k):
    return 2.0 * math.acos(2.0 ** (-1.0 / (2 * k)))


def test_spectral_pair_validation():
    with pytest.raises(DomainError):
        SpectralPair(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        SpectralPair(1.0, 1.0, -1.0)
    p = pair(0.8)
    assert p.delta_t == pytest.approx(1 / F0)


def test_peak_separation():
    assert peak_separation(pair(1.0)) == 0.0
    assert peak_separation(pair(0.8)) == pytest.approx(0.4 * math.pi, rel=1e-12)
    assert peak_separation(pair(0.99)) == pytest.approx(0.02 * math.pi, rel=1e-10)


def test_two_slit_k1_unresolved():
    rep = resolvable(pair(0.8), FringeParams(2), KPowerSpec(1))
    assert not rep.resolvable
    assert rep.peak_separation == pytest.approx(0.4 * math.pi)
    assert rep.fwhm == pytest.approx(0.5 * math.pi, abs=1e-10)
    assert rep.margin == pytest.approx(0.8, rel=1e-9)


def test_two_slit_k10_resolved():
    rep = resolvable(pair(0.8), FringeParams(2), KPowerSpec(10))
    assert rep.resolvable
    assert rep.fwhm == pytest.approx(two_slit_width(10), abs=1e-10)
    assert rep.peak_separation == pytest.approx(1.2566370614359172, rel=1e-12)


@pytest.mark.parametrize("n, k", [(2, 1), (10, 7), (100, 100)])
def test_identical_frequencies(n, k):
    rep = resolvable(pair(1.0), FringeParams(n), KPowerSpec(k))
    assert not rep.resolvable
    assert rep.margin == 0.0


def test_report_consistency():
    rep = resolvable(pair(0.93), FringeParams(10), KPowerSpec(5))
    assert rep.resolvable == (rep.margin >= 1)
    assert rep.min_resolvable_df == pytest.approx(rep.fwhm / (2 * math.pi / F0))
    d = rep.to_dict()
    assert set(d) >= {"fwhm_rad", "margin", "resolvable"}


def test_min_resolvable_df_examples():
    dt = 1 / F0
    assert min_resolvable_df(FringeParams(2), KPowerSpec(1), dt) / F0 == pytest.approx(0.25, abs=1e-12)
    expected = two_slit_width(10) / (2 * math.pi)
    assert min_resolvable_df(FringeParams(2), KPowerSpec(10), dt) / F0 == pytest.approx(expected, abs=1e-12)
    ratio = (min_resolvable_df(FringeParams(100), KPowerSpec(100), dt)
             / min_resolvable_df(FringeParams(100), KPowerSpec(1), dt))
    assert ratio == pytest.approx(0.1, rel=0.05)
    with pytest.raises(DomainError):
        min_resolvable_df(FringeParams(2), KPowerSpec(1), 0.0)


def test_min_df_is_threshold():
    params, spec, dt = FringeParams(10), KPowerSpec(3), 2.0 / F0
    df = min_resolvable_df(params, spec, dt)
    assert resolvable(SpectralPair(F0, F0 - df * 1.000001, dt), params, spec).resolvable
    assert not resolvable(SpectralPair(F0, F0 - df * 0.999999, dt), params, spec).resolvable


def test_line_centers_fold():
    c0, c1 = line_centers(pair(0.8))
    assert c0 == pytest.approx(0.0, abs=1e-12)
    assert c1 == pytest.approx(-0.4 * math.pi, abs=1e-12)


GRID = PhaseGrid(-math.pi / 2, math.pi / 2, 20_001)


def test_composite_identical_lines_doubles():
    params, spec = FringeParams(10), KPowerSpec(3)
    c0, _ = line_centers(pair(1.0))
    single = power_values(normalized_array(params, GRID.points() - c0), 3)
    curve = composite_curve(pair(1.0), params, spec, GRID)
    np.testing.assert_array_equal(curve.values, 2 * single)
    assert not curve.normalized


def test_composite_two_equal_peaks():
    params, spec = FringeParams(20), KPowerSpec(4)
    curve = composite_curve(pair(0.9), params, spec, GRID)
    c0, c1 = line_centers(pair(0.9))
    i0 = int(round((c0 - GRID.start) / GRID.step))
    i1 = int(round((c1 - GRID.start) / GRID.step))
    assert curve.values[i0] == pytest.approx(curve.values[i1], rel=1e-6)


def summed_cos2(sep, phases):
    """Brute-force oracle: two N=2, K=1 fringes, one at 0 and one at -sep."""
    return np.cos(phases) ** 2 + np.cos(phases + sep) ** 2


def test_two_slit_dip_oracle():
    phases = GRID.points()
    oracle = summed_cos2(0.4 * math.pi, phases)
    curve = composite_curve(pair(0.8), FringeParams(2), KPowerSpec(1), GRID)
    np.testing.assert_allclose(curve.values, oracle, atol=1e-12)
    # between the line centres the sum never dips below 81% of the lower peak
    seg = (phases >= -0.4 * math.pi) & (phases <= 0.0)
    peak = min(oracle[np.argmin(np.abs(phases))], oracle[np.argmin(np.abs(phases + 0.4 * math.pi))])
    assert oracle[seg].min() > DIP_THRESHOLD * peak
    assert not dip_resolvable(pair(0.8), FringeParams(2), KPowerSpec(1), GRID)


def test_dip_identical_lines():
    assert not dip_resolvable(pair(1.0), FringeParams(2), KPowerSpec(1))


@pytest.mark.parametrize("n, k", [(2, 100), (10, 1), (100, 10)])
def test_dip_wide_separation(n, k):
    w = fwhm_exact(FringeParams(n), KPowerSpec(k)).fwhm
    sep = 3 * w
    assert sep < math.pi / 2
    p = SpectralPair(1.0, 1.0 - sep / (2 * math.pi), 1.0)
    # brute force: sum of two shifted power fringes, midpoint versus centres
    from kpower.fringe_model import normalized_intensity_at
    f = lambda a: normalized_intensity_at(FringeParams(n), a) ** k
    mid = 2 * f(sep / 2)
    top = f(0.0) + f(sep)
    assert mid <= DIP_THRESHOLD * top
    assert dip_resolvable(p, FringeParams(n), KPowerSpec(k))


def test_dip_indeterminate_when_lines_share_a_sample():
    coarse = PhaseGrid(-math.pi / 2, math.pi / 2, 11)
    with pytest.raises(IndeterminateError):
        dip_resolvable(pair(0.999), FringeParams(2), KPowerSpec(1), coarse)


def test_dip_verdict_scale_invariant():
    curve = composite_curve(pair(0.95), FringeParams(50), KPowerSpec(10), GRID)
    c0, c1 = line_centers(pair(0.95))
    idx = [int(round((c - GRID.start) / GRID.step)) for c in (c0, c1)]
    base = dip_verdict(curve.values, *idx)
    for scale in (1e-9, 0.3, 7.0, 1e12):
        assert dip_verdict(curve.values * scale, *idx) == base


def test_criteria_agree_outside_threshold_band():
    disagreements = []
    for n in (2, 10, 100):
        for k in (1, 10, 100):
            w = fwhm_exact(FringeParams(n), KPowerSpec(k)).fwhm
            for m in np.linspace(0.1, 3.0, 30):
                sep = m * w
                if sep >= math.pi / 2:  # beyond half the fringe period the lines alias
                    continue
                p = SpectralPair(1.0, 1.0 - sep / (2 * math.pi), 1.0)
                a = resolvable(p, FringeParams(n), KPowerSpec(k)).resolvable
                b = dip_resolvable(p, FringeParams(n), KPowerSpec(k))
                if a != b:
                    disagreements.append((n, k, m))
    assert all(0.8 <= m <= 1.2 for _, _, m in disagreements), disagreements


def test_product_law_n_sqrt_k():
    dt = 1 / F0
    vals = [min_resolvable_df(FringeParams(n), KPowerSpec(k), dt) / F0 * 2 * n * math.sqrt(k)
            for n in (2, 10, 100, 200) for k in (1, 10, 100)]
    # law: df_min = f0 / (2 N sqrt(K))  <=>  fwhm = pi / (N sqrt(K))
    assert max(abs(v - 1.0) for v in vals) <= 0.12


def test_min_df_monotone_in_n():
    dt = 1 / F0
    for k in (1, 10, 100):
        vals = [min_resolvable_df(FringeParams(n), KPowerSpec(k), dt) for n in (2, 3, 10, 50, 100, 200)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_fig5_style_lines_with_envelope():
    # r=6 envelope: fwhm still defined (r < N) and narrower at larger K
    a = resolvable(pair(0.99), FringeParams(100, 6.0), KPowerSpec(1))
    b = resolvable(pair(0.99), FringeParams(100, 6.0), KPowerSpec(100))
    assert b.fwhm < a.fwhm
    assert b.fwhm / a.fwhm == pytest.approx(0.1, rel=0.06)
