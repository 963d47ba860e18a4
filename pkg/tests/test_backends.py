"""Compiled and numpy kernels must agree."""
import math

import numpy as np
import pytest

from kpower import _backend, _pykernels

pytestmark = pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="compiled extension not built")


def _pair():
    return _backend.BACKENDS["cython"], _pykernels


@pytest.mark.parametrize("n,r", [(1, 0.0), (1, 3.0), (2, 0.0), (7, 0.4), (100, 6.0), (1000, 0.0)])
def test_fringe_array_agrees(n, r):
    c, p = _pair()
    alpha = np.concatenate([
        np.linspace(-7.0, 7.0, 20_001),
        np.arange(-6, 7) * math.pi,
        np.arange(-6, 7) * math.pi + 1e-10,
    ])
    a, b = c.fringe_array(alpha, n, r), p.fringe_array(alpha, n, r)
    assert np.max(np.abs(a - b)) <= 1e-15


@pytest.mark.parametrize("alpha", [0.0, 1e-9, 0.3, math.pi, -2.5, 100.0])
def test_fringe_scalar_agrees(alpha):
    c, p = _pair()
    for n, r in [(1, 2.0), (3, 0.0), (50, 6.0)]:
        assert c.fringe_scalar(alpha, n, r) == pytest.approx(p.fringe_scalar(alpha, n, r), abs=1e-15)


@pytest.mark.parametrize("n,r,k", [(2, 0.0, 1.0), (2, 0.0, 10.0), (10, 6.0, 100.0), (200, 0.0, 1e4), (5, 4.9, 3.0)])
def test_half_width_agrees(n, r, k):
    c, p = _pair()
    assert c.half_width(n, r, k, 1e-12) == pytest.approx(p.half_width(n, r, k, 1e-12), abs=2e-12)


def test_half_width_failure_code_agrees():
    c, p = _pair()
    # envelope zero inside the bracket: both report the missing single crossing
    assert c.half_width(3, 2.9, 1.0, 1e-12) == p.half_width(3, 2.9, 1.0, 1e-12)


@pytest.mark.parametrize("mean,k", [(0.5, 1), (30.0, 2), (1e5, 10), (2e4, 7)])
def test_product_estimates_bit_identical(mean, k):
    c, p = _pair()
    intensity = np.linspace(0.0, 1.0, 257)
    a = c.product_estimates(intensity, mean, k, 40, 12345, 3)
    b = p.product_estimates(intensity, mean, k, 40, 12345, 3)
    assert np.array_equal(a, b)


def test_poisson_counts_bit_identical():
    c, p = _pair()
    lam = np.concatenate([np.linspace(0.0, 30.0, 301), [1e3, 1e6]])
    for trial, port in [(0, 0), (5, 2)]:
        assert np.array_equal(c.poisson_counts(lam, 99, 11, trial, port), p.poisson_counts(lam, 99, 11, trial, port))

