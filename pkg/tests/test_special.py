import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special as sp

from nclass.special import displacement_bands, j1, j1_zero, lens_area


def test_j1_matches_scipy_across_regimes():
    xs = np.concatenate([np.linspace(0, 8, 401), np.linspace(8, 30, 401), np.linspace(30, 400, 401)])
    err = max(abs(j1(x) - sp.j1(x)) for x in xs)
    assert err < 1e-13


def test_j1_small_argument_and_parity():
    assert j1(0.0) == 0.0
    assert j1(1e-8) == pytest.approx(5e-9, rel=1e-12)
    assert j1(-2.5) == -j1(2.5)


def test_j1_first_zero():
    assert j1_zero() == pytest.approx(sp.jn_zeros(1, 1)[0], abs=1e-12)
    assert j1_zero(3) == pytest.approx(sp.jn_zeros(1, 3)[2], abs=1e-12)
    with pytest.raises(ValueError):
        j1_zero(0)


def test_lens_area_limits():
    assert lens_area(0.0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert lens_area(1.0) == 0.0
    assert lens_area(1.7) == 0.0
    s = np.array([0.2, 0.5, 0.9])
    assert np.allclose(lens_area(s), 0.5 * np.arccos(s) - 0.5 * s * np.sqrt(1 - s * s), atol=1e-15)


def test_lens_area_matches_monte_carlo_free_geometry():
    # overlap of two discs of radius 1/2, area by a 1D integral of chord lengths
    from scipy.integrate import quad

    for s in (0.1, 0.4, 0.8):
        def chord(y):
            half = math.sqrt(max(0.25 - y * y, 0.0))
            return max(0.0, min(half, s + half) - max(-half, s - half))

        area, _ = quad(chord, -0.5, 0.5, epsabs=1e-13, limit=200)
        assert lens_area(s) == pytest.approx(area, abs=1e-10)


def _band_oracle(n, k, r):
    x = r * r
    return math.exp(0.5 * (sp.gammaln(n + 1) - sp.gammaln(n + k + 1)) - 0.5 * x) * r**k * sp.eval_genlaguerre(n, k, x)


def test_displacement_bands_against_laguerre():
    radii = np.array([0.0, 0.3, 1.0, 2.2, 4.0])
    ks = np.array([0, 1, 3, 7])
    h = displacement_bands(radii, ks, 40)
    for i, k in enumerate(ks):
        for n in (0, 1, 5, 17, 39):
            for j, r in enumerate(radii):
                assert h[i, n, j] == pytest.approx(_band_oracle(n, k, r), abs=1e-13)


def test_displacement_bands_stay_bounded_at_high_order():
    h = displacement_bands(np.linspace(0, 40, 81), np.array([0, 5, 50, 300]), 2000)
    assert np.all(np.isfinite(h))
    assert np.max(np.abs(h)) <= 1.0 + 1e-12


@given(st.floats(0.0, 6.0), st.integers(0, 60))
def test_displacement_row_is_normalized(r, k):
    # sum over n of |<n+k|D|n>|^2 + over the other triangle equals 1 for a column
    n_max = 400
    ks = np.arange(0, n_max)
    h = displacement_bands([r], ks, n_max)[:, :, 0]
    # column n = 0 of D: |<m|D|0>|^2 = Poisson(m; r^2)
    assert np.sum(h[:, 0] ** 2) == pytest.approx(1.0, abs=1e-12)
