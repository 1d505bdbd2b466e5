import numpy as np
import pytest

import blockreg.moments as moments_mod
from blockreg import (NumericError, SpecError, lasso_moments,
                      lasso_moments_quadrature, ridge_moments)
from blockreg.streams import stream

from oracles import soft_threshold_mc

# Monte Carlo oracle, 1e7 standard normals, default_rng(20240817):
# frozen before the closed forms were written.
MC_SECOND = (0.7250031542767644, 0.00016857213765748927)
MC_DERIV = (0.5227291, 0.00015795043936676177)


class TestRidgeMoments:
    def test_no_shrinkage(self):
        assert ridge_moments(1.3, 0.7, 0.0) == (pytest.approx(0.49), 1.0)

    def test_zero_location(self):
        second, deriv = ridge_moments(0.0, 1.5, 2.0)
        assert second == pytest.approx(1.5**2 / 9.0)
        assert deriv == pytest.approx(1.0 / 3.0)

    def test_hand_value(self):
        assert ridge_moments(1.0, 2.0, 1.0) == (pytest.approx(1.25), pytest.approx(0.5))

    def test_against_monte_carlo(self):
        z = 1.0 + 2.0 * stream(90).standard_normal(2_000_000)
        shrunk = z / 2.0
        mc = np.mean((shrunk - 1.0) ** 2)
        second, _ = ridge_moments(1.0, 2.0, 1.0)
        assert second == pytest.approx(mc, rel=3e-3)

    def test_vectorized(self):
        m = np.array([0.0, 1.0])
        second, deriv = ridge_moments(m, 2.0, 1.0)
        np.testing.assert_allclose(second, [1.0, 1.25])
        np.testing.assert_allclose(deriv, [0.5, 0.5])

    def test_bad_args(self):
        with pytest.raises(SpecError):
            ridge_moments(0.0, 0.0, 1.0)
        with pytest.raises(SpecError):
            ridge_moments(0.0, 1.0, -1.0)


class TestLassoMoments:
    def test_identity_at_zero_threshold(self):
        second, deriv = lasso_moments(0.0, 1.7, 0.0)
        assert second == pytest.approx(1.7**2, abs=1e-12)
        assert deriv == pytest.approx(1.0, abs=1e-12)

    def test_estimate_collapses_at_huge_threshold(self):
        second, deriv = lasso_moments(1.4, 1.0, 1e6, check=False)
        assert second == pytest.approx(1.4**2, abs=1e-10)
        assert deriv == pytest.approx(0.0, abs=1e-12)

    def test_frozen_monte_carlo_oracle(self):
        second, deriv = lasso_moments(1.0, 1.0, 1.0)
        assert abs(second - MC_SECOND[0]) <= 3 * MC_SECOND[1]
        assert abs(deriv - MC_DERIV[0]) <= 3 * MC_DERIV[1]

    def test_live_monte_carlo_cross_check(self):
        (sq, sq_se), (ind, ind_se) = soft_threshold_mc(0.4, 1.3, 0.8,
                                                       2_000_000, seed=77)
        second, deriv = lasso_moments(0.4, 1.3, 0.8)
        assert abs(second - sq) <= 4 * sq_se
        assert abs(deriv - ind) <= 4 * ind_se

    def test_quadrature_grid_agreement(self):
        # the acceptance tolerance: 1e-8 over a 1000-point grid
        rng = stream(31337)
        worst = 0.0
        for _ in range(1000):
            m = rng.uniform(-3, 3)
            gamma = rng.uniform(0.05, 4.0)
            t = rng.uniform(0.0, 4.0)
            cf = lasso_moments(m, gamma, t, check=False)
            quad = lasso_moments_quadrature(m, gamma, t)
            worst = max(worst, abs(cf[0] - quad[0]), abs(cf[1] - quad[1]))
        assert worst <= 1e-8

    def test_vectorized_matches_scalar(self):
        m = np.linspace(-2, 2, 7)
        second, deriv = lasso_moments(m, 1.1, 0.6)
        for i, mi in enumerate(m):
            si, di = lasso_moments(float(mi), 1.1, 0.6)
            assert second[i] == pytest.approx(si, abs=1e-15)
            assert deriv[i] == pytest.approx(di, abs=1e-15)

    def test_route_disagreement_raises(self, monkeypatch):
        original = moments_mod._lasso_moments_closed

        def broken(m, gamma, t):
            second, deriv = original(m, gamma, t)
            return second + 1e-4, deriv

        monkeypatch.setattr(moments_mod, "_lasso_moments_closed", broken)
        with pytest.raises(NumericError):
            moments_mod.lasso_moments(0.5, 1.0, 0.5, check=True)

    def test_bad_args(self):
        with pytest.raises(SpecError):
            lasso_moments(0.0, -1.0, 1.0)
        with pytest.raises(SpecError):
            lasso_moments(0.0, 1.0, -0.1)
