"""Spectral weights, the reduced integral, and dual-route H agreement."""

import math

import numpy as np
import pytest

from specpoint.besselintegral import (
    I_integral,
    SpectralWeight,
    bessel_H_direct,
    compare_H_asymptotic,
    g_weight,
    rho_pm,
    smallx_decay_scan,
    weight_h,
    weight_h_y,
)

SW = SpectralWeight(T=50.0, M=8.0)


class TestWeights:
    def test_center_value(self):
        T, M = SW.T, SW.M
        assert weight_h(T, SW) == pytest.approx(1.0 + math.exp(-4 * T**2 / M**2), rel=1e-14)

    def test_origin_value(self):
        assert weight_h(0.0, SW) == pytest.approx(2.0 * math.exp(-(SW.T / SW.M) ** 2), rel=1e-14)

    def test_even(self):
        ts = np.linspace(0.1, 80.0, 17)
        assert np.allclose(weight_h(ts, SW), weight_h(-ts, SW), rtol=0, atol=0)

    def test_twist_reciprocity(self):
        ts = np.linspace(0.0, 80.0, 13)
        for y in (1.7, 3.0, 8.0):
            a = weight_h_y(ts, y, SW)
            b = weight_h_y(ts, 1.0 / y, SW)
            assert np.allclose(a, b, atol=1e-13)

    def test_unit_twist_is_plain(self):
        ts = np.linspace(0.0, 80.0, 13)
        assert np.allclose(weight_h_y(ts, 1.0, SW), weight_h(ts, SW), atol=0)

    def test_twist_at_center(self):
        T, M = SW.T, SW.M
        want = (1 + math.exp(-4 * T**2 / M**2)) * math.cos(2 * T)
        assert weight_h_y(T, math.e, SW) == pytest.approx(want, rel=1e-13)

    def test_validation(self):
        with pytest.raises(ValueError):
            SpectralWeight(T=-1.0, M=1.0)
        with pytest.raises(ValueError):
            SpectralWeight(T=10.0, M=0.5)
        with pytest.raises(ValueError):
            SpectralWeight(T=10.0, M=20.0)


class TestGWeight:
    def test_origin(self):
        assert g_weight(0.0, SW) == pytest.approx(4.0 / (math.pi * math.sqrt(math.pi)), rel=1e-14)

    def test_even(self):
        rs = np.linspace(0.0, 0.7, 11)
        assert np.allclose(g_weight(rs, SW), g_weight(-rs, SW), atol=0)

    def test_one_over_m_value(self):
        T, M = SW.T, SW.M
        c = 2.0 / (math.pi * math.sqrt(math.pi))
        want = c * (
            2 * math.exp(-1) * math.cos(2 * T / M) - 2 * (M / T) * math.exp(-1) * math.sin(2 * T / M)
        )
        assert g_weight(1.0 / M, SW) == pytest.approx(want, rel=1e-13)


class TestRho:
    def test_origin(self):
        assert rho_pm(0.0) == (0.0, 0.0)

    def test_exponential_identities(self):
        rs = np.linspace(-2.0, 2.0, 41)
        plus, minus = rho_pm(rs)
        assert np.allclose(plus, np.exp(rs) - 1.0, rtol=1e-13, atol=1e-16)
        assert np.allclose(minus, 1.0 - np.exp(-rs), rtol=1e-13, atol=1e-16)

    def test_hyperbolic_identities(self):
        rs = np.linspace(-3.0, 3.0, 61)
        plus, minus = rho_pm(rs)
        assert np.max(np.abs(plus - minus - 2.0 * (np.cosh(rs) - 1.0))) <= 1e-14 * np.max(np.cosh(rs))
        assert np.all(plus - minus >= -1e-15)
        assert np.max(np.abs(plus + minus - 2.0 * np.sinh(rs))) <= 1e-14 * np.max(np.cosh(rs))


class TestIIntegral:
    def test_zero_arguments_near_zero(self):
        # int g dr vanishes exactly: the two Gaussian pairs cancel
        res = I_integral(0.0, 0.0, SW, tol=1e-10)
        assert abs(res.value) <= 1e-8 * SW.M * SW.T

    def test_swap_symmetry(self):
        a = I_integral(60.0, 11.0, SW, tol=1e-10)
        b = I_integral(11.0, 60.0, SW, tol=1e-10)
        assert a.value == pytest.approx(b.value, abs=1e-8)

    def test_below_resonance_decay(self):
        # v, w <= T/4 keeps the phase derivative away from the weight's
        # oscillation frequency, so I is negligible
        grid = np.linspace(0.0, SW.T / 4.0, 5)
        for v in grid:
            for w in (0.0, SW.T / 8.0, SW.T / 4.0):
                res = I_integral(float(v), float(w), SW, tol=1e-10)
                assert abs(res.value) / (SW.M * SW.T) <= 1e-8

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            I_integral(-1.0, 0.0, SW)


class TestBesselHDirect:
    def test_small_x_needs_opt_in(self):
        with pytest.raises(ValueError):
            bessel_H_direct(0.5, 1.0, SW)

    def test_y_reciprocity(self):
        a = bessel_H_direct(300.0, 1.4, SW, tol=1e-8)
        b = bessel_H_direct(300.0, 1.0 / 1.4, SW, tol=1e-8)
        assert abs(a.value.real - b.value.real) <= 10.0 * max(a.err_estimate, b.err_estimate)

    def test_refinement(self):
        a = bessel_H_direct(200.0, 2.0, SW, tol=1e-6)
        b = bessel_H_direct(200.0, 2.0, SW, tol=1e-8)
        assert abs(a.value - b.value) <= 10.0 * max(a.err_estimate, 1e-7)

    def test_small_u_regime(self):
        res = bessel_H_direct(0.05, 1.0, SW, tol=1e-12, allow_small_x=True)
        assert abs(res.value.real) <= 1e-8


class TestDualRoute:
    @pytest.mark.parametrize(
        "vw_sum,vw_diff",
        [(200.0, 50.0), (150.0, 40.0), (400.0, 65.0)],
    )
    def test_resonant_agreement(self, vw_sum, vw_diff):
        # v - w near T puts the stationary point inside the window
        y = math.sqrt((vw_sum + vw_diff) / (vw_sum - vw_diff))
        x = 4.0 * vw_sum / (y + 1.0 / y)
        rep = compare_H_asymptotic(x, y, SW, tol=1e-8)
        assert abs(rep.H_direct) > 1e-3  # actually resonant
        assert rep.abs_residual <= max(1e-3 * abs(rep.H_direct), 10.0 * rep.quadrature_err)

    def test_off_resonance_both_tiny(self):
        # u <= 0.3: both routes are below 1e-8 in size
        y = 1.0
        x = 0.15
        direct = bessel_H_direct(x, y, SW, tol=1e-12, allow_small_x=True)
        reduced = I_integral(x * y / 4, x / (4 * y), SW, tol=1e-12)
        assert abs(direct.value) <= 1e-8
        assert abs(reduced.value) <= 1e-8

    def test_report_symmetry_under_y_inversion(self):
        y, x = 1.5, 350.0
        a = compare_H_asymptotic(x, y, SW, tol=1e-8)
        b = compare_H_asymptotic(x, 1.0 / y, SW, tol=1e-8)
        assert a.H_direct == pytest.approx(b.H_direct, abs=10 * (a.quadrature_err + b.quadrature_err))
        assert a.H_asymptotic == pytest.approx(b.H_asymptotic, abs=1e-7)


def test_smallx_scan_rows():
    rows = smallx_decay_scan(SW, [0.0, 0.1], y_samples=(1.0, 2.0), tol=1e-12)
    assert rows[0]["max_abs_H"] == 0.0
    assert rows[1]["max_abs_H"] <= 1e-8
