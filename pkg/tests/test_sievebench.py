"""Sieve-ratio harness: direct-sum oracles, monotonicity, scaling laws."""

import math

import numpy as np
import pytest

from specpoint.besselintegral import SpectralWeight
from specpoint.sievebench import (
    Sequence,
    corollary_ratio,
    di_luo_comparison,
    dirichlet_poly_ratio,
    moment_demo,
    young_ls_lhs,
    young_ls_ratio,
)
from specpoint.spectraldata import sym_square_lift, synthetic_spectrum

SW = SpectralWeight(T=14.0, M=4.0)


@pytest.fixture(scope="module")
def forms():
    return synthetic_spectrum(count=20, n_max=160, t_lo=5.0, t_hi=36.0, seed=7)


def young_lhs_bruteforce(seq, gamma, tau, v, C, grid=20001):
    """Trapezoid + direct triple loop; independent of the production path."""
    ts = np.linspace(-tau, tau, grid)
    total = np.zeros(grid)
    for c in range(1, C + 1):
        for alpha in range(c):
            if math.gcd(alpha, c) != 1 and c > 1:
                continue
            inner = np.zeros(grid, dtype=complex)
            for i, n in enumerate(seq.ns):
                phase = (alpha * int(n) / c + (float(n) ** gamma) * ts / (c * v)) % 1.0
                inner += seq.values[i] * np.exp(2j * math.pi * phase)
            total += np.abs(inner) ** 2 / c
    return float(np.trapezoid(total, ts))


class TestSequence:
    def test_support_and_norm(self):
        seq = Sequence.random(N=16, seed=0)
        assert seq.ns[0] == 17 and seq.ns[-1] == 32
        assert seq.norm_sq == pytest.approx(float(np.sum(np.abs(seq.values) ** 2)))
        assert np.max(np.abs(seq.values)) <= 1.0

    def test_real_variant(self):
        seq = Sequence.random(N=8, seed=1, real=True)
        assert seq.is_real

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Sequence(N=4, values=np.ones(5))


class TestYoungLS:
    def test_zero_sequence(self):
        seq = Sequence(N=8, values=np.zeros(8))
        assert young_ls_lhs(seq, 1.0, 0.5, 1.0, 4) == 0.0
        assert young_ls_ratio(seq, 1.0, 0.5, 1.0, 4).ratio == 0.0

    def test_single_modulus_collapse(self):
        # C = 1 leaves only alpha = 0: plain mean square of the twisted sum
        seq = Sequence.random(N=6, seed=3)
        got = young_ls_lhs(seq, 1.0, 0.4, 1.0, 1)
        want = young_lhs_bruteforce(seq, 1.0, 0.4, 1.0, 1)
        assert got == pytest.approx(want, rel=1e-6)

    @pytest.mark.parametrize("gamma", [1.0, 0.5])
    def test_against_bruteforce(self, gamma):
        seq = Sequence.random(N=8, seed=11)
        got = young_ls_lhs(seq, gamma, 0.3, 2.0, 5)
        want = young_lhs_bruteforce(seq, gamma, 0.3, 2.0, 5)
        assert got == pytest.approx(want, rel=1e-5)

    def test_parseval_sanity(self):
        # gamma=1, v=1, tau=pi: int |sum a_n e(n t / (2 pi))|... at C=1 the
        # diagonal contributes 2 tau ||a||^2 and off-diagonal terms are
        # bounded; check the diagonal dominates for random phases
        seq = Sequence.random(N=64, seed=5)
        val = young_ls_lhs(seq, 1.0, math.pi, 1.0, 1)
        assert val == pytest.approx(2 * math.pi * seq.norm_sq, rel=0.6)

    def test_monotone_in_c_and_tau(self):
        seq = Sequence.random(N=12, seed=9)
        v1 = young_ls_lhs(seq, 1.0, 0.3, 1.5, 2)
        v2 = young_ls_lhs(seq, 1.0, 0.3, 1.5, 4)
        v3 = young_ls_lhs(seq, 1.0, 0.6, 1.5, 4)
        assert v2 >= v1 - 1e-12
        assert v3 >= v2 - 1e-12

    def test_scaling_invariance(self):
        seq = Sequence.random(N=12, seed=13)
        scaled = Sequence(N=12, values=3.7j * seq.values)
        r1 = young_ls_ratio(seq, 1.0, 0.3, 1.5, 4)
        r2 = young_ls_ratio(scaled, 1.0, 0.3, 1.5, 4)
        assert r1.ratio == pytest.approx(r2.ratio, rel=1e-10)


class TestCorollaryWindow:
    def test_zero_sequence(self, forms):
        seq = Sequence(N=8, values=np.zeros(8))
        assert corollary_ratio(seq, SW, forms).ratio == 0.0

    def test_single_form_single_term(self, forms):
        inside = [f for f in forms if SW.T < f.t <= SW.T + SW.M][:1]
        assert inside, "fixture must cover the window"
        f = inside[0]
        vals = np.zeros(8)
        vals[2] = 1.0  # a_11 on (8, 16]
        seq = Sequence(N=8, values=vals)
        rep = corollary_ratio(seq, SW, inside)
        want = f.omega * f.lam(11) ** 2
        assert rep.lhs == pytest.approx(want, rel=1e-12)
        assert rep.ratio <= f.omega * f.lam(11) ** 2 / (SW.M * (SW.T + 8)) + 1e-12

    def test_global_phase_invariance(self, forms):
        seq = Sequence.random(N=16, seed=21)
        rotated = Sequence(N=16, values=seq.values * np.exp(0.77j))
        a = corollary_ratio(seq, SW, forms)
        b = corollary_ratio(rotated, SW, forms)
        assert a.ratio == pytest.approx(b.ratio, rel=1e-10)


class TestDirichletPolynomial:
    def test_zero_sequence(self):
        seq = Sequence(N=8, values=np.zeros(8))
        assert dirichlet_poly_ratio(seq, 10.0).ratio == 0.0

    def test_single_term_exact(self):
        vals = np.zeros(8, dtype=complex)
        vals[3] = 2.0 - 1.0j
        seq = Sequence(N=8, values=vals)
        rep = dirichlet_poly_ratio(seq, 7.5)
        assert rep.lhs == pytest.approx(2 * 7.5 * 5.0, rel=1e-12)

    def test_quadrature_oracle(self):
        seq = Sequence.random(N=10, seed=2)
        T = 9.0
        rep = dirichlet_poly_ratio(seq, T)
        ts = np.linspace(-T, T, 40001)
        vals = np.abs(
            np.sum(seq.values[None, :] * np.exp(1j * np.outer(ts, np.log(seq.ns.astype(float)))), axis=1)
        ) ** 2
        want = float(np.trapezoid(vals, ts))
        assert rep.lhs == pytest.approx(want, rel=1e-6)

    def test_ratio_band(self):
        worst = 0.0
        for seed in range(25):
            seq = Sequence.random(N=32, seed=seed)
            worst = max(worst, dirichlet_poly_ratio(seq, 20.0).ratio)
        assert worst <= 2 * math.pi + 1.0


class TestDiLuo:
    def test_zero_sequence(self, forms):
        seq = Sequence(N=8, values=np.zeros(8))
        out = di_luo_comparison(seq, SW, forms)
        assert out["lhs"] == 0.0

    def test_hybrid_majorant_wins_for_large_n(self, forms):
        seq = Sequence.random(N=64, seed=3)  # N = 64 > T = 14
        out = di_luo_comparison(seq, SW, forms)
        assert out["hybrid_smaller"]
        assert out["ratio_hybrid"] >= out["ratio_quadratic"]

    def test_seed_stability(self, forms):
        seq1 = Sequence.random(N=16, seed=77)
        seq2 = Sequence.random(N=16, seed=77)
        a = di_luo_comparison(seq1, SW, forms)
        b = di_luo_comparison(seq2, SW, forms)
        assert a["lhs"] == b["lhs"]


class TestMomentDemo:
    def test_zero_block(self, forms):
        gl3 = sym_square_lift(forms[0], 64)
        out = moment_demo(gl3, forms, SW, N=16, n1=1, weight=lambda u: 0.0 * u)
        assert out["S"] == 0.0 and out["T"] == 0.0

    def test_finite_and_conjugation_invariant(self, forms):
        gl3 = sym_square_lift(forms[0], 64)
        out = moment_demo(gl3, forms, SW, N=16, n1=1)
        assert out["S"] >= 0 and out["T"] >= 0
        assert np.isfinite(out["ratio"])
        conj = gl3.dual  # real self-dual table: identical values
        out2 = moment_demo(conj, forms, SW, N=16, n1=1)
        assert out2["S"] == pytest.approx(out["S"], rel=1e-12)
        assert out2["T"] == pytest.approx(out["T"], rel=1e-12)

    def test_range_violation(self, forms):
        gl3 = sym_square_lift(forms[0], 16)
        with pytest.raises(Exception):
            moment_demo(gl3, forms, SW, N=64, n1=1)
