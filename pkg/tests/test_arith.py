"""Exponential-sum kernels against brute-force enumeration oracles."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specpoint import arith


def kloosterman_bruteforce(m, n, c):
    """Independent path: descending loop, cmath.exp, no angle reduction."""
    if c == 1:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    for a in range(c - 1, 0, -1):
        if math.gcd(a, c) != 1:
            continue
        abar = pow(a, -1, c)
        total += cmath.exp(2j * math.pi * (a * m + abar * n) / c)
    return total


def vq_bruteforce(q, m, n, c):
    if c == 1:
        return 1.0 + 0.0j
    total = 0.0 + 0.0j
    for a in range(c - 1, -1, -1):
        if math.gcd(a * (q - a), c) != 1:
            continue
        inv_a = pow(a, -1, c)
        inv_b = pow(q - a, -1, c)
        total += cmath.exp(2j * math.pi * (inv_a * m + inv_b * n) / c)
    return total


class TestModInverse:
    def test_examples(self):
        assert arith.mod_inverse(1, 2) == 1
        assert arith.mod_inverse(2, 5) == 3
        assert arith.mod_inverse(7, 1) == 0

    def test_non_coprime_raises(self):
        with pytest.raises(ValueError):
            arith.mod_inverse(6, 9)

    @given(st.integers(1, 500), st.integers(-1000, 1000))
    def test_inverse_property(self, c, a):
        if math.gcd(a, c) != 1:
            return
        x = arith.mod_inverse(a, c)
        assert 0 <= x < c
        assert (a * x) % c == 1 % c


class TestKloosterman:
    def test_zero_frequencies_give_totient(self):
        for c in [1, 2, 6, 12, 30, 97]:
            s = arith.kloosterman(0, 0, c)
            assert s == pytest.approx(arith.euler_phi(c), abs=1e-10)

    def test_small_values(self):
        assert arith.kloosterman(1, 1, 2) == pytest.approx(1.0, abs=1e-12)
        # brute force over alpha in {1,2}: e(2/3) + e(4/3) = -1
        assert arith.kloosterman(1, 1, 3) == pytest.approx(-1.0, abs=1e-12)

    def test_sum_is_real(self):
        for (m, n, c) in [(1, 1, 5), (2, 7, 36), (3, 5, 101), (0, 4, 64)]:
            assert abs(arith.kloosterman(m, n, c).imag) <= 1e-10 * (
                1 + abs(arith.kloosterman(m, n, c).real)
            )

    @given(st.integers(0, 60), st.integers(0, 60), st.integers(1, 300))
    @settings(max_examples=60, deadline=None)
    def test_matches_bruteforce(self, m, n, c):
        assert arith.kloosterman(m, n, c) == pytest.approx(
            kloosterman_bruteforce(m, n, c), abs=1e-12 * c + 1e-12
        )

    @given(st.integers(-40, 40), st.integers(-40, 40), st.integers(1, 200))
    @settings(max_examples=60, deadline=None)
    def test_symmetry(self, m, n, c):
        assert arith.kloosterman(m, n, c) == pytest.approx(
            arith.kloosterman(n, m, c), abs=1e-12 * c + 1e-12
        )


class TestVqSum:
    def test_degenerate_modulus(self):
        assert arith.vq_sum(5, 3, 7, 1) == 1.0 + 0.0j

    def test_empty_sum(self):
        # alpha*(1-alpha) is always even, so no unit terms mod 2
        assert arith.vq_sum(1, 0, 0, 2) == 0.0 + 0.0j

    @given(
        st.integers(-20, 20),
        st.integers(0, 30),
        st.integers(0, 30),
        st.integers(1, 150),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_bruteforce(self, q, m, n, c):
        assert arith.vq_sum(q, m, n, c) == pytest.approx(
            vq_bruteforce(q, m, n, c), abs=1e-12 * c + 1e-12
        )

    @given(st.integers(-15, 15), st.integers(0, 25), st.integers(0, 25), st.integers(1, 120))
    @settings(max_examples=60, deadline=None)
    def test_symmetry(self, q, m, n, c):
        # alpha -> q - alpha swaps the two frequencies
        assert arith.vq_sum(q, m, n, c) == pytest.approx(
            arith.vq_sum(q, n, m, c), abs=1e-12 * c + 1e-12
        )


class TestFactorizationIdentity:
    def test_trivial_modulus(self):
        assert arith.factorization_identity_residual(3, 5, 1) <= 1e-12

    def test_c6_closed_form(self):
        # both sides equal -e(1/3) at (m,n,c) = (1,1,6)
        lhs = arith.kloosterman(1, 1, 6) * arith.e(2 / 6)
        assert lhs == pytest.approx(-arith.e(1 / 3), abs=1e-12)
        assert arith.factorization_identity_residual(1, 1, 6) <= 1e-12

    @given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 500))
    @settings(max_examples=80, deadline=None)
    def test_residual_small(self, m, n, c):
        assert arith.factorization_identity_residual(m, n, c) <= 1e-10

    def test_randomized_sweep(self):
        rng = np.random.default_rng(20240229)
        worst = 0.0
        for _ in range(200):
            c = int(rng.integers(1, 501))
            m = int(rng.integers(-1000, 1001))
            n = int(rng.integers(-1000, 1001))
            worst = max(worst, arith.factorization_identity_residual(m, n, c))
        assert worst <= 1e-10


class TestWeilRatio:
    def test_examples(self):
        assert arith.weil_ratio(1, 1, 3) == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-12)
        assert arith.weil_ratio(1, 1, 2) == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-12)

    def test_zero_frequencies(self):
        for c in [1, 4, 12, 36, 97]:
            assert arith.weil_ratio(0, 0, c) <= 1 + 1e-12

    @given(st.integers(0, 50), st.integers(0, 50), st.integers(1, 1000))
    @settings(max_examples=80, deadline=None)
    def test_bounded_by_one(self, m, n, c):
        assert arith.weil_ratio(m, n, c) <= 1 + 1e-12


class TestQuadraticFormBound:
    def test_random_sequences(self):
        rng = np.random.default_rng(7)
        for c in [1, 2, 5, 24, 60, 100]:
            n_len = int(rng.integers(4, 65))
            a = rng.normal(size=n_len) + 1j * rng.normal(size=n_len)
            smat = np.array(
                [[arith.kloosterman(m, n, c).real for n in range(1, n_len + 1)] for m in range(1, n_len + 1)]
            )
            lhs = abs(np.einsum("m,n,mn->", a, a.conj(), smat))
            rhs = (
                arith.divisor_count(c) ** 2
                * math.sqrt(c)
                * n_len
                * float(np.sum(np.abs(a) ** 2))
            )
            assert lhs <= rhs + 1e-9


class TestMultiplicativeBasics:
    def test_examples(self):
        assert arith.multiplicative_basics(1) == (1, 1, 1, {})
        assert arith.multiplicative_basics(12) == (6, 4, 0, {2: 2, 3: 1})
        assert arith.multiplicative_basics(30) == (8, 8, -1, {2: 1, 3: 1, 5: 1})

    def test_divisor_sigma(self):
        assert arith.divisor_sigma(0, 6) == pytest.approx(4)
        assert arith.divisor_sigma(1, 6) == pytest.approx(12)
        assert arith.divisor_sigma(2j, 1) == pytest.approx(1)

    @given(st.integers(1, 2000))
    def test_phi_tau_consistency(self, n):
        tau, phi, mu, fac = arith.multiplicative_basics(n)
        assert tau == len(arith.divisors(n))
        assert phi == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert math.prod(p**k for p, k in fac.items()) == n
