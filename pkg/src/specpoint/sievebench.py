"""Empirical large-sieve harness.

Left-hand sides are computed exactly (finite sums, or t-integrals of
trigonometric polynomials on Gauss grids with a doubled-order check);
right-hand sides are the literature majorants with every unspecified
epsilon-factor set to 1. Only ratios are reported: the suites check
boundedness, monotonicity, and scaling invariance, never a sharp constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import _unit_residues, divisors
from .besselintegral import SpectralWeight, weight_h
from .specfun import zeta_many
from .spectraldata import GL3Form, MaassForm


@dataclass
class Sequence:
    """Coefficients a_n supported on the dyadic block (N, 2N]."""

    N: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.values.shape != (self.N,):
            raise ValueError(f"need exactly N={self.N} values for n in (N, 2N]")
        if not np.iscomplexobj(self.values):
            self.values = self.values.astype(complex)

    @property
    def ns(self) -> np.ndarray:
        return np.arange(self.N + 1, 2 * self.N + 1)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    @classmethod
    def random(cls, N: int, seed: int, real: bool = False) -> "Sequence":
        """Uniform on the complex unit disk (or on [-1, 1] when real)."""
        rng = np.random.default_rng(seed)
        if real:
            vals = rng.uniform(-1.0, 1.0, size=N).astype(complex)
        else:
            r = np.sqrt(rng.uniform(0.0, 1.0, size=N))
            phi = rng.uniform(0.0, 2.0 * math.pi, size=N)
            vals = r * np.exp(1j * phi)
        return cls(N=N, values=vals)


@dataclass
class SieveReport:
    lhs: float
    rhs_majorant: float
    ratio: float
    params: dict = field(default_factory=dict)

    @classmethod
    def make(cls, lhs: float, rhs: float, **params) -> "SieveReport":
        rhs = rhs if rhs > 0 else 1e-300
        return cls(lhs=lhs, rhs_majorant=rhs, ratio=lhs / rhs, params=params)


def _t_grid(tau: float, order: int = 48, panels: int = 2):
    edges = np.linspace(-tau, tau, panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (np.broadcast_to(w[None, :], (panels, order)) * half[:, None]).ravel()
    return nodes, weights


def _hybrid_lhs_one_modulus(
    seq: Sequence, gamma: float, v: float, c: int, nodes, weights
) -> float:
    """(1/c) sum*_alpha int |sum_n a_n e(alpha n/c) e(n^gamma t/(c v))|^2 dt."""
    ns = seq.ns.astype(float)
    alphas, _ = _unit_residues(c)
    osc = np.exp(2j * math.pi * np.outer(nodes / (c * v), ns**gamma))
    twisted = osc * seq.values[None, :]
    # group n by residue class, then apply the unit-row DFT
    res_classes = seq.ns % c
    block = np.zeros((nodes.size, c), dtype=complex)
    for rho in range(c):
        mask = res_classes == rho
        if np.any(mask):
            block[:, rho] = twisted[:, mask].sum(axis=1)
    unit_rows = np.exp(2j * math.pi * np.outer(alphas, np.arange(c)) / c)
    inner = block @ unit_rows.T
    return float(np.sum(weights * np.sum(np.abs(inner) ** 2, axis=1))) / c


def young_ls_lhs(seq: Sequence, gamma: float, tau: float, v: float, C: int) -> float:
    """Hybrid twisted mean square over moduli c <= C and |t| <= tau.

    Per modulus the t-integrand oscillates no faster than
    2 pi (2N)^gamma / (c v), so the Gauss order is scaled with that
    bandwidth and an order-doubling check guards exactness.
    """
    if gamma == 0:
        raise ValueError("gamma must be nonzero")
    if tau <= 0 or v <= 0 or C < 1:
        raise ValueError("tau, v must be positive and C >= 1")
    total = 0.0
    peak_freq = 2.0 * math.pi * (2.0 * seq.N) ** gamma / v
    for c in range(1, C + 1):
        order = int(peak_freq * tau / (c * 1.5)) + 24
        nodes, weights = _t_grid(tau, order=order)
        val = _hybrid_lhs_one_modulus(seq, gamma, v, c, nodes, weights)
        nodes2, weights2 = _t_grid(tau, order=order + 16)
        val2 = _hybrid_lhs_one_modulus(seq, gamma, v, c, nodes2, weights2)
        if abs(val - val2) > 1e-8 * max(1.0, abs(val2)):
            raise ArithmeticError(
                f"t-grid not converged at c={c}: {abs(val - val2):.3e}"
            )
        total += val2
    return total


def young_ls_ratio(seq: Sequence, gamma: float, tau: float, v: float, C: int) -> SieveReport:
    """Ratio of the hybrid mean square to (tau C + v N^{1-gamma} log C) ||a||^2."""
    lhs = young_ls_lhs(seq, gamma, tau, v, C)
    log_c = max(1.0, math.log(C))
    rhs = (tau * C + v * seq.N ** (1.0 - gamma) * log_c) * seq.norm_sq
    return SieveReport.make(lhs, rhs, gamma=gamma, tau=tau, v=v, C=C, N=seq.N)


def _twisted_linear_forms(seq: Sequence, forms: list[MaassForm]) -> np.ndarray:
    """|sum_n a_n lambda_j(n) n^{i t_j}|^2 for every form."""
    ns = seq.ns
    log_ns = np.log(ns.astype(float))
    out = np.empty(len(forms))
    for j, f in enumerate(forms):
        lam = np.array([f.lam(int(n)) for n in ns])
        inner = np.sum(seq.values * lam * np.exp(1j * f.t * log_ns))
        out[j] = abs(inner) ** 2
    return out


def corollary_ratio(seq: Sequence, sw: SpectralWeight, forms: list[MaassForm]) -> SieveReport:
    """Sharp-cutoff window sum over T < t_j <= T + M against M (T + N) ||a||^2."""
    sq = _twisted_linear_forms(seq, forms)
    lhs = float(
        sum(f.omega * sq[j] for j, f in enumerate(forms) if sw.T < f.t <= sw.T + sw.M)
    )
    rhs = sw.M * (sw.T + seq.N) * seq.norm_sq
    return SieveReport.make(lhs, rhs, T=sw.T, M=sw.M, N=seq.N)


def dirichlet_poly_ratio(seq: Sequence, T: float) -> SieveReport:
    """int_{-T}^{T} |sum a_n n^{it}|^2 dt against (2T + N) ||a||^2.

    The integral is evaluated in closed form from the pairwise kernel
    2 sin(T log(m/n)) / log(m/n).
    """
    if T <= 0:
        raise ValueError("T must be positive")
    log_ns = np.log(seq.ns.astype(float))
    log_ratio = log_ns[None, :] - log_ns[:, None]
    safe = np.where(log_ratio == 0.0, 1.0, log_ratio)
    kernel = np.where(log_ratio == 0.0, 2.0 * T, 2.0 * np.sin(T * log_ratio) / safe)
    lhs = float(np.real(seq.values.conj() @ kernel @ seq.values))
    rhs = (2.0 * T + seq.N) * seq.norm_sq
    return SieveReport.make(lhs, rhs, T=T, N=seq.N)


def di_luo_comparison(seq: Sequence, sw: SpectralWeight, forms: list[MaassForm]) -> dict:
    """Long-range twisted sum over t_j <= T against the two classical majorants.

    The hybrid majorant (T^2 + T^{3/2} N^{1/2} + N^{5/4}) undercuts the
    quadratic one (T^2 + N^2) once N > T.
    """
    T, N = sw.T, seq.N
    sq = _twisted_linear_forms(seq, forms)
    lhs = float(sum(f.omega * sq[j] for j, f in enumerate(forms) if f.t <= T))
    norm = seq.norm_sq if seq.norm_sq > 0 else 1e-300
    maj1 = (T**2 + N**2) * norm
    maj2 = (T**2 + T**1.5 * N**0.5 + N**1.25) * norm
    return {
        "lhs": lhs,
        "majorant_quadratic": maj1,
        "majorant_hybrid": maj2,
        "ratio_quadratic": lhs / maj1,
        "ratio_hybrid": lhs / maj2,
        "hybrid_smaller": maj2 < maj1,
        "T": T,
        "N": N,
    }


def moment_demo(
    gl3: GL3Form,
    forms: list[MaassForm],
    sw: SpectralWeight,
    N: int,
    n1: int = 1,
    weight=None,
    eis_order: int = 64,
    eis_panels: int = 20,
) -> dict:
    """Desk-scale second-moment block at one dyadic length.

    Cuspidal and Eisenstein averages of the GL(3)-twisted linear forms
    N^{-1/2} sum_n A(n1, n) (coeff) w(n/N), reported against the majorant
    (1 + MT/N) sum_n |A(n1, n)|^2 + (n1 + T/M^2) N n1 with all
    epsilon-factors set to 1.
    """
    if n1 < 1 or N < 1:
        raise ValueError("n1 and N must be positive")
    T, M = sw.T, sw.M
    ns = np.arange(N + 1, 2 * N + 1)
    wvals = np.ones(ns.size) if weight is None else np.asarray(weight(ns / float(N)), dtype=float)
    coeffs = np.array([gl3.a(n1, int(n)) for n in ns])
    a_block = coeffs * wvals / math.sqrt(N)
    log_ns = np.log(ns.astype(float))

    s_val = 0.0
    for f in forms:
        lam = np.array([f.lam(int(n)) for n in ns])
        inner = np.sum(a_block * lam * np.exp(-1j * f.t * log_ns))
        s_val += f.omega * weight_h(f.t, sw) * abs(inner) ** 2

    nodes, weights = _t_grid(sw.t_upper, order=eis_order, panels=eis_panels)
    keep = nodes > 0
    nodes, weights = nodes[keep], 2.0 * weights[keep]
    omega_t = 1.0 / np.abs(zeta_many(1.0 + 2j * nodes)) ** 2
    h_t = weight_h(nodes, sw)
    sums = np.zeros(nodes.size, dtype=complex)
    for i, n in enumerate(ns):
        divs = np.array(divisors(int(n)), dtype=float)
        sigma = np.sum(np.exp(-2j * np.outer(nodes, np.log(divs))), axis=1)
        sums += a_block[i] * sigma
    t_val = float(np.sum(weights * omega_t * h_t * np.abs(sums) ** 2) / math.pi)

    coeff_sq = float(np.sum(np.abs(coeffs) ** 2))
    majorant = (1.0 + M * T / N) * coeff_sq + (n1 + T / M**2) * N * n1
    return {
        "S": float(s_val),
        "T": t_val,
        "majorant": majorant,
        "ratio": (float(s_val) + t_val) / majorant,
        "params": {"T": T, "M": M, "N": N, "n1": n1},
    }
