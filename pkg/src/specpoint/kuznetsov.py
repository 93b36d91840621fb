"""Both sides of the trace identity, and its sequence-averaged form.

For a pair (m, n) the identity balances

    sum_j omega_j h(t_j; y) lambda_j(m) lambda_j(n)
    + (1/pi) int omega(t) h(t; y) (n/m)^{it} sigma_{2it}(m) sigma_{-2it}(n) dt

against

    delta_{m,n} H0 + sum_c S(m,n;c)/c * H(4 pi sqrt(mn)/c, y)

with the twist fixed at y = sqrt(m/n), which turns (m/n)^{i t_j} into the
even factor cos(2 t log y). Averaging against a real sequence supported on
(N, 2N] gives the quadratic decomposition S + T = D + P. Every truncation
(spectral height, c-range, quadrature) carries an explicit reported bar.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .arith import _unit_residues, divisor_count, divisors, kloosterman
from .besselintegral import (
    I_integral,
    R_CUT_FACTOR,
    SpectralWeight,
    bessel_H_direct,
    weight_h,
    weight_h_y,
)
from .quadrature import QuadratureResult, adaptive_quadrature, fixed_gauss
from .sievebench import Sequence
from .specfun import zeta_many
from .spectraldata import MaassForm


def spectral_side(
    m: int,
    n: int,
    sw: SpectralWeight,
    forms: list[MaassForm],
    y_twist: float | None = None,
) -> float:
    """sum_j omega_j h(t_j; y) lambda_j(m) lambda_j(n).

    y_twist defaults to sqrt(m/n). A dataset that stops short of the
    weight's effective support (T + 6M) triggers a warning; the matching
    quantitative bar comes from spectral_tail_bar.
    """
    if not forms:
        warnings.warn("empty form list: spectral side is 0 with full tail uncovered")
        return 0.0
    y = math.sqrt(m / n) if y_twist is None else y_twist
    t_cov = max(f.t for f in forms)
    if t_cov < sw.T + 6.0 * sw.M:
        warnings.warn(
            f"spectrum covers t <= {t_cov:.2f} < T + 6M = {sw.T + 6 * sw.M:.2f}; "
            "tail bar applies"
        )
    return float(
        sum(f.omega * weight_h_y(f.t, y, sw) * f.lam(m) * f.lam(n) for f in forms)
    )


def spectral_tail_bar(
    m: int, n: int, sw: SpectralWeight, forms: list[MaassForm]
) -> float:
    """Bound for the uncovered spectral tail: eigenvalue density t/6 times
    the Gaussian weight, coefficients bounded by tau(m) tau(n), harmonic
    weights by the dataset maximum."""
    if not forms:
        t_cov = 0.0
        omega_cap = 1.0
    else:
        t_cov = max(f.t for f in forms)
        omega_cap = max(f.omega for f in forms)
    hi = sw.t_upper + 2.0 * sw.M
    if t_cov >= hi:
        return 0.0
    lam_cap = divisor_count(m) * divisor_count(n)
    val = fixed_gauss(
        lambda t: (t / 6.0) * weight_h(t, sw), max(t_cov, 1e-9), hi, order=32, panels=4
    )
    return float(abs(val)) * omega_cap * lam_cap


def _sigma_power(nodes: np.ndarray, n: int, sign: float) -> np.ndarray:
    """sigma_{sign * 2it}(n) on an array of t nodes."""
    divs = np.array(divisors(n), dtype=float)
    return np.sum(np.exp(sign * 2j * np.outer(nodes, np.log(divs))), axis=1)


def eisenstein_side(
    m: int,
    n: int,
    sw: SpectralWeight,
    tol: float = 1e-10,
    y_twist: float | None = None,
) -> QuadratureResult:
    """(1/pi) int omega(t) h(t; y) (n/m)^{it} sigma_{2it}(m) sigma_{-2it}(n) dt.

    The integrand is Hermitian in t, so the value is real and computed as
    twice the real part over t > 0.
    """
    y = math.sqrt(m / n) if y_twist is None else y_twist
    log_nm = math.log(n / m)
    log_y = math.log(y)

    def f(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        omega_t = 1.0 / np.abs(zeta_many(1.0 + 2j * t)) ** 2
        hy = weight_h(t, sw) * np.cos(2.0 * t * log_y)
        ratio = np.exp(1j * t * log_nm)
        return omega_t * hy * ratio * _sigma_power(t, m, +1.0) * _sigma_power(t, n, -1.0)

    res = adaptive_quadrature(f, 1e-12, sw.t_upper, tol * math.pi / 2.0, initial_panels=24)
    value = 2.0 * res.value.real / math.pi
    return QuadratureResult(
        complex(value, 0.0), 2.0 * res.err_estimate / math.pi, res.evaluations, res.converged
    )


def diagonal_H0(sw: SpectralWeight, tol: float = 1e-10) -> QuadratureResult:
    """H0 = (1/pi^2) int h(t) tanh(pi t) t dt (even integrand, so 2x half-line)."""

    def f(t: np.ndarray) -> np.ndarray:
        return weight_h(t, sw) * np.tanh(math.pi * t) * t

    res = adaptive_quadrature(f, 0.0, sw.t_upper, tol * math.pi**2 / 2.0, initial_panels=16)
    return res.scaled(2.0 / math.pi**2)


def diagonal_closed_form(sw: SpectralWeight) -> float:
    """Leading term 2 M T / (pi sqrt(pi)) of the diagonal weight mass."""
    return 2.0 * sw.M * sw.T / (math.pi * math.sqrt(math.pi))


def diagonal_term(m: int, n: int, sw: SpectralWeight, tol: float = 1e-10) -> QuadratureResult:
    if m != n:
        return QuadratureResult(0.0 + 0.0j, 0.0, 0)
    return diagonal_H0(sw, tol)


def _h_value(
    x: float, v: float, w: float, y: float, sw: SpectralWeight, tol: float, route: str
) -> tuple[float, float]:
    """One Bessel-weight value H(x, y) and its error bar, by route."""
    if route == "direct" or (route == "auto" and x <= 5.0):
        res = bessel_H_direct(x, y, sw, tol=tol, allow_small_x=True)
        return float(res.value.real), res.err_estimate
    reduced = I_integral(v, w, sw, tol=tol)
    phase = np.exp(2j * math.pi * ((v + w) / math.pi % 1.0))
    # the reduction itself is exact up to O(exp(-(T/M)^2)) relative terms
    analytic = 3.0 * math.exp(-((sw.T / sw.M) ** 2)) * (1.0 + abs(reduced.value))
    return float((phase * reduced.value).real), reduced.err_estimate + analytic


@dataclass
class KloostermanSideReport:
    value: float
    tail_estimate: float
    quadrature_err: float
    c_used: int
    first_omitted: float


def kloosterman_side(
    m: int,
    n: int,
    sw: SpectralWeight,
    C_max: int,
    tol: float = 1e-8,
    y_twist: float | None = None,
    route: str = "direct",
    tail_probe: int = 8,
) -> KloostermanSideReport:
    """sum_{c <= C_max} S(m,n;c)/c * H(4 pi sqrt(mn)/c, y).

    The tail bar evaluates the next tail_probe omitted terms directly and
    adds a 10x allowance for the remainder (the terms decay in u = x(y+1/y)
    once u < 1).
    """
    if C_max < 0:
        raise ValueError("C_max must be non-negative")
    y = math.sqrt(m / n) if y_twist is None else y_twist
    sqrt_mn = math.sqrt(m * n)

    def term(c: int) -> tuple[float, float]:
        x = 4.0 * math.pi * sqrt_mn / c
        s_val = kloosterman(m, n, c).real
        if s_val == 0.0:
            return 0.0, 0.0
        h, err = _h_value(x, math.pi * m / c, math.pi * n / c, y, sw, tol, route)
        return s_val / c * h, abs(s_val) / c * err

    value = 0.0
    qerr = 0.0
    for c in range(1, C_max + 1):
        v, e = term(c)
        value += v
        qerr += e
    tail = 0.0
    first_omitted = 0.0
    for c in range(C_max + 1, C_max + 1 + tail_probe):
        v, e = term(c)
        if c == C_max + 1:
            first_omitted = abs(v)
        tail += abs(v) + e
    tail += 10.0 * abs(
        term(C_max + tail_probe + 1)[0] if C_max + tail_probe >= 1 else 0.0
    )
    return KloostermanSideReport(
        value=value,
        tail_estimate=tail,
        quadrature_err=qerr,
        c_used=C_max,
        first_omitted=first_omitted,
    )


@dataclass
class TraceReport:
    m: int
    n: int
    spectral: float
    eisenstein: float
    diagonal: float
    kloosterman: float
    residual: float
    dominant: float
    rel_residual: float
    spectral_tail: float
    c_tail: float
    quadrature_err: float
    truncation: dict = field(default_factory=dict)

    CSV_HEADER = (
        "m,n,spectral,eisenstein,diagonal,kloosterman,residual,rel_residual,"
        "spectral_tail,c_tail,quad_err"
    )

    def csv_row(self) -> str:
        return (
            f"{self.m},{self.n},{self.spectral!r},{self.eisenstein!r},{self.diagonal!r},"
            f"{self.kloosterman!r},{self.residual!r},{self.rel_residual!r},"
            f"{self.spectral_tail!r},{self.c_tail!r},{self.quadrature_err!r}"
        )

    def summary(self) -> str:
        return (
            f"(m,n)=({self.m},{self.n}): spec={self.spectral:+.6e} eis={self.eisenstein:+.6e} "
            f"diag={self.diagonal:+.6e} kloos={self.kloosterman:+.6e} -> "
            f"residual={self.residual:.3e} ({100*self.rel_residual:.3f}% of dominant) "
            f"bars: spectral {self.spectral_tail:.2e}, c-tail {self.c_tail:.2e}, "
            f"quadrature {self.quadrature_err:.2e}"
        )


def trace_residual(
    m: int,
    n: int,
    sw: SpectralWeight,
    forms: list[MaassForm],
    C_max: int = 32,
    tol: float = 1e-8,
    route: str = "direct",
) -> TraceReport:
    """Assemble all four terms at y = sqrt(m/n) and report the imbalance."""
    spec = spectral_side(m, n, sw, forms)
    eis = eisenstein_side(m, n, sw, tol=tol)
    diag = diagonal_term(m, n, sw, tol=tol)
    kloos = kloosterman_side(m, n, sw, C_max, tol=tol, route=route)
    residual = abs(spec + eis.value.real - diag.value.real - kloos.value)
    dominant = max(
        abs(spec), abs(eis.value.real), abs(diag.value.real), abs(kloos.value), 1e-300
    )
    return TraceReport(
        m=m,
        n=n,
        spectral=spec,
        eisenstein=eis.value.real,
        diagonal=diag.value.real,
        kloosterman=kloos.value,
        residual=residual,
        dominant=dominant,
        rel_residual=residual / dominant,
        spectral_tail=spectral_tail_bar(m, n, sw, forms),
        c_tail=kloos.tail_estimate,
        quadrature_err=eis.err_estimate + diag.err_estimate + kloos.quadrature_err,
        truncation={"n_forms": len(forms), "C_max": C_max, "tol": tol},
    )


# ---------------------------------------------------------------------------
# Sequence-averaged decomposition


@dataclass
class DecompositionReport:
    S: float
    T_eis: float
    D: float
    P: float
    residual: float
    rel_residual: float
    skip_bar: float
    spectral_tail: float
    quadrature_err: float
    diagonal_closed_form: float
    params: dict = field(default_factory=dict)

    CSV_HEADER = "S,T_eis,D,P,residual,rel_residual,skip_bar,spectral_tail,quad_err"

    def csv_row(self) -> str:
        return (
            f"{self.S!r},{self.T_eis!r},{self.D!r},{self.P!r},{self.residual!r},"
            f"{self.rel_residual!r},{self.skip_bar!r},{self.spectral_tail!r},"
            f"{self.quadrature_err!r}"
        )


def _kloosterman_block(ns: np.ndarray, c: int) -> np.ndarray:
    """S(m, n; c) for all m, n in the block, via the residue-pair table.

    acc[v, r1] = sum of e(alpha r1/c) over units with alpha^{-1} = v; the
    inverse DFT along v then yields S(r1, r2) for every r2 at once.
    """
    if c == 1:
        return np.ones((ns.size, ns.size))
    alphas, invs = _unit_residues(c)
    phases = np.exp(2j * math.pi * np.arange(c) / c)
    z = phases[(np.outer(alphas, np.arange(c)) % c)]  # (units, r1)
    acc = np.zeros((c, c), dtype=complex)
    np.add.at(acc, invs, z)
    table = np.real(np.fft.ifft(acc, axis=0) * c)  # (r2, r1); symmetric anyway
    res = ns % c
    return table[np.ix_(res, res)]


def decomposition(
    seq: Sequence,
    sw: SpectralWeight,
    forms: list[MaassForm],
    tol: float = 1e-6,
    resonance_margin: float = 3.0,
    u_floor: float = 1.0,
) -> DecompositionReport:
    """S + T on the spectral side against D + P for a real block sequence.

    The c-sum keeps every (m, n, c) whose reduced-integral phase can be
    stationary inside the Gaussian window (plus a margin of
    resonance_margin / M); everything skipped is bounded by the weight
    envelope at its would-be stationary point plus a measured small-u cap,
    and reported as skip_bar.
    """
    if not seq.is_real:
        raise ValueError(
            "sequence must be real-valued: the averaged identity needs an even "
            "spectral weight, and cos(2 t log sqrt(m/n)) only arises for real a_n"
        )
    a = seq.values.real
    ns = seq.ns
    N = seq.N
    log_ns = np.log(ns.astype(float))

    # spectral sum
    s_val = 0.0
    for f in forms:
        lam = np.array([f.lam(int(n)) for n in ns])
        inner = np.sum(a * lam * np.exp(1j * f.t * log_ns))
        s_val += f.omega * weight_h(f.t, sw) * abs(inner) ** 2

    # Eisenstein integral
    def eis_integrand(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        omega_t = 1.0 / np.abs(zeta_many(1.0 + 2j * t)) ** 2
        sums = np.zeros(t.size, dtype=complex)
        for i, n in enumerate(ns):
            sums += a[i] * _sigma_power(t, int(n), +1.0)
        return omega_t * weight_h(t, sw) * np.abs(sums) ** 2

    eis = adaptive_quadrature(
        eis_integrand, 1e-12, sw.t_upper, tol * math.pi / 2.0, initial_panels=32
    )
    t_val = 2.0 * eis.value.real / math.pi

    h0 = diagonal_H0(sw, tol=tol)
    d_val = h0.value.real * seq.norm_sq

    # off-diagonal c-sum in three zones: evaluate where the reduced phase
    # can be stationary, envelope-bar where it cannot, analytic bar beyond
    r0 = R_CUT_FACTOR / sw.M
    p_val = 0.0
    skip_bar = 0.0
    qerr = 2.0 * eis.err_estimate / math.pi + h0.err_estimate * seq.norm_sq

    # measured cap for |H| in the small-u region at this weight
    small_u_cap = 0.0
    for u in (0.25, 0.5, 0.75, 1.0):
        res = bessel_H_direct(u / 2.0, 1.0, sw, tol=1e-12, allow_small_x=True)
        small_u_cap = max(small_u_cap, abs(res.value.real) + res.err_estimate)

    def stationary_offset(v: float, w: float) -> float:
        # nearest |r| with +-T + v e^r - w e^{-r} = 0
        disc = math.sqrt(sw.T**2 + 4.0 * v * w)
        best = math.inf
        for sgn in (+1.0, -1.0):
            er = (-sgn * sw.T + disc) / (2.0 * v)
            if er > 0:
                best = min(best, abs(math.log(er)))
        return best

    c_eval = int(math.pi * 2.0 * N * math.exp(r0) / (0.8 * sw.T)) + 2
    c_far = int(16.0 * math.pi * N / u_floor) + 1
    abs_a = np.abs(a)
    envelope_scale = sw.M * sw.T * 2.0 * r0 * 1.5

    for c in range(1, c_eval + 1):
        smat = _kloosterman_block(ns, c)
        pref = np.outer(a, a) * smat / c
        for i in range(ns.size):
            for j in range(i, ns.size):
                coeff = (1.0 if i == j else 2.0) * pref[i, j]
                if coeff == 0.0:
                    continue
                v = math.pi * ns[i] / c
                w = math.pi * ns[j] / c
                u = 4.0 * math.pi * (ns[i] + ns[j]) / c
                if u <= u_floor:
                    skip_bar += abs(coeff) * small_u_cap * u / u_floor
                    continue
                r_star = stationary_offset(v, w)
                if r_star > r0 + resonance_margin / sw.M:
                    env = math.exp(-min((sw.M * r_star) ** 2, 700.0))
                    skip_bar += abs(coeff) * (envelope_scale * env + small_u_cap)
                    continue
                x = 4.0 * math.pi * math.sqrt(float(ns[i]) * float(ns[j])) / c
                h, err = _h_value(x, v, w, math.sqrt(ns[i] / ns[j]), sw, tol, "auto")
                p_val += coeff * h
                qerr += abs(coeff) * err

    # bar zone: Weil bound |S| <= tau(c) sqrt(c gcd(m,n,c)), stationary
    # envelope or small-u cap per pair, fully vectorized
    gcd_mn = np.gcd.outer(ns, ns)
    aa = np.outer(abs_a, abs_a)
    vs = math.pi * ns.astype(float)
    for c in range(c_eval + 1, c_far + 1):
        v_arr = vs[:, None] / c
        w_arr = vs[None, :] / c
        u_arr = 4.0 * (v_arr + w_arr)
        disc = np.sqrt(sw.T**2 + 4.0 * v_arr * w_arr)
        best = np.full(u_arr.shape, np.inf)
        for sgn in (+1.0, -1.0):
            er = (-sgn * sw.T + disc) / (2.0 * v_arr)
            best = np.minimum(best, np.abs(np.log(np.maximum(er, 1e-300))))
        env = np.exp(-np.minimum((sw.M * best) ** 2, 700.0))
        cap = np.where(
            u_arr <= u_floor,
            small_u_cap * u_arr / u_floor,
            envelope_scale * env + small_u_cap,
        )
        g3 = np.gcd(gcd_mn, c).astype(float)
        weil = divisor_count(c) * math.sqrt(c) * np.sqrt(g3)
        skip_bar += float(np.sum(aa * weil * cap)) / c

    # far zone c > c_far: u <= u_floor everywhere, |H| <= cap * u / u_floor,
    # sum_c tau(c) c^{-3/2} bounded by an integral comparison
    sum_a = float(np.sum(abs_a))
    sum_na = float(np.sum(ns * abs_a))
    tau_tail = 2.0 * (math.log(c_far) + 2.0) * 2.0 / math.sqrt(c_far)
    skip_bar += (
        small_u_cap
        / u_floor
        * 4.0
        * math.pi
        * 2.0
        * sum_a
        * sum_na
        * math.sqrt(2.0 * N)
        * tau_tail
    )

    residual = abs(s_val + t_val - d_val - p_val)
    denom = max(abs(s_val + t_val), abs(d_val + p_val), 1e-300)
    return DecompositionReport(
        S=float(s_val),
        T_eis=float(t_val),
        D=float(d_val),
        P=float(p_val),
        residual=residual,
        rel_residual=residual / denom,
        skip_bar=skip_bar,
        spectral_tail=spectral_tail_bar(1, 1, sw, forms) * seq.norm_sq * seq.N,
        quadrature_err=qerr,
        diagonal_closed_form=diagonal_closed_form(sw) * seq.norm_sq,
        params={"N": N, "T": sw.T, "M": sw.M, "c_eval": c_eval, "c_far": c_far, "tol": tol},
    )


def p_bound_rhs(
    seq: Sequence,
    sw: SpectralWeight,
    q_cap_const: float = 4.0,
    c_cap_const: float = 4.0,
) -> float:
    """Explicit majorant for the off-diagonal: M T times the capped
    (q, c, alpha) mean square of the doubly-twisted block sums over
    |t| <= 6.1/M (empty ranges give 0).

    The t-integrand is a trigonometric polynomial of bandwidth 2 pi N/(c q),
    so the Gauss order is scaled with it and the rule is effectively exact.
    """
    if not seq.is_real:
        raise ValueError("the decomposition majorant applies to real sequences")
    N, T, M = seq.N, sw.T, sw.M
    q_hi = int(q_cap_const * N / T)
    total = 0.0
    ns = seq.ns.astype(float)
    tau = R_CUT_FACTOR / M
    for q in range(1, q_hi + 1):
        c_hi = int(c_cap_const * N / (T * q))
        inner_q = 0.0
        for c in range(1, c_hi + 1):
            order = int(2.0 * math.pi * N * tau / (c * q) / 1.5) + 48
            nodes, weights = np.polynomial.legendre.leggauss(order)
            nodes, weights = nodes * tau, weights * tau
            osc = np.exp(2j * math.pi * np.outer(nodes / (c * q), ns))
            twisted = osc * seq.values[None, :]
            res_classes = seq.ns % c
            block = np.zeros((nodes.size, c), dtype=complex)
            for rho in range(c):
                mask = res_classes == rho
                if np.any(mask):
                    block[:, rho] = twisted[:, mask].sum(axis=1)
            alphas, invs = _unit_residues(c)
            unit_rows = np.exp(2j * math.pi * np.outer(invs, np.arange(c)) / c)
            inner = block @ unit_rows.T
            inner_q += float(np.sum(weights * np.sum(np.abs(inner) ** 2, axis=1))) / c
        total += inner_q / q
    return M * T * total
