"""GL(3) duality machinery: gamma-factors, the +/- Mellin multipliers, the
Hankel transform by contour integration and by the calibrated asymptotic
kernel, and the summation-identity residual.

The transform of a test weight w supported on [X1, X2] is

    W(+-y) = (1/(4 pi i)) int_{Re s = -1} Gpm(s) wtilde(s) |y|^{s-1} ds,

where wtilde is the numerical Mellin transform of w and Gpm are the
gamma-quotients of the form and its dual. The multiplier Gpm * wtilde is
tabulated once on a Gauss grid along the contour, so evaluating W on a
whole dual-sum argument array is a single matrix product. The same
transform is realized as int w(x) J(-x y) dx with the kernel's large-x
form x^{-1/3} e(+-3 x^{1/3}) sum_k B_k x^{-k/3}; the B_k are calibrated
against windowed contour values, never transcribed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import divisors, kloosterman, mod_inverse
from .quadrature import QuadratureResult, adaptive_quadrature, oscillatory_integral
from .specfun import log_gamma
from .spectraldata import CoefficientRangeError, GL3Form


def gamma_factor(s: complex, gl3: GL3Form) -> complex:
    """log of pi^{-3s/2} prod_i Gamma((s + lambda_i)/2), principal branches."""
    total = -1.5 * s * math.log(math.pi)
    for lam in gl3.langlands:
        z = (s + lam) / 2.0
        if abs(z.imag) < 1e-9 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-9:
            raise ValueError(f"gamma-factor pole: (s + {lam})/2 = {z}")
        total = total + log_gamma(z)
    return total


def _gamma_factor_many(s: np.ndarray, gl3: GL3Form) -> np.ndarray:
    total = -1.5 * s * math.log(math.pi)
    for lam in gl3.langlands:
        total = total + log_gamma((s + lam) / 2.0)
    return total


def G_pm(s: complex, gl3: GL3Form, pole_guard: float = 1e-6) -> tuple[complex, complex]:
    """(G+, G-) with G^{+-}(s) = q0(s) +- i q1(s), where
    q_d(s) = gamma(1-s+d, dual)/gamma(s+d, form)."""
    dual = gl3.dual
    for lam in list(gl3.langlands) + list(dual.langlands):
        for base in (s, 1.0 - s, 1.0 + s, 2.0 - s):
            z = (base + lam) / 2.0
            if abs(z.imag) < pole_guard and z.real <= pole_guard and (
                abs(z.real - round(z.real)) < pole_guard
            ):
                raise ValueError(f"contour point too close to a gamma pole: {z}")
    q0 = np.exp(gamma_factor(1.0 - s, dual) - gamma_factor(s, gl3))
    q1 = np.exp(gamma_factor(2.0 - s, dual) - gamma_factor(1.0 + s, gl3))
    return q0 + 1j * q1, q0 - 1j * q1


@dataclass
class HankelSetup:
    """Weight, contour, and cached multiplier tables for one GL(3) form."""

    gl3: GL3Form
    weight: callable
    support: tuple[float, float]
    sigma: float = -1.0
    tol: float = 1e-10
    log_y_max: float = 14.0
    mellin_fn: callable | None = None  # closed-form Mellin transform override
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        x1, x2 = self.support
        if not 0 < x1 < x2:
            raise ValueError("support must satisfy 0 < X1 < X2")

    def mellin_weight(self, s: np.ndarray) -> np.ndarray:
        """wtilde(s) = int w(x) x^{s-1} dx over the support, vectorized in s."""
        if self.mellin_fn is not None:
            return np.asarray(self.mellin_fn(np.atleast_1d(np.asarray(s, dtype=complex))))
        x1, x2 = self.support
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        # x = x1 e^{u}: integral of w(x1 e^u) x1^s e^{su} du
        u_hi = math.log(x2 / x1)
        tau_max = float(np.max(np.abs(s.imag)))

        def f(u: np.ndarray) -> np.ndarray:
            w = self.weight(x1 * np.exp(u))
            return w[None, :] * np.exp(np.outer(s, u))

        order = 16
        panels = max(8, int(tau_max * u_hi / 6.0) + 8)
        edges = np.linspace(0.0, u_hi, panels + 1)
        xg, wg = np.polynomial.legendre.leggauss(order)
        mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * (edges[1:] - edges[:-1])
        nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
        weights = (np.broadcast_to(wg[None, :], (panels, order)) * half[:, None]).ravel()
        vals = f(nodes) @ weights
        return vals * np.exp(s * math.log(x1))

    def _legs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Bent-contour nodes: (s values, complex ds weights) per leg.

        On the line Re s = sigma the gamma-quotient grows like tau^{4.5},
        amplifying the Mellin-transform noise floor; past |tau| = tau_bend
        the contour moves right to sigma_hi (still left of the poles at
        Re s = 1), where the quotient decays and the weight's own decay
        sets a modest cap.
        """
        key = "legs"
        if key in self._cache:
            return self._cache[key]
        sigma_hi = min(0.85, self.sigma + 2.0) if self.sigma < 0.85 else self.sigma
        tau_bend = 48.0
        dual = self.gl3.dual
        tau_cap = tau_bend * 1.5
        while tau_cap < 12000.0:
            s = sigma_hi + 1j * tau_cap * np.array([0.97, 1.0])
            q0 = np.exp(_gamma_factor_many(1.0 - s, dual) - _gamma_factor_many(s, self.gl3))
            q1 = np.exp(_gamma_factor_many(2.0 - s, dual) - _gamma_factor_many(1.0 + s, self.gl3))
            size = float(np.max((np.abs(q0) + np.abs(q1)) * np.abs(self.mellin_weight(s))))
            if size < self.tol * 1e-4:
                break
            tau_cap *= 1.25

        def gauss_leg(a: float, b: float, panels: int, direction: complex):
            edges = np.linspace(a, b, panels + 1)
            xg, wg = np.polynomial.legendre.leggauss(16)
            mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * (edges[1:] - edges[:-1])
            nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
            weights = (np.broadcast_to(wg[None, :], (panels, 16)) * half[:, None]).ravel()
            return nodes, weights * direction

        dens = (self.log_y_max + 4.0) / 10.0
        legs = []
        # central vertical on Re s = sigma
        taus, w = gauss_leg(-tau_bend, tau_bend, max(16, int(2 * tau_bend * dens) + 8), 1j)
        legs.append((self.sigma + 1j * taus, w))
        if sigma_hi > self.sigma:
            # connectors at +-tau_bend and the two outer verticals
            sig, w = gauss_leg(self.sigma, sigma_hi, 12, 1.0)
            legs.append((sig + 1j * tau_bend, w))
            sig, w = gauss_leg(sigma_hi, self.sigma, 12, 1.0)
            legs.append((sig - 1j * tau_bend, w))
            taus, w = gauss_leg(tau_bend, tau_cap, max(16, int((tau_cap - tau_bend) * dens) + 8), 1j)
            legs.append((sigma_hi + 1j * taus, w))
            taus, w = gauss_leg(-tau_cap, -tau_bend, max(16, int((tau_cap - tau_bend) * dens) + 8), 1j)
            legs.append((sigma_hi + 1j * taus, w))
        self._cache[key] = (legs, tau_cap)
        return self._cache[key]

    def _multiplier(self, sign: int):
        """Cached (s nodes, G * wtilde * ds / (4 pi i) values, tau_cap)."""
        if sign in self._cache:
            return self._cache[sign]
        legs, tau_cap = self._legs()
        dual = self.gl3.dual
        all_s = []
        all_m = []
        for s, w in legs:
            q0 = np.exp(_gamma_factor_many(1.0 - s, dual) - _gamma_factor_many(s, self.gl3))
            q1 = np.exp(_gamma_factor_many(2.0 - s, dual) - _gamma_factor_many(1.0 + s, self.gl3))
            g = q0 + 1j * q1 if sign > 0 else q0 - 1j * q1
            all_s.append(s)
            all_m.append(g * self.mellin_weight(s) * w / (4j * math.pi))
        self._cache[sign] = (np.concatenate(all_s), np.concatenate(all_m), tau_cap)
        return self._cache[sign]


def hankel_mellin(y: float, setup: HankelSetup) -> complex:
    """W(y) for signed y != 0 by the contour route."""
    return hankel_mellin_many(np.array([y]), setup)[0]


def hankel_mellin_many(ys: np.ndarray, setup: HankelSetup) -> np.ndarray:
    """Vectorized contour transform; signs of the arguments pick G+ or G-."""
    ys = np.asarray(ys, dtype=float)
    if np.any(ys == 0.0):
        raise ValueError("y must be nonzero")
    if np.any(np.abs(np.log(np.abs(ys))) > setup.log_y_max):
        raise ValueError("|log y| exceeds the multiplier grid density; raise log_y_max")
    out = np.empty(ys.shape, dtype=complex)
    for sign in (+1, -1):
        sel = ys > 0 if sign > 0 else ys < 0
        if not np.any(sel):
            continue
        s_nodes, mult, _ = setup._multiplier(sign)
        ay = np.abs(ys[sel])
        powers = np.exp(np.outer(np.log(ay), s_nodes - 1.0))
        out[sel] = powers @ mult
    return out


@dataclass
class KernelAsymptotics:
    """Fitted large-argument kernel x^{-1/3} e(+-3 x^{1/3}) sum B_k x^{-k/3}."""

    b_plus: np.ndarray
    b_minus: np.ndarray
    K: int
    x_min: float
    fit_residual: float

    def kernel(self, u: np.ndarray, sign: int) -> np.ndarray:
        """J(sign * u) for u >= x_min."""
        u = np.asarray(u, dtype=float)
        coeffs = self.b_plus if sign > 0 else self.b_minus
        cube = u ** (1.0 / 3.0)
        series = sum(coeffs[k] * u ** (-k / 3.0) for k in range(self.K))
        return np.exp(2j * math.pi * sign * 3.0 * cube) / cube * series


def kernel_values_windowed(
    gl3: GL3Form,
    us: np.ndarray,
    sign: int,
    rel_width: float = 0.02,
    tol: float = 1e-11,
) -> np.ndarray:
    """Contour-route kernel values J(sign * u) by window extraction.

    The window is a unit-mass Gaussian in log x of width delta at x0 = 1;
    its Mellin transform is the closed form exp(delta^2 (s^2 - 1)/4), so
    the contour needs no numerical transform and caps quickly. The
    smoothing error is O(delta^2) and removed by Richardson over
    delta and delta/2.
    """
    us = np.asarray(us, dtype=float)
    out = {}
    for delta in (rel_width, rel_width / 2.0):

        def window(x, d=delta):
            x = np.asarray(x, dtype=float)
            mass = d * math.sqrt(math.pi) * math.exp(d * d / 4.0)
            return np.exp(-((np.log(x) / d) ** 2)) / mass

        setup = HankelSetup(
            gl3=gl3,
            weight=window,
            support=(math.exp(-5.0 * delta), math.exp(5.0 * delta)),
            tol=tol,
            log_y_max=float(np.max(np.log(np.abs(us)))) + 1.0,
            mellin_fn=lambda s, d=delta: np.exp(d * d * (s * s - 1.0) / 4.0),
        )
        out[delta] = hankel_mellin_many(-sign * us, setup)
    return (4.0 * out[rel_width / 2.0] - out[rel_width]) / 3.0


def calibrate_kernel(
    gl3: GL3Form, K: int, x_grid: np.ndarray, rel_width: float = 0.02
) -> KernelAsymptotics:
    """Least-squares fit of the oscillatory expansion coefficients B_k^{+-}
    against windowed contour values on x_grid (all entries >= 10)."""
    x_grid = np.asarray(x_grid, dtype=float)
    if not 1 <= K <= 3:
        raise ValueError("K must be 1, 2, or 3")
    if np.min(x_grid) < 10.0:
        raise ValueError("x_grid must stay in the large-argument regime (>= 10)")
    if x_grid.size < K + 1:
        raise ValueError("need more grid points than coefficients")
    resid = 0.0
    coeffs = {}
    for sign in (+1, -1):
        vals = kernel_values_windowed(gl3, x_grid, sign, rel_width=rel_width)
        if np.max(np.abs(vals)) < 1e-14:
            raise ValueError("kernel values vanish on the grid; cannot calibrate")
        cube = x_grid ** (1.0 / 3.0)
        lead = np.exp(2j * math.pi * sign * 3.0 * cube) / cube
        design = np.stack([lead * x_grid ** (-k / 3.0) for k in range(K)], axis=1)
        sol, *_ = np.linalg.lstsq(design, vals, rcond=None)
        coeffs[sign] = sol
        resid = max(resid, float(np.max(np.abs(design @ sol - vals))))
    return KernelAsymptotics(
        b_plus=coeffs[+1],
        b_minus=coeffs[-1],
        K=K,
        x_min=float(np.min(x_grid)),
        fit_residual=resid,
    )


def hankel_kernel_route(
    y: float, setup: HankelSetup, ka: KernelAsymptotics, tol: float = 1e-10
) -> complex:
    """W(y) = int w(x) J(-x y) dx with the calibrated asymptotic kernel."""
    x1, x2 = setup.support
    if x1 * abs(y) < ka.x_min:
        raise ValueError(
            f"x1*|y| = {x1 * abs(y):.2f} below the kernel floor {ka.x_min}; "
            "use hankel_mellin in this regime"
        )
    sign = -1 if y > 0 else +1  # sign of the kernel argument -x y
    ay = abs(y)
    coeffs = ka.b_plus if sign > 0 else ka.b_minus

    def amplitude(x: np.ndarray) -> np.ndarray:
        u = x * ay
        cube = u ** (1.0 / 3.0)
        series = sum(coeffs[k] * u ** (-k / 3.0) for k in range(ka.K))
        return setup.weight(x) * series / cube

    res = oscillatory_integral(
        lambda x: sign * 3.0 * (x * ay) ** (1.0 / 3.0),
        amplitude,
        (x1, x2),
        tol,
    )
    if res.flagged:
        raise ArithmeticError("kernel-route quadrature did not converge")
    return complex(res.value)


@dataclass
class VoronoiReport:
    direct: complex
    dual: complex
    residual: float
    rel_residual: float
    dual_terms: int
    tail_cut_reached: bool
    skipped_bar: float
    params: dict = field(default_factory=dict)

    CSV_HEADER = "m,alpha,c,direct_re,direct_im,dual_re,dual_im,residual,rel_residual,dual_terms,skipped_bar"

    def csv_row(self) -> str:
        p = self.params
        return (
            f"{p['m']},{p['alpha']},{p['c']},{self.direct.real!r},{self.direct.imag!r},"
            f"{self.dual.real!r},{self.dual.imag!r},{self.residual!r},{self.rel_residual!r},"
            f"{self.dual_terms},{self.skipped_bar!r}"
        )


def _transform_envelope(setup: HankelSetup, y_lo: float, y_hi: float, grid: int = 320):
    """Decreasing majorant of max(|W(y)|, |W(-y)|) on a log grid."""
    ys = np.exp(np.linspace(math.log(y_lo), math.log(y_hi), grid))
    vals = np.maximum(
        np.abs(hankel_mellin_many(ys, setup)), np.abs(hankel_mellin_many(-ys, setup))
    )
    env = np.maximum.accumulate(vals[::-1])[::-1]
    return ys, env


def voronoi_residual(
    m: int,
    alpha: int,
    c: int,
    setup: HankelSetup,
    dual_tail_tol: float = 1e-8,
    coeff_fn=None,
    coeff_bound=None,
    max_dual_terms: int = 250000,
) -> VoronoiReport:
    """| direct twisted sum - dual Kloosterman/Hankel sum |.

    direct = sum_n A(m,n) e(alpha^{-1} n / c) w(n);
    dual   = sum_{+-} sum_{d | c m} d sum_n A(n,d) S(+-n, alpha m; cm/d)
             / (c^2 m) * W(-+ d^2 n / (c^3 m)).

    The n-cut is where the transform envelope stays below dual_tail_tol.
    Coefficients come from the table, or from coeff_fn beyond it (None
    entries, e.g. blocked by an out-of-range prime, are skipped and their
    contribution is bounded via coeff_bound into skipped_bar).
    """
    if c < 1 or m < 1:
        raise ValueError("c and m must be positive")
    if math.gcd(alpha, c) != 1:
        raise ValueError("alpha must be invertible mod c")
    gl3 = setup.gl3
    x1, x2 = setup.support
    alpha_bar = mod_inverse(alpha, c)

    def entry(n: int, d: int):
        if gl3.has(n, d):
            return gl3.a(n, d)
        if coeff_fn is not None:
            return coeff_fn(n, d)
        return None

    direct = 0.0 + 0.0j
    for n in range(max(1, math.ceil(x1)), math.floor(x2) + 1):
        wn = float(setup.weight(np.array([float(n)]))[0])
        if wn != 0.0:
            a_mn = entry(m, n)
            if a_mn is None:
                raise CoefficientRangeError(f"A({m},{n}) unavailable for the direct sum")
            direct += a_mn * np.exp(2j * math.pi * ((alpha_bar * n) % c) / c) * wn

    dual = 0.0 + 0.0j
    n_terms = 0
    tail_ok = True
    skipped_bar = 0.0
    for d in divisors(c * m):
        modulus = c * m // d
        scale = d / (c * c * m)
        y_unit = d * d / (c**3 * m)
        ys, env = _transform_envelope(setup, y_unit, y_unit * max_dual_terms)
        below = np.nonzero(env < dual_tail_tol)[0]
        if below.size == 0:
            n_cut = max_dual_terms
            tail_ok = False
        else:
            n_cut = int(math.ceil(ys[below[0]] / y_unit))
        for n0 in range(1, n_cut + 1, 512):
            ns = np.arange(n0, min(n0 + 512, n_cut + 1))
            coeffs = np.empty(ns.size, dtype=complex)
            missing = np.zeros(ns.size, dtype=bool)
            for i, n in enumerate(ns):
                val = entry(int(n), d)
                if val is None:
                    missing[i] = True
                    coeffs[i] = 0.0
                else:
                    coeffs[i] = val
            w_plus = hankel_mellin_many(-y_unit * ns.astype(float), setup)
            w_minus = hankel_mellin_many(+y_unit * ns.astype(float), setup)
            s_plus = np.array(
                [kloosterman(int(n), alpha * m, modulus).real for n in ns]
            )
            s_minus = np.array(
                [kloosterman(-int(n), alpha * m, modulus).real for n in ns]
            )
            dual += scale * np.sum(coeffs * (s_plus * w_plus + s_minus * w_minus))
            n_terms += int(np.sum(~missing))
            if np.any(missing) and coeff_bound is not None:
                wmax = np.maximum(np.abs(w_plus), np.abs(w_minus))
                for i in np.nonzero(missing)[0]:
                    cap = coeff_bound(int(ns[i]), d)
                    s_cap = abs(s_plus[i]) + abs(s_minus[i])
                    skipped_bar += scale * cap * s_cap * float(wmax[i])
        # tail beyond the cut: generous term caps times the envelope run-out
        sel = env < dual_tail_tol
        if np.any(sel):
            ys_tail, tail_env = ys[sel], env[sel]
            dn = np.diff(np.concatenate([ys_tail, [ys_tail[-1] * 1.2]])) / y_unit
            coeff_cap = 8.0  # divisor-scale coefficients on average
            s_cap = 2.0 * len(divisors(modulus)) * math.sqrt(modulus)
            skipped_bar += scale * coeff_cap * s_cap * float(np.sum(tail_env * dn))

    residual = abs(direct - dual)
    denom = max(abs(direct), abs(dual), 1e-300)
    return VoronoiReport(
        direct=complex(direct),
        dual=complex(dual),
        residual=residual,
        rel_residual=residual / denom,
        dual_terms=n_terms,
        tail_cut_reached=tail_ok,
        skipped_bar=skipped_bar,
        params={"m": m, "alpha": alpha, "c": c, "tail_tol": dual_tail_tol},
    )
