"""Finite-N extended correlation kernels, their scaling limits, and the
special functions they need.

The special functions are implemented in-repo (series + asymptotic
expansions, with a nonoscillatory Bessel-K integral bridging the gap
region of Ai) so the kernel module stays dependency-free and bit-stable.
Orthonormal Hermite/Laguerre sequences run a scaled two-term recurrence
with a per-column log offset, which keeps the deep-tail values correct
far beyond the naive underflow point of the seed term.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._quad import decaying_quad, fixed_quad, gl_nodes
from .errors import (
    AccuracyLossWarning,
    DomainError,
    SizeLimit,
    TailNotConverging,
)

__all__ = [
    "hermite_phi",
    "hermite_phi_sequence",
    "laguerre_phi",
    "laguerre_phi_sequence",
    "airy_ai",
    "airy_ai_prime",
    "bessel_j",
    "bessel_j_prime",
    "ExtendedKernel",
    "hermite_kernel",
    "laguerre_kernel",
    "sine_kernel",
    "airy_kernel",
    "bessel_hard_kernel",
    "kernel_hermite",
    "kernel_laguerre",
    "kernel_sine",
    "kernel_airy",
    "kernel_bessel_hard",
    "correlation_function",
]


# ---------------------------------------------------------------------------
# orthonormal Hermite functions
# ---------------------------------------------------------------------------

def hermite_phi_sequence(n_max: int, x) -> np.ndarray:
    """phi_0..phi_n_max at the points x; shape (n_max+1, len(x)).

    Scaled recurrence: the Gaussian seed is carried as a log offset, so
    values are correct even where exp(-x^2/2) alone would underflow.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    offset = -0.5 * x * x
    p_prev = np.full_like(x, math.pi ** -0.25)
    out = np.empty((n_max + 1, len(x)))
    out[0] = p_prev * np.exp(offset)
    if n_max == 0:
        return out
    p_cur = math.sqrt(2.0) * x * p_prev
    out[1] = p_cur * np.exp(offset)
    for n in range(1, n_max):
        p_next = math.sqrt(2.0 / (n + 1.0)) * x * p_cur - math.sqrt(n / (n + 1.0)) * p_prev
        p_prev, p_cur = p_cur, p_next
        big = np.abs(p_cur) > 1e250
        if big.any():
            scale = np.where(big, np.abs(p_cur), 1.0)
            p_cur = p_cur / scale
            p_prev = p_prev / scale
            offset = offset + np.log(scale)
        out[n + 1] = p_cur * np.exp(offset)
    return out


def hermite_phi(n: int, x: float) -> float:
    """Orthonormal Hermite function phi_n(x)."""
    if n < 0:
        raise DomainError("n >= 0 required")
    return float(hermite_phi_sequence(n, [x])[n, 0])


# ---------------------------------------------------------------------------
# orthonormal Laguerre functions
# ---------------------------------------------------------------------------

def laguerre_phi_sequence(n_max: int, nu: float, x) -> np.ndarray:
    """phi^nu_0..phi^nu_n_max at x >= 0; shape (n_max+1, len(x))."""
    if not nu > -1.0:
        raise DomainError(f"nu must be > -1, got {nu}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise DomainError("x must be nonnegative")
    # x = 0 limit of the x^(nu/2) prefactor: 1 at nu = 0, 0 / +inf otherwise
    at_zero = -np.inf if nu > 0.0 else (np.inf if nu < 0.0 else 0.0)
    offset = np.full_like(x, at_zero)
    pos = x > 0.0
    offset[pos] = 0.5 * nu * np.log(x[pos]) - 0.5 * x[pos] - 0.5 * math.lgamma(nu + 1.0)
    p_prev = np.ones_like(x)
    out = np.empty((n_max + 1, len(x)))
    out[0] = p_prev * np.exp(offset)
    if n_max == 0:
        return out
    # L_1^nu(x) = 1 + nu - x, normalized
    p_cur = (1.0 + nu - x) / math.sqrt(1.0 + nu)
    out[1] = p_cur * np.exp(offset)
    for n in range(1, n_max):
        c1 = (2.0 * n + 1.0 + nu - x) / math.sqrt((n + 1.0) * (n + 1.0 + nu))
        c2 = math.sqrt(n * (n + nu) / ((n + 1.0) * (n + 1.0 + nu)))
        p_next = c1 * p_cur - c2 * p_prev
        p_prev, p_cur = p_cur, p_next
        big = np.abs(p_cur) > 1e250
        if big.any():
            scale = np.where(big, np.abs(p_cur), 1.0)
            p_cur = p_cur / scale
            p_prev = p_prev / scale
            offset = offset + np.log(scale)
        out[n + 1] = p_cur * np.exp(offset)
    return out


def laguerre_phi(n: int, nu: float, x: float) -> float:
    """Orthonormal Laguerre function phi^nu_n(x) on the half-line."""
    if n < 0:
        raise DomainError("n >= 0 required")
    return float(laguerre_phi_sequence(n, nu, [x])[n, 0])


# ---------------------------------------------------------------------------
# Airy function
# ---------------------------------------------------------------------------

_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)


def _airy_series(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Ai, Ai') by the Maclaurin series; good on roughly [-7.5, 4]."""
    f = np.ones_like(x)
    fp = np.zeros_like(x)
    g = x.copy()
    gp = np.ones_like(x)
    tf = np.ones_like(x)
    tg = x.copy()
    x3 = x**3
    for k in range(60):
        tf = tf * x3 / ((3 * k + 3.0) * (3 * k + 2.0))
        fp += tf * (3 * k + 3.0) / np.where(x != 0.0, x, 1.0)
        f += tf
        tg = tg * x3 / ((3 * k + 4.0) * (3 * k + 3.0))
        gp += tg * (3 * k + 4.0) / np.where(x != 0.0, x, 1.0)
        g += tg
        if np.all(np.abs(tf) + np.abs(tg) < 1e-18 * (np.abs(f) + np.abs(g))):
            break
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    return ai, aip


_BK_NODES, _BK_WEIGHTS = gl_nodes(96, 0.0, 1.0)


def _airy_positive(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Ai, Ai') for x >= ~2 via the nonoscillatory K_{1/3} integral."""
    zeta = (2.0 / 3.0) * x**1.5
    # u-range where zeta(cosh u - 1) reaches ~45
    umax = np.arccosh(1.0 + 45.0 / zeta)
    u = umax[:, None] * _BK_NODES[None, :]
    w = umax[:, None] * _BK_WEIGHTS[None, :]
    damp = np.exp(-zeta[:, None] * (np.cosh(u) - 1.0))
    k13 = np.sum(w * damp * np.cosh(u / 3.0), axis=1)
    k23 = np.sum(w * damp * np.cosh(2.0 * u / 3.0), axis=1)
    with np.errstate(under="ignore"):
        scale = np.exp(-zeta)
    ai = (1.0 / math.pi) * np.sqrt(x / 3.0) * scale * k13
    aip = -(x / (math.pi * math.sqrt(3.0))) * scale * k23
    return ai, aip


def _airy_u_coeffs(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(n)
    v = np.empty(n)
    u[0] = v[0] = 1.0
    for k in range(n - 1):
        u[k + 1] = u[k] * (6 * k + 5.0) * (6 * k + 3.0) * (6 * k + 1.0) / (
            216.0 * (2 * k + 1.0) * (k + 1.0)
        )
        v[k + 1] = -u[k + 1] * (6 * k + 7.0) / (6 * k + 5.0)
    return u, v


_AIRY_U, _AIRY_V = _airy_u_coeffs(20)


def _airy_negative(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Ai, Ai') for x <= ~-7 via the oscillatory asymptotic expansion."""
    z = -x
    zeta = (2.0 / 3.0) * z**1.5
    inv = 1.0 / zeta
    even_u = np.zeros_like(z)
    odd_u = np.zeros_like(z)
    even_v = np.zeros_like(z)
    odd_v = np.zeros_like(z)
    for k in range(0, 10):
        s = (-1.0) ** k
        even_u += s * _AIRY_U[2 * k] * inv ** (2 * k)
        odd_u += s * _AIRY_U[2 * k + 1] * inv ** (2 * k + 1)
        even_v += s * _AIRY_V[2 * k] * inv ** (2 * k)
        odd_v += s * _AIRY_V[2 * k + 1] * inv ** (2 * k + 1)
    phase = zeta - 0.25 * math.pi
    c, s_ = np.cos(phase), np.sin(phase)
    ai = (c * even_u + s_ * odd_u) / (math.sqrt(math.pi) * z**0.25)
    aip = (s_ * even_v - c * odd_v) * z**0.25 / math.sqrt(math.pi)
    return ai, aip


def _airy_both(x) -> tuple[np.ndarray, np.ndarray]:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > 1e3):
        raise DomainError("|x| <= 1e3 supported")
    deep = x < -500.0
    if deep.any():
        zeta = (2.0 / 3.0) * np.abs(x[deep]).max() ** 1.5
        digits = 16 - math.log10(zeta)
        warnings.warn(
            f"deep oscillation: ~{digits:.1f} digits delivered for x < -500",
            AccuracyLossWarning,
        )
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    neg = x <= -7.5
    mid = (x > -7.5) & (x < 4.0)
    pos = x >= 4.0
    if neg.any():
        ai[neg], aip[neg] = _airy_negative(x[neg])
    if mid.any():
        ai[mid], aip[mid] = _airy_series(x[mid])
    if pos.any():
        ai[pos], aip[pos] = _airy_positive(x[pos])
    return ai, aip


def airy_ai(x):
    """Airy function Ai(x) to ~1e-10 relative accuracy."""
    ai, _ = _airy_both(x)
    return ai if np.ndim(x) else float(ai[0])


def airy_ai_prime(x):
    """Derivative Ai'(x)."""
    _, aip = _airy_both(x)
    return aip if np.ndim(x) else float(aip[0])


# ---------------------------------------------------------------------------
# Bessel function of the first kind
# ---------------------------------------------------------------------------

def _bessel_j_series(nu: float, x: np.ndarray) -> np.ndarray:
    term = np.exp(nu * np.log(x / 2.0) - math.lgamma(nu + 1.0))
    total = term.copy()
    q = -(x * x) / 4.0
    for k in range(200):
        term = term * q / ((k + 1.0) * (nu + k + 1.0))
        total += term
        if np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(total), 1e-280)):
            break
    return total


def _bessel_j_asym(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.full_like(x, (mu - 1.0) / 8.0) / x
    term = np.full_like(x, (mu - 1.0) / 8.0) / x
    sign = -1.0
    for k in range(2, 30):
        term = term * (mu - (2.0 * k - 1.0) ** 2) / (8.0 * x * k)
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
            sign = -sign
    omega = x - 0.5 * nu * math.pi - 0.25 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (np.cos(omega) * p - np.sin(omega) * q)


def bessel_j(nu: float, x):
    """Bessel function J_nu(x), nu > -1, 0 <= x <= 1e3."""
    if not nu > -1.0:
        raise DomainError("nu > -1 required")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0.0) or np.any(x_arr > 1e3):
        raise DomainError("0 <= x <= 1e3 supported")
    if np.any(x_arr > 500.0):
        warnings.warn(
            "deep oscillation: reduced digits for x > 500", AccuracyLossWarning
        )
    out = np.empty_like(x_arr)
    zero = x_arr == 0.0
    if zero.any():
        out[zero] = 1.0 if nu == 0.0 else 0.0
    small = (~zero) & (x_arr <= 14.0)
    if small.any():
        out[small] = _bessel_j_series(nu, x_arr[small])
    large = x_arr > 14.0
    if large.any():
        out[large] = _bessel_j_asym(nu, x_arr[large])
    return out if np.ndim(x) else float(out[0])


def bessel_j_prime(nu: float, x):
    """J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr <= 0.0):
        raise DomainError("x > 0 required for the derivative identity")
    out = (nu / x_arr) * bessel_j(nu, x_arr) - bessel_j(nu + 1.0, x_arr)
    return out if np.ndim(x) else float(out[0])


# ---------------------------------------------------------------------------
# extended kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtendedKernel:
    """Two-time correlation kernel with a fast equal-time Gram path."""

    family: str
    evaluate: Callable[[float, float, float, float], float]
    equal_time_matrix: Callable[[float, np.ndarray], np.ndarray]
    domain: str  # "line" or "halfline"
    n: Optional[int] = None
    nu: Optional[float] = None


_TAIL_RATIO_FLOOR = 1e-16
_TAIL_RUN = 5


def _finite_tail_sum(ratio: float, f_terms: Callable[[int], float], n_start: int) -> float:
    """sum_{n >= n_start} ratio-weighted products, with the contract's
    5-consecutive-below-floor stopping rule."""
    if ratio >= 1.0:
        raise TailNotConverging("tail ratio >= 1; branch misuse")
    total = 0.0
    below = 0
    n = n_start
    while True:
        term = f_terms(n)
        total += term
        if abs(term) < _TAIL_RATIO_FLOOR * max(abs(total), 1e-300):
            below += 1
            if below >= _TAIL_RUN:
                return total
        else:
            below = 0
        n += 1
        if n - n_start > 200_000:  # pragma: no cover
            raise TailNotConverging("tail sum exceeded its term budget")


def kernel_hermite(n: int, s: float, x: float, t: float, y: float) -> float:
    """Extended Hermite kernel K_N(s, x; t, y) of the noncolliding BM."""
    if not (s > 0.0 and t > 0.0):
        raise DomainError("s, t > 0 required")
    xa = x / math.sqrt(2.0 * s)
    ya = y / math.sqrt(2.0 * t)
    pref = 1.0 / math.sqrt(2.0 * s)
    r = math.sqrt(t / s)
    if s <= t:
        phx = hermite_phi_sequence(n - 1, [xa])[:, 0]
        phy = hermite_phi_sequence(n - 1, [ya])[:, 0]
        powers = r ** np.arange(n)
        return pref * float(np.sum(powers * phx * phy))
    # s > t: minus the tail sum over n..inf with ratio sqrt(t/s) < 1
    assert r < 1.0
    seq_x = hermite_phi_sequence(n, [xa])[:, 0]
    seq_y = hermite_phi_sequence(n, [ya])[:, 0]
    state = {
        "xp": seq_x[n - 1] if n >= 1 else 0.0, "xc": seq_x[n],
        "yp": seq_y[n - 1] if n >= 1 else 0.0, "yc": seq_y[n],
        "pow": r**n, "k": n,
    }

    def term(_m: int) -> float:
        val = state["pow"] * state["xc"] * state["yc"]
        k = state["k"]
        c1 = math.sqrt(2.0 / (k + 1.0))
        c2 = math.sqrt(k / (k + 1.0))
        xn = c1 * xa * state["xc"] - c2 * state["xp"]
        yn = c1 * ya * state["yc"] - c2 * state["yp"]
        state.update(xp=state["xc"], xc=xn, yp=state["yc"], yc=yn)
        state["pow"] *= r
        state["k"] = k + 1
        return val

    return -pref * _finite_tail_sum(r, term, n)


def kernel_laguerre(n: int, nu: float, s: float, x: float, t: float, y: float) -> float:
    """Extended Laguerre kernel K^(nu)_N(s, x; t, y) of the Bessel system."""
    if not (s > 0.0 and t > 0.0):
        raise DomainError("s, t > 0 required")
    if x < 0.0 or y < 0.0:
        raise DomainError("x, y >= 0 required")
    if x == 0.0 or y == 0.0:
        # prefactor sqrt(xy) x^nu: continuous wall limit for nu > -1/2
        if nu > -0.5:
            return 0.0
        raise DomainError("kernel singular at the wall for nu <= -1/2")
    xa = x * x / (2.0 * s)
    ya = y * y / (2.0 * t)
    pref = math.sqrt(x * y) / s
    r = t / s
    if s <= t:
        phx = laguerre_phi_sequence(n - 1, nu, [xa])[:, 0]
        phy = laguerre_phi_sequence(n - 1, nu, [ya])[:, 0]
        powers = r ** np.arange(n)
        return pref * float(np.sum(powers * phx * phy))
    assert r < 1.0
    seq_x = laguerre_phi_sequence(n, nu, [xa])[:, 0]
    seq_y = laguerre_phi_sequence(n, nu, [ya])[:, 0]
    state = {
        "xp": seq_x[n - 1] if n >= 1 else 0.0, "xc": seq_x[n],
        "yp": seq_y[n - 1] if n >= 1 else 0.0, "yc": seq_y[n],
        "pow": r**n, "k": n,
    }

    def term(_m: int) -> float:
        val = state["pow"] * state["xc"] * state["yc"]
        k = state["k"]
        norm = math.sqrt((k + 1.0) * (k + 1.0 + nu))
        c2 = math.sqrt(k * (k + nu) / ((k + 1.0) * (k + 1.0 + nu)))
        xn = ((2.0 * k + 1.0 + nu - xa) / norm) * state["xc"] - c2 * state["xp"]
        yn = ((2.0 * k + 1.0 + nu - ya) / norm) * state["yc"] - c2 * state["yp"]
        state.update(xp=state["xc"], xc=xn, yp=state["yc"], yc=yn)
        state["pow"] *= r
        state["k"] = k + 1
        return val

    return -pref * _finite_tail_sum(r, term, n)


def kernel_sine(s: float, x: float, t: float, y: float) -> float:
    """Bulk-limit sine kernel (three time-ordering branches)."""
    d = x - y
    if s == t:
        if d == 0.0:
            return 1.0 / math.pi
        return math.sin(d) / (math.pi * d)
    if s < t:
        return (1.0 / math.pi) * fixed_quad(
            lambda u: np.exp((t - s) * u * u / 2.0) * np.cos(u * d), 0.0, 1.0, 61
        )
    width = math.sqrt(2.0 / (s - t))
    return -(1.0 / math.pi) * decaying_quad(
        lambda u: np.exp((t - s) * u * u / 2.0) * np.cos(u * d), 1.0, width
    )


def kernel_airy(s: float, x: float, t: float, y: float) -> float:
    """Soft-edge Airy kernel (extended, two branches)."""
    if s <= t:
        def f(v):
            ai_x, _ = _airy_both(x + v)
            ai_y, _ = _airy_both(y + v)
            return np.exp(-(t - s) * v / 2.0) * ai_x * ai_y

        return decaying_quad(f, 0.0, 2.0)

    def f(u):
        ai_x, _ = _airy_both(x - u)
        ai_y, _ = _airy_both(y - u)
        return np.exp((t - s) * u / 2.0) * ai_x * ai_y

    return -decaying_quad(f, 0.0, 2.0)


_HARD_SWITCH = 1e-4


def _hard_edge_integral(nu: float, dt: float, x: float, y: float) -> float:
    """int_0^2 e^{dt u^2/2} J_nu(ux) u J_nu(uy) du.

    The integrand behaves like u^{2 nu + 1} at 0; when that exponent is not
    a nonnegative integer the edge is flattened by u = 2 w^{1/(2 nu + 2)}.
    """
    edge_pow = 2.0 * nu + 1.0
    if edge_pow >= 0.0 and edge_pow == int(edge_pow):
        return fixed_quad(
            lambda u: np.exp(dt * u * u / 2.0)
            * bessel_j(nu, u * x) * u * bessel_j(nu, u * y),
            0.0, 2.0, 96,
        )
    q = 1.0 / (2.0 * nu + 2.0)

    def f(w):
        u = 2.0 * w**q
        return (
            np.exp(dt * u * u / 2.0)
            * bessel_j(nu, u * x) * u * bessel_j(nu, u * y)
            * 2.0 * q * w ** (q - 1.0)
        )

    return fixed_quad(f, 0.0, 1.0, 96)


def kernel_bessel_hard(nu: float, s: float, x: float, t: float, y: float) -> float:
    """Hard-edge Bessel kernel; equal time uses the closed (x^2 - y^2) form
    with the removable x = y singularity evaluated through the defining
    u-integral."""
    if x < 0.0 or y < 0.0:
        raise DomainError("x, y >= 0 required")
    if s == t:
        if abs(x - y) >= _HARD_SWITCH and x > 0.0 and y > 0.0:
            num = bessel_j(nu, 2.0 * x) * y * bessel_j_prime(nu, 2.0 * y) - bessel_j(
                nu, 2.0 * y
            ) * x * bessel_j_prime(nu, 2.0 * x)
            return 2.0 * math.sqrt(x * y) * num / (x * x - y * y)
        return math.sqrt(x * y) * _hard_edge_integral(nu, 0.0, x, y)
    if s < t:
        return math.sqrt(x * y) * _hard_edge_integral(nu, t - s, x, y)
    width = math.sqrt(2.0 / (s - t))
    return -math.sqrt(x * y) * decaying_quad(
        lambda u: np.exp((t - s) * u * u / 2.0)
        * bessel_j(nu, u * x) * u * bessel_j(nu, u * y),
        2.0, width,
    )


# ---------------------------------------------------------------------------
# kernel factories with fast equal-time Gram matrices
# ---------------------------------------------------------------------------

def hermite_kernel(n: int) -> ExtendedKernel:
    def gram(t: float, xs: np.ndarray) -> np.ndarray:
        phi = hermite_phi_sequence(n - 1, xs / math.sqrt(2.0 * t))
        return (phi.T @ phi) / math.sqrt(2.0 * t)

    return ExtendedKernel(
        family="HermiteN",
        evaluate=lambda s, x, t, y: kernel_hermite(n, s, x, t, y),
        equal_time_matrix=gram,
        domain="line",
        n=n,
    )


def laguerre_kernel(n: int, nu: float) -> ExtendedKernel:
    def gram(t: float, xs: np.ndarray) -> np.ndarray:
        phi = laguerre_phi_sequence(n - 1, nu, xs * xs / (2.0 * t))
        scale = np.sqrt(np.maximum(xs, 0.0))
        return (phi.T @ phi) * np.outer(scale, scale) / t

    return ExtendedKernel(
        family="LaguerreN",
        evaluate=lambda s, x, t, y: kernel_laguerre(n, nu, s, x, t, y),
        equal_time_matrix=gram,
        domain="halfline",
        n=n,
        nu=nu,
    )


def sine_kernel() -> ExtendedKernel:
    def gram(t: float, xs: np.ndarray) -> np.ndarray:
        d = xs[:, None] - xs[None, :]
        with np.errstate(invalid="ignore"):
            out = np.where(d != 0.0, np.sin(d) / (math.pi * d), 1.0 / math.pi)
        return out

    return ExtendedKernel(
        family="Sine",
        evaluate=kernel_sine,
        equal_time_matrix=gram,
        domain="line",
    )


def airy_kernel() -> ExtendedKernel:
    def gram(t: float, xs: np.ndarray) -> np.ndarray:
        # shared v-nodes: K_ij = sum_q w_q Ai(x_i + v_q) Ai(x_j + v_q)
        x_min = float(np.min(xs))
        v_hi = max(4.0, 20.0 - x_min)
        nodes, weights = gl_nodes(64, 0.0, 2.0)
        all_nodes = [nodes]
        all_weights = [weights]
        lo = 2.0
        while lo < v_hi:
            hi = min(lo * 2.0, v_hi) if lo >= 2.0 else lo + 2.0
            nd, wt = gl_nodes(64, lo, hi)
            all_nodes.append(nd)
            all_weights.append(wt)
            lo = hi
        v = np.concatenate(all_nodes)
        w = np.concatenate(all_weights)
        ai, _ = _airy_both(xs[:, None] + v[None, :])
        return (ai * w) @ ai.T

    return ExtendedKernel(
        family="Airy",
        evaluate=kernel_airy,
        equal_time_matrix=gram,
        domain="line",
    )


def bessel_hard_kernel(nu: float) -> ExtendedKernel:
    def gram(t: float, xs: np.ndarray) -> np.ndarray:
        m = len(xs)
        out = np.empty((m, m))
        for i in range(m):
            for j in range(i, m):
                out[i, j] = out[j, i] = kernel_bessel_hard(nu, t, xs[i], t, xs[j])
        return out

    return ExtendedKernel(
        family="BesselHard",
        evaluate=lambda s, x, t, y: kernel_bessel_hard(nu, s, x, t, y),
        equal_time_matrix=gram,
        domain="halfline",
        nu=nu,
    )


def correlation_function(kernel: ExtendedKernel, points) -> float:
    """Multi-time correlation: det of the block kernel matrix over points.

    ``points`` is a sequence of (time, position) pairs, at most 12 total.
    """
    pts = [(float(t), float(x)) for t, x in points]
    if len(pts) == 0:
        return 1.0
    if len(pts) > 12:
        raise SizeLimit("at most 12 points supported")
    m = len(pts)
    a = np.empty((m, m))
    for i, (ti, xi) in enumerate(pts):
        for j, (tj, xj) in enumerate(pts):
            a[i, j] = kernel.evaluate(ti, xi, tj, xj)
    return float(np.linalg.det(a))
