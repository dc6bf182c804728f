"""Determinantal transition densities for N noncolliding particles.

The determinant of one-particle transition densities is evaluated in log
scale with per-row exponent extraction: for separated configurations the
Gaussian factors underflow long before the determinant itself is
meaningless, so all assembly happens on logs and is exponentiated last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Chamber, OrderedConfiguration, RngStream
from .densities1d import (
    bessel_i_scaled,
    log_bessel_density,
    log_bm_density,
)
from .errors import (
    BesselIndexOutOfRange,
    DivisionDegeneracy,
    DomainError,
    IntegrableSingularity,
    NonPositiveTime,
    NumericalUnderflow,
    QuadratureUnstable,
    SizeMismatch,
    TimeOrdering,
)
from ._quad import legendre_rule

__all__ = [
    "NormalizationConstants",
    "SurvivalEstimate",
    "brownian_g",
    "brownian_log_g",
    "bessel_g",
    "km_density",
    "km_log_density",
    "f_n",
    "f_n_log",
    "survival_n",
    "nn_tilde",
    "vandermonde",
    "vandermonde_alpha",
    "log_vandermonde",
    "log_vandermonde_alpha",
    "constants",
    "g_nt",
    "g_nt_origin",
    "p_n",
    "p_n_origin",
    "imhof_ratio",
    "f_n_nu",
    "f_n_nu_log",
    "g_nt_nu_kappa",
    "g_nt_nu_kappa_origin",
    "p_n_nu",
    "p_n_nu_origin",
]

_LOG_MIN_NORMAL = math.log(2.2250738585072014e-308)


# ---------------------------------------------------------------------------
# one-particle transition callbacks (s, x; t, y)
# ---------------------------------------------------------------------------

def brownian_g(s: float, x: float, t: float, y):
    return np.exp(log_bm_density(t - s, y, x))


def brownian_log_g(s: float, x: float, t: float, y):
    return log_bm_density(t - s, y, x)


def bessel_g(nu: float) -> tuple[Callable, Callable]:
    """(g, log_g) pair for the 2(nu+1)-dimensional Bessel process."""

    def g(s, x, t, y):
        return np.exp(log_bessel_density(nu, t - s, y, x))

    def log_g(s, x, t, y):
        return log_bessel_density(nu, t - s, y, x)

    return g, log_g


# ---------------------------------------------------------------------------
# log-scaled determinants
# ---------------------------------------------------------------------------

def _logdet_stable(log_a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(sign, log|det|) of exp(log_a) with per-row exponent extraction.

    log_a has shape (..., N, N); rows that are entirely -inf give det 0.
    """
    r = np.max(log_a, axis=-1, keepdims=True)
    r_safe = np.where(np.isfinite(r), r, 0.0)
    m = np.exp(log_a - r_safe)
    sign, logdet = np.linalg.slogdet(m)
    return sign, logdet + np.sum(np.squeeze(r_safe, axis=-1), axis=-1)


def _km_log_matrix(g, log_g, s, xv, t, yv):
    n = len(xv)
    a = np.empty((n, n))
    for i in range(n):
        if log_g is not None:
            a[i, :] = log_g(s, xv[i], t, yv)
        else:
            with np.errstate(divide="ignore"):
                a[i, :] = np.log(np.maximum(np.asarray(g(s, xv[i], t, yv), float), 0.0))
    return a


def _check_pair(x: OrderedConfiguration, y: OrderedConfiguration):
    if x.n != y.n:
        raise SizeMismatch(f"sizes differ: {x.n} vs {y.n}")
    if x.chamber is not y.chamber:
        raise SizeMismatch(f"chambers differ: {x.chamber} vs {y.chamber}")


def km_log_density(
    g: Callable,
    s: float,
    x: OrderedConfiguration,
    t: float,
    y: OrderedConfiguration,
    log_g: Optional[Callable] = None,
) -> tuple[float, float]:
    """(sign, log|det|) of the noncolliding transition determinant."""
    _check_pair(x, y)
    if not s < t:
        raise TimeOrdering("need s < t")
    a = _km_log_matrix(g, log_g, s, x.as_array(), t, y.as_array())
    sign, logabs = _logdet_stable(a)
    return float(sign), float(logabs)


def km_density(
    g: Callable,
    s: float,
    x: OrderedConfiguration,
    t: float,
    y: OrderedConfiguration,
    log_g: Optional[Callable] = None,
) -> float:
    """det_{ij} g(s, x_i; t, y_j), the Karlin-McGregor transition density."""
    sign, logabs = km_log_density(g, s, x, t, y, log_g)
    if sign != 0.0 and logabs < _LOG_MIN_NORMAL:
        raise NumericalUnderflow(logabs, sign)
    return float(sign * math.exp(logabs)) if sign != 0.0 else 0.0


def f_n(t: float, y: OrderedConfiguration, x: OrderedConfiguration) -> float:
    """Absorbing density of N Brownian motions in the type-A chamber."""
    return km_density(brownian_g, 0.0, x, t, y, log_g=brownian_log_g)


def f_n_log(t: float, y: OrderedConfiguration, x: OrderedConfiguration) -> tuple[float, float]:
    return km_log_density(brownian_g, 0.0, x, t, y, log_g=brownian_log_g)


# ---------------------------------------------------------------------------
# Vandermonde products and normalization constants
# ---------------------------------------------------------------------------

def vandermonde(x) -> float:
    """prod_{i<j} (x_j - x_i); sign follows the input order."""
    v = np.asarray(x, dtype=float)
    out = 1.0
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            out *= v[j] - v[i]
    return float(out)


def vandermonde_alpha(x, alpha: float) -> float:
    """prod_{i<j} (x_j^2 - x_i^2) * prod_k x_k^alpha."""
    v = np.asarray(x, dtype=float)
    if alpha != int(alpha) and np.any(v <= 0.0):
        raise DomainError("nonpositive entries need integer alpha")
    out = 1.0
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            out *= v[j] ** 2 - v[i] ** 2
    return float(out * np.prod(v**alpha))


def log_vandermonde(x) -> float:
    """log prod (x_j - x_i) for a strictly increasing x."""
    v = np.asarray(x, dtype=float)
    out = 0.0
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            d = v[j] - v[i]
            if d <= 0.0:
                return -math.inf
            out += math.log(d)
    return out


def log_vandermonde_alpha(x, alpha: float) -> float:
    """log of vandermonde_alpha for strictly increasing positive x."""
    v = np.asarray(x, dtype=float)
    out = 0.0
    for i in range(len(v)):
        if v[i] <= 0.0:
            return -math.inf
        out += alpha * math.log(v[i])
        for j in range(i + 1, len(v)):
            d = v[j] ** 2 - v[i] ** 2
            if d <= 0.0:
                return -math.inf
            out += math.log(d)
    return out


@dataclass(frozen=True)
class NormalizationConstants:
    """C1, C2, C^(nu), C^(nu,kappa) for size N, kept in log domain.

    The exponentiated fields overflow to inf around N ~ 35; every ratio
    used by the density formulas is assembled from the log fields.
    """

    n: int
    nu: float
    kappa: float
    log_c1: float
    log_c2: float
    log_c_nu: float
    log_c_nu_kappa: float

    @property
    def c1(self) -> float:
        return math.exp(self.log_c1) if self.log_c1 < 709.0 else math.inf

    @property
    def c2(self) -> float:
        return math.exp(self.log_c2) if self.log_c2 < 709.0 else math.inf

    @property
    def c_nu(self) -> float:
        return math.exp(self.log_c_nu) if self.log_c_nu < 709.0 else math.inf

    @property
    def c_nu_kappa(self) -> float:
        return math.exp(self.log_c_nu_kappa) if self.log_c_nu_kappa < 709.0 else math.inf


def constants(n: int, nu: float = 0.0, kappa: float = 0.0) -> NormalizationConstants:
    """Normalization constants by log-gamma accumulation."""
    if n < 1:
        raise DomainError("N >= 1 required")
    if not nu > -1.0:
        raise BesselIndexOutOfRange(f"nu must be > -1, got {nu}")
    if kappa >= 2.0 * (nu + 1.0):
        raise IntegrableSingularity("kappa >= 2(nu+1)")
    i = np.arange(1, n + 1, dtype=float)
    lg = math.lgamma
    log_c1 = 0.5 * n * math.log(2.0 * math.pi) + sum(lg(v) for v in i)
    log_c2 = 0.5 * n * math.log(2.0) + sum(lg(v / 2.0) for v in i)
    log_c_nu = n * (n + nu - 1.0) * math.log(2.0) + sum(lg(v) + lg(v + nu) for v in i)
    log_c_nk = (
        0.5 * n * (n + 2.0 * nu - kappa - 1.0) * math.log(2.0)
        - 0.5 * n * math.log(math.pi)
        + sum(lg(v / 2.0) + lg((v + 2.0 * nu + 1.0 - kappa) / 2.0) for v in i)
    )
    return NormalizationConstants(
        n=n, nu=nu, kappa=kappa,
        log_c1=log_c1, log_c2=log_c2, log_c_nu=log_c_nu, log_c_nu_kappa=log_c_nk,
    )


# ---------------------------------------------------------------------------
# survival probabilities (quadrature N <= 3, Monte Carlo N >= 4)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurvivalEstimate:
    """Noncollision probability with its standard error (0 for quadrature)."""

    value: float
    stderr: float
    method: str

    def __float__(self) -> float:
        return self.value


def _ordered_tensor_grid(m: int, lo: float, hi: float, n: int, first_power: float = 1.0):
    """Nodes/weights of a nested map of [0,1]^n onto the ordered region
    lo < y_1 < ... < y_n < hi.  first_power > 1 compresses the y_1 ~ lo edge."""
    u, w = legendre_rule(m)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([u] * n), indexing="ij")
    wgrids = np.meshgrid(*([w] * n), indexing="ij")
    ys = []
    jac = np.ones_like(grids[0])
    prev = np.full_like(grids[0], lo)
    for k in range(n):
        uk = grids[k]
        if k == 0 and first_power != 1.0:
            span = hi - lo
            yk = lo + span * uk**first_power
            jac = jac * span * first_power * uk ** (first_power - 1.0)
        else:
            yk = prev + (hi - prev) * uk
            jac = jac * (hi - prev)
        ys.append(yk)
        prev = yk
    weight = jac
    for k in range(n):
        weight = weight * wgrids[k]
    pts = np.stack([y.ravel() for y in ys], axis=-1)
    return pts, weight.ravel()


def _fn_values(t: float, y_pts: np.ndarray, xv: np.ndarray) -> np.ndarray:
    """Vectorized f_N(t, y|x) over stacked configurations y_pts (P, N)."""
    a = log_bm_density(t, y_pts[:, None, :], xv[None, :, None])
    sign, logabs = _logdet_stable(a)
    return sign * np.exp(logabs)


def _survival_quad(t: float, xv: np.ndarray, m: int) -> float:
    lo = xv[0] - 6.5 * math.sqrt(t)
    hi = xv[-1] + 6.5 * math.sqrt(t)
    pts, w = _ordered_tensor_grid(m, lo, hi, len(xv))
    return float(np.dot(w, _fn_values(t, pts, xv)))


_GEOMETRIC_CHECKS = 256


def _geometric_times(t: float, k: int = _GEOMETRIC_CHECKS) -> np.ndarray:
    # spans t * 2**-32 .. t; refining k tightens the ratio, not the span
    return t * 2.0 ** ((np.arange(1, k + 1) - k) * (32.0 / k))


def _survival_mc(
    t: float, xv: np.ndarray, stream: RngStream, n_paths: int, checks: int
) -> tuple[float, float]:
    times = _geometric_times(t, checks)
    incs = np.diff(np.concatenate([[0.0], times]))
    n = len(xv)
    alive_total = 0
    done = 0
    chunk = max(1, min(n_paths, int(2e7 / (checks * n))))
    while done < n_paths:
        c = min(chunk, n_paths - done)
        z = stream.normal((c, checks, n))
        paths = xv[None, None, :] + np.cumsum(z * np.sqrt(incs)[None, :, None], axis=1)
        ordered = np.all(np.diff(paths, axis=2) > 0.0, axis=(1, 2))
        alive_total += int(ordered.sum())
        done += c
    p = alive_total / n_paths
    stderr = math.sqrt(max(p * (1.0 - p), 1.0 / n_paths) / n_paths)
    return p, stderr


def survival_n(
    t: float,
    x: OrderedConfiguration,
    stream: Optional[RngStream] = None,
    n_paths: int = 200_000,
    mc_checks: int = _GEOMETRIC_CHECKS,
) -> SurvivalEstimate:
    """Probability N_N(t, x) that N Brownian motions from x stay ordered on [0, t].

    Quadrature (relative error ~1e-6) for N <= 3; Monte Carlo with a
    geometric collision-check grid for N >= 4 (stream required).
    """
    if x.chamber is not Chamber.A:
        raise DomainError("survival_n is defined on chamber A")
    if t < 0.0:
        raise NonPositiveTime("t must be nonnegative")
    if t == 0.0 or x.n == 1:
        return SurvivalEstimate(1.0, 0.0, "exact")
    xv = x.as_array()
    if x.n <= 3:
        m = 40 if x.n == 3 else 64
        coarse = _survival_quad(t, xv, m)
        fine = _survival_quad(t, xv, 2 * m)
        if abs(fine - coarse) > 1e-6 * max(abs(fine), 1e-300):
            finest = _survival_quad(t, xv, 3 * m)
            if abs(finest - fine) > 1e-6 * max(abs(finest), 1e-300):
                raise QuadratureUnstable("survival quadrature did not converge")
            fine = finest
        return SurvivalEstimate(float(fine), 0.0, "quadrature")
    if stream is None:
        raise DomainError("N >= 4 survival needs an RngStream for Monte Carlo")
    p, se = _survival_mc(t, xv, stream, n_paths, mc_checks)
    return SurvivalEstimate(p, se, "mc")


# ---------------------------------------------------------------------------
# noncolliding Brownian motion densities
# ---------------------------------------------------------------------------

def g_nt(
    s: float,
    x: OrderedConfiguration,
    t: float,
    y: OrderedConfiguration,
    T: float,
    stream: Optional[RngStream] = None,
    return_stderr: bool = False,
    mc_paths: int = 200_000,
):
    """Transition density of the noncolliding Brownian motion on (0, T]."""
    if not (0.0 <= s < t <= T):
        raise TimeOrdering("need 0 <= s < t <= T")
    ny = survival_n(T - t, y, stream, n_paths=mc_paths)
    nx = survival_n(T - s, x, stream, n_paths=mc_paths)
    sign, logf = f_n_log(t - s, y, x)
    if nx.value <= 0.0:
        raise DivisionDegeneracy("survival of the start configuration underflowed")
    val = sign * math.exp(logf + math.log(ny.value) - math.log(nx.value)) if ny.value > 0 else 0.0
    if not return_stderr:
        return val
    rel = 0.0
    if ny.value > 0.0:
        rel = math.hypot(ny.stderr / ny.value, nx.stderr / nx.value)
    return val, abs(val) * rel


def _log_g_nt_origin(t: float, yv: np.ndarray, T: float, n_surv: float) -> float:
    n = len(yv)
    c = constants(n)
    return (
        0.25 * n * (n - 1.0) * math.log(T)
        - 0.5 * n * n * math.log(t)
        - c.log_c2
        + math.log(n_surv)
        + log_vandermonde(yv)
        - float(np.dot(yv, yv)) / (2.0 * t)
    ) if n_surv > 0.0 else -math.inf


def g_nt_origin(
    t: float,
    y: OrderedConfiguration,
    T: float,
    stream: Optional[RngStream] = None,
) -> float:
    """Density at time t of N noncolliding Brownian motions started at 0."""
    if not (0.0 < t <= T):
        raise TimeOrdering("need 0 < t <= T")
    if y.chamber is not Chamber.A:
        raise DomainError("chamber A required")
    surv = survival_n(T - t, y, stream)
    logv = _log_g_nt_origin(t, y.as_array(), T, surv.value)
    return math.exp(logv) if logv > -math.inf else 0.0


def p_n(t: float, y: OrderedConfiguration, x: OrderedConfiguration) -> float:
    """Transition density of the temporally homogeneous noncolliding BM."""
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    _check_pair(x, y)
    sign, logf = f_n_log(t, y, x)
    if sign <= 0.0:
        return 0.0
    logv = logf + log_vandermonde(y.as_array()) - log_vandermonde(x.as_array())
    return math.exp(logv)


def _log_p_n_origin(t: float, yv: np.ndarray) -> float:
    n = len(yv)
    c = constants(n)
    return (
        -0.5 * n * n * math.log(t)
        - c.log_c1
        + 2.0 * log_vandermonde(yv)
        - float(np.dot(yv, yv)) / (2.0 * t)
    )


def p_n_origin(t: float, y: OrderedConfiguration) -> float:
    """Density at time t of the homogeneous process started at the origin."""
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    if y.chamber is not Chamber.A:
        raise DomainError("chamber A required")
    return math.exp(_log_p_n_origin(t, y.as_array()))


def imhof_ratio(
    t: float, y: OrderedConfiguration, T: float, stream: Optional[RngStream] = None
) -> float:
    """g_nt_origin / p_n_origin, the multidimensional Imhof density ratio."""
    if not (0.0 < t <= T):
        raise TimeOrdering("need 0 < t <= T")
    yv = y.as_array()
    log_p = _log_p_n_origin(t, yv)
    if log_p < _LOG_MIN_NORMAL:
        raise DivisionDegeneracy("p_n_origin underflows at this configuration")
    surv = survival_n(T - t, y, stream)
    log_g = _log_g_nt_origin(t, yv, T, surv.value)
    return math.exp(log_g - log_p) if log_g > -math.inf else 0.0


# ---------------------------------------------------------------------------
# noncolliding Bessel / generalized-meander densities
# ---------------------------------------------------------------------------

def _check_positive_config(x: OrderedConfiguration, nu: float):
    if nu >= 0.0:
        if x.chamber is not Chamber.C:
            raise DomainError("chamber C required for nu >= 0")
    else:
        if x.chamber not in (Chamber.C, Chamber.D):
            raise DomainError("chamber C or D required")
        if x.values[0] < 0.0:
            raise DomainError("only the nonnegative branch is implemented")


def f_n_nu_log(
    nu: float, t: float, y: OrderedConfiguration, x: OrderedConfiguration
) -> tuple[float, float]:
    """(sign, log) of the noncolliding Bessel absorbing density f_N^(nu)."""
    if not nu > -1.0:
        raise BesselIndexOutOfRange(f"nu must be > -1, got {nu}")
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    _check_pair(x, y)
    _check_positive_config(x, nu)
    xv, yv = x.as_array(), y.as_array()
    if np.any(xv <= 0.0):
        raise DomainError("start coordinates must be strictly positive")
    if yv[0] == 0.0:
        return 0.0, -math.inf
    z = np.outer(xv, yv) / t
    with np.errstate(divide="ignore"):
        a = np.log(bessel_i_scaled(nu, z)) + z
    sign, logdet = _logdet_stable(a)
    logv = (
        -len(xv) * math.log(t)
        + float(np.sum((nu + 1.0) * np.log(yv) - nu * np.log(xv)))
        - float(np.dot(xv, xv) + np.dot(yv, yv)) / (2.0 * t)
        + logdet
    )
    return float(sign), float(logv)


def f_n_nu(nu: float, t: float, y: OrderedConfiguration, x: OrderedConfiguration) -> float:
    sign, logv = f_n_nu_log(nu, t, y, x)
    if sign != 0.0 and logv < _LOG_MIN_NORMAL:
        raise NumericalUnderflow(logv, sign)
    return float(sign * math.exp(logv)) if sign != 0.0 else 0.0


def _fn_nu_values(nu: float, t: float, y_pts: np.ndarray, xv: np.ndarray) -> np.ndarray:
    """Vectorized f_N^(nu)(t, y|x) over stacked configurations (P, N)."""
    z = xv[None, :, None] * y_pts[:, None, :] / t
    flat = z.reshape(-1)
    with np.errstate(divide="ignore"):
        a = np.log(bessel_i_scaled(nu, flat)).reshape(z.shape) + z
    sign, logdet = _logdet_stable(a)
    with np.errstate(divide="ignore"):
        pref = (
            -len(xv) * math.log(t)
            + np.sum((nu + 1.0) * np.log(y_pts), axis=1)
            - float(np.sum(nu * np.log(xv)))
            - (float(np.dot(xv, xv)) + np.sum(y_pts**2, axis=1)) / (2.0 * t)
        )
    return sign * np.exp(logdet + pref)


def nn_tilde(
    nu: float,
    kappa: float,
    t: float,
    x: OrderedConfiguration,
    stream: Optional[RngStream] = None,
    n_paths: int = 200_000,
    mc_checks: int = _GEOMETRIC_CHECKS,
) -> SurvivalEstimate:
    """Weighted survival N~^(nu,kappa)(t, x) = E[prod Y_i(t)^-kappa; ordered].

    Quadrature for N <= 3, exact Bessel-bridge-free Monte Carlo (noncentral
    chi-square stepping) for N >= 4.
    """
    if not nu > -1.0:
        raise BesselIndexOutOfRange(f"nu must be > -1, got {nu}")
    if kappa >= 2.0 * (nu + 1.0):
        raise IntegrableSingularity("kappa >= 2(nu+1)")
    _check_positive_config(x, nu)
    xv = x.as_array()
    if t < 0.0:
        raise NonPositiveTime("t must be nonnegative")
    if t == 0.0:
        return SurvivalEstimate(float(np.prod(xv ** (-kappa))), 0.0, "exact")
    if x.n <= 3:
        hi = xv[-1] + 6.5 * math.sqrt(t)
        power = max(1.0, 1.0 / (2.0 + 2.0 * nu - kappa))

        def quad(m):
            pts, w = _ordered_tensor_grid(m, 0.0, hi, x.n, first_power=power)
            vals = _fn_nu_values(nu, t, pts, xv) * np.prod(pts ** (-kappa), axis=1)
            return float(np.dot(w, vals))

        m = 40 if x.n == 3 else 64
        coarse, fine = quad(m), quad(2 * m)
        if abs(fine - coarse) > 2e-6 * max(abs(fine), 1e-300):
            finest = quad(3 * m)
            if abs(finest - fine) > 2e-6 * max(abs(finest), 1e-300):
                raise QuadratureUnstable("nn_tilde quadrature did not converge")
            fine = finest
        return SurvivalEstimate(float(fine), 0.0, "quadrature")
    if stream is None:
        raise DomainError("N >= 4 nn_tilde needs an RngStream")
    times = _geometric_times(t, mc_checks)
    incs = np.diff(np.concatenate([[0.0], times]))
    n = x.n
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = max(1, min(n_paths, int(5e6 / n)))
    while done < n_paths:
        c = min(chunk, n_paths - done)
        sq = np.broadcast_to((xv**2)[None, :], (c, n)).copy()
        ordered = np.ones(c, dtype=bool)
        for dt_k in incs:
            pois = stream.poisson(sq / (2.0 * dt_k))
            sq = 2.0 * dt_k * stream.gamma(nu + 1.0 + pois)
            ordered &= np.all(np.diff(sq, axis=1) > 0.0, axis=1) & (sq[:, 0] > 0.0)
        w = np.where(ordered, np.prod(sq ** (-kappa / 2.0), axis=1), 0.0)
        total += float(w.sum())
        total_sq += float((w**2).sum())
        done += c
    mean = total / n_paths
    var = max(total_sq / n_paths - mean**2, 0.0)
    return SurvivalEstimate(mean, math.sqrt(var / n_paths), "mc")


def g_nt_nu_kappa(
    params,
    s: float,
    x: OrderedConfiguration,
    t: float,
    y: OrderedConfiguration,
    stream: Optional[RngStream] = None,
) -> float:
    """Transition density of the noncolliding generalized meander."""
    T = params.T
    if not (0.0 <= s < t <= T):
        raise TimeOrdering("need 0 <= s < t <= T")
    ny = nn_tilde(params.nu, params.kappa, T - t, y, stream)
    nx = nn_tilde(params.nu, params.kappa, T - s, x, stream)
    if nx.value <= 0.0:
        raise DivisionDegeneracy("weighted survival of the start underflowed")
    sign, logf = f_n_nu_log(params.nu, t - s, y, x)
    if sign <= 0.0 or ny.value <= 0.0:
        return 0.0
    return math.exp(logf + math.log(ny.value) - math.log(nx.value))


def g_nt_nu_kappa_origin(
    params,
    t: float,
    y: OrderedConfiguration,
    stream: Optional[RngStream] = None,
) -> float:
    """Origin-start density of the noncolliding generalized meander."""
    T, nu, kappa = params.T, params.nu, params.kappa
    if not (0.0 < t <= T):
        raise TimeOrdering("need 0 < t <= T")
    _check_positive_config(y, nu)
    n = y.n
    yv = y.as_array()
    surv = nn_tilde(nu, kappa, T - t, y, stream)
    if surv.value <= 0.0:
        return 0.0
    c = constants(n, nu, kappa)
    logv = (
        0.5 * n * (n + kappa - 1.0) * math.log(T)
        - n * (n + nu) * math.log(t)
        - c.log_c_nu_kappa
        + math.log(surv.value)
        + log_vandermonde_alpha(yv, 2.0 * nu + 1.0)
        - float(np.dot(yv, yv)) / (2.0 * t)
    )
    return math.exp(logv)


def p_n_nu(nu: float, t: float, y: OrderedConfiguration, x: OrderedConfiguration) -> float:
    """Transition density of the noncolliding Bessel process."""
    sign, logf = f_n_nu_log(nu, t, y, x)
    if sign <= 0.0:
        return 0.0
    logv = (
        logf
        + log_vandermonde_alpha(y.as_array(), 0.0)
        - log_vandermonde_alpha(x.as_array(), 0.0)
    )
    return math.exp(logv)


def _log_p_n_nu_origin(nu: float, t: float, yv: np.ndarray) -> float:
    n = len(yv)
    c = constants(n, nu)
    return (
        -n * (n + nu) * math.log(t)
        - c.log_c_nu
        + 2.0 * log_vandermonde_alpha(yv, nu + 0.5)
        - float(np.dot(yv, yv)) / (2.0 * t)
    )


def p_n_nu_origin(nu: float, t: float, y: OrderedConfiguration) -> float:
    """Origin-start density of the noncolliding Bessel process."""
    if not nu > -1.0:
        raise BesselIndexOutOfRange(f"nu must be > -1, got {nu}")
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    _check_positive_config(y, nu)
    logv = _log_p_n_nu_origin(nu, t, y.as_array())
    return math.exp(logv) if math.isfinite(logv) else 0.0
