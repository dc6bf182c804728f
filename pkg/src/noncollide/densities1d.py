"""One-particle transition densities: Brownian motion, bridge, absorbing
motion, Bessel processes, meanders, and the modified Bessel function they
need.

All densities accept scalar or ndarray ``y`` (numpy broadcasting) and
return 0 for ``y`` outside the closed support instead of raising.  ``log_``
variants are provided for the determinant machinery, which needs exponent
extraction to survive large particle separations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import adaptive_quad
from .errors import (
    BesselIndexOutOfRange,
    DomainError,
    IntegrableSingularity,
    NonPositiveTime,
    OverflowSignal,
    TimeOrdering,
)

__all__ = [
    "DensityParams",
    "bm_density",
    "bridge_density",
    "absorbing_density",
    "survival_h",
    "bessel3_density",
    "bessel3_density_origin",
    "bessel_density",
    "bessel_i",
    "bessel_i_scaled",
    "meander_density",
    "gen_meander_density",
    "h_nu_kappa",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class DensityParams:
    """Parameters (nu, kappa, T) of the generalized-meander family."""

    nu: float
    kappa: float
    T: float

    def __post_init__(self):
        if not self.nu > -1.0:
            raise BesselIndexOutOfRange(f"nu must be > -1, got {self.nu}")
        if not 0.0 <= self.kappa <= 2.0 * (self.nu + 1.0):
            raise DomainError(f"kappa must lie in [0, 2(nu+1)], got {self.kappa}")
        if not self.T > 0.0:
            raise NonPositiveTime("horizon T must be positive")


# ---------------------------------------------------------------------------
# Brownian motion, bridge, absorbing motion
# ---------------------------------------------------------------------------

def bm_density(t: float, y, x: float):
    """Gaussian transition density of Brownian motion over duration t."""
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    y = np.asarray(y, dtype=float)
    out = np.exp(-((y - x) ** 2) / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)
    return out if out.ndim else float(out)


def log_bm_density(t: float, y, x: float):
    y = np.asarray(y, dtype=float)
    out = -0.5 * (_LOG_2PI + math.log(t)) - (y - x) ** 2 / (2.0 * t)
    return out if out.ndim else float(out)


def bridge_density(s: float, x: float, t: float, y, T: float):
    """Transition density of a Brownian bridge of duration T (pinned at 0).

    Requires 0 <= s < t < T: at t = T the density degenerates to a point
    mass at the pinning site and has no density representation.
    """
    if not (0.0 <= s < t <= T):
        raise TimeOrdering("need 0 <= s < t <= T")
    if t == T:
        raise TimeOrdering("t = T is the degenerate pinned endpoint")
    y = np.asarray(y, dtype=float)
    out = (
        bm_density(T - t, 0.0, y) * bm_density(t - s, y, x) / bm_density(T - s, 0.0, x)
    )
    return out if np.ndim(out) else float(out)


def absorbing_density(t: float, y, x: float):
    """Density of Brownian motion killed at the origin (reflection principle)."""
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    if not x > 0.0:
        raise DomainError("start point x must be positive")
    y = np.asarray(y, dtype=float)
    out = np.where(y >= 0.0, bm_density(t, y, x) - bm_density(t, -y, x), 0.0)
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def survival_h(s: float, x: float) -> float:
    """Probability that Brownian motion from x > 0 stays positive on [0, s]."""
    if not x > 0.0:
        raise DomainError("x must be positive")
    if s < 0.0:
        raise NonPositiveTime("s must be nonnegative")
    if s == 0.0:
        return 1.0
    return math.erf(x / math.sqrt(2.0 * s))


_erf_vec = np.vectorize(math.erf, otypes=[float])


def _survival_h_arr(s: float, x):
    """Array-friendly h(s, x) with the continuous boundary conventions
    h(0, x) = 1 and h(s, x) = 0 for x <= 0, s > 0."""
    x = np.asarray(x, dtype=float)
    if s == 0.0:
        out = np.ones_like(x)
    else:
        out = np.where(x > 0.0, _erf_vec(np.maximum(x, 0.0) / math.sqrt(2.0 * s)), 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Bessel processes
# ---------------------------------------------------------------------------

def bessel3_density(t: float, y, x: float):
    """Three-dimensional Bessel transition density, the h-transform
    (y/x) * absorbing_density of the killed Brownian motion."""
    if not x > 0.0:
        raise DomainError("start point x must be positive")
    y_arr = np.asarray(y, dtype=float)
    out = (y_arr / x) * absorbing_density(t, y_arr, x)
    return out if out.ndim else float(out)


def bessel3_density_origin(t: float, y):
    """Three-dimensional Bessel density started at the origin."""
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    y = np.asarray(y, dtype=float)
    out = np.where(y >= 0.0, (2.0 / t) * y**2 * bm_density(t, y, 0.0), 0.0)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Modified Bessel function I_nu
# ---------------------------------------------------------------------------

_I_SERIES_ASYMPTOTIC_SWITCH = 25.0


def _bessel_i_series_scaled(nu: float, z: np.ndarray) -> np.ndarray:
    """exp(-z) * I_nu(z) by the ascending series, for 0 < z <= ~30."""
    # all terms positive: no cancellation
    term = np.exp(nu * np.log(z / 2.0) - math.lgamma(nu + 1.0))
    total = term.copy()
    z2 = z * z / 4.0
    for k in range(400):
        term = term * z2 / ((k + 1.0) * (nu + k + 1.0))
        total += term
        if np.all(term <= 1e-18 * total):
            break
    return total * np.exp(-z)


def _bessel_i_asym_scaled(nu: float, z: np.ndarray) -> np.ndarray:
    """exp(-z) * I_nu(z) by the large-argument expansion, z >= ~25."""
    mu = 4.0 * nu * nu
    term = np.ones_like(z)
    total = np.ones_like(z)
    active = np.ones_like(z, dtype=bool)
    for k in range(1, 60):
        new = term * (mu - (2.0 * k - 1.0) ** 2) / (8.0 * z * k) * (-1.0)
        grow = np.abs(new) >= np.abs(term)
        active = active & ~grow
        term = np.where(active, new, term)
        total = np.where(active, total + new, total)
        active = active & (np.abs(term) > 1e-18 * np.abs(total))
        if not active.any():
            break
    return total / np.sqrt(2.0 * math.pi * z)


def bessel_i_scaled(nu: float, z):
    """Exponentially scaled modified Bessel function exp(-z) * I_nu(z)."""
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(z_arr < 0.0):
        raise DomainError("z must be nonnegative")
    out = np.empty_like(z_arr)
    zero = z_arr == 0.0
    if zero.any():
        out[zero] = 1.0 if nu == 0.0 else (0.0 if nu > 0.0 else math.inf)
    small = (~zero) & (z_arr <= _I_SERIES_ASYMPTOTIC_SWITCH)
    if small.any():
        out[small] = _bessel_i_series_scaled(nu, z_arr[small])
    large = z_arr > _I_SERIES_ASYMPTOTIC_SWITCH
    if large.any():
        out[large] = _bessel_i_asym_scaled(nu, z_arr[large])
    return float(out[0]) if scalar else out


def bessel_i(nu: float, z):
    """Modified Bessel function I_nu(z), z >= 0.

    Raises :class:`OverflowSignal` once exp(z) leaves the double range;
    use :func:`bessel_i_scaled` there.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z_arr > 700.0):
        zmax = float(z_arr.max())
        if zmax - 0.5 * math.log(2.0 * math.pi * zmax) > 709.0:
            raise OverflowSignal(
                f"I_nu({zmax:.3g}) exceeds double range; use bessel_i_scaled"
            )
    scaled = bessel_i_scaled(nu, z)
    return scaled * np.exp(np.asarray(z, dtype=float)) if np.ndim(z) else float(
        scaled * math.exp(float(z))
    )


def bessel_density(nu: float, t: float, y, x):
    """Transition density of the 2(nu+1)-dimensional Bessel process."""
    out = np.exp(log_bessel_density(nu, t, y, x))
    return out if (np.ndim(y) or np.ndim(x)) else float(out)


def log_bessel_density(nu: float, t: float, y, x):
    """log of :func:`bessel_density`; -inf outside the support.

    Broadcasts over both the target ``y`` and the start point ``x``
    (x = 0 entries use the Gamma-function origin form).
    """
    if not nu > -1.0:
        raise BesselIndexOutOfRange(f"nu must be > -1, got {nu}")
    if not t > 0.0:
        raise NonPositiveTime("t must be positive")
    y_b, x_b = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(x, dtype=float)
    )
    scalar = y_b.ndim == 0
    y_b = np.atleast_1d(y_b).astype(float)
    x_b = np.atleast_1d(x_b).astype(float)
    if np.any(x_b < 0.0):
        raise DomainError("start point x must be nonnegative")
    out = np.full(y_b.shape, -np.inf)
    pos = y_b > 0.0
    origin = pos & (x_b == 0.0)
    if origin.any():
        yo = y_b[origin]
        out[origin] = (
            (2.0 * nu + 1.0) * np.log(yo)
            - nu * math.log(2.0)
            - math.lgamma(nu + 1.0)
            - (nu + 1.0) * math.log(t)
            - yo * yo / (2.0 * t)
        )
    interior = pos & (x_b > 0.0)
    if interior.any():
        yi = y_b[interior]
        xi = x_b[interior]
        z = xi * yi / t
        log_i = np.log(bessel_i_scaled(nu, z)) + z
        out[interior] = (
            (nu + 1.0) * np.log(yi)
            - nu * np.log(xi)
            - math.log(t)
            - (xi * xi + yi * yi) / (2.0 * t)
            + log_i
        )
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Meanders
# ---------------------------------------------------------------------------

def meander_density(s: float, x: float, t: float, y, T: float):
    """Brownian meander transition density over the horizon [0, T].

    The start (s, x) = (0, 0) selects the origin-start form.
    """
    if not (0.0 <= s < t <= T):
        raise TimeOrdering("need 0 <= s < t <= T")
    y_arr = np.asarray(y, dtype=float)
    hy = _survival_h_arr(T - t, y_arr)
    if s == 0.0 and x == 0.0:
        out = np.where(
            y_arr >= 0.0,
            math.sqrt(2.0 * math.pi * T) / t * hy * y_arr * bm_density(t, y_arr, 0.0),
            0.0,
        )
        return out if out.ndim else float(out)
    if not x > 0.0:
        raise DomainError("x must be positive unless starting at (0, 0)")
    hx = survival_h(T - s, x)
    out = (hy / hx) * absorbing_density(t - s, y_arr, x)
    return out if np.ndim(out) else float(out)


def h_nu_kappa(params: DensityParams, t: float, x: float) -> float:
    """Meander normalizer h^(nu,kappa)_T(t, x) = int G^(nu)(T-t, y|x) y^-kappa dy.

    Closed forms at kappa = 0, at t = T, and at x = 0; adaptive quadrature
    with a power-law substitution otherwise.
    """
    nu, kappa, T = params.nu, params.kappa, params.T
    if kappa >= 2.0 * (nu + 1.0):
        raise IntegrableSingularity("kappa >= 2(nu+1): integral diverges at 0")
    if not 0.0 <= t <= T:
        raise TimeOrdering("need 0 <= t <= T")
    if kappa == 0.0:
        return 1.0
    tau = T - t
    if tau == 0.0:
        if not x > 0.0:
            raise DomainError("h at t = T requires x > 0")
        return x ** (-kappa)
    if x < 0.0:
        raise DomainError("x must be nonnegative")
    if x == 0.0:
        return (
            (2.0 * tau) ** (-kappa / 2.0)
            * math.exp(math.lgamma(nu + 1.0 - kappa / 2.0) - math.lgamma(nu + 1.0))
        )
    # substitution y = u**p flattens the y**(2 nu + 1 - kappa) edge at 0
    p = 1.0 / (2.0 + 2.0 * nu - kappa)
    y_max = x + 12.0 * math.sqrt(tau)
    u_max = y_max ** (1.0 / p)

    def integrand(u):
        yv = u**p
        dens = np.exp(log_bessel_density(nu, tau, yv, x))
        return dens * yv ** (-kappa) * p * u ** (p - 1.0)

    return adaptive_quad(integrand, 0.0, u_max, rel_tol=1e-9)


def gen_meander_density(params: DensityParams, s: float, x: float, t: float, y):
    """Generalized-meander transition density G^(nu,kappa)_T.

    (s, x) = (0, 0) selects the origin-start form.
    """
    nu, kappa, T = params.nu, params.kappa, params.T
    if not (0.0 <= s < t <= T):
        raise TimeOrdering("need 0 <= s < t <= T")
    y_arr = np.asarray(y, dtype=float)
    scalar = y_arr.ndim == 0
    y_arr = np.atleast_1d(y_arr)
    hy = np.array([
        h_nu_kappa(params, t, float(yv)) if yv > 0.0 else 0.0 for yv in y_arr
    ])
    if s == 0.0 and x == 0.0:
        const = math.exp(
            math.lgamma(nu + 1.0)
            - math.lgamma(nu + 1.0 - kappa / 2.0)
            + (kappa / 2.0) * math.log(2.0 * T)
        )
        out = const * hy * np.exp(log_bessel_density(nu, t, y_arr, 0.0))
    else:
        if not x > 0.0:
            raise DomainError("x must be positive unless starting at (0, 0)")
        hx = h_nu_kappa(params, s, x)
        out = (hy / hx) * np.exp(log_bessel_density(nu, t - s, y_arr, x))
    out = np.where(y_arr > 0.0, out, 0.0)
    return float(out[0]) if scalar else out
