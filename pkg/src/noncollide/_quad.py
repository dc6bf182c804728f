"""Internal quadrature machinery: Golub-Welsch rules and adaptive panels.

The public quadrature surface lives in :mod:`noncollide.fredholm`; this
module holds the cached Legendre rules and the panel drivers that the
density and kernel modules share.  All integrands are expected to be
vectorized over numpy arrays.
"""

from __future__ import annotations

import functools
from typing import Callable

import numpy as np

from .errors import QuadratureUnstable


@functools.lru_cache(maxsize=128)
def legendre_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1] via the Jacobi matrix."""
    if m < 1:
        raise ValueError("m >= 1 required")
    if m == 1:
        return np.array([0.0]), np.array([2.0])
    k = np.arange(1, m)
    beta = k / np.sqrt(4.0 * k * k - 1.0)
    jac = np.diag(beta, 1) + np.diag(beta, -1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = 2.0 * vecs[0, :] ** 2
    return nodes, weights


def gl_nodes(m: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule mapped to (a, b)."""
    x, w = legendre_rule(m)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def fixed_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, m: int = 61) -> float:
    x, w = gl_nodes(m, a, b)
    return float(np.dot(w, f(x)))


def adaptive_quad(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    max_depth: int = 24,
) -> float:
    """Adaptive bisection with an embedded 30/61-point Legendre pair.

    The error estimate per panel is |GL61 - GL30|; panels are split until
    the estimate is below the panel's share of the tolerance.
    """
    total_scale = abs(fixed_quad(f, a, b, 61)) + abs_tol

    def recurse(lo: float, hi: float, depth: int) -> float:
        coarse = fixed_quad(f, lo, hi, 30)
        fine = fixed_quad(f, lo, hi, 61)
        err = abs(fine - coarse)
        tol_here = max(rel_tol * max(total_scale, abs(fine)), abs_tol, 1e-300)
        if err <= tol_here or depth >= max_depth:
            if depth >= max_depth and err > 100.0 * tol_here:
                raise QuadratureUnstable(
                    f"panel [{lo:.6g},{hi:.6g}] error {err:.3g} after max depth"
                )
            return fine
        mid = 0.5 * (lo + hi)
        return recurse(lo, mid, depth + 1) + recurse(mid, hi, depth + 1)

    return recurse(float(a), float(b), 0)


def decaying_quad(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    width: float,
    panel_tol: float = 1e-12,
    m: int = 61,
    max_panels: int = 400,
) -> float:
    """Integrate a decaying f on [a, inf) by panels of doubling width.

    Stops once a panel contributes less than ``panel_tol`` times the
    accumulated absolute total (and below panel_tol absolutely when the
    total is ~0).
    """
    total = 0.0
    abs_scale = 0.0
    lo = float(a)
    w = float(width)
    for i in range(max_panels):
        hi = lo + w
        part = fixed_quad(f, lo, hi, m)
        total += part
        abs_scale = max(abs_scale, abs(total), abs(part))
        if i >= 2 and abs(part) < panel_tol * max(abs_scale, 1e-300):
            return total
        lo = hi
        if i >= 4:
            w *= 2.0
    raise QuadratureUnstable("decaying integral did not converge within panel budget")
