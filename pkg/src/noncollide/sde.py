"""Euler-Maruyama integrators for Dyson's Brownian motion model and the
noncolliding Bessel system.

Singular drifts are handled by rejection: a proposed substep that leaves
the open chamber is discarded (noise included) and retried with half the
step, down to dt_max / 2**10.  Discarding the noise preserves the law on
accepted increments because the increments are exchangeable.  Starts from
the all-zero configuration are bootstrapped by one exact ensemble sample,
since no Euler step can split coinciding particles correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import Chamber, OrderedConfiguration, RngStream, TimeGrid, validate_chamber
from .ensembles import EnsembleKind, sample_spectra
from .errors import BetaOutOfRange, DomainError, NuOutOfRange, StepFloorReached

__all__ = ["SdeRun", "simulate_dyson", "simulate_bessel_system",
           "dyson_cloud", "bessel_cloud", "dump_path_csv"]

_MAX_HALVINGS = 10


@dataclass
class SdeRun:
    """One realized path: positions at the output grid times."""

    system: str
    param: float  # beta for dyson, nu for the bessel system
    x0: object  # OrderedConfiguration, or an all-zero sequence for the origin start
    grid: TimeGrid
    paths: np.ndarray  # (n_times, n_particles)
    step_stats: dict = field(default_factory=dict)


def _dyson_drift(beta: float):
    def drift(x: np.ndarray) -> np.ndarray:
        diff = x[:, :, None] - x[:, None, :]
        with np.errstate(divide="ignore"):
            inv = np.where(diff != 0.0, 1.0 / diff, 0.0)
        return 0.5 * beta * inv.sum(axis=2)

    return drift


def _bessel_drift(nu: float):
    def drift(x: np.ndarray) -> np.ndarray:
        sq = x * x
        diff = sq[:, :, None] - sq[:, None, :]
        with np.errstate(divide="ignore"):
            inv = np.where(diff != 0.0, 1.0 / diff, 0.0)
        return (nu + 0.5) / x + 2.0 * x * inv.sum(axis=2)

    return drift


def _ordered_rows(x: np.ndarray, positive: bool) -> np.ndarray:
    ok = np.all(np.diff(x, axis=1) > 0.0, axis=1) if x.shape[1] > 1 else np.ones(len(x), bool)
    if positive:
        ok = ok & (x[:, 0] > 0.0)
    return ok


class _Engine:
    def __init__(self, drift, positive: bool, reflect: bool, stream: RngStream):
        self.drift = drift
        self.positive = positive
        self.reflect = reflect
        self.stream = stream
        self.rejected = 0
        self.max_depth = 0

    def _valid(self, x: np.ndarray, h: float) -> np.ndarray:
        """Chamber membership plus drift resolvability at step size h.

        A state whose next drift increment would cover more than a quarter
        of the distance to the chamber boundary is rejected: the explicit
        scheme cannot resolve the singular layer there, and accepting such
        states strands paths where no admissible step exists.
        """
        ok = _ordered_rows(x, self.positive)
        if not ok.any():
            return ok
        dist = np.full_like(x, np.inf)
        if x.shape[1] > 1:
            gaps = np.diff(x, axis=1)
            dist[:, :-1] = gaps
            dist[:, 1:] = np.minimum(dist[:, 1:], gaps)
        if self.positive:
            dist[:, 0] = np.minimum(dist[:, 0], x[:, 0])
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            # NaN drift compares False, which is the conservative outcome
            stable = np.all(np.abs(self.drift(x)) * h <= 0.25 * dist, axis=1)
        return ok & stable

    def _propose(self, x: np.ndarray, h: float) -> np.ndarray:
        prop = x + self.drift(x) * h + math.sqrt(h) * self.stream.normal(x.shape)
        return np.abs(prop) if self.reflect else prop

    def _step(self, x: np.ndarray, h: float, depth: int) -> np.ndarray:
        prop = self._propose(x, h)
        bad = ~self._valid(prop, h)
        if not bad.any():
            return prop
        self.rejected += int(bad.sum())
        self.max_depth = max(self.max_depth, depth + 1)
        if depth >= _MAX_HALVINGS:
            # at the floor: bounded same-size retries before giving up
            idx = np.flatnonzero(bad)
            for _ in range(200):
                retry = self._propose(x[idx], h)
                ok = self._valid(retry, h)
                prop[idx[ok]] = retry[ok]
                idx = idx[~ok]
                if len(idx) == 0:
                    return prop
                self.rejected += len(idx)
            raise StepFloorReached(
                f"{len(idx)} paths rejected at dt_max/2**{_MAX_HALVINGS}"
            )
        sub = self._step(x[bad], h / 2.0, depth + 1)
        sub = self._step(sub, h / 2.0, depth + 1)
        prop[bad] = sub
        return prop

    def advance(
        self, x: np.ndarray, t_from: float, t_to: float, dt_max: float, warmup: bool
    ) -> np.ndarray:
        """Advance from t_from to t_to; ``warmup`` enables time-proportional
        substeps (h <= 0.05 t) that resolve the singular drift after a
        zero start."""
        if warmup:
            t = t_from
            while t < t_to - 1e-15:
                h = min(dt_max, max(0.05 * t, 1e-4 * dt_max), t_to - t)
                if t_to - (t + h) < 0.5 * h:
                    h = t_to - t
                x = self._step(x, h, 0)
                t += h
            return x
        n_steps = max(1, int(math.ceil((t_to - t_from) / dt_max - 1e-12)))
        h = (t_to - t_from) / n_steps
        for _ in range(n_steps):
            x = self._step(x, h, 0)
        return x


def _bootstrap_dyson(beta: float, n: int, t: float, count: int, stream: RngStream) -> np.ndarray:
    if n == 1:
        return math.sqrt(t) * stream.normal((count, 1))
    if beta == 2.0:
        return sample_spectra(EnsembleKind("gue", n), t, count, stream)
    if beta == 1.0:
        return sample_spectra(EnsembleKind("goe", n), t, count, stream)
    if beta == 4.0:
        return sample_spectra(EnsembleKind("gse", n), t, count, stream, distinct=True)
    lam = sample_spectra(EnsembleKind("beta_tridiagonal", n, beta=beta), 1.0, count, stream)
    return lam * math.sqrt(t)


def _bootstrap_bessel(nu: float, n: int, t: float, count: int, stream: RngStream) -> np.ndarray:
    if n == 1:
        # squared Bessel from 0 at time t is 2t * Gamma(nu + 1)
        return np.sqrt(2.0 * t * stream.gamma(nu + 1.0, size=(count, 1)))
    if nu == int(nu) and nu >= 0:
        lam = sample_spectra(EnsembleKind("laguerre", n, nu=int(nu)), t, count, stream)
        return np.sqrt(lam)
    if nu == 0.5:
        return sample_spectra(EnsembleKind("class_c", n), t, count, stream, distinct=True)
    if nu == -0.5:
        return sample_spectra(EnsembleKind("class_d", n), t, count, stream, distinct=True)
    raise DomainError(
        f"zero start not realizable for nu={nu}: no exact ensemble bootstrap"
    )


def _run_cloud(
    system: str,
    param: float,
    x0,
    grid: TimeGrid,
    stream: RngStream,
    dt_max: float,
    n_paths: int,
) -> tuple[np.ndarray, dict]:
    times = grid.as_array()
    if times[0] <= 0.0:
        raise DomainError("output times must be positive")
    if not dt_max > 0.0:
        raise DomainError("dt_max must be positive")

    if system == "dyson":
        drift, positive, reflect = _dyson_drift(param), False, False
        bootstrap = lambda n, t, c: _bootstrap_dyson(param, n, t, c, stream)
        chamber = Chamber.A
    else:
        drift, positive, reflect = _bessel_drift(param), True, param == -0.5
        bootstrap = lambda n, t, c: _bootstrap_bessel(param, n, t, c, stream)
        chamber = Chamber.C

    if x0 is None:
        raise DomainError("x0 required (configuration or the all-zero start)")
    xv = x0.as_array() if isinstance(x0, OrderedConfiguration) else np.asarray(x0, float)
    n = len(xv)
    zero_start = bool(np.all(xv == 0.0))
    if not zero_start:
        validate_chamber(xv, chamber)

    eng = _Engine(drift, positive, reflect, stream)
    out = np.empty((n_paths, len(times), n))
    if zero_start:
        t_cur = min(dt_max, times[0])
        x = bootstrap(n, t_cur, n_paths)
    else:
        t_cur = 0.0
        x = np.broadcast_to(xv, (n_paths, n)).copy()
    for k, t_out in enumerate(times):
        if t_out > t_cur:
            x = eng.advance(x, t_cur, t_out, dt_max, warmup=zero_start)
            t_cur = t_out
        out[:, k, :] = x
    if not np.all(_ordered_rows(out.reshape(-1, n), positive)):
        raise StepFloorReached("chamber violated at an output time")  # pragma: no cover
    stats = {"rejected_steps": eng.rejected, "max_halving_depth": eng.max_depth}
    return out, stats


def simulate_dyson(
    beta: float,
    x0: OrderedConfiguration | Sequence[float],
    grid: TimeGrid,
    stream: RngStream,
    dt_max: float = 1e-3,
) -> SdeRun:
    """One path of Dyson's Brownian motion model with parameter beta >= 1."""
    if beta < 1.0:
        raise BetaOutOfRange("beta >= 1 required: collisions occur below 1")
    cloud, stats = _run_cloud("dyson", beta, x0, grid, stream, dt_max, 1)
    return SdeRun("dyson", beta, x0, grid, cloud[0], stats)


def simulate_bessel_system(
    nu: float,
    x0: OrderedConfiguration | Sequence[float],
    grid: TimeGrid,
    stream: RngStream,
    dt_max: float = 1e-3,
) -> SdeRun:
    """One path of the noncolliding Bessel system with index nu >= -1/2.

    nu = -1/2 gets a reflecting wall at the origin (absolute value after
    each substep).
    """
    if nu < -0.5:
        raise NuOutOfRange("nu >= -1/2 required: not a semimartingale below")
    cloud, stats = _run_cloud("bessel", nu, x0, grid, stream, dt_max, 1)
    return SdeRun("bessel", nu, x0, grid, cloud[0], stats)


def dyson_cloud(
    beta: float,
    x0: OrderedConfiguration | Sequence[float],
    grid: TimeGrid,
    stream: RngStream,
    dt_max: float,
    n_paths: int,
) -> np.ndarray:
    """(n_paths, n_times, N) Dyson paths evolved in lockstep from one stream."""
    if beta < 1.0:
        raise BetaOutOfRange("beta >= 1 required")
    cloud, _ = _run_cloud("dyson", beta, x0, grid, stream, dt_max, n_paths)
    return cloud


def bessel_cloud(
    nu: float,
    x0: OrderedConfiguration | Sequence[float],
    grid: TimeGrid,
    stream: RngStream,
    dt_max: float,
    n_paths: int,
) -> np.ndarray:
    """(n_paths, n_times, N) Bessel-system paths in lockstep."""
    if nu < -0.5:
        raise NuOutOfRange("nu >= -1/2 required")
    cloud, _ = _run_cloud("bessel", nu, x0, grid, stream, dt_max, n_paths)
    return cloud


def dump_path_csv(run: SdeRun, seed: Optional[int] = None) -> str:
    """CSV dump ``time,particle_index,position`` with a full parameter echo."""
    head = (
        f"# system={run.system} param={run.param!r} n={run.paths.shape[1]} "
        f"grid={list(run.grid.times)!r} seed={seed!r}"
    )
    lines = [head, "time,particle_index,position"]
    for k, t in enumerate(run.grid.times):
        for i in range(run.paths.shape[1]):
            lines.append(f"{t!r},{i},{format(run.paths[k, i], '.17g')}")
    return "\n".join(lines) + "\n"
