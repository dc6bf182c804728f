import math

import numpy as np
import pytest

from noncollide import ensembles as ens
from noncollide import sde
from noncollide.core import RngStream, TimeGrid, validate_chamber
from noncollide.errors import BetaOutOfRange, DomainError, NuOutOfRange
from oracles import two_sample_ks

A = lambda *v: validate_chamber(list(v), "A")
GRID1 = TimeGrid.of([1.0])


def test_beta_range():
    with pytest.raises(BetaOutOfRange):
        sde.simulate_dyson(0.5, A(0.0, 1.0), GRID1, RngStream(0, 0))


def test_nu_range():
    with pytest.raises(NuOutOfRange):
        sde.simulate_bessel_system(-0.7, [0.0, 0.0], GRID1, RngStream(0, 0))


def test_single_particle_is_brownian():
    cloud = sde.dyson_cloud(2.0, [0.0], GRID1, RngStream(21, 0), 1e-2, 10_000)
    v = cloud[:, 0, 0].var()
    se = v * math.sqrt(2.0 / len(cloud))
    assert abs(v - 1.0) <= 3 * se


def test_dyson_beta2_matches_gue():
    cloud = sde.dyson_cloud(2.0, [0.0, 0.0], GRID1, RngStream(21, 1), 1e-3, 10_000)
    gue = ens.sample_spectra(ens.EnsembleKind("gue", 2), 1.0, 100_000, RngStream(21, 2))
    d, crit = two_sample_ks(cloud[:, 0, :].ravel(), gue.ravel())
    assert d <= crit


def test_dyson_ordering_hard_assertion():
    run = sde.simulate_dyson(
        2.0, A(-1.0, 0.0, 1.0), TimeGrid.of([0.25, 0.5, 1.0]), RngStream(21, 3)
    )
    assert np.all(np.diff(run.paths, axis=1) > 0.0)


def test_bessel3_second_moment():
    cloud = sde.bessel_cloud(0.5, [0.0], GRID1, RngStream(21, 4), 1e-3, 10_000)
    m = (cloud[:, 0, 0] ** 2).mean()
    se = (cloud[:, 0, 0] ** 2).std() / math.sqrt(len(cloud))
    assert abs(m - 3.0) <= 3 * se


def test_bessel_nu0_matches_sqrt_laguerre():
    cloud = sde.bessel_cloud(0.0, [0.0, 0.0], GRID1, RngStream(21, 5), 1e-3, 8_000)
    lam = ens.sample_spectra(
        ens.EnsembleKind("laguerre", 2, nu=0), 1.0, 80_000, RngStream(21, 6)
    )
    d, crit = two_sample_ks(cloud[:, 0, :].ravel(), np.sqrt(lam).ravel())
    assert d <= crit


def test_bessel_positivity():
    cloud = sde.bessel_cloud(0.5, [0.0, 0.0], GRID1, RngStream(21, 7), 1e-3, 2_000)
    assert cloud.min() > 0.0
    refl = sde.bessel_cloud(-0.5, [0.0, 0.0], GRID1, RngStream(21, 8), 1e-3, 2_000)
    assert refl.min() >= 0.0


def test_exchangeability_across_streams():
    a = sde.dyson_cloud(2.0, [0.0, 0.0], GRID1, RngStream(21, 9), 2e-3, 4_000)
    b = sde.dyson_cloud(2.0, [0.0, 0.0], GRID1, RngStream(77, 10), 2e-3, 4_000)
    d, crit = two_sample_ks(a[:, 0, :].ravel(), b[:, 0, :].ravel())
    assert d <= crit


def test_step_halving_weak_convergence():
    x0 = A(-0.5, 0.5)
    a = sde.dyson_cloud(2.0, x0, GRID1, RngStream(21, 11), 1e-3, 4_000)
    b = sde.dyson_cloud(2.0, x0, GRID1, RngStream(21, 11), 5e-4, 4_000)
    ma, mb = a[:, 0, 1].mean(), b[:, 0, 1].mean()
    se = math.hypot(a[:, 0, 1].std(), b[:, 0, 1].std()) / math.sqrt(4000)
    assert abs(ma - mb) <= 3 * se


def test_determinism():
    r1 = sde.simulate_dyson(2.0, A(-1.0, 1.0), GRID1, RngStream(3, 3), 1e-2)
    r2 = sde.simulate_dyson(2.0, A(-1.0, 1.0), GRID1, RngStream(3, 3), 1e-2)
    assert np.array_equal(r1.paths, r2.paths)


def test_zero_start_unrealizable_nu():
    with pytest.raises(DomainError):
        sde.simulate_bessel_system(0.25, [0.0, 0.0], GRID1, RngStream(0, 0))


def test_zero_start_beta3_via_tridiagonal():
    run = sde.simulate_dyson(3.0, [0.0, 0.0], GRID1, RngStream(21, 12), 1e-2)
    assert np.all(np.diff(run.paths, axis=1) > 0.0)


def test_interior_bessel_start():
    run = sde.simulate_bessel_system(
        0.5, validate_chamber([0.5, 1.5], "C"), GRID1, RngStream(21, 13), 1e-3
    )
    assert run.paths.min() > 0.0


def test_dump_path_csv():
    run = sde.simulate_dyson(2.0, A(-1.0, 1.0), TimeGrid.of([0.5, 1.0]), RngStream(9, 0))
    text = sde.dump_path_csv(run, seed=9)
    lines = text.strip().split("\n")
    assert lines[0].startswith("# system=dyson")
    assert lines[1] == "time,particle_index,position"
    assert len(lines) == 2 + 2 * 2
    t, idx, pos = lines[2].split(",")
    assert float(t) == 0.5 and int(idx) == 0
    assert float(pos) == run.paths[0, 0]


def test_step_stats_recorded():
    run = sde.simulate_dyson(2.0, A(-0.01, 0.01), GRID1, RngStream(21, 14), 5e-2)
    assert "rejected_steps" in run.step_stats
