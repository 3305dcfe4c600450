import itertools
import math

import numpy as np
import pytest

from scband import profiles as pf
from scband import warped as wp
from scband.errors import DomainError


def generic_scalar_curvature(metric_fn, t, dim, h=1e-3):
    """Sc of a metric depending on the first coordinate only, from Christoffel symbols.

    Derivatives of the metric tensor are taken by fourth-order differences,
    so this shares no formula with the warped-product code.
    """
    def d(fn, order):
        ys = [fn(t + k * h) for k in (-2, -1, 0, 1, 2)]
        if order == 1:
            return (ys[0] - 8 * ys[1] + 8 * ys[3] - ys[4]) / (12 * h)
        return (-ys[0] + 16 * ys[1] - 30 * ys[2] + 16 * ys[3] - ys[4]) / (12 * h * h)

    g = metric_fn(t)
    gi = np.linalg.inv(g)
    dg = np.zeros((dim, dim, dim))  # dg[k] = d_k g
    dg[0] = d(metric_fn, 1)
    ddg = np.zeros((dim, dim, dim, dim))
    ddg[0, 0] = d(metric_fn, 2)

    def christoffel(gi_, dg_):
        gam = np.zeros((dim, dim, dim))
        for a, b, c in itertools.product(range(dim), repeat=3):
            gam[a, b, c] = 0.5 * sum(gi_[a, e] * (dg_[b][e, c] + dg_[c][e, b] - dg_[e][b, c]) for e in range(dim))
        return gam

    gam = christoffel(gi, dg)
    # d_0 Gamma by differencing Christoffel symbols along t
    def gam_at(s):
        gs = metric_fn(s)
        dgs = np.zeros((dim, dim, dim))
        dgs[0] = (metric_fn(s + h) - metric_fn(s - h)) / (2 * h)
        return christoffel(np.linalg.inv(gs), dgs)

    dgam = np.zeros((dim, dim, dim, dim))  # dgam[k, a, b, c] = d_k Gamma^a_bc
    dgam[0] = (gam_at(t - 2 * h) - 8 * gam_at(t - h) + 8 * gam_at(t + h) - gam_at(t + 2 * h)) / (12 * h)
    ric = np.zeros((dim, dim))
    for b, c in itertools.product(range(dim), repeat=2):
        s = 0.0
        for a in range(dim):
            s += dgam[a, a, b, c] - dgam[c, a, b, a]
            for e in range(dim):
                s += gam[a, a, e] * gam[e, b, c] - gam[a, c, e] * gam[e, b, a]
        ric[b, c] = s
    return float(np.sum(gi * ric))


def band_metric_fn(profiles):
    def g(t):
        return np.diag([1.0] + [p(t) ** 2 for p in profiles])
    return g


@pytest.mark.parametrize(
    "profiles,t",
    [
        ((pf.cos_power(3),) * 2, 0.3),
        ((pf.exponential(), pf.exponential(rate=2.0)), 0.1),
        ((pf.power(0.7), pf.power(1.3), pf.sine(domain=(0.0, 3.0))), 1.2),
        ((pf.sqrt_quadratic(1.0, 0.4, -0.2, (0.0, 2.0)), pf.exponential(rate=0.5)), 0.6),
    ],
)
def test_scalar_curvature_against_christoffel_oracle(profiles, t):
    n = len(profiles) + 1
    a = max(p.domain[0] for p in profiles)
    b = min(p.domain[1] for p in profiles)
    metric = wp.WarpedBandMetric(n, profiles, (a, b))
    ref = generic_scalar_curvature(band_metric_fn(profiles), t, n)
    assert wp.scalar_curvature_band(metric, t) == pytest.approx(ref, rel=1e-5, abs=1e-5)


@pytest.mark.parametrize("n", range(2, 11))
def test_extremal_band_has_constant_curvature(n):
    metric = wp.WarpedBandMetric.equal(pf.cos_power(n), n)
    for t in np.linspace(-0.99, 0.99, 37) * math.pi / n:
        assert wp.scalar_curvature_band(metric, t) == pytest.approx(n * (n - 1), rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("n", range(2, 9))
def test_hyperbolic_model(n):
    metric = wp.WarpedBandMetric.equal(pf.exponential(), n, (-1.0, 1.0))
    for t in (-0.5, 0.0, 0.7):
        assert wp.scalar_curvature_band(metric, t) == pytest.approx(-n * (n - 1), abs=1e-10)
        assert wp.mean_curvature_slice(metric, t) == pytest.approx(n - 1, abs=1e-10)
        assert wp.ricci_normal_direction(metric, t) == pytest.approx(-(n - 1), abs=1e-10)


def test_single_warp_agrees_with_band():
    for n in (2, 3, 6):
        p = pf.sqrt_quadratic(2.0, 1.0, 0.5, (0.0, 1.0))
        metric = wp.WarpedBandMetric.equal(p, n)
        for t in (0.2, 0.5, 0.9):
            assert wp.scalar_curvature_single_warp(p, n, t) == pytest.approx(wp.scalar_curvature_band(metric, t), rel=1e-13)


def test_radial_surfaces():
    # round unit sphere and the cone-like t^alpha end
    for t in (0.3, 1.0, 2.5):
        assert wp.radial_scalar_curvature(pf.sine(), t) == pytest.approx(2.0, rel=1e-14)
        assert wp.radial_scalar_curvature(pf.power(0.5), t) == pytest.approx(0.5 / t**2, rel=1e-14)
    with pytest.raises(DomainError):
        wp.radial_scalar_curvature(pf.sine(), 0.0)


def test_mean_curvature_allows_closed_interval():
    metric = wp.WarpedBandMetric.equal(pf.exponential(), 3, (0.0, 1.0))
    assert wp.mean_curvature_slice(metric, 1.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        wp.scalar_curvature_band(metric, 1.0)


def test_metric_validation():
    with pytest.raises(DomainError):
        wp.WarpedBandMetric(3, (pf.exponential(),), (0.0, 1.0))
    with pytest.raises(DomainError):
        wp.WarpedBandMetric(2, (pf.exponential(domain=(0.0, 1.0)),), (0.0, 2.0))
    with pytest.raises(DomainError):
        wp.WarpedBandMetric(1, (), (0.0, 1.0))


SCALE_DRAWS = [(p, n, lam) for p in (pf.cos_power(2), pf.exponential(rate=0.7), pf.power(1.5, domain=(0.5, 3.0)),
                                     pf.sine(domain=(0.2, 3.0)), pf.sqrt_quadratic(1, 0.2, 0.1, (0.0, 2.0)))
               for n in (2, 4) for lam in (0.5, 3.0)]


@pytest.mark.parametrize("profile,n,lam", SCALE_DRAWS)
def test_scaling_covariance(profile, n, lam):
    a, b = profile.domain
    a, b = (max(a, -1.0), min(b, 1.0)) if math.isinf(a) else (a, b)
    metric = wp.WarpedBandMetric.equal(profile, n, (a, b))
    big = metric.scaled(lam)
    for frac in (0.25, 0.5, 0.75):
        t = a + frac * (b - a)
        s0 = wp.scalar_curvature_band(metric, t)
        assert wp.scalar_curvature_band(big, lam * t) == pytest.approx(s0 / lam**2, rel=1e-11, abs=1e-12)
        assert wp.mean_curvature_slice(big, lam * t) == pytest.approx(wp.mean_curvature_slice(metric, t) / lam, rel=1e-11, abs=1e-12)


@pytest.mark.parametrize("profile,n,lam", SCALE_DRAWS)
def test_cross_validation_residual(profile, n, lam):
    a, b = profile.domain
    if math.isinf(a):
        a, b = -1.0, 1.0
    if profile.kind == "cos_power":
        a, b = 0.8 * a, 0.8 * b
    metric = wp.WarpedBandMetric.equal(profile, n, (a, b)).scaled(lam)
    lo, hi = metric.interval
    report = wp.cross_validate(metric, np.linspace(lo, hi, 801))
    assert report.residual_max < 1e-6
    assert report.sc.shape == report.ts.shape == (797,)
