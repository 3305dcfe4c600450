"""Curvature of torical warped products ``dt^2 + sum_i phi_i(t)^2 dtau_i^2``.

Fibers are flat tori, so every quantity depends on t alone and is a
closed expression in ``s_i = phi_i'/phi_i`` and ``phi_i''/phi_i``.  Slice
mean curvature is taken with respect to ``+d/dt``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from scband.errors import DomainError
from scband.profiles import Profile, sample, scaled


@dataclass(frozen=True)
class WarpedBandMetric:
    n: int
    profiles: tuple[Profile, ...]
    interval: tuple[float, float]

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("dimension must be at least 2")
        profiles = tuple(self.profiles)
        if len(profiles) != self.n - 1:
            raise DomainError(f"need n-1={self.n - 1} warping profiles, got {len(profiles)}")
        a, b = (float(x) for x in self.interval)
        if not a < b:
            raise DomainError("empty interval")
        for p in profiles:
            if p.domain[0] > a or p.domain[1] < b:
                raise DomainError(f"profile domain {p.domain} does not cover [{a}, {b}]")
        object.__setattr__(self, "profiles", profiles)
        object.__setattr__(self, "interval", (a, b))

    @classmethod
    def equal(cls, profile: Profile, n: int, interval=None) -> "WarpedBandMetric":
        """Band with n-1 copies of one warping function."""
        return cls(n, (profile,) * (n - 1), interval or profile.domain)

    def scaled(self, lam: float) -> "WarpedBandMetric":
        """The metric ``lam**2 g`` in the rescaled coordinate ``lam * t``."""
        a, b = self.interval
        return WarpedBandMetric(self.n, tuple(scaled(p, lam) for p in self.profiles), (lam * a, lam * b))


@dataclass(frozen=True)
class CurvatureReport:
    ts: np.ndarray
    sc: np.ndarray
    mean_curv: np.ndarray
    ricci_tt: np.ndarray
    residual_max: float


def _check_t(metric: WarpedBandMetric, t: float, interior: bool = True) -> float:
    t = float(t)
    a, b = metric.interval
    inside = a < t < b if interior else a <= t <= b
    if not inside:
        raise DomainError(f"t={t} outside the band interval [{a}, {b}]")
    return t


def _log_derivs(profiles: Sequence[Profile], t: float) -> tuple[np.ndarray, np.ndarray]:
    """Arrays of phi'/phi and phi''/phi at t."""
    s = np.empty(len(profiles))
    q = np.empty(len(profiles))
    for i, p in enumerate(profiles):
        v, d1, d2 = p.eval(t)
        s[i] = d1 / v
        q[i] = d2 / v
    return s, q


def _sc_from(s: np.ndarray, q: np.ndarray) -> float:
    # 2 sum_{i<j} s_i s_j = (sum s)^2 - sum s^2
    return float(-2.0 * q.sum() - (s.sum() ** 2 - (s * s).sum()))


def scalar_curvature_band(metric: WarpedBandMetric, t: float) -> float:
    """Sc(g)(t) = -2 sum phi_i''/phi_i - 2 sum_{i<j} s_i s_j."""
    t = _check_t(metric, t)
    return _sc_from(*_log_derivs(metric.profiles, t))


def scalar_curvature_single_warp(phi: Profile, n: int, t: float) -> float:
    """Sc of ``dt^2 + phi^2 g_flat`` over an (n-1)-dimensional flat fiber."""
    if n < 2:
        raise DomainError("dimension must be at least 2")
    a, b = phi.domain
    t = float(t)
    if not a < t < b:
        raise DomainError(f"t={t} outside ({a}, {b})")
    v, d1, d2 = phi.eval(t)
    return -2.0 * (n - 1) * d2 / v - (n - 1) * (n - 2) * (d1 / v) ** 2


def radial_scalar_curvature(phi: Profile, t: float) -> float:
    """Sc of the surface ``dt^2 + phi(t)^2 dtheta^2``, i.e. ``-2 phi''/phi``."""
    t = float(t)
    if t <= 0:
        raise DomainError("radial coordinate must be positive")
    v, _, d2 = phi.eval(t)
    return -2.0 * d2 / v


def mean_curvature_slice(metric: WarpedBandMetric, t: float) -> float:
    """Mean curvature of the slice {t} with respect to +d/dt."""
    t = _check_t(metric, t, interior=False)
    s, _ = _log_derivs(metric.profiles, t)
    return float(s.sum())


def ricci_normal_direction(metric: WarpedBandMetric, t: float) -> float:
    """Ricci(d/dt, d/dt) = -sum (s_i' + s_i^2), shape operator s_i = phi_i'/phi_i."""
    t = _check_t(metric, t)
    _, q = _log_derivs(metric.profiles, t)
    # s' + s^2 = phi''/phi
    return float(-q.sum())


def cross_validate(metric: WarpedBandMetric, grid) -> CurvatureReport:
    """Closed-form curvature on ``grid`` checked against finite differences.

    Each profile is resampled on ``grid`` and differentiated with the
    sampled-profile stencil; the two outermost points on each side are
    dropped from the report because the stencil needs them.
    """
    grid = np.asarray(grid, dtype=float)
    for t in (grid[0], grid[-1]):
        _check_t(metric, t, interior=False)
    sampled = WarpedBandMetric(metric.n, tuple(sample(p, grid) for p in metric.profiles), (grid[0], grid[-1]))
    ts = grid[2:-2]
    rows = np.empty((ts.size, 3))
    resid = 0.0
    for k, t in enumerate(ts):
        s, q = _log_derivs(metric.profiles, t)
        s_fd, q_fd = _log_derivs(sampled.profiles, t)
        exact = np.array([_sc_from(s, q), s.sum(), -q.sum()])
        approx = np.array([_sc_from(s_fd, q_fd), s_fd.sum(), -q_fd.sum()])
        rows[k] = exact
        resid = max(resid, float(np.max(np.abs(exact - approx))))
    return CurvatureReport(ts, rows[:, 0], rows[:, 1], rows[:, 2], resid)
