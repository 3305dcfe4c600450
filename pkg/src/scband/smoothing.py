"""Leading-order checks for bending families, rounded corners and decaying ends."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from scband.errors import DomainError, NumericalFailure
from scband.hypersurface import second_fundamental_form
from scband.profiles import power, sqrt_quadratic
from scband.warped import (
    WarpedBandMetric,
    radial_scalar_curvature,
    ricci_normal_direction,
    scalar_curvature_band,
)

EPS_LADDER = (1e-2, 1e-3, 1e-4)


# -- bending ----------------------------------------------------------------


@dataclass(frozen=True)
class BendingFamily:
    """Diagonal fiber metrics ``h + t A_new + t^2 (A_old - A_new) / (2 eps)`` on [0, eps]."""

    h: tuple[float, ...]
    a_new: tuple[float, ...]
    a_old: tuple[float, ...]
    epsilon: float

    def __post_init__(self):
        h, a, b = (tuple(float(x) for x in v) for v in (self.h, self.a_new, self.a_old))
        if not (len(h) == len(a) == len(b)) or not h:
            raise DomainError("h, a_new and a_old need the same positive length")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "a_new", a)
        object.__setattr__(self, "a_old", b)
        eps = float(self.epsilon)
        for hi, ai, bi in zip(h, a, b):
            c2 = (bi - ai) / (2 * eps)
            probes = [0.0, eps]
            if c2 != 0 and 0 < -ai / (2 * c2) < eps:
                probes.append(-ai / (2 * c2))
            if min(hi + ai * t + c2 * t * t for t in probes) <= 0:
                raise DomainError("bending family leaves the positive metrics on [0, eps]")

    @property
    def m(self) -> int:
        return len(self.h)

    def _arrays(self):
        return np.array(self.h), np.array(self.a_new), np.array(self.a_old)


def _check_t(fam: BendingFamily, t: float, open_: bool = False) -> float:
    t = float(t)
    eps = fam.epsilon
    ok = 0 < t < eps if open_ else 0 <= t <= eps
    if not ok:
        raise DomainError(f"t={t} outside [0, {eps}]")
    return t


def bending_metric(fam: BendingFamily, t: float) -> np.ndarray:
    """Diagonal entries h_ii(t)."""
    t = _check_t(fam, t)
    h, a, b = fam._arrays()
    out = h + t * a + (t * t / (2 * fam.epsilon)) * (b - a)
    if np.any(out <= 0):
        raise DomainError("non-positive metric")
    return out


def bending_rate(fam: BendingFamily, t: float) -> np.ndarray:
    """dh/dt, exactly ``A_new`` at t = 0 and ``A_old`` at t = eps."""
    t = _check_t(fam, t)
    _, a, b = fam._arrays()
    w = t / fam.epsilon
    return (1.0 - w) * a + w * b


def bending_band(fam: BendingFamily) -> WarpedBandMetric:
    """The warped band ``dt^2 + sum h_ii(t) dtau_i^2`` with ``phi_i = sqrt(h_ii)``."""
    eps = fam.epsilon
    profiles = tuple(
        sqrt_quadratic(hi, ai, (bi - ai) / (2 * eps), (0.0, eps))
        for hi, ai, bi in zip(fam.h, fam.a_new, fam.a_old)
    )
    return WarpedBandMetric(fam.m + 1, profiles, (0.0, eps))


def bending_scalar_curvature(fam: BendingFamily, t: float) -> float:
    t = _check_t(fam, t, open_=True)
    return scalar_curvature_band(bending_band(fam), t)


def bending_leading_coefficient(
    h: Sequence[float],
    a_new: Sequence[float],
    a_old: Sequence[float],
    eps_ladder: Sequence[float] = EPS_LADDER,
    frac: float = 0.5,
) -> float:
    """Least-squares coefficient C in ``Sc(eps * frac) ~ C / eps + D`` over an eps ladder."""
    if len(eps_ladder) < 2:
        raise DomainError("need at least two epsilon values")
    if not 0 < frac < 1:
        raise DomainError("frac must lie in (0, 1)")
    eps = np.asarray(eps_ladder, dtype=float)
    sc = np.array([bending_scalar_curvature(BendingFamily(h, a_new, a_old, e), frac * e) for e in eps])
    design = np.stack([1 / eps, np.ones_like(eps)], axis=1)
    # scale rows so every rung carries comparable weight
    w = eps[:, None]
    coef, *_ = np.linalg.lstsq(design * w, sc * w[:, 0], rcond=None)
    return float(coef[0])


def bending_envelope(fam_args: tuple, eps: float, n_t: int = 81) -> float:
    """``sup |eps Sc(t) + trace(A_old - A_new)|`` over t in [eps/10, 9 eps/10]."""
    h, a_new, a_old = fam_args
    fam = BendingFamily(h, a_new, a_old, eps)
    trace = float(np.sum(np.subtract(a_old, a_new)))
    ts = np.linspace(0.1 * eps, 0.9 * eps, n_t)
    return max(abs(eps * bending_scalar_curvature(fam, t) + trace) for t in ts)


def weyl_ricci(h, dh, d2h) -> float:
    """``-trace(A' + A^2)`` with the shape operator ``A = h^{-1} h' / 2`` (diagonal h)."""
    h, dh, d2h = (np.asarray(v, dtype=float) for v in (h, dh, d2h))
    if np.any(h <= 0):
        raise DomainError("metric must be positive")
    shape = 0.5 * dh / h
    dshape = 0.5 * d2h / h - 0.5 * dh * dh / (h * h)
    return float(-np.sum(dshape + shape * shape))


def weyl_ricci_check(fam: BendingFamily, t: float, tol: float = 1e-8) -> float:
    """Ricci(d/dt, d/dt) of the bending band, from the shape operator and from the warping functions."""
    t = _check_t(fam, t, open_=True)
    _, a, b = fam._arrays()
    value = weyl_ricci(bending_metric(fam, t), bending_rate(fam, t), (b - a) / fam.epsilon)
    other = ricci_normal_direction(bending_band(fam), t)
    if abs(value - other) > tol * max(1.0, abs(value)):
        raise NumericalFailure(f"Ricci evaluations disagree: {value} vs {other}")
    return value


# -- rounding a corner ----------------------------------------------------------


@dataclass(frozen=True)
class RoundingProblem:
    """Corner of ``V x [0, inf)`` for a round ball V of radius rho in R^m, rounded by an eps-tube."""

    m: int
    rho: float
    epsilon: float
    theta: float

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("V needs dimension at least 2")
        if not 0 < self.epsilon < self.rho / 4:
            raise DomainError("need 0 < epsilon < rho / 4")
        if not -math.pi / 2 <= self.theta <= math.pi / 2:
            raise DomainError("theta must lie in [-pi/2, pi/2]")

    def point(self, angles: np.ndarray, theta: float) -> np.ndarray:
        """Tube point ``((rho - eps + eps cos theta) u, eps sin theta)``, u in hyperspherical angles."""
        u = np.empty(self.m)
        s = 1.0
        for i, a in enumerate(angles):
            u[i] = s * math.cos(a)
            s *= math.sin(a)
        u[-1] = s
        e = self.epsilon
        return np.append((self.rho - e + e * math.cos(theta)) * u, e * math.sin(theta))


@dataclass(frozen=True)
class RoundingResult:
    lambdas: np.ndarray
    lambda_n: float
    sc: float


def rounding_tube(prob: RoundingProblem) -> RoundingResult:
    """Closed-form principal curvatures and Gauss-equation Sc of the tube corner."""
    e, c = prob.epsilon, math.cos(prob.theta)
    lam = np.full(prob.m - 1, c / (prob.rho - e + e * c))
    lam_n = 1.0 / e
    allv = np.append(lam, lam_n)
    sc = float(allv.sum() ** 2 - (allv * allv).sum())
    return RoundingResult(lam, lam_n, sc)


def rounding_tube_fd(prob: RoundingProblem, h: float = 5e-3) -> RoundingResult:
    """Same quantities from finite differences on the explicit parametrisation."""
    angles = 0.7 + 0.41 * np.arange(prob.m - 1)
    f = lambda v: prob.point(v[:-1], v[-1])  # noqa: E731
    v0 = np.append(angles, prob.theta)
    normals, shapes = second_fundamental_form(f, v0, h=h)
    x = f(v0)
    core = np.append((prob.rho - prob.epsilon) * x[:-1] / np.linalg.norm(x[:-1]), 0.0)
    sign = 1.0 if normals[0] @ (core - x) > 0 else -1.0
    vals = np.sort(sign * np.linalg.eigvalsh(shapes[0]))
    if not np.all(np.isfinite(vals)):
        raise NumericalFailure("finite-difference curvature failed")
    sc = float(vals.sum() ** 2 - (vals * vals).sum())
    return RoundingResult(vals[:-1], float(vals[-1]), sc)


# -- quadratically decaying ends ----------------------------------------------


def quadratic_decay_profile(alpha: float, R: float, n_grid: int = 2001) -> tuple[float, float]:
    """Min of Sc for ``dt^2 + t^(2 alpha) dtheta^2`` over 0 < t <= R, and ``4 pi^2 / R^2``.

    The minimum is taken over a grid ending at R; Sc is ``2 alpha (1 - alpha) / t^2``.
    """
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if not R > 1:
        raise DomainError("R must exceed 1")
    phi = power(alpha)
    ts = np.linspace(R / n_grid, R, n_grid)
    min_sc = min(radial_scalar_curvature(phi, t) for t in ts)
    bound = 4 * math.pi**2 / R**2
    if not min_sc <= bound:
        raise NumericalFailure(f"min Sc {min_sc} above 4 pi^2 / R^2 = {bound}")
    return float(min_sc), bound
