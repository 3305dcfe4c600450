"""Extremal band profiles, width constants and the torical symmetrization toy.

The log-derivative ``f = phi'/phi`` of an optimal warping function solves

    f' = -(sigma(t) / (n - 1) + n f**2) / 2 .

Solutions blow up in finite time when sigma > 0.  Near a pole the solver
switches to ``u = 1/f``, which satisfies the regular equation
``u' = (sigma u**2 / (n - 1) + n) / 2``, so the pole becomes a transversal
zero of ``u`` and can be located to integration accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import linalg

from scband.errors import DomainError, NumericalFailure
from scband.profiles import Profile

DIVERGENCE_THRESHOLD = 1e8
RTOL = 1e-10
ATOL = 1e-13
DEFAULT_HORIZON = 1e3

BAND_CLASSES = {
    "overtorical": 2,
    "iso-enlargeable-compact": 2,
    "iso-enlargeable": 4,
    "SYS": 4,
    "SYSE": 8,
}


@dataclass(frozen=True)
class BandClass:
    tag: str

    def __post_init__(self):
        if self.tag not in BAND_CLASSES:
            raise DomainError(f"unknown band class {self.tag!r}; expected one of {sorted(BAND_CLASSES)}")


def width_bound(band_class: BandClass | str, n: int, sigma: float) -> float:
    """Upper bound ``k pi sqrt((n-1)/(sigma n))`` on the width of a band."""
    tag = band_class.tag if isinstance(band_class, BandClass) else BandClass(band_class).tag
    if n < 2:
        raise DomainError("dimension must be at least 2")
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    return BAND_CLASSES[tag] * math.pi * math.sqrt((n - 1) / (sigma * n))


# -- band data and the Riccati solver ------------------------------------


@dataclass(frozen=True)
class BandSpec:
    """Scalar-curvature lower bound sigma(t) and boundary mean-curvature bounds.

    Mean curvatures are taken with respect to outward normals, so the
    boundary conditions on a band [-l, l] read
    ``f(-l) <= -m_minus/(n-1)`` and ``f(l) >= m_plus/(n-1)``.  ``-inf``
    means no condition.  ``breakpoints`` lists the discontinuities of sigma.
    """

    n: int
    sigma: Callable[[float], float]
    m_minus: float = -math.inf
    m_plus: float = -math.inf
    interval: tuple[float, float] = (-math.inf, math.inf)
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("dimension must be at least 2")
        a, b = self.interval
        if not a < b:
            raise DomainError("empty sigma interval")
        object.__setattr__(self, "breakpoints", tuple(sorted(float(x) for x in self.breakpoints)))

    @classmethod
    def constant(cls, n: int, sigma: float, m_minus: float = -math.inf, m_plus: float = -math.inf) -> "BandSpec":
        s = float(sigma)
        return cls(n, lambda t: s, m_minus, m_plus)

    @classmethod
    def piecewise(cls, n: int, pieces, default: float, **kw) -> "BandSpec":
        """sigma equal to ``value`` on each ``(lo, hi, value)`` and ``default`` elsewhere."""
        pieces = tuple((float(lo), float(hi), float(v)) for lo, hi, v in pieces)

        def sigma(t):
            for lo, hi, v in pieces:
                if lo <= t <= hi:
                    return v
            return default

        bps = [x for lo, hi, _ in pieces for x in (lo, hi)]
        return cls(n, sigma, breakpoints=tuple(bps), **kw)

    def scaled(self, lam: float) -> "BandSpec":
        """Data for the metric ``lam**2 g``."""
        sig = self.sigma
        a, b = self.interval
        return BandSpec(
            self.n,
            lambda t: sig(t / lam) / lam**2,
            self.m_minus / lam,
            self.m_plus / lam,
            (a * lam, b * lam),
            tuple(lam * x for x in self.breakpoints),
        )

    @property
    def f_start(self) -> float:
        return -self.m_minus / (self.n - 1)

    @property
    def f_target(self) -> float:
        return self.m_plus / (self.n - 1)


@dataclass(frozen=True)
class RiccatiSolution:
    ts: np.ndarray
    fs: np.ndarray
    blow_up_low: float | None = None
    blow_up_high: float | None = None
    t_stop: float = math.nan
    f_stop: float = math.nan

    @property
    def blew_up(self) -> bool:
        return self.blow_up_low is not None or self.blow_up_high is not None


# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


# stage nodes kept off the step ends so piecewise sigma is read on the right side
_C_INNER = tuple(min(max(c, 1e-12), 1.0 - 1e-12) for c in _C)


def _dp_step(rhs, t, y, h, cs=_C):
    k = []
    for i in range(7):
        yi = y
        for j, a in enumerate(_A[i]):
            yi += h * a * k[j]
        k.append(rhs(t + cs[i] * h, yi))
    y5 = y + h * sum(b * kk for b, kk in zip(_B5, k))
    err = h * sum(e * kk for e, kk in zip(_E, k))
    return y5, err


def integrate_riccati(
    spec: BandSpec,
    f0: float,
    t0: float,
    direction: int = 1,
    t_end: float | None = None,
    rtol: float = RTOL,
    atol: float = ATOL,
    threshold: float = DIVERGENCE_THRESHOLD,
) -> RiccatiSolution:
    """Integrate ``-2 f' - n f^2 = sigma/(n-1)`` from ``f(t0) = f0``.

    Stops at ``t_end`` (default: end of the sigma interval) or at a pole.
    ``f0 = +-inf`` starts exactly on a pole and integrates away from it.
    """
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    a, b = spec.interval
    t0 = float(t0)
    if not a <= t0 <= b:
        raise DomainError(f"t0={t0} outside the sigma interval")
    if t_end is None:
        t_end = b if direction > 0 else a
    if (t_end - t0) * direction < 0:
        raise DomainError("t_end lies behind t0 for this direction")
    if not math.isfinite(t_end):
        raise DomainError("integration needs a finite end point")

    n = spec.n
    sig = spec.sigma
    k = 1.0 / (n - 1)

    def rhs_f(t, f):
        return -0.5 * (sig(t) * k + n * f * f)

    def rhs_u(t, u):
        return 0.5 * (sig(t) * k * u * u + n)

    stops = [x for x in spec.breakpoints if (x - t0) * direction > 0 and (t_end - x) * direction > 0]
    stops.sort(key=lambda x: (x - t0) * direction)
    stops.append(t_end)
    cs = _C_INNER if spec.breakpoints else _C

    if math.isinf(f0):
        mode, y = "u", 0.0
    else:
        mode, y = ("u", 1.0 / f0) if abs(f0) > 2.0 else ("f", float(f0))
    t = t0
    ts: list[float] = []
    fs: list[float] = []

    def record():
        f = y if mode == "f" else (1.0 / y if y != 0.0 else math.inf)
        if abs(f) <= threshold:
            ts.append(t)
            fs.append(f)

    record()
    span = abs(t_end - t0)
    h = min(1e-3, span) if span > 0 else 0.0
    h_min = 1e-15
    blow = None
    started_on_pole = mode == "u" and y == 0.0

    for stop in stops:
        while (stop - t) * direction > 0:
            h = min(h, abs(stop - t))
            rhs = rhs_f if mode == "f" else rhs_u
            y_new, err = _dp_step(rhs, t, y, direction * h, cs)
            scale = atol + rtol * max(abs(y), abs(y_new))
            ratio = abs(err) / scale if math.isfinite(y_new) else math.inf
            if ratio > 1.0 or not math.isfinite(ratio):
                h *= max(0.2, 0.9 * ratio ** -0.2) if math.isfinite(ratio) else 0.2
                if h < h_min * max(1.0, abs(t)):
                    raise NumericalFailure(f"step size underflow at t={t} before divergence")
                continue
            if mode == "u" and not started_on_pole and (y_new == 0.0 or (y_new > 0) != (y > 0)):
                blow = t + direction * _pole_offset(rhs_u, t, y, direction, h, cs)
                break
            t = stop if h == abs(stop - t) else t + direction * h
            y = y_new
            started_on_pole = started_on_pole and y == 0.0
            if mode == "f" and abs(y) > 2.0:
                mode, y = "u", 1.0 / y
            elif mode == "u" and abs(y) > 2.0:
                mode, y = "f", 1.0 / y
            record()
            h *= min(5.0, 0.9 * ratio ** -0.2) if ratio > 0 else 5.0
        if blow is not None:
            break

    f_stop = (y if mode == "f" else (1.0 / y if y != 0.0 else math.inf)) if blow is None else -direction * math.inf
    order = np.argsort(ts)
    return RiccatiSolution(
        ts=np.asarray(ts)[order],
        fs=np.asarray(fs)[order],
        blow_up_low=blow if (blow is not None and direction < 0) else None,
        blow_up_high=blow if (blow is not None and direction > 0) else None,
        t_stop=blow if blow is not None else t,
        f_stop=f_stop,
    )


def _pole_offset(rhs_u, t, u, direction, h, cs=_C) -> float:
    """Step length in (0, h] at which the RK step for u crosses zero."""
    lo, hi = 0.0, h
    u_lo = u
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        u_mid, _ = _dp_step(rhs_u, t, u, direction * mid, cs)
        if u_mid == 0.0:
            return mid
        if (u_mid > 0) == (u_lo > 0):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(t)):
            break
    return 0.5 * (lo + hi)


def blow_up_interval(spec: BandSpec, f0: float = 0.0, t0: float = 0.0) -> tuple[float | None, float | None]:
    """Maximal existence interval of the Riccati solution through (t0, f0)."""
    a, b = spec.interval
    lo_end = a if math.isfinite(a) else t0 - DEFAULT_HORIZON
    hi_end = b if math.isfinite(b) else t0 + DEFAULT_HORIZON
    back = integrate_riccati(spec, f0, t0, -1, t_end=lo_end)
    fwd = integrate_riccati(spec, f0, t0, +1, t_end=hi_end)
    return back.blow_up_low, fwd.blow_up_high


# -- maximal width under boundary conditions ----------------------------


@dataclass(frozen=True)
class BandWidthResult:
    status: Literal["feasible", "unbounded", "degenerate", "infeasible"]
    width: float | None
    profile: RiccatiSolution | None = field(default=None, repr=False)

    @property
    def half_width(self) -> float | None:
        return None if self.width is None else 0.5 * self.width


def _shoot(spec: BandSpec, l: float) -> RiccatiSolution:
    a = spec.f_start
    f0 = math.inf if a == math.inf else a
    return integrate_riccati(spec, f0, -l, +1, t_end=l)


def _feasible(spec: BandSpec, sol: RiccatiSolution) -> bool:
    return sol.blow_up_high is None and sol.f_stop >= spec.f_target


def max_band_width(
    spec: BandSpec,
    horizon: float = DEFAULT_HORIZON,
    ladder_size: int = 80,
    l_min: float = 1e-6,
    tol: float = 1e-10,
) -> BandWidthResult:
    """Supremum of 2l such that the band [-l, l] carries an admissible profile.

    By comparison with the equality case, [-l, l] is admissible iff the
    solution shot from the largest allowed start ``f(-l) = -m_minus/(n-1)``
    exists on [-l, l] and ends at or above ``m_plus/(n-1)``.  The half
    widths are scanned on a geometric ladder and the last feasible rung is
    refined by bisection.
    """
    if spec.f_target == math.inf or spec.f_start == -math.inf:
        return BandWidthResult("infeasible", None)
    top = _shoot(spec, horizon)
    if _feasible(spec, top):
        slack = top.f_stop - spec.f_target
        if math.isfinite(spec.f_target) and abs(slack) <= 1e-9 * max(1.0, abs(spec.f_target)):
            return BandWidthResult("degenerate", math.inf, top)
        return BandWidthResult("unbounded", math.inf, top)

    ladder = np.geomspace(l_min, horizon, ladder_size)
    feas = [_feasible(spec, _shoot(spec, l)) for l in ladder]
    last = max((i for i, ok in enumerate(feas) if ok), default=None)
    if last is None:
        return BandWidthResult("infeasible", None)
    lo, hi = float(ladder[last]), float(ladder[last + 1]) if last + 1 < len(ladder) else horizon
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if _feasible(spec, _shoot(spec, mid)):
            lo = mid
        else:
            hi = mid
    return BandWidthResult("feasible", 2.0 * lo, _shoot(spec, lo))


def symmetrization_corollary_bound(
    n: int, sigma0: float, delta0: float, eps: float = 0.0, horizon: float = DEFAULT_HORIZON
) -> float:
    """Bound C on dist(Z, boundary) when Sc >= sigma0 near Z and Sc >= -eps elsewhere.

    Returns ``math.inf`` when no blow-up limits the band.
    """
    if sigma0 <= 0 or delta0 < 0 or eps < 0:
        raise DomainError("need sigma0 > 0, delta0 >= 0, eps >= 0")
    if delta0 == 0:
        spec = BandSpec.constant(n, -eps)
    else:
        spec = BandSpec.piecewise(n, [(-delta0, delta0, sigma0)], -eps)
    res = max_band_width(spec, horizon=horizon)
    if res.status in ("unbounded", "degenerate"):
        return math.inf
    if res.status == "infeasible":
        return 0.0
    return res.half_width


# -- torical symmetrization step -----------------------------------------


@dataclass(frozen=True)
class StabilityProblem:
    """Second-variation data on a closed curve of circumference ``length``.

    The potential is ``(sc_y - sc_ambient - curv_sq) / 2`` sampled on a
    uniform periodic grid.
    """

    length: float
    sc_y: np.ndarray
    sc_ambient: np.ndarray
    curv_sq: np.ndarray

    def __post_init__(self):
        arrs = [np.broadcast_to(np.asarray(x, dtype=float), np.shape(self.sc_ambient)) for x in
                (self.sc_y, self.sc_ambient, self.curv_sq)]
        if arrs[0].ndim != 1:
            raise DomainError("stability data must be 1-D grids")
        if not all(np.all(np.isfinite(x)) for x in arrs):
            raise DomainError("potential must be finite")
        if self.length <= 0:
            raise DomainError("circumference must be positive")
        for name, x in zip(("sc_y", "sc_ambient", "curv_sq"), arrs):
            object.__setattr__(self, name, np.array(x))

    @classmethod
    def from_potential(cls, length: float, potential) -> "StabilityProblem":
        v = np.asarray(potential, dtype=float)
        return cls(length, np.zeros_like(v), -2.0 * v, np.zeros_like(v))

    @property
    def potential(self) -> np.ndarray:
        return 0.5 * (self.sc_y - self.sc_ambient - self.curv_sq)

    @property
    def grid(self) -> np.ndarray:
        m = self.potential.size
        return np.arange(m) * (self.length / m)


def periodic_laplacian(m: int, length: float) -> np.ndarray:
    """Dense fourth-order periodic second-difference matrix."""
    h = length / m
    lap = np.zeros((m, m))
    idx = np.arange(m)
    for off, w in ((0, -30.0), (1, 16.0), (-1, 16.0), (2, -1.0), (-2, -1.0)):
        lap[idx, (idx + off) % m] += w / (12.0 * h * h)
    return lap


def stability_step(problem: StabilityProblem) -> tuple[float, Profile]:
    """Lowest eigenpair of ``-Laplacian + potential`` on the circle.

    The eigenfunction is returned as a sampled profile normalized to max 1.
    """
    v = problem.potential
    m = v.size
    if m < 16:
        raise DomainError("stability grid needs at least 16 points")
    op = -periodic_laplacian(m, problem.length) + np.diag(v)
    w, vec = linalg.eigh(op, subset_by_index=[0, 0])
    phi = vec[:, 0]
    phi = phi * np.sign(phi[np.argmax(np.abs(phi))])
    if np.any(phi <= 0):
        raise NumericalFailure("lowest eigenvector is not positive")
    phi = phi / phi.max()
    ts = problem.grid
    return float(w[0]), Profile("sampled", (ts[0], ts[-1]), ts=ts, vs=phi)


@dataclass(frozen=True)
class SymmetrizationCheck:
    lambda0: float
    sc_new: np.ndarray
    min_sc: float
    sigma: float
    holds: bool


def verify_symmetrization_invariant(problem: StabilityProblem, sigma: float, tol: float = 1e-6) -> SymmetrizationCheck:
    """Scalar curvature of ``g_Y + phi^2 dt^2`` against the inherited bound sigma.

    ``Sc = Sc(Y) - 2 (Laplacian phi)/phi`` with the same discrete Laplacian
    the eigenproblem used.
    """
    lam, prof = stability_step(problem)
    phi = prof.vs
    lap = periodic_laplacian(phi.size, problem.length) @ phi
    sc_new = problem.sc_y - 2.0 * lap / phi
    mn = float(sc_new.min())
    return SymmetrizationCheck(lam, sc_new, mn, float(sigma), mn >= sigma - tol)
