"""One-variable warping profiles and their first two derivatives.

A profile is ``amp * base(rate * t)`` for one of a handful of closed-form
bases, or a natural cubic spline through samples.  Closed-form kinds are
differentiated analytically; sampled profiles use a five-point central
stencil on the spline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from scband.errors import DomainError

CLOSED_KINDS = ("constant", "power", "exponential", "cos_power", "sine", "sqrt_quadratic")
KINDS = CLOSED_KINDS + ("sampled",)

# five-point central stencils, O(h^4)
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


class DerivativeBundle(NamedTuple):
    value: float
    d1: float
    d2: float


@dataclass(frozen=True)
class Profile:
    """Positive scalar function on a closed interval.

    ``param`` is the exponent for ``power``, the dimension n for
    ``cos_power`` (base ``cos(n x / 2) ** (2 / n)``) and the coefficient
    triple ``(c0, c1, c2)`` for ``sqrt_quadratic`` (base
    ``sqrt(c0 + c1 x + c2 x**2)``).  Sampled profiles carry ``ts``/``vs``.
    """

    kind: str
    domain: tuple[float, float]
    amp: float = 1.0
    rate: float = 1.0
    param: object = None
    ts: np.ndarray | None = field(default=None, repr=False, compare=False)
    vs: np.ndarray | None = field(default=None, repr=False, compare=False)
    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown profile kind {self.kind!r}")
        a, b = (float(x) for x in self.domain)
        if not a < b:
            raise DomainError(f"empty domain [{a}, {b}]")
        object.__setattr__(self, "domain", (a, b))
        if self.kind == "sampled":
            self._init_sampled()
        else:
            if self.amp <= 0 or self.rate <= 0:
                raise DomainError("amp and rate must be positive")
            self._check_positive_interior()

    def _init_sampled(self):
        ts = np.asarray(self.ts, dtype=float)
        vs = np.asarray(self.vs, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape:
            raise DomainError("sampled profile needs matching 1-D ts and vs")
        if ts.size < 5:
            raise DomainError("sampled profile needs at least 5 points")
        if np.any(np.diff(ts) <= 0):
            raise DomainError("sample grid must be strictly increasing")
        if np.any(vs[1:-1] <= 0):
            raise DomainError("warping values must be positive on the interior")
        ts.setflags(write=False)
        vs.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "domain", (float(ts[0]), float(ts[-1])))
        object.__setattr__(self, "_spline", CubicSpline(ts, vs, bc_type="natural"))

    def _check_positive_interior(self):
        a, b = self.domain
        xa, xb = self.rate * a, self.rate * b
        kind = self.kind
        if kind == "power" and xa < 0:
            raise DomainError("power profile needs a domain in t >= 0")
        if kind == "cos_power":
            n = self.param
            if n is None or n < 1:
                raise DomainError("cos_power needs a dimension parameter n >= 1")
            edge = math.pi / n
            if xa < -edge - 1e-15 or xb > edge + 1e-15:
                raise DomainError(f"cos_power({n}) is only positive on |rate*t| < pi/n")
        if kind == "sine" and (xa < 0 or xb > math.pi + 1e-15):
            raise DomainError("sine profile needs rate*t within [0, pi]")
        if kind == "sqrt_quadratic":
            c0, c1, c2 = self.param
            probes = [xa, xb, 0.5 * (xa + xb)]
            if c2 != 0 and xa < -c1 / (2 * c2) < xb:
                probes.append(-c1 / (2 * c2))
            inner = [c0 + c1 * x + c2 * x * x for x in probes[2:]]
            ends = [c0 + c1 * x + c2 * x * x for x in probes[:2]]
            if min(inner) <= 0 or min(ends) < 0:
                raise DomainError("sqrt_quadratic radicand must be positive on the domain")

    # -- evaluation -------------------------------------------------------

    def eval(self, t: float) -> DerivativeBundle:
        return eval_profile(self, t)

    def __call__(self, t):
        return self.eval(t).value


def constant(c: float, domain=(-math.inf, math.inf)) -> Profile:
    return Profile("constant", domain, amp=c)


def power(alpha: float, domain=(0.0, math.inf), amp: float = 1.0) -> Profile:
    return Profile("power", domain, amp=amp, param=float(alpha))


def exponential(domain=(-math.inf, math.inf), amp: float = 1.0, rate: float = 1.0) -> Profile:
    return Profile("exponential", domain, amp=amp, rate=rate)


def cos_power(n: int, domain=None, amp: float = 1.0) -> Profile:
    """``cos(n t / 2) ** (2 / n)``, the extremal warping for Sc = n(n-1)."""
    if domain is None:
        domain = (-math.pi / n, math.pi / n)
    return Profile("cos_power", domain, amp=amp, param=int(n))


def sine(domain=(0.0, math.pi), amp: float = 1.0, rate: float = 1.0) -> Profile:
    return Profile("sine", domain, amp=amp, rate=rate)


def sqrt_quadratic(c0: float, c1: float, c2: float, domain) -> Profile:
    return Profile("sqrt_quadratic", domain, param=(float(c0), float(c1), float(c2)))


def _base(kind: str, param, x: float) -> tuple[float, float, float]:
    """Base function and its x-derivatives."""
    if kind == "constant":
        return 1.0, 0.0, 0.0
    if kind == "exponential":
        e = math.exp(x)
        return e, e, e
    if kind == "sine":
        s, c = math.sin(x), math.cos(x)
        return s, c, -s
    if kind == "power":
        al = param
        if x == 0.0:
            v = 0.0 if al > 0 else 1.0
            return v, math.inf, math.inf
        v = x**al
        return v, al * v / x, al * (al - 1) * v / (x * x)
    if kind == "cos_power":
        n = param
        c = math.cos(0.5 * n * x)
        if c <= 0.0 or abs(x) >= math.pi / n:
            return 0.0, math.nan, math.nan
        v = c ** (2.0 / n)
        tn = math.tan(0.5 * n * x)
        # (log v)' = -tan(n x / 2), (log v)'' = -(n/2) sec^2
        d1 = -v * tn
        d2 = v * (tn * tn - 0.5 * n * (1.0 + tn * tn))
        return v, d1, d2
    if kind == "sqrt_quadratic":
        c0, c1, c2 = param
        q = c0 + c1 * x + c2 * x * x
        if q <= 0.0:
            return 0.0, math.nan, math.nan
        v = math.sqrt(q)
        q1 = c1 + 2 * c2 * x
        d1 = q1 / (2 * v)
        d2 = (2 * c2) / (2 * v) - q1 * q1 / (4 * v * q)
        return v, d1, d2
    raise DomainError(f"no closed form for kind {kind!r}")


def eval_profile(profile: Profile, t: float) -> DerivativeBundle:
    """Value, first and second derivative of ``profile`` at ``t``."""
    t = float(t)
    a, b = profile.domain
    if not a <= t <= b:
        raise DomainError(f"t={t} outside profile domain [{a}, {b}]")
    if profile.kind == "sampled":
        return _eval_sampled(profile, t)
    v, d1, d2 = _base(profile.kind, profile.param, profile.rate * t)
    if not v > 0.0:
        raise DomainError(f"warping function vanishes at t={t} (domain edge)")
    k = profile.rate
    return DerivativeBundle(profile.amp * v, profile.amp * k * d1, profile.amp * k * k * d2)


def _eval_sampled(profile: Profile, t: float) -> DerivativeBundle:
    ts = profile.ts
    h = (ts[-1] - ts[0]) / (ts.size - 1)
    # nearest-knot snapping keeps the stencil on grid values for uniform grids
    i = int(np.searchsorted(ts, t))
    if i < ts.size and abs(ts[i] - t) <= 1e-12 * max(1.0, abs(t)):
        t = float(ts[i])
    elif i > 0 and abs(ts[i - 1] - t) <= 1e-12 * max(1.0, abs(t)):
        t = float(ts[i - 1])
    if t - 2 * h < ts[0] - 1e-12 * h or t + 2 * h > ts[-1] + 1e-12 * h:
        raise DomainError(f"t={t} closer than two grid steps to the sample ends")
    xs = t + h * np.arange(-2, 3)
    ys = profile._spline(xs)
    v = float(ys[2])
    if not v > 0.0:
        raise DomainError(f"sampled warping function non-positive at t={t}")
    return DerivativeBundle(v, float(_D1 @ ys) / h, float(_D2 @ ys) / (h * h))


def sample(profile: Profile, grid: Sequence[float]) -> Profile:
    """Sampled copy of ``profile`` on ``grid`` (values exact at the knots)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 5:
        raise DomainError("grid needs at least 5 points")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    a, b = profile.domain
    if grid[0] < a or grid[-1] > b:
        raise DomainError("grid leaves the profile domain")
    if profile.kind == "sampled":
        vs = profile._spline(grid)
    else:
        vs = np.array([_value(profile, t) for t in grid])
    return Profile("sampled", (grid[0], grid[-1]), ts=grid, vs=vs)


def _value(profile: Profile, t: float) -> float:
    # endpoints of closed-form domains may be zeros of the profile
    v, _, _ = _base(profile.kind, profile.param, profile.rate * t)
    return profile.amp * v


def scaled(profile: Profile, lam: float) -> Profile:
    """Profile of the metric ``lam**2 g``: ``t -> lam * phi(t / lam)``."""
    if lam <= 0:
        raise DomainError("scale factor must be positive")
    a, b = profile.domain
    if profile.kind == "sampled":
        return Profile("sampled", (lam * a, lam * b), ts=lam * profile.ts, vs=lam * profile.vs)
    return Profile(
        profile.kind,
        (lam * a, lam * b),
        amp=lam * profile.amp,
        rate=profile.rate / lam,
        param=profile.param,
    )
