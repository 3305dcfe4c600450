"""The twelve acceptance criteria with pinned tolerances.

Each check returns a :class:`CriterionResult`; ``run_all`` is what the
``verify-all`` command and the acceptance test module execute.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from scband import extremal, hypersurface, smoothing, torus, warped
from scband import profiles as pf


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    formula: str


def _result(number, name, formula, ok, detail):
    return CriterionResult(number, name, bool(ok), detail, formula)


def extremal_width() -> CriterionResult:
    errs = []
    for n in range(2, 11):
        lo, hi = extremal.blow_up_interval(extremal.BandSpec.constant(n, n * (n - 1)))
        errs.append(abs((hi - lo) - 2 * math.pi / n))
    worst = max(errs)
    return _result(1, "extremal width 2pi/n", "blow-up interval of -2f'-nf^2 = n", worst <= 1e-6,
                   f"max |length - 2pi/n| = {worst:.3e} over n=2..10")


def extremal_metric() -> CriterionResult:
    worst = 0.0
    for n in range(2, 11):
        metric = warped.WarpedBandMetric.equal(pf.cos_power(n), n)
        edge = math.pi / n
        for t in np.linspace(-edge, edge, 1003)[1:-1]:
            worst = max(worst, abs(warped.scalar_curvature_band(metric, t) - n * (n - 1)))
    return _result(2, "extremal metric curvature", "Sc(dt^2 + cos(nt/2)^(4/n) g_flat) = n(n-1)",
                   worst <= 1e-8, f"max |Sc - n(n-1)| = {worst:.3e} on 1001 interior points, n=2..10")


def hyperbolic_model() -> CriterionResult:
    worst = 0.0
    for n in range(2, 11):
        metric = warped.WarpedBandMetric.equal(pf.exponential(), n, (-3.0, 3.0))
        for t in np.linspace(-2.5, 2.5, 21):
            worst = max(
                worst,
                abs(warped.scalar_curvature_band(metric, t) + n * (n - 1)),
                abs(warped.mean_curvature_slice(metric, t) - (n - 1)),
                abs(warped.ricci_normal_direction(metric, t) + (n - 1)),
            )
    return _result(3, "hyperbolic model", "Sc = -n(n-1), H = n-1, Ric(dt,dt) = -(n-1) for phi = e^t",
                   worst <= 1e-10, f"max deviation {worst:.3e}")


def hyperbolic_rigidity() -> CriterionResult:
    ok, seen = True, []
    for n in range(2, 7):
        s = -n * (n - 1)
        eq = extremal.max_band_width(extremal.BandSpec.constant(n, s, -(n - 1), n - 1)).status
        p1 = extremal.max_band_width(extremal.BandSpec.constant(n, s, -(n - 1), n - 1 + 0.1)).status
        p2 = extremal.max_band_width(extremal.BandSpec.constant(n, s, -(n - 1) - 0.1, n - 1 + 0.1)).status
        ok &= eq == "degenerate" and p1 == "infeasible" and p2 == "infeasible"
        seen.append(f"n={n}:{eq}/{p1}/{p2}")
    return _result(4, "hyperbolic rigidity", "Sc >= -n(n-1), H+ >= n-1+0.1 admits no band",
                   ok, " ".join(seen))


def torus_table() -> CriterionResult:
    r = torus.focal_radius_table(1024)
    r4 = 1 / (1 + 2 * math.sqrt(2))
    checks = [
        abs(r[4] - r4) <= 1e-12,
        r[8] > 1 / 13,
        all(r[n] * n**1.5 > 1 / 3 for n in r),
        all(r[2**i] * (2**i) ** 1.5 > 1 for i in range(1, 11)),
    ]
    worst = min(r[n] * n**1.5 for n in r)
    return _result(5, "torus focal radius table", "r(2n) = r(n)/(2 sqrt 2 + r(n))", all(checks),
                   f"r(4)={r[4]:.12g} r(8)={r[8]:.12g} min r(n) n^1.5={worst:.6g}")


def lipschitz() -> CriterionResult:
    val = torus.lipschitz_lower_bound(3, 6.0, math.pi / 2)
    cross = torus.crossover_vs_classical()
    return _result(6, "Lipschitz bounds", "(d/2pi) sqrt(sigma n/(n-1))", val == 0.75 and cross == 6,
                   f"bound={val!r} crossover n={cross}")


def focal_oracle(resolution: int = 128) -> CriterionResult:
    start = time.perf_counter()
    cases = [
        ("circle", torus.circle(), 1.0, 0.01),
        ("product torus", torus.pair(torus.circle(), torus.circle()), 1 / math.sqrt(2), 0.02),
        ("Y(4)", torus.build(4), torus.focal_radius_table(4)[4], 0.05),
    ]
    ok, parts = True, []
    for name, node, ref, tol in cases:
        est = torus.brute_force_focal_radius(torus.embed_and_sample(node, resolution))
        rel = abs(est / ref - 1)
        ok &= rel <= tol
        parts.append(f"{name}: {est:.6g} (rel {rel:.1e})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    return _result(7, "focal radius oracle", "normal injectivity radius from sampled normals", ok,
                   "; ".join(parts) + f"; {elapsed:.1f}s")


def gauss() -> CriterionResult:
    cliff = hypersurface.gauss_scalar_curvature(hypersurface.PrincipalCurvatures((1.0, -1.0), 3))
    worst = 0.0
    for n in range(3, 9):
        for rho in np.round(np.arange(0.1, 1.01, 0.1), 10):
            lam = math.sqrt(1 - rho * rho) / rho
            sc = hypersurface.gauss_scalar_curvature(hypersurface.PrincipalCurvatures((lam,) * (n - 1), n))
            ref = (n - 1) * (n - 2) / rho**2
            worst = max(worst, abs(sc - ref) / max(1.0, ref))
    return _result(8, "Gauss equation", "Sc = (n-1)(n-2) + (sum c)^2 - sum c^2",
                   cliff == 0.0 and worst <= 1e-10, f"Clifford Sc={cliff!r}; umbilic max rel dev {worst:.2e}")


def bending() -> CriterionResult:
    c = smoothing.bending_leading_coefficient([1, 1, 1], [0, 0, 0], [1, 0, 0])
    return _result(9, "bending law", "Sc = -trace(A_old - A_new)/eps + O(1)", abs(c + 1) <= 0.01,
                   f"fitted 1/eps coefficient {c:.8f}")


def rounding() -> CriterionResult:
    eps = 1e-4
    flat = smoothing.rounding_tube(smoothing.RoundingProblem(3, 1.0, eps, 0.0))
    side = [smoothing.rounding_tube(smoothing.RoundingProblem(3, 1.0, e, math.pi / 2)).sc for e in (1e-2, 1e-3, 1e-4)]
    lam_n = eps * flat.lambda_n
    ratio = eps * flat.sc / 4
    ok = lam_n == 1.0 and abs(ratio - 1) <= 0.01 and max(abs(s) for s in side) <= 1e-6
    return _result(10, "rounding law", "Sc(W) = (2 mn/eps) cos(theta) + O(1)", ok,
                   f"eps*lambda_n={lam_n!r} eps*Sc/4={ratio:.6f} Sc(theta=pi/2)={side}")


def quadratic_decay() -> CriterionResult:
    worst, ok = 0.0, True
    for alpha in np.linspace(0.05, 0.95, 10):
        for R in (1.5, 2.0, 5.0, 10.0, 100.0):
            mn, bound = smoothing.quadratic_decay_profile(alpha, R)
            worst = max(worst, abs(mn - 2 * alpha * (1 - alpha) / R**2))
            ok &= mn <= bound
    return _result(11, "quadratic decay", "min Sc = 2 alpha (1 - alpha)/R^2 <= 4 pi^2/R^2",
                   ok and worst <= 1e-8, f"max deviation {worst:.2e}")


# -- property suites ---------------------------------------------------------


def _closed_form_metrics() -> list[warped.WarpedBandMetric]:
    out = []
    for n in (2, 3, 4, 5):
        out.append(warped.WarpedBandMetric.equal(pf.cos_power(n), n, (-0.8 * math.pi / n, 0.8 * math.pi / n)))
        out.append(warped.WarpedBandMetric.equal(pf.exponential(rate=0.5 + 0.25 * n), n, (-1.0, 1.0)))
        out.append(warped.WarpedBandMetric.equal(pf.power(0.3 * n), n, (0.5, 2.0)))
        out.append(warped.WarpedBandMetric.equal(pf.sine(), n, (0.4, 2.7)))
        prof = (pf.sqrt_quadratic(1.0, 0.3 * k, -0.2, (0.0, 1.0)) for k in range(n - 1))
        out.append(warped.WarpedBandMetric(n, tuple(prof), (0.0, 1.0)))
    return out


def scaling_covariance_suite() -> float:
    """Max relative deviation of ``Sc(lam^2 g)(lam t) = Sc(g)(t) / lam^2`` and width scaling."""
    worst = 0.0
    metrics = _closed_form_metrics()
    lams = (0.5, 2.0, 3.7)
    for i, m in enumerate(metrics):
        lam = lams[i % 3]
        a, b = m.interval
        t = a + 0.37 * (b - a)
        s0 = warped.scalar_curvature_band(m, t)
        s1 = warped.scalar_curvature_band(m.scaled(lam), lam * t)
        worst = max(worst, abs(s1 * lam * lam - s0) / max(1.0, abs(s0)))
    for n in (2, 3, 4, 5):
        for lam in (0.5, 2.0):
            spec = extremal.BandSpec.constant(n, n * (n - 1))
            lo, hi = extremal.blow_up_interval(spec)
            lo2, hi2 = extremal.blow_up_interval(spec.scaled(lam))
            worst = max(worst, abs((hi2 - lo2) - lam * (hi - lo)) / (hi - lo))
    return worst


def cross_validation_suite() -> float:
    worst = 0.0
    for m in _closed_form_metrics():
        a, b = m.interval
        grid = np.linspace(a, b, 801)
        worst = max(worst, warped.cross_validate(m, grid).residual_max)
    return worst


def monotonicity_suite() -> int:
    """Number of violations of width monotonicity in sigma and in M+."""
    bad = 0
    for n in (2, 3, 4, 5):
        widths = [extremal.max_band_width(extremal.BandSpec.constant(n, s)).width for s in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)]
        bad += sum(w2 > w1 * (1 + 1e-9) for w1, w2 in zip(widths, widths[1:]))
        mp = [extremal.max_band_width(extremal.BandSpec.constant(n, n * (n - 1), -math.inf, h)).width
              for h in (-4.0, -1.0, 0.0, 1.0)]
        mp = [0.0 if w is None else w for w in mp]
        bad += sum(w2 > w1 * (1 + 1e-9) for w1, w2 in zip(mp, mp[1:]))
    return bad


def _even_sigmas() -> list[tuple[int, Callable[[float], float]]]:
    out = []
    for n in (2, 3, 4, 5, 6):
        for a, b, c in ((1.0, 0.5, 1.0), (2.0, -0.5, 2.0), (0.5, 0.3, 3.0), (3.0, 1.0, 0.5)):
            out.append((n, lambda t, a=a, b=b, c=c: a + b * math.cos(c * t)))
    return out


def symmetry_suite() -> float:
    """Max |f(t) + f(-t)| for odd solutions through f(0) = 0 with even sigma."""
    worst = 0.0
    for n, sig in _even_sigmas():
        spec = extremal.BandSpec(n, sig)
        fwd = extremal.integrate_riccati(spec, 0.0, 0.0, +1, t_end=0.5)
        back = extremal.integrate_riccati(spec, 0.0, 0.0, -1, t_end=-0.5)
        worst = max(worst, abs(fwd.f_stop + back.f_stop))
        lo, hi = extremal.blow_up_interval(spec)
        if lo is not None:
            worst = max(worst, abs(lo + hi))
    return worst


def property_suites() -> CriterionResult:
    scale = scaling_covariance_suite()
    fd = cross_validation_suite()
    mono = monotonicity_suite()
    sym = symmetry_suite()
    ok = scale <= 1e-8 and fd < 1e-6 and mono == 0 and sym <= 1e-8
    return _result(12, "property suites", "scaling, finite differences, monotonicity, symmetry", ok,
                   f"scaling {scale:.1e}; fd residual {fd:.1e}; monotonicity violations {mono}; symmetry {sym:.1e}")


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    extremal_width,
    extremal_metric,
    hyperbolic_model,
    hyperbolic_rigidity,
    torus_table,
    lipschitz,
    focal_oracle,
    gauss,
    bending,
    rounding,
    quadratic_decay,
    property_suites,
)


def run_all() -> list[CriterionResult]:
    return [c() for c in CRITERIA]
