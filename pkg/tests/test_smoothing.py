import math

import numpy as np
import pytest

from scband import smoothing as sm
from scband.errors import DomainError


def leading_term(h, a, b, t, eps):
    """Sc of dt^2 + sum h_i(t) dtau_i^2 written out directly in h, h', h''."""
    h, a, b = (np.asarray(v, dtype=float) for v in (h, a, b))
    hh = h + t * a + t * t * (b - a) / (2 * eps)
    d1 = a + t * (b - a) / eps
    d2 = (b - a) / eps
    s = d1 / (2 * hh)  # phi'/phi
    q = d2 / (2 * hh) - d1 * d1 / (4 * hh * hh)  # phi''/phi
    return -2 * q.sum() - (s.sum() ** 2 - (s * s).sum())


def test_endpoint_identities_exact():
    fam = sm.BendingFamily([1.0, 2.0, 0.5], [0.3, -0.2, 0.7], [1.1, 0.4, -0.3], 1e-3)
    assert np.array_equal(sm.bending_metric(fam, 0.0), np.array(fam.h))
    assert np.array_equal(sm.bending_rate(fam, 0.0), np.array(fam.a_new))
    assert np.array_equal(sm.bending_rate(fam, 1e-3), np.array(fam.a_old))


def test_equal_forms_give_linear_family():
    fam = sm.BendingFamily([1.0, 2.0], [0.5, -1.0], [0.5, -1.0], 0.1)
    for t in (0.0, 0.03, 0.1):
        assert np.allclose(sm.bending_metric(fam, t), np.array([1.0, 2.0]) + t * np.array([0.5, -1.0]), rtol=0, atol=1e-15)


def test_family_validation():
    with pytest.raises(DomainError):
        sm.BendingFamily([1.0], [0.0, 0.0], [0.0], 0.1)
    with pytest.raises(DomainError):
        sm.BendingFamily([1.0], [0.0], [0.0], 0.0)
    with pytest.raises(DomainError):
        sm.BendingFamily([0.01], [-1.0], [-1.0], 0.1)  # h(eps) < 0
    fam = sm.BendingFamily([1.0], [0.0], [1.0], 0.1)
    with pytest.raises(DomainError):
        sm.bending_metric(fam, 0.2)
    with pytest.raises(DomainError):
        sm.bending_scalar_curvature(fam, 0.0)


@pytest.mark.parametrize(
    "h,a,b",
    [([1, 1, 1], [0, 0, 0], [1, 0, 0]), ([1, 2], [0.3, -0.1], [-0.4, 0.9]), ([0.5, 1, 2, 4], [1, 0, -1, 0.5], [0, 0, 0, 0])],
)
def test_scalar_curvature_matches_direct_formula(h, a, b):
    for eps in (1e-2, 1e-3):
        fam = sm.BendingFamily(h, a, b, eps)
        for frac in (0.1, 0.5, 0.9):
            t = frac * eps
            assert sm.bending_scalar_curvature(fam, t) == pytest.approx(leading_term(h, a, b, t, eps), rel=1e-12)


def test_leading_coefficient_is_minus_trace():
    for h, a, b in [([1, 1, 1], [0, 0, 0], [1, 0, 0]), ([1, 1], [0, 0], [1, 1]), ([1, 1, 1], [0.5, 0, 0], [0, 0, 0])]:
        c = sm.bending_leading_coefficient(h, a, b)
        assert c == pytest.approx(-float(np.sum(np.subtract(b, a))), abs=0.01)


def test_envelope_shrinks_with_eps():
    args = ([1, 1, 1], [0.2, 0, -0.1], [1, 0.3, 0])
    env = [sm.bending_envelope(args, e) for e in sm.EPS_LADDER]
    assert env[0] > env[1] > env[2]


def test_no_singular_term_when_forms_agree():
    vals = [abs(sm.bending_scalar_curvature(sm.BendingFamily([1, 1], [0.3, 0.1], [0.3, 0.1], e), e / 2)) for e in sm.EPS_LADDER]
    assert max(vals) < 1.0


def test_weyl_ricci():
    assert sm.weyl_ricci([1, 1, 1], [0, 0, 0], [0, 0, 0]) == 0.0
    for m in (1, 2, 5):
        for t in (0.0, 0.4):
            e = math.exp(2 * t)
            assert sm.weyl_ricci([e] * m, [2 * e] * m, [4 * e] * m) == pytest.approx(-m, rel=1e-14)
    fam = sm.BendingFamily([1, 1], [0, 0], [0, 0], 0.1)
    assert sm.weyl_ricci_check(fam, 0.05) == 0.0


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_weyl_ricci_cross_check(eps):
    fam = sm.BendingFamily([1.0, 2.0, 0.5], [0.3, -0.2, 1.0], [1.0, 0.4, -0.3], eps)
    for frac in (0.2, 0.5, 0.8):
        sm.weyl_ricci_check(fam, frac * eps)


# -- rounding ---------------------------------------------------------------------


def test_rounding_validation():
    with pytest.raises(DomainError):
        sm.RoundingProblem(3, 1.0, 0.3, 0.0)
    with pytest.raises(DomainError):
        sm.RoundingProblem(3, 1.0, 0.1, 2.0)
    with pytest.raises(DomainError):
        sm.RoundingProblem(1, 1.0, 0.1, 0.0)


ROUND_DRAWS = [(m, rho, eps, th) for m in (2, 3, 4) for rho in (1.0, 2.5) for eps in (1e-2, 1e-4)
               for th in (-1.2, 0.0, 0.7)]


@pytest.mark.parametrize("m,rho,eps,theta", ROUND_DRAWS)
def test_rounding_closed_form_matches_finite_differences(m, rho, eps, theta):
    prob = sm.RoundingProblem(m, rho, eps, theta)
    a, b = sm.rounding_tube(prob), sm.rounding_tube_fd(prob)
    assert b.lambda_n == pytest.approx(a.lambda_n, rel=1e-6)
    assert np.allclose(b.lambdas, a.lambdas, rtol=1e-6, atol=1e-8)
    assert b.sc == pytest.approx(a.sc, rel=1e-6)


def test_rounding_limits():
    for eps in (1e-2, 1e-3, 1e-4):
        flat = sm.rounding_tube(sm.RoundingProblem(3, 1.0, eps, 0.0))
        assert eps * flat.lambda_n == 1.0
        assert eps * flat.sc == pytest.approx(4.0, rel=3 * eps)
        side = sm.rounding_tube(sm.RoundingProblem(3, 1.0, eps, math.pi / 2))
        assert np.allclose(side.lambdas, 0.0, atol=1e-15)
        assert abs(side.sc) < 1e-12


def test_rounding_keeps_scalar_curvature_nonnegative():
    for th in np.linspace(-math.pi / 2, math.pi / 2, 21):
        assert sm.rounding_tube(sm.RoundingProblem(4, 1.0, 1e-3, th)).sc >= -1e-12


# -- quadratic decay ---------------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.75, 0.9])
@pytest.mark.parametrize("R", [1.5, 4.0, 20.0])
def test_quadratic_decay(alpha, R):
    mn, bound = sm.quadratic_decay_profile(alpha, R)
    assert mn == pytest.approx(2 * alpha * (1 - alpha) / R**2, rel=1e-12)
    assert bound == pytest.approx(4 * math.pi**2 / R**2)
    assert mn <= bound


def test_quadratic_decay_validation():
    with pytest.raises(DomainError):
        sm.quadratic_decay_profile(1.0, 2.0)
    with pytest.raises(DomainError):
        sm.quadratic_decay_profile(0.5, 1.0)
