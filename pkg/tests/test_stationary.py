import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critexp.criterion import (CriterionQuadrature, GrowthVerdict, Separable, constant,
                               evaluate_criterion)
from critexp.errors import CertificationError, DomainError, PreconditionError
from critexp.exponents import ProblemParams, second_critical_exponent
from critexp.stationary import (StationaryParams, admissible_range, certify, eps_bound,
                                far_field_radius, far_field_slope, fujita_supercritical_witness,
                                g_lower_bound, g_upper_bound, g_value, laplacian_u,
                                neg_laplacian_u, tail_decay_bound, u_value)


def test_example_certifies():
    sol = certify(StationaryParams(5, 3.0, 3.0, 1.0, 1.0))
    assert sol.max_residual < 1e-9
    assert sol.min_g > 0
    assert sol.theorem_tag == "Theorem 3(II)"
    assert sol.to_dict()["certified"] is True


def test_eps_bound_value():
    assert eps_bound(5, 3.0, 1.0) == pytest.approx(math.sqrt(2))
    assert eps_bound(3, 4.0, 2 / 3) == pytest.approx((2 / 9) ** (1 / 3))


def test_admissible_range():
    (lo, hi), bound = admissible_range(5, 3.0, 3.0)
    assert (lo, hi) == (1.0, 3.0)
    assert bound(1.0) == pytest.approx(math.sqrt(2))
    with pytest.raises(DomainError):
        admissible_range(2, 3.0, 1.0)
    with pytest.raises(DomainError):
        admissible_range(5, 1.5, 4.5)
    with pytest.raises(DomainError):
        admissible_range(5, 3.0, 2.9)
    with pytest.raises(DomainError):
        admissible_range(5, 3.0, 5.0)


@pytest.mark.parametrize("delta, eps", [(0.9, 1.0), (3.0, 1.0), (1.0, 1.5), (1.0, 0.0)])
def test_inadmissible_parameters(delta, eps):
    with pytest.raises(PreconditionError):
        StationaryParams(5, 3.0, 3.0, delta, eps)


def test_certification_reports_failing_check():
    sp = StationaryParams(5, 3.0, 3.0, 1.0, 1.0)
    with pytest.raises(CertificationError) as exc:
        certify(sp, tol=1e-30)
    assert exc.value.check == "elliptic residual"
    assert exc.value.point is not None


def test_laplacian_matches_finite_difference():
    sp = StationaryParams(5, 3.0, 3.0, 1.5, 0.8)
    rng = np.random.default_rng(11)
    r = rng.uniform(0.05, 50.0, 100)
    for ri in r:
        h = 1e-3 * max(ri, 1.0)
        f = lambda x: float(u_value(sp, x))  # noqa: E731
        d2 = (-f(ri + 2 * h) + 16 * f(ri + h) - 30 * f(ri) + 16 * f(ri - h) - f(ri - 2 * h)) / (12 * h * h)
        d1 = (-f(ri + 2 * h) + 8 * f(ri + h) - 8 * f(ri - h) + f(ri - 2 * h)) / (12 * h)
        fd = d2 + (sp.N - 1) / ri * d1
        assert float(laplacian_u(sp, ri)) == pytest.approx(fd, abs=1e-6)


def test_laplacian_regular_at_origin():
    sp = StationaryParams(5, 3.0, 3.0, 1.0, 1.0)
    # Lap u(0) = N u''(0) = -N eps delta
    assert float(laplacian_u(sp, 0.0)) == pytest.approx(-5.0)
    assert float(neg_laplacian_u(sp, 0.0)) == pytest.approx(5.0)


def _admissible(draw_N, p_frac, a_frac, d_frac, e_frac):
    N = draw_N
    p = N / (N - 2) * (1 + 0.02 + 3 * p_frac)
    a_star = second_critical_exponent(p)
    a = a_star + (N - a_star) * 0.98 * a_frac
    lo, hi = a - 2, N - 2
    delta = lo + (hi - lo) * 0.98 * d_frac
    eps = eps_bound(N, p, delta) * (0.01 + 0.98 * e_frac)
    return StationaryParams(N, p, a, delta, eps)


frac = st.floats(0.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 10), frac, frac, frac, frac)
def test_g_positive_and_sandwiched(N, pf, af, df, ef):
    sp = _admissible(N, pf, af, df, ef)
    r = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 400)])
    g = g_value(sp, r)
    lower = g_lower_bound(sp, r)
    assert np.all(lower > 0)
    assert np.all(g >= lower * (1 - 1e-12))
    assert np.all(g <= g_upper_bound(sp, r) * (1 + 1e-12))
    # u is positive and decreasing
    u = u_value(sp, r)
    assert np.all(u > 0) and np.all(np.diff(u) <= 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 10), frac, frac, frac, frac)
def test_residual_and_decay(N, pf, af, df, ef):
    sp = _admissible(N, pf, af, df, ef)
    sol = certify(sp, n_grid=512)
    assert sol.max_residual < 1e-9
    assert sol.decay_constant > 0
    # g decays like r^(-delta-2), which is at least as fast as r^(-a)
    assert sol.far_field_slope == pytest.approx(-(sp.delta + 2), abs=0.05)
    assert sol.far_field_slope <= -sp.a + 0.05


def test_decay_constant_bounds_g_in_far_field():
    sp = StationaryParams(5, 3.0, 3.0, 1.0, 1.0)
    sol = certify(sp)
    r = np.geomspace(50, 1e8, 2000)
    assert np.all(g_value(sp, r) * r**sp.a <= sol.decay_constant * (1 + 1e-9))


def test_tail_bound():
    sp = StationaryParams(5, 3.0, 3.0, 1.0, 1.0)
    r = np.geomspace(100, 1e10, 5000)
    assert np.all(g_value(sp, r) * r**sp.a <= tail_decay_bound(sp, 100.0))
    with pytest.raises(DomainError):
        tail_decay_bound(sp, 0.5)


def test_far_field_radius_grows_near_eps_bound():
    # the eps^p correction decays only like r^(-delta(p-1)+2) relative to the main term
    bound = eps_bound(5, 3.0, 1.05)
    near = StationaryParams(5, 3.0, 3.0, 1.05, 0.999 * bound)
    half = StationaryParams(5, 3.0, 3.0, 1.05, 0.5 * bound)
    assert far_field_radius(near) > far_field_radius(half)
    assert far_field_slope(near, 100.0) > -3.05 + 0.05
    assert far_field_slope(near, far_field_radius(near)) == pytest.approx(-3.05, abs=0.05)


def test_fujita_witness():
    sol = fujita_supercritical_witness(3, 4.0)
    sp = sol.params
    assert sp.a == pytest.approx(8 / 3)
    assert sp.delta == pytest.approx(2 / 3)
    assert sp.eps_bound == pytest.approx((2 / 9) ** (1 / 3))
    assert sol.theorem_tag == "Theorem 2(II)"
    with pytest.raises(DomainError):
        fujita_supercritical_witness(3, 2.0)


def test_forcing_above_second_exponent_gives_bounded_criterion():
    """Forcing decaying faster than r^(-a*) yields a decaying criterion."""
    sp = StationaryParams(5, 3.0, 3.5, 1.5, 0.5)
    params = ProblemParams(2, sp.p, 2.0, sp.N)
    w = Separable(constant(1.0), lambda r: g_value(sp, r))
    rep = evaluate_criterion(w, params, tuple(2.0**j for j in range(6, 13)),
                             cfg=CriterionQuadrature(512, 512))
    assert rep.verdict is GrowthVerdict.BOUNDED
