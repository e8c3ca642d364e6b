import numpy as np
import pytest
from hypothesis import given, strategies as st

from critexp.errors import DomainError
from critexp.testfunc import (CutoffProfile, TestFunction, dt_phi, eta, eta_prime,
                              laplacian_phi, phi, space_integrand, time_integrand, xi,
                              xi_prime, xi_second)

PROFILE = CutoffProfile(0.25, 0.75)


def test_profile_validation():
    with pytest.raises(DomainError):
        CutoffProfile(0.5, 0.5)
    with pytest.raises(DomainError):
        CutoffProfile(0.0, 0.5)


def test_eta_plateau_and_support():
    assert np.all(eta(PROFILE, np.linspace(0.25, 0.75, 11)) == 1)
    assert np.all(eta(PROFILE, [-1.0, 0.0, 1.0, 1.5]) == 0)
    assert eta_prime(PROFILE, 0.5) == 0


@pytest.mark.parametrize("t", [0.125, 0.05, 0.2, 0.8, 0.95])
def test_eta_prime_matches_central_difference(t):
    h = 1e-6
    fd = (eta(PROFILE, t + h) - eta(PROFILE, t - h)) / (2 * h)
    assert eta_prime(PROFILE, t) == pytest.approx(fd, rel=1e-6)


def test_xi_values():
    assert xi(0.5) == 1 and xi(3.0) == 0
    assert xi_prime(1.0) == 0 and xi_prime(2.0) == 0
    with pytest.raises(DomainError):
        xi(-0.1)


@pytest.mark.parametrize("s", [1.5, 1.3, 1.7, 1.1])
def test_xi_second_matches_finite_difference(s):
    h = 1e-4
    fd = (xi(s + h) - 2 * xi(s) + xi(s - h)) / h**2
    # at s = 1.5 both vanish by symmetry of the step
    assert xi_second(s) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_phi_plateau_region():
    tf = TestFunction(16.0, 4.0, 0.5, PROFILE)
    t, r = 8.0, 0.9 * 16**0.5
    assert phi(tf, t, r) == 1
    assert dt_phi(tf, t, r) == 0
    assert laplacian_phi(tf, t, r, 3) == 0


def test_phi_outside_spatial_support():
    tf = TestFunction(16.0, 4.0, 0.5, PROFILE)
    r = np.sqrt(2) * 4 * np.array([1.0, 1.01, 3.0])
    for f in (phi, dt_phi):
        assert np.all(f(tf, 8.0, r) == 0)
    assert np.all(laplacian_phi(tf, 8.0, r, 3) == 0)


def _fd_laplacian(tf, t, r, N, h):
    f = lambda rr: phi(tf, t, rr)  # noqa: E731
    d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h**2)
    d1 = (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)
    return d2 + (N - 1) / r * d1


def test_laplacian_phi_matches_five_point_radial_stencil():
    T = 16.0
    tf = TestFunction(T, 4.0, 0.5, PROFILE)
    t, r = 0.5 * T, 1.2 * T**0.5
    assert laplacian_phi(tf, t, r, 3) == pytest.approx(_fd_laplacian(tf, t, r, 3, 1e-3), rel=1e-4)


def test_laplacian_vanishes_at_origin():
    # xi is flat on [0, 1], so the origin is always on the plateau
    tf = TestFunction(1.0, 3.0, 0.5, PROFILE)
    assert laplacian_phi(tf, 0.5, 0.0, 4) == 0


t_frac = st.floats(-0.5, 1.5)
r_frac = st.floats(0.0, 3.0)
scale = st.floats(0.1, 1e4)


@given(t_frac, r_frac, scale, st.floats(0.1, 2.0))
def test_support_and_bounds(tf_, rf, T, theta):
    tf = TestFunction(T, 4.0, theta, PROFILE)
    t, r = tf_ * T, rf * T**theta
    v = float(phi(tf, t, r))
    assert 0 <= v <= 1
    if tf_ <= 0 or tf_ >= 1 or r >= np.sqrt(2) * T**theta:
        assert v == 0


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.6), scale, st.floats(0.2, 1.5))
def test_scale_covariance(s, y, T, theta):
    tf = TestFunction(T, 3.5, theta, PROFILE)
    unit = tf.with_scale(1.0)
    assert float(phi(tf, s * T, y * T**theta)) == pytest.approx(float(phi(unit, s, y)), abs=1e-12)


def test_derivatives_match_finite_differences_at_random_points():
    rng = np.random.default_rng(7)
    N = 3
    checked = 0
    for _ in range(1000):
        T = 10 ** rng.uniform(0, 3)
        theta = rng.uniform(0.3, 1.0)
        tf = TestFunction(T, 4.0, theta, PROFILE)
        # stay away from the flat zones where both sides are ~0 and from supports' edges
        s = rng.choice([rng.uniform(0.05, 0.22), rng.uniform(0.78, 0.95)])
        y = rng.uniform(1.05, 1.38)
        t, r = s * T, y * T**theta
        ht = 1e-5 * T
        fd_t = (phi(tf, t + ht, r) - phi(tf, t - ht, r)) / (2 * ht)
        assert dt_phi(tf, t, r) == pytest.approx(fd_t, rel=1e-4)
        hr = 1e-4 * T**theta
        assert laplacian_phi(tf, t, r, N) == pytest.approx(_fd_laplacian(tf, t, r, N, hr), rel=1e-4)
        checked += 1
    assert checked == 1000


def test_time_integrand_equals_naive_formula():
    tf = TestFunction(16.0, 4.0, 0.5, PROFILE)
    t = np.array([0.7, 2.0, 3.5, 13.0, 15.5])
    m = 2.0
    lam = tf.lam(t)
    naive = lam ** (-1 / (m - 1)) * np.abs(tf.dlam(t)) ** (m / (m - 1))
    assert time_integrand(tf, t, m) == pytest.approx(naive, rel=1e-10)


def test_space_integrand_equals_naive_formula():
    tf = TestFunction(16.0, 4.0, 0.5, PROFILE)
    r = 4.0 * np.array([1.05, 1.2, 1.35])
    m = 2.0
    naive = tf.mu(r) ** (-1 / (m - 1)) * np.abs(tf.laplacian_mu(r, 3)) ** (m / (m - 1))
    assert space_integrand(tf, r, m, 3) == pytest.approx(naive, rel=1e-10)


def test_integrands_vanish_where_phi_does():
    tf = TestFunction(16.0, 4.0, 0.5, PROFILE)
    assert np.all(time_integrand(tf, np.array([0.0, 16.0, 20.0]), 2.0) == 0)
    assert np.all(space_integrand(tf, np.array([0.0, 2.0, 5.7, 6.0]), 2.0, 3) == 0)
