"""Compactly supported test functions

    phi_T(t, x) = eta(t/T)^ell * xi(|x|^2 / T^(2 theta))^ell

built from the smooth step S(t) = s(t) / (s(t) + s(1-t)), s(t) = exp(-1/t).
All derivatives are analytic; finite differences only appear in tests.

Functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DomainError


def _step(t):
    """Smooth step S and its first two derivatives on the real line.

    For 0 < t < 1, S = 1/(1 + e^g) with g = 1/t - 1/(1-t); S is 0 for t <= 0
    and 1 for t >= 1. Written in terms of expit so no intermediate overflows.
    """
    t = np.asarray(t, dtype=float)
    inside = (t > 0) & (t < 1)
    ti = np.where(inside, t, 0.5)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        g = 1 / ti - 1 / (1 - ti)
        S = expit(-g)
        SS = S * expit(g)  # S(1-S), exact even when one factor underflows
        h = 1 / ti**2 + 1 / (1 - ti) ** 2
        dh = -2 / ti**3 + 2 / (1 - ti) ** 3
        # SS > 0 implies |g| < ~745, hence h and dh finite
        live = inside & (SS > 0)
        d1 = np.where(live, SS * h, 0.0)
        d2 = np.where(live, d1 * (1 - 2 * S) * h + SS * dh, 0.0)
    S = np.where(inside, S, np.where(t >= 1, 1.0, 0.0))
    d1 = np.where(inside, d1, 0.0)
    d2 = np.where(inside, d2, 0.0)
    return S, d1, d2


@dataclass(frozen=True)
class CutoffProfile:
    """Plateau interval [c1, c2] of the time cutoff eta."""

    c1: float = 0.25
    c2: float = 0.75

    def __post_init__(self):
        if not 0 < self.c1 < self.c2 < 1:
            raise DomainError(f"need 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}")


def _eta_all(profile, t):
    t = np.asarray(t, dtype=float)
    c1, c2 = profile.c1, profile.c2
    a, da, dda = _step(t / c1)
    b, db, ddb = _step((1 - t) / (1 - c2))
    da, dda = da / c1, dda / c1**2
    db, ddb = -db / (1 - c2), ddb / (1 - c2) ** 2
    return a * b, da * b + a * db, dda * b + 2 * da * db + a * ddb


def eta(profile: CutoffProfile, t):
    """Time cutoff: 1 on [c1, c2], 0 outside (0, 1), smooth in between."""
    return _eta_all(profile, t)[0]


def eta_prime(profile: CutoffProfile, t):
    return _eta_all(profile, t)[1]


def eta_second(profile: CutoffProfile, t):
    return _eta_all(profile, t)[2]


def _xi_all(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise DomainError("xi is defined for sigma >= 0 only")
    S, d1, d2 = _step(2 - sigma)
    return S, -d1, d2


def xi(sigma):
    """Spatial cutoff profile: 1 on [0, 1], 0 on [2, inf)."""
    return _xi_all(sigma)[0]


def xi_prime(sigma):
    return _xi_all(sigma)[1]


def xi_second(sigma):
    return _xi_all(sigma)[2]


@dataclass(frozen=True)
class TestFunction:
    """phi_T(t, r) = lambda_T(t) mu_T(r) at scale T.

    Parameters
    ----------
    T : float
        Scale. The time factor lives on (0, T), the space factor on
        ``r < sqrt(2) * T**theta``.
    ell : float
        Power applied to both cutoffs.
    theta : float
        Spatial scaling exponent.
    profile : CutoffProfile
    """

    __test__ = False  # not a pytest class

    T: float
    ell: float
    theta: float
    profile: CutoffProfile = CutoffProfile()

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"T must be positive, got {self.T}")
        if not self.ell > 0 or not self.theta > 0:
            raise DomainError("ell and theta must be positive")

    @property
    def radius(self):
        """Radius of the spatial support."""
        return np.sqrt(2.0) * self.T**self.theta

    def with_scale(self, T):
        return TestFunction(T, self.ell, self.theta, self.profile)

    def sigma(self, r):
        r = np.asarray(r, dtype=float)
        return r**2 / self.T ** (2 * self.theta)

    # -- time factor ---------------------------------------------------
    def lam(self, t):
        return _pow(eta(self.profile, np.asarray(t, dtype=float) / self.T), self.ell)

    def dlam(self, t):
        e, de, _ = _eta_all(self.profile, np.asarray(t, dtype=float) / self.T)
        return self.ell / self.T * _pow(e, self.ell - 1) * de

    # -- space factor --------------------------------------------------
    def mu(self, r):
        return _pow(xi(self.sigma(r)), self.ell)

    def laplacian_mu(self, r, N):
        """Radial Laplacian of mu_T in dimension N.

        With s = r^2/T^(2 theta) the chain rule collapses to
        ell * xi^(ell-2) * K(s) / T^(2 theta), where
        K = 4 s [(ell-1) xi'^2 + xi xi''] + 2 N xi xi'.
        This form is regular at r = 0, where it equals N * mu''(0).
        """
        s = self.sigma(r)
        x, dx, ddx = _xi_all(s)
        K = 4 * s * ((self.ell - 1) * dx**2 + x * ddx) + 2 * N * x * dx
        return self.ell * _pow(x, self.ell - 2) * K / self.T ** (2 * self.theta)


def _pow(base, expo):
    """base**expo for base >= 0, continuously extended by 0 at base = 0."""
    base = np.asarray(base, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(base > 0, np.power(np.where(base > 0, base, 1.0), expo), 0.0)
    if expo == 0:
        out = np.ones_like(out)
    return out


def phi(tf: TestFunction, t, r):
    return tf.lam(t) * tf.mu(r)


def dt_phi(tf: TestFunction, t, r):
    return tf.dlam(t) * tf.mu(r)


def laplacian_phi(tf: TestFunction, t, r, N: int):
    return tf.lam(t) * tf.laplacian_mu(r, N)


def time_integrand(tf: TestFunction, t, m):
    """lambda^(-1/(m-1)) |lambda'|^(m/(m-1)) written without the 0/0.

    Equals (ell/T)^m' eta^(ell - m') |eta'|^m' with m' = m/(m-1), which is
    bounded precisely when ell >= m'.
    """
    mp = m / (m - 1)
    e, de, _ = _eta_all(tf.profile, np.asarray(t, dtype=float) / tf.T)
    return (tf.ell / tf.T) ** mp * _pow(e, tf.ell - mp) * np.abs(de) ** mp


def space_integrand(tf: TestFunction, r, m, N):
    """mu^(-1/(m-1)) |Lap mu|^(m/(m-1)), continuously extended by 0.

    Equals ell^m' xi^(ell - 2m') |K|^m' / T^(2 theta m'); bounded precisely
    when ell >= 2m'.
    """
    mp = m / (m - 1)
    s = tf.sigma(r)
    x, dx, ddx = _xi_all(s)
    K = 4 * s * ((tf.ell - 1) * dx**2 + x * ddx) + 2 * N * x * dx
    return (tf.ell**mp * _pow(x, tf.ell - 2 * mp) * np.abs(K) ** mp
            / tf.T ** (2 * tf.theta * mp))
