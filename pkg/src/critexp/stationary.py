"""Explicit positive stationary solutions

    u(r) = eps (1 + r^2)^(-delta/2),   -Lap u = u^p + g,
    g(r) = eps delta (N + (N - delta - 2) r^2) (1 + r^2)^(-delta/2 - 2) - eps^p (1 + r^2)^(-delta p/2),

which are global solutions of the evolution problem with w = g (all time
derivatives zero). Admissible when a - 2 <= delta < N - 2 and
0 < eps < [delta (N - delta - 2)]^(1/(p-1)); then g > 0 and g <= C r^(-a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationError, DomainError, PreconditionError
from .exponents import fujita_exponent, second_critical_exponent


def eps_bound(N, p, delta):
    """Upper limit [delta (N - delta - 2)]^(1/(p-1)) on the amplitude eps."""
    return (delta * (N - delta - 2)) ** (1 / (p - 1))


def admissible_range(N, p, a):
    """Admissible delta interval [a-2, N-2) and the eps bound as a function of delta.

    Raises DomainError unless N >= 3, p > N/(N-2) and a* <= a < N.
    """
    if int(N) != N or N < 3:
        raise DomainError(f"need N >= 3, got {N}")
    if not p > fujita_exponent(N):
        raise DomainError(f"need p > p*(N) = {fujita_exponent(N):g}, got {p}")
    a_star = second_critical_exponent(p)
    if not a_star <= a < N:
        raise DomainError(f"need a* = {a_star:g} <= a < N = {N}, got a = {a}")
    return (a - 2, N - 2), (lambda delta: eps_bound(N, p, delta))


@dataclass(frozen=True)
class StationaryParams:
    N: int
    p: float
    a: float
    delta: float
    epsilon: float

    def __post_init__(self):
        (lo, hi), bound = admissible_range(self.N, self.p, self.a)
        if not lo <= self.delta < hi:
            raise PreconditionError(f"need {lo:g} <= delta < {hi:g}, got {self.delta}")
        eb = bound(self.delta)
        if not 0 < self.epsilon < eb:
            raise PreconditionError(f"need 0 < epsilon < {eb:.6g}, got {self.epsilon}")

    @classmethod
    def default(cls, N, p, a):
        """delta = a - 2 (tight decay) and eps at half its bound."""
        (lo, _), bound = admissible_range(N, p, a)
        return cls(N, p, a, lo, 0.5 * bound(lo))

    @property
    def eps_bound(self):
        return eps_bound(self.N, self.p, self.delta)


def u_value(sp: StationaryParams, r):
    r = np.asarray(r, dtype=float)
    return sp.epsilon * (1 + r**2) ** (-sp.delta / 2)


def u_prime(sp: StationaryParams, r):
    r = np.asarray(r, dtype=float)
    return -sp.epsilon * sp.delta * r * (1 + r**2) ** (-sp.delta / 2 - 1)


def u_second(sp: StationaryParams, r):
    r = np.asarray(r, dtype=float)
    e, d = sp.epsilon, sp.delta
    return (-e * d * (1 + r**2) ** (-d / 2 - 1)
            + e * d * (d + 2) * r**2 * (1 + r**2) ** (-d / 2 - 2))


def laplacian_u(sp: StationaryParams, r):
    """u'' + (N-1)/r u', with u'(r)/r taken in closed form so r = 0 is regular."""
    r = np.asarray(r, dtype=float)
    u_over_r = -sp.epsilon * sp.delta * (1 + r**2) ** (-sp.delta / 2 - 1)
    return u_second(sp, r) + (sp.N - 1) * u_over_r


def neg_laplacian_u(sp: StationaryParams, r):
    """-Lap u = eps delta (N + (N - delta - 2) r^2) (1 + r^2)^(-delta/2 - 2)."""
    r = np.asarray(r, dtype=float)
    N, d, e = sp.N, sp.delta, sp.epsilon
    return e * d * (N + (N - d - 2) * r**2) * (1 + r**2) ** (-d / 2 - 2)


def g_value(sp: StationaryParams, r):
    r = np.asarray(r, dtype=float)
    return neg_laplacian_u(sp, r) - sp.epsilon**sp.p * (1 + r**2) ** (-sp.delta * sp.p / 2)


def g_lower_bound(sp: StationaryParams, r):
    """eps (1+r^2)^(-delta/2-1) (delta (N-delta-2) - eps^(p-1)), a positive minorant of g."""
    r = np.asarray(r, dtype=float)
    N, d, e = sp.N, sp.delta, sp.epsilon
    return e * (1 + r**2) ** (-d / 2 - 1) * (d * (N - d - 2) - e ** (sp.p - 1))


def g_upper_bound(sp: StationaryParams, r):
    """eps delta N (1 + r^2)^(-delta/2 - 1)."""
    r = np.asarray(r, dtype=float)
    return sp.epsilon * sp.delta * sp.N * (1 + r**2) ** (-sp.delta / 2 - 1)


def certification_grid(r_max=100.0, n_grid=2048, r_min=1e-3):
    """r = 0 followed by n_grid - 1 geometrically spaced radii in [r_min, r_max]."""
    return np.concatenate([[0.0], np.geomspace(r_min, r_max, n_grid - 1)])


@dataclass
class StationarySolution:
    params: StationaryParams
    decay_constant: float
    min_g: float
    argmin_g: float
    max_residual: float
    far_field_slope: float
    far_field_radius: float
    r_max: float
    n_grid: int
    tol: float
    theorem_tag: str = "Theorem 3(II)"
    table: dict = field(default=None, repr=False)

    def to_dict(self):
        sp = self.params
        return {
            "params": {"N": sp.N, "p": sp.p, "a": sp.a, "delta": sp.delta,
                       "epsilon": sp.epsilon, "epsilon_bound": sp.eps_bound,
                       "a_star": second_critical_exponent(sp.p)},
            "certified": True,
            "decay_constant": self.decay_constant,
            "min_g": self.min_g,
            "argmin_g": self.argmin_g,
            "max_residual": self.max_residual,
            "far_field_slope": self.far_field_slope,
            "far_field_radius": self.far_field_radius,
            "r_max": self.r_max,
            "n_grid": self.n_grid,
            "tol": self.tol,
            "theorem_tag": self.theorem_tag,
        }


def tail_decay_bound(sp: StationaryParams, r_max):
    """Constant C with g(r) <= C r^(-a) for every r >= r_max >= 1.

    From g <= eps delta (N + (N-delta-2) r^2) (1+r^2)^(-delta/2-2) and
    r^a (1+r^2)^(-delta/2-1) <= 1 for r >= 1 (as delta + 2 >= a).
    """
    if r_max < 1:
        raise DomainError("tail bound needs r_max >= 1")
    N, d, e = sp.N, sp.delta, sp.epsilon
    return e * d * (N - d - 2 + N / r_max**2)


def far_field_slope(sp: StationaryParams, r_max):
    """Least-squares slope of log g against log r on [r_max/2, r_max]."""
    r = np.geomspace(r_max / 2, r_max, 64)
    return float(np.polyfit(np.log(r), np.log(g_value(sp, r)), 1)[0])


def far_field_radius(sp: StationaryParams, r_min=100.0, level=1e-2, r_cap=1e12):
    """Smallest radius >= r_min (up to r_cap) where g is within ``level`` of its power law.

    Two corrections to g ~ A r^(-delta-2) shift the local log-log slope:
    the N-term of the numerator, of relative size N / ((N-delta-2) r^2), and
    the subtracted eps^p term, which decays faster by r^(-eta) with
    eta = delta (p-1) - 2 >= 0. Both blow up as delta -> N-2 or
    eps -> its bound, pushing the asymptotic regime out to large r.
    """
    N, d, e, p = sp.N, sp.delta, sp.epsilon, sp.p
    R = max(r_min, math.sqrt(2 * (N + d + 4) / ((N - d - 2) * level)))
    eta = d * (p - 1) - 2
    ratio = (e / sp.eps_bound) ** (p - 1)
    while R < r_cap:
        x = ratio * R ** (-eta)
        if eta * x / (1 - x) <= level:
            break
        R *= 10
    return min(R, r_cap)


def certify(sp: StationaryParams, r_max=100.0, n_grid=2048, tol=1e-9) -> StationarySolution:
    """Check positivity of g, the elliptic identity, and the decay constant on a grid.

    The decay constant bounds g r^a on all of r >= r_max/2: the sampled
    maximum on [r_max/2, r_max] combined with ``tail_decay_bound`` beyond.

    The reported far-field slope is measured on [R/2, R] with R from
    ``far_field_radius``, which is never below r_max.

    The residual -Lap u - u^p - g uses the Laplacian assembled from u' and
    u'' separately, so it is a genuine floating-point check of the
    identity rather than a cancellation of the same expression.

    Raises
    ------
    CertificationError
        Naming the failing check and the radius where it fails.
    """
    r = certification_grid(r_max, n_grid)
    u = u_value(sp, r)
    g = g_value(sp, r)
    resid = -laplacian_u(sp, r) - u**sp.p - g
    if not np.all(np.isfinite(g)):
        raise CertificationError("finite g", float(r[~np.isfinite(g)][0]))
    i = int(np.argmin(g))
    if not g[i] > 0:
        raise CertificationError("positivity of g", float(r[i]), f"g = {g[i]:.3e}")
    j = int(np.argmax(np.abs(resid)))
    if not abs(resid[j]) <= tol:
        raise CertificationError("elliptic residual", float(r[j]),
                                 f"|residual| = {abs(resid[j]):.3e} > {tol:g}")
    far = r >= r_max / 2
    C = max(float(np.max(g[far] * r[far] ** sp.a)), tail_decay_bound(sp, r_max))
    if not math.isfinite(C):
        raise CertificationError("decay constant", float(r_max))
    R = far_field_radius(sp, r_max)
    return StationarySolution(
        params=sp, decay_constant=C, min_g=float(g[i]), argmin_g=float(r[i]),
        max_residual=float(abs(resid[j])), far_field_slope=far_field_slope(sp, R),
        far_field_radius=R, r_max=r_max, n_grid=n_grid, tol=tol,
        table={"r": r, "u": u, "g": g, "residual": resid},
    )


def fujita_supercritical_witness(N, p, **kwargs) -> StationarySolution:
    """Certified stationary solution at a = a*, delta = 2/(p-1), eps = half its bound."""
    a = second_critical_exponent(p)
    sol = certify(StationaryParams.default(N, p, a), **kwargs)
    sol.theorem_tag = "Theorem 2(II)"
    return sol
