"""Critical exponents of the inhomogeneous higher-order evolution problem

    d^k u/dt^k - Lap u = |u|^p + |d^{k-1}u/dt^{k-1}|^q + w(t, x)

and classification of parameter points into nonexistence and
possible-existence regions.

Infinite exponents are represented by ``math.inf``; every comparison in
this module is well defined against it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import DomainError

#: Relative tolerance under which p is treated as equal to the Fujita exponent.
CRITICAL_RTOL = 1e-12


class Verdict(str, enum.Enum):
    NONEXISTENCE = "Nonexistence"
    GLOBAL_EXISTENCE_POSSIBLE = "GlobalExistencePossible"
    CRITICAL_UNKNOWN = "CriticalUnknown"
    OUT_OF_SCOPE = "OutOfScope"


@dataclass(frozen=True)
class ProblemParams:
    """Parameters (k, p, q, N) of the evolution problem."""

    k: int
    p: float
    q: float
    N: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise DomainError(f"k must be an integer >= 2, got {self.k}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be an integer >= 1, got {self.N}")
        if not self.p > 1:
            raise DomainError(f"p must exceed 1, got {self.p}")
        if not self.q > 1:
            raise DomainError(f"q must exceed 1, got {self.q}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    theorem_tag: str
    detail: str = ""

    def to_dict(self):
        return {"verdict": self.verdict.value, "theorem_tag": self.theorem_tag,
                "detail": self.detail}


class Scaling(NamedTuple):
    theta: float
    ell: float
    criterion_exp: Optional[float]


@dataclass(frozen=True)
class ExponentSet:
    p_star: float
    p_strauss: float
    q_glassey: float
    a_star: float
    theta: float
    ell: float
    criterion_exp: float

    def to_dict(self):
        return {k: _json_real(v) for k, v in self.__dict__.items()}


def _json_real(x):
    return "inf" if math.isinf(x) else x


def _check_dim(N, lowest):
    if int(N) != N or N < lowest:
        raise DomainError(f"N must be an integer >= {lowest}, got {N}")


def fujita_exponent(N: int) -> float:
    """First critical exponent p*(N): inf for N <= 2, N/(N-2) otherwise."""
    _check_dim(N, 1)
    if N <= 2:
        return math.inf
    return N / (N - 2)


def strauss_exponent(N: int) -> float:
    """Positive root of (N-1) p^2 - (N+1) p - 2 = 0."""
    _check_dim(N, 2)
    return ((N + 1) + math.sqrt(N * N + 10 * N - 7)) / (2 * (N - 1))


def glassey_exponent(N: int) -> float:
    _check_dim(N, 1)
    if N == 1:
        return math.inf
    return 1 + 2 / (N - 1)


def second_critical_exponent(p: float) -> float:
    """Decay rate a* = 2p/(p-1) separating slow and fast decaying forcing."""
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    return 2 * p / (p - 1)


def criterion_exponent(p, q, N):
    """Power of T multiplying the forcing integral in the blow-up criterion."""
    return q / (q - 1) * (1 - N * (p - 1) / (2 * p)) - 1


def optimal_scaling(p: float, q: float, N: Optional[int] = None) -> Scaling:
    """Spatial scaling theta and cutoff power ell balancing both Young terms.

    theta is chosen so that the Laplacian term (power p) and the time
    derivative term (power q) scale identically in T. ``criterion_exp`` is
    only computed when N is given.
    """
    if not p > 1:
        raise DomainError(f"p must exceed 1, got {p}")
    if not q > 1:
        raise DomainError(f"q must exceed 1, got {q}")
    theta = (p - 1) * q / (2 * (q - 1) * p)
    ell = max(q / (q - 1), 2 * p / (p - 1))
    E = None if N is None else criterion_exponent(p, q, N)
    return Scaling(theta, ell, E)


def exponent_set(params: ProblemParams) -> ExponentSet:
    N, p, q = params.N, params.p, params.q
    sc = optimal_scaling(p, q, N)
    return ExponentSet(
        p_star=fujita_exponent(N),
        # the Strauss quadratic degenerates for N=1; the conventional value is inf
        p_strauss=strauss_exponent(N) if N >= 2 else math.inf,
        q_glassey=glassey_exponent(N),
        a_star=second_critical_exponent(p),
        theta=sc.theta,
        ell=sc.ell,
        criterion_exp=sc.criterion_exp,
    )


def _is_critical(p, p_star):
    return math.isfinite(p_star) and abs(p - p_star) <= CRITICAL_RTOL * p_star


def classify_fujita(params: ProblemParams) -> Classification:
    """Verdict with respect to the first critical exponent (w = g(x)).

    q does not enter the verdict; it is only validated by ProblemParams.
    """
    p, N = params.p, params.N
    p_star = fujita_exponent(N)
    if _is_critical(p, p_star):
        return Classification(Verdict.CRITICAL_UNKNOWN, "Theorem 2, Remark (iii)",
                              f"p equals p*(N) = {p_star:g}; left open")
    if p < p_star:
        return Classification(Verdict.NONEXISTENCE, "Theorem 2(I)",
                              f"1 < p < p*(N) = {_json_real(p_star)}")
    return Classification(Verdict.GLOBAL_EXISTENCE_POSSIBLE, "Theorem 2(II)",
                          f"N >= 3 and p > p*(N) = {p_star:g}")


def classify_second(params: ProblemParams, a: float) -> Classification:
    """Verdict with respect to the second critical exponent a* = 2p/(p-1).

    Nonexistence refers to every g in I_a, existence to some g in J_a.
    """
    p, N = params.p, params.N
    tag = "Theorem 3"
    if N < 3:
        return Classification(Verdict.OUT_OF_SCOPE, tag, "requires N >= 3")
    p_star = fujita_exponent(N)
    if p < p_star or _is_critical(p, p_star):
        return Classification(Verdict.OUT_OF_SCOPE, tag, "requires p > p*(N)")
    if not a < N:
        return Classification(Verdict.OUT_OF_SCOPE, tag, "requires a < N")
    a_star = second_critical_exponent(p)
    if a < a_star:
        return Classification(Verdict.NONEXISTENCE, "Theorem 3(I)",
                              f"a < a* = {a_star:g}, for every g in I_a")
    return Classification(Verdict.GLOBAL_EXISTENCE_POSSIBLE, "Theorem 3(II)",
                          f"a* = {a_star:g} <= a < N, for some g in J_a")


def sigma_bound(N, sigma):
    """Upper limit N/(N - 2(sigma+1)) on p for a forcing growing like t^(q sigma/(q-1))."""
    return N / (N - 2 * (sigma + 1))


def classify_sigma_example(params: ProblemParams, sigma: float) -> Classification:
    """Verdict for separable forcing f(t) g(x) with f(t) >= C t^(q sigma/(q-1))."""
    p, q, N = params.p, params.q, params.N
    tag = "Corollary 1 (power-law f example)"
    lo, hi = -1 + 1 / q, -1 + N / 2
    if not lo < sigma < hi:
        return Classification(Verdict.OUT_OF_SCOPE, tag,
                              f"sigma must lie in ({lo:g}, {hi:g})")
    bound = sigma_bound(N, sigma)
    if 1 < p < bound and q > max(1.0, 2 / N):
        return Classification(Verdict.NONEXISTENCE, tag, f"1 < p < {bound:g}")
    return Classification(Verdict.CRITICAL_UNKNOWN, tag,
                          f"p >= {bound:g} or q <= max(1, 2/N); criterion inconclusive")
