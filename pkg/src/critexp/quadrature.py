"""Fixed-grid composite quadrature rules (midpoint, Simpson) and radial measures."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

SCHEMES = ("midpoint", "simpson")


def sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N, 2 pi^(N/2) / Gamma(N/2)."""
    return 2 * math.pi ** (N / 2) / math.gamma(N / 2)


def rule(a: float, b: float, n: int, scheme: str = "simpson"):
    """Nodes and weights of a composite rule on [a, b].

    ``n`` is the number of cells for the midpoint rule and the number of
    nodes for Simpson (rounded up to the next odd number).
    """
    if scheme not in SCHEMES:
        raise DomainError(f"unknown quadrature scheme {scheme!r}")
    if b < a:
        raise DomainError("need a <= b")
    if scheme == "midpoint":
        h = (b - a) / n
        return a + h * (np.arange(n) + 0.5), np.full(n, h)
    n = n + 1 if n % 2 == 0 else n
    x = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return x, w * h / 3


def integrate(f, a, b, n, scheme="simpson"):
    x, w = rule(a, b, n, scheme)
    return float(np.dot(w, f(x)))


def radial_rule(R: float, n: int, N: int, scheme: str = "simpson", r0: float = 1.0):
    """Nodes/weights for integrals over the ball |x| < R of radial functions.

    Weights include the measure |S^(N-1)| r^(N-1) dr. The interval
    [0, min(R, r0)] gets a uniform grid; [r0, R] (when R > r0) a grid uniform
    in log r, so that both a compact bump near the origin and a power-law
    tail out to large R are resolved with the same number of nodes.
    """
    inner = min(R, r0)
    x, w = rule(0.0, inner, n, scheme)
    if R > r0:
        s, ws = rule(math.log(r0), math.log(R), n, scheme)
        xo = np.exp(s)
        x = np.concatenate([x, xo])
        w = np.concatenate([w, ws * xo])
    return x, w * sphere_area(N) * x ** (N - 1)
