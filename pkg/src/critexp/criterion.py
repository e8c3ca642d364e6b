"""Blow-up criterion functional

    J(T) = T^E * int_{c1 T}^{c2 T} int_{|x| < T^theta} w(t, x) dx dt,
    E = q/(q-1) [1 - N(p-1)/(2p)] - 1,   theta = q(p-1) / (2p(q-1)),

whose unboundedness as T -> inf rules out weak solutions. A finite ladder of
T values can only give evidence for or against growth; ``assess_growth``
turns the fitted log-log slope into such evidence with an explicit margin.
"""

from __future__ import annotations

import csv
import enum
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DataError, DomainError, InsufficientDataError
from .exponents import ProblemParams, optimal_scaling
from .quadrature import SCHEMES, radial_rule, rule
from .scaling import DEFAULT_LADDER, evaluate_ladder, fit_power_law
from .testfunc import CutoffProfile


class GrowthVerdict(str, enum.Enum):
    GROWTH = "GrowthEvidence"
    BOUNDED = "BoundedEvidence"
    INCONCLUSIVE = "Inconclusive"


# -- inhomogeneities ---------------------------------------------------------

class Inhomogeneity:
    """Base class for the forcing term w(t, r), r = |x|."""

    def evaluate(self, t, r):
        raise NotImplementedError

    def __call__(self, t, r):
        return self.evaluate(t, r)


@dataclass
class Separable(Inhomogeneity):
    """w(t, r) = f(t) g(r)."""

    f: Callable
    g: Callable

    def evaluate(self, t, r):
        t = np.asarray(t, dtype=float)
        r = np.asarray(r, dtype=float)
        return np.asarray(self.f(t), dtype=float) * np.asarray(self.g(r), dtype=float)


@dataclass
class Analytic(Inhomogeneity):
    w: Callable

    def evaluate(self, t, r):
        return np.asarray(self.w(np.asarray(t, float), np.asarray(r, float)), dtype=float)


@dataclass
class Gridded(Inhomogeneity):
    """Samples of w on a rectilinear (t, r) grid, bilinearly interpolated.

    Queries outside the sampled rectangle evaluate to 0 and set
    ``out_of_domain``; a warning is issued the first time.
    """

    t: np.ndarray
    r: np.ndarray
    values: np.ndarray
    out_of_domain: bool = field(default=False, init=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.t.size, self.r.size):
            raise DataError(f"values must have shape ({self.t.size}, {self.r.size})")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise DataError("gridded w must be finite and nonnegative")
        self._interp = RegularGridInterpolator((self.t, self.r), self.values,
                                               method="linear", bounds_error=False,
                                               fill_value=0.0)

    def evaluate(self, t, r):
        t, r = np.broadcast_arrays(np.asarray(t, float), np.asarray(r, float))
        outside = ((t < self.t[0]) | (t > self.t[-1]) | (r < self.r[0]) | (r > self.r[-1]))
        if np.any(outside):
            if not self.out_of_domain:
                warnings.warn("gridded w queried outside its samples; using 0",
                              stacklevel=2)
            self.out_of_domain = True
        pts = np.stack([t.ravel(), r.ravel()], axis=-1)
        return self._interp(pts).reshape(t.shape)

    @classmethod
    def from_csv(cls, path):
        """Read long-format CSV with columns t, r, w covering a full grid."""
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        try:
            data = np.array([[float(row["t"]), float(row["r"]), float(row["w"])]
                             for row in rows])
        except (KeyError, ValueError) as exc:
            raise DataError(f"{path}: expected numeric columns t, r, w ({exc})") from None
        if data.size == 0:
            raise DataError(f"{path}: no samples")
        ts, ti = np.unique(data[:, 0], return_inverse=True)
        rs, ri = np.unique(data[:, 1], return_inverse=True)
        if len(data) != ts.size * rs.size:
            raise DataError(f"{path}: samples do not form a complete (t, r) grid")
        vals = np.full((ts.size, rs.size), np.nan)
        vals[ti, ri] = data[:, 2]
        if np.any(np.isnan(vals)):
            raise DataError(f"{path}: duplicate (t, r) samples")
        return cls(ts, rs, vals)


def constant(c=1.0):
    return lambda t: np.full_like(np.asarray(t, float), c)


def bump(amplitude=1.0, radius=1.0):
    """Smooth positive bump amplitude * exp(1 - 1/(1 - (r/radius)^2)), zero beyond radius."""
    def g(r):
        s = (np.asarray(r, float) / radius) ** 2
        inside = s < 1
        si = np.where(inside, s, 0.0)
        return np.where(inside, amplitude * np.exp(1 - 1 / (1 - si)), 0.0)
    return g


def power_decay(a, amplitude=1.0):
    """g(r) = amplitude * (1 + r)^(-a)."""
    return lambda r: amplitude * (1 + np.asarray(r, float)) ** (-a)


# -- criterion ----------------------------------------------------------------

@dataclass(frozen=True)
class CriterionQuadrature:
    """Grid sizes for the (t, r) quadrature; see ``radial_rule`` for r0."""

    nt: int = 512
    nr: int = 512
    scheme: str = "simpson"
    r0: float = 1.0

    def __post_init__(self):
        if self.nt < 16 or self.nr < 16:
            raise DomainError("nt and nr must be at least 16")
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}")


@dataclass
class CriterionReport:
    values: list
    fitted_slope: float
    r_squared: float
    verdict: GrowthVerdict
    slope_margin: float
    theorem_tag: str = "Theorem 1"
    predicted_slope: float = None

    def to_dict(self):
        return {
            "values": [[T, J] for T, J in self.values],
            "fitted_slope": self.fitted_slope,
            "r_squared": self.r_squared,
            "verdict": self.verdict.value,
            "slope_margin": self.slope_margin,
            "theorem_tag": self.theorem_tag,
            "predicted_slope": self.predicted_slope,
        }


def _scaling(params):
    sc = optimal_scaling(params.p, params.q, params.N)
    return sc.theta, sc.criterion_exp


def _check_nonneg(vals):
    if np.any(vals < 0):
        raise DataError("w must be nonnegative")


def space_integral(g, R, N, cfg: CriterionQuadrature):
    """int_{|x| < R} g(|x|) dx."""
    r, wr = radial_rule(R, cfg.nr, N, cfg.scheme, cfg.r0)
    vals = np.asarray(g(r), dtype=float)
    _check_nonneg(vals)
    return float(np.dot(wr, vals))


def time_integral(f, a, b, cfg: CriterionQuadrature):
    t, wt = rule(a, b, cfg.nt, cfg.scheme)
    vals = np.asarray(f(t), dtype=float)
    _check_nonneg(vals)
    return float(np.dot(wt, vals))


def criterion_value(T, w: Inhomogeneity, params: ProblemParams,
                    profile: CutoffProfile = None, cfg: CriterionQuadrature = None):
    """J(T) for the inhomogeneity ``w``."""
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    profile = profile or CutoffProfile()
    cfg = cfg or CriterionQuadrature()
    theta, E = _scaling(params)
    R = T**theta
    a, b = profile.c1 * T, profile.c2 * T
    if isinstance(w, Separable):
        total = time_integral(w.f, a, b, cfg) * space_integral(w.g, R, params.N, cfg)
    else:
        t, wt = rule(a, b, cfg.nt, cfg.scheme)
        r, wr = radial_rule(R, cfg.nr, params.N, cfg.scheme, cfg.r0)
        W = w.evaluate(t[:, None], r[None, :])
        _check_nonneg(W)
        total = float(wt @ W @ wr)
    return T**E * total


def separable_criterion_value(T, f, params: ProblemParams,
                              profile: CutoffProfile = None, cfg: CriterionQuadrature = None):
    """T^E * int_{c1 T}^{c2 T} f(t) dt: the criterion with the g-factor dropped."""
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    profile = profile or CutoffProfile()
    cfg = cfg or CriterionQuadrature()
    _, E = _scaling(params)
    return T**E * time_integral(f, profile.c1 * T, profile.c2 * T, cfg)


def assess_growth(values, slope_margin=0.05, min_r_squared=0.9) -> CriterionReport:
    """Classify a finite ladder of J(T) values by the sign of their log-log slope.

    Inconclusive when at least half of the values vanish, when the fit is
    poor (r^2 below ``min_r_squared``) or when |slope| <= ``slope_margin``.
    """
    values = sorted((float(T), float(J)) for T, J in values)
    if len(values) < 5:
        raise InsufficientDataError("need at least 5 scales")
    if any(J < 0 for _, J in values):
        raise DataError("criterion values must be nonnegative")
    positive = [(T, J) for T, J in values if J > 0]
    if 2 * (len(values) - len(positive)) >= len(values) or len(positive) < 4:
        return CriterionReport(values, float("nan"), 0.0, GrowthVerdict.INCONCLUSIVE,
                               slope_margin)
    fit = fit_power_law(positive)
    if fit.r_squared < min_r_squared:
        verdict = GrowthVerdict.INCONCLUSIVE
    elif fit.slope > slope_margin:
        verdict = GrowthVerdict.GROWTH
    elif fit.slope < -slope_margin:
        verdict = GrowthVerdict.BOUNDED
    else:
        verdict = GrowthVerdict.INCONCLUSIVE
    return CriterionReport(values, fit.slope, fit.r_squared, verdict, slope_margin)


def evaluate_criterion(w: Inhomogeneity, params: ProblemParams, T_ladder=DEFAULT_LADDER,
                       profile=None, cfg=None, slope_margin=0.05, workers=None):
    """Compute J over a ladder of scales and assess growth."""
    samples = evaluate_ladder(lambda T: criterion_value(T, w, params, profile, cfg),
                              T_ladder, workers)
    report = assess_growth(samples, slope_margin)
    report.theorem_tag = "Theorem 1"
    return report


def evaluate_separable_criterion(f, params: ProblemParams, T_ladder=DEFAULT_LADDER,
                                 profile=None, cfg=None, slope_margin=0.05, workers=None):
    samples = evaluate_ladder(lambda T: separable_criterion_value(T, f, params, profile, cfg),
                              T_ladder, workers)
    report = assess_growth(samples, slope_margin)
    report.theorem_tag = "Corollary 1"
    return report
