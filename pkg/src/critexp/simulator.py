"""Radial method-of-lines integrator for

    d^k u/dt^k = Lap u + |u|^p + |d^{k-1}u/dt^{k-1}|^q + w(t, r).

The k-th order equation is written as a first-order system on the layers
(u, u_t, ..., d^{k-1}u/dt^{k-1}), discretised in r with second-order
central differences and advanced by the classical four-stage Runge-Kutta
scheme at a fixed step.

Results are illustrative evidence only: numerical blow-up is not the same
thing as nonexistence of weak solutions. For k >= 3 the principal part is
not hyperbolic and runs are exploratory; reports carry a caveat.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .criterion import Inhomogeneity
from .errors import ConfigError
from .exponents import ProblemParams

log = logging.getLogger(__name__)

BOUNDARIES = ("dirichlet_zero", "dirichlet_fixed", "absorbing_sponge")


@dataclass(frozen=True)
class SimConfig:
    """Discretisation and stopping parameters.

    The grid is r_i = i * dr, i = 0 .. n_r - 1, with dr = r_max / n_r; the
    Dirichlet node r = r_max is not stored. ``dt`` defaults to 0.4 * dr.

    ``dirichlet_fixed`` holds u(r_max) at ``boundary_value``, for data that
    does not vanish at the wall (stationary profiles); the other two
    boundaries use u(r_max) = 0.
    """

    params: ProblemParams
    r_max: float
    n_r: int
    t_end: float
    dt: Optional[float] = None
    blowup_threshold: float = 1e6
    w: Optional[Inhomogeneity] = None
    boundary: str = "dirichlet_zero"
    boundary_value: float = 0.0
    safety: float = 0.5
    sponge_width: float = 0.2  # fraction of r_max
    sponge_strength: float = 5.0
    snapshot_stride: int = 0
    refine: bool = True

    def __post_init__(self):
        if not self.r_max > 0 or not self.t_end > 0:
            raise ConfigError("r_max and t_end must be positive")
        if int(self.n_r) != self.n_r or self.n_r < 32:
            raise ConfigError(f"n_r must be an integer >= 32, got {self.n_r}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}")
        if self.boundary != "dirichlet_fixed" and self.boundary_value != 0:
            raise ConfigError("boundary_value requires boundary='dirichlet_fixed'")
        if self.dt is None:
            object.__setattr__(self, "dt", 0.4 * self.dr)
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.dt > self.safety * self.dr * (1 + 1e-12):
            raise ConfigError(f"dt = {self.dt:g} exceeds the stability bound "
                              f"{self.safety:g} * dr = {self.safety * self.dr:g}")
        if not self.blowup_threshold > 0:
            raise ConfigError("blowup_threshold must be positive")

    @property
    def dr(self):
        return self.r_max / self.n_r

    @property
    def r(self):
        return self.dr * np.arange(self.n_r)

    def refined(self):
        """Same problem at twice the spatial and temporal resolution."""
        return dataclasses.replace(self, n_r=2 * self.n_r, dt=self.dt / 2, refine=False)


@dataclass
class State:
    t: float
    layers: np.ndarray  # shape (k, n_r); layer i is the i-th time derivative of u

    @property
    def u(self):
        return self.layers[0]

    def copy(self):
        return State(self.t, self.layers.copy())


@dataclass
class BlowupReport:
    blew_up: bool
    t_blowup: Optional[float]
    max_norm_history: list
    refinement_consistent: Optional[bool] = None
    t_blowup_refined: Optional[float] = None
    sup_norm_drift: float = 0.0
    causal_drift: float = 0.0
    t_final: float = 0.0
    steps: int = 0
    n_r: int = 0
    dt: float = 0.0
    caveats: list = field(default_factory=list)
    snapshots: list = field(default_factory=list, repr=False)
    final_state: Optional[State] = field(default=None, repr=False)

    def to_dict(self):
        return {
            "blew_up": self.blew_up,
            "t_blowup": self.t_blowup,
            "t_blowup_refined": self.t_blowup_refined,
            "refinement_consistent": self.refinement_consistent,
            "sup_norm_drift": self.sup_norm_drift,
            "causal_drift": self.causal_drift,
            "t_final": self.t_final,
            "steps": self.steps,
            "n_r": self.n_r,
            "dt": self.dt,
            "caveats": list(self.caveats),
            "max_norm_history": [[t, m] for t, m in self.max_norm_history],
            "label": "illustrative evidence",
        }


def radial_laplacian(u, dr, N, right=0.0):
    """Second-order radial Laplacian u'' + (N-1)/r u'.

    The origin uses the even ghost value u(-dr) = u(dr), giving N u''(0);
    ``right`` is the Dirichlet value at r = n_r * dr.
    """
    ue = np.empty(u.size + 2)
    ue[1:-1] = u
    ue[0] = u[1]
    ue[-1] = right
    lap = np.empty_like(u)
    i = np.arange(1, u.size)
    r = i * dr
    lap[1:] = ((ue[i + 2] - 2 * u[1:] + ue[i]) / dr**2
               + (N - 1) / r * (ue[i + 2] - ue[i]) / (2 * dr))
    lap[0] = N * 2 * (u[1] - u[0]) / dr**2
    return lap


def _sponge(cfg: SimConfig):
    if cfg.boundary != "absorbing_sponge":
        return None
    r = cfg.r
    start = cfg.r_max * (1 - cfg.sponge_width)
    s = np.clip((r - start) / (cfg.r_max - start), 0, None)
    return cfg.sponge_strength * s**2


def rhs(state: State, cfg: SimConfig, _sponge_cache=None):
    """Time derivative of every layer.

    d/dt layer_i = layer_{i+1} for i < k-1 and
    d/dt layer_{k-1} = Lap layer_0 + |layer_0|^p + |layer_{k-1}|^q + w(t, r).
    """
    P = cfg.params
    L = state.layers
    out = np.empty_like(L)
    out[:-1] = L[1:]
    with np.errstate(over="ignore", invalid="ignore"):
        top = (radial_laplacian(L[0], cfg.dr, P.N, cfg.boundary_value)
               + np.abs(L[0]) ** P.p + np.abs(L[-1]) ** P.q)
        if cfg.w is not None:
            top = top + cfg.w.evaluate(state.t, cfg.r)
    sponge = _sponge_cache if _sponge_cache is not None else _sponge(cfg)
    if sponge is not None:
        top = top - sponge * L[-1]
    out[-1] = top
    return out


def step(state: State, cfg: SimConfig, dt=None, _sponge_cache=None) -> State:
    """One classical Runge-Kutta step. Non-finite values propagate; callers check."""
    h = cfg.dt if dt is None else dt
    t, y = state.t, state.layers
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = rhs(State(t, y), cfg, _sponge_cache)
        k2 = rhs(State(t + h / 2, y + h / 2 * k1), cfg, _sponge_cache)
        k3 = rhs(State(t + h / 2, y + h / 2 * k2), cfg, _sponge_cache)
        k4 = rhs(State(t + h, y + h * k3), cfg, _sponge_cache)
        y_new = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return State(t + h, y_new)


def sup_norm(state: State):
    u = state.u
    if not np.all(np.isfinite(u)):
        return math.inf
    return float(np.max(np.abs(u)))


def discrete_energy(state: State, cfg: SimConfig):
    """sum (u_t^2 + u_r^2) r^(N-1) dr on the grid (k = 2 linear-wave energy)."""
    N, dr = cfg.params.N, cfg.dr
    r = cfg.r
    u, v = state.layers[0], state.layers[1]
    ur = np.diff(np.append(u, 0.0)) / dr
    rh = r + dr / 2
    return float(np.sum(v**2 * r ** (N - 1) * dr) + np.sum(ur**2 * rh ** (N - 1) * dr))


InitialData = Union[State, Callable[[np.ndarray], np.ndarray]]


def initial_state(initial: InitialData, cfg: SimConfig) -> State:
    """Materialise initial data on the grid of ``cfg``.

    A callable receives the radii and returns a (k, n_r) array; a State on
    another grid is linearly interpolated.
    """
    k = cfg.params.k
    r = cfg.r
    if callable(initial):
        layers = np.asarray(initial(r), dtype=float).reshape(k, r.size)
        return State(0.0, layers.copy())
    layers = np.asarray(initial.layers, dtype=float)
    if layers.shape[0] != k:
        raise ConfigError(f"initial state has {layers.shape[0]} layers, need k = {k}")
    if layers.shape[1] == r.size:
        return State(initial.t, layers.copy())
    # a foreign State is taken to live on the same [0, r_max) interval
    src = cfg.r_max / layers.shape[1] * np.arange(layers.shape[1])
    return State(initial.t, np.array([np.interp(r, src, lay) for lay in layers]))


def _crossed(state, threshold):
    return sup_norm(state) >= threshold


def _bisect_crossing(prev: State, cfg: SimConfig, dt, sponge, iters=60):
    """Smallest sub-step (to bisection accuracy) at which sup|u| reaches the threshold."""
    lo, hi = 0.0, dt
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _crossed(step(prev, cfg, mid, sponge), cfg.blowup_threshold):
            hi = mid
        else:
            lo = mid
    return prev.t + hi


def _integrate(cfg: SimConfig, state: State):
    if sup_norm(state) >= cfg.blowup_threshold:
        raise ConfigError("blowup_threshold must exceed the initial sup-norm")
    sponge = _sponge(cfg)
    u0 = state.u.copy()
    norm0 = sup_norm(state)
    history = [(state.t, norm0)]
    snapshots = []
    if cfg.snapshot_stride:
        snapshots.append((state.t, state.u.copy()))
    drift = causal = 0.0
    n_steps = int(math.ceil(cfg.t_end / cfg.dt - 1e-9))
    t_blowup = None
    for n in range(n_steps):
        h = min(cfg.dt, cfg.t_end - state.t)
        new = step(state, cfg, h, sponge)
        norm = sup_norm(new)
        if norm >= cfg.blowup_threshold:
            t_blowup = _bisect_crossing(state, cfg, h, sponge)
            history.append((t_blowup, cfg.blowup_threshold))
            break
        state = new
        history.append((state.t, norm))
        if norm0 > 0:
            drift = max(drift, abs(norm - norm0) / norm0)
            inside = cfg.r < cfg.r_max - state.t
            if np.any(inside):
                causal = max(causal, float(np.max(np.abs(state.u[inside] - u0[inside]))) / norm0)
        if cfg.snapshot_stride and (n + 1) % cfg.snapshot_stride == 0:
            snapshots.append((state.t, state.u.copy()))
    return t_blowup, state, history, snapshots, drift, causal, n + 1 if n_steps else 0


def run(cfg: SimConfig, initial: InitialData) -> BlowupReport:
    """Integrate to t_end or until sup|u| reaches the blow-up threshold.

    After a blow-up the run is repeated at doubled resolution (when
    ``cfg.refine``) and the two blow-up times are compared.
    """
    state = initial_state(initial, cfg)
    caveats = []
    if cfg.params.k >= 3:
        caveats.append("k >= 3: principal part not hyperbolic; run is exploratory")
    t_b, final, history, snaps, drift, causal, steps = _integrate(cfg, state)
    report = BlowupReport(
        blew_up=t_b is not None, t_blowup=t_b, max_norm_history=history,
        sup_norm_drift=drift, causal_drift=causal,
        t_final=t_b if t_b is not None else final.t, steps=steps,
        n_r=cfg.n_r, dt=cfg.dt, caveats=caveats, snapshots=snaps, final_state=final,
    )
    if report.blew_up and cfg.refine:
        fine = cfg.refined()
        t_f = _integrate(fine, initial_state(initial, fine))[0]
        report.t_blowup_refined = t_f
        report.refinement_consistent = bool(t_f is not None and abs(t_f - t_b) <= 0.1 * t_f)
        log.info("blow-up at t=%.6g (n_r=%d), t=%s (n_r=%d)", t_b, cfg.n_r, t_f, fine.n_r)
    return report


# -- presets -----------------------------------------------------------------

def stationary_preset(N=5, p=3.0, a=3.0, q=2.0, k=2, n_r=512, t_end=10.0, r_max=None):
    """Certified stationary solution as initial data with w = g.

    The wall holds u at u_s(r_max), so the data is compatible with the
    boundary; r_max defaults to 2 * t_end.
    """
    from .criterion import Analytic
    from .stationary import StationaryParams, g_value, u_value

    sp = StationaryParams.default(N, p, a)
    params = ProblemParams(k, p, q, N)
    w = Analytic(lambda t, r: g_value(sp, r))
    r_max = r_max or 2 * t_end
    cfg = SimConfig(params, r_max, n_r, t_end, w=w, boundary="dirichlet_fixed",
                    boundary_value=float(u_value(sp, r_max)))

    def initial(r):
        layers = np.zeros((k, r.size))
        layers[0] = u_value(sp, r)
        return layers

    return cfg, initial, sp


def blowup_preset(N=3, p=2.0, q=2.0, k=2, amplitude=5.0, radius=1.0, n_r=256,
                  t_end=10.0, r_max=None, threshold=1e6):
    """Zero initial data forced by a stationary positive bump of the given radius."""
    from .criterion import Separable, bump, constant

    params = ProblemParams(k, p, q, N)
    w = Separable(constant(1.0), bump(amplitude, radius))
    cfg = SimConfig(params, r_max or t_end + 2 * radius, n_r, t_end,
                    blowup_threshold=threshold, w=w)
    return cfg, (lambda r: np.zeros((k, r.size)))
