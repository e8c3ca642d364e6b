import numpy as np
import pytest

from critexp.errors import ConfigError
from critexp.exponents import ProblemParams
from critexp.simulator import (SimConfig, State, blowup_preset, discrete_energy,
                               initial_state, radial_laplacian, rhs, run, stationary_preset,
                               step, sup_norm)

P = ProblemParams(2, 2.0, 2.0, 3)


def zeros(k):
    return lambda r: np.zeros((k, r.size))


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_laplacian_exact_on_quadratics(N):
    dr = 0.1
    r = dr * np.arange(64)
    R = 64 * dr
    lap = radial_laplacian(r**2, dr, N, right=R**2)
    assert lap == pytest.approx(np.full(64, 2.0 * N), abs=1e-9)


def test_laplacian_second_order_on_gaussian():
    N = 3
    errs = []
    for n in (128, 256):
        dr = 10.0 / n
        r = dr * np.arange(n)
        u = np.exp(-r**2)
        exact = (4 * r**2 - 2 * N) * np.exp(-r**2)
        errs.append(np.max(np.abs(radial_laplacian(u, dr, N) - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_zero_state_is_fixed_point():
    cfg = SimConfig(P, 10.0, 64, 1.0)
    s = initial_state(zeros(2), cfg)
    assert np.all(rhs(s, cfg) == 0)
    rep = run(cfg, zeros(2))
    assert not rep.blew_up
    assert np.all(rep.final_state.layers == 0)
    assert all(m == 0 for _, m in rep.max_norm_history)


def test_constant_state_rhs():
    c = 0.3
    cfg = SimConfig(ProblemParams(2, 3.0, 2.0, 3), 10.0, 64, 1.0,
                    boundary="dirichlet_fixed", boundary_value=c)
    layers = np.zeros((2, 64))
    layers[0] = c
    out = rhs(State(0.0, layers), cfg)
    assert np.all(out[0] == 0)
    assert out[1] == pytest.approx(np.full(64, c**3), rel=1e-14)


def test_stationary_profile_has_small_rhs_with_second_order_decay():
    maxima = []
    for n in (256, 512):
        cfg, initial, _ = stationary_preset(n_r=n)
        maxima.append(np.max(np.abs(rhs(initial_state(initial, cfg), cfg))))
    assert maxima[1] < 1e-2
    assert maxima[0] / maxima[1] == pytest.approx(4.0, rel=0.15)


def test_stationary_preset_drift_converges():
    drifts = []
    for n in (256, 512):
        cfg, initial, _ = stationary_preset(n_r=n)
        rep = run(cfg, initial)
        assert not rep.blew_up
        drifts.append(rep.sup_norm_drift)
    assert drifts[1] < 1e-3
    assert drifts[0] / drifts[1] == pytest.approx(4.0, rel=0.15)


def _pulse(k=2, amp=1e-6):
    def init(r):
        layers = np.zeros((k, r.size))
        layers[0] = amp * np.exp(-((r - 8.0) ** 2))
        return layers
    return init


def test_linear_energy_conserved_for_tiny_data():
    cfg = SimConfig(ProblemParams(2, 3.0, 3.0, 3), 20.0, 400, 10.0)
    s = initial_state(_pulse(), cfg)
    e0 = discrete_energy(s, cfg)
    for _ in range(100):
        s = step(s, cfg)
    assert abs(discrete_energy(s, cfg) / e0 - 1) < 1e-3


def test_rk4_fourth_order_in_time():
    cfg = SimConfig(ProblemParams(2, 2.0, 2.0, 3), 20.0, 128, 1.0, dt=0.05)
    s0 = initial_state(_pulse(amp=0.5), cfg)

    def solve(h):
        s = s0
        for _ in range(int(round(1.0 / h))):
            s = step(s, cfg, h)
        return s.u

    a, b, c = solve(0.05), solve(0.025), solve(0.0125)
    ratio = np.max(np.abs(a - b)) / np.max(np.abs(b - c))
    assert ratio == pytest.approx(16.0, rel=0.15)


def test_finite_propagation_outside_light_cone():
    cfg = SimConfig(ProblemParams(2, 3.0, 3.0, 3), 30.0, 600, 4.0)
    rep = run(cfg, _pulse())
    r = cfg.r
    # the pulse sits at r ~ 8 +- 3; after t = 4 nothing should reach r > 16
    far = r > 16
    assert np.max(np.abs(rep.final_state.u[far])) < 1e-6 * 1e-3


def test_origin_node_stays_even():
    cfg = SimConfig(P, 10.0, 128, 0.5)
    init = lambda r: np.stack([0.1 * np.exp(-r**2), np.zeros_like(r)])  # noqa: E731
    rep = run(cfg, init)
    u = rep.final_state.u
    # even extension: maximum at the origin for a centred profile
    assert u[0] >= u[1] >= u[2]


def test_blowup_preset_blows_up_consistently():
    cfg, init = blowup_preset()
    rep = run(cfg, init)
    assert rep.blew_up
    assert rep.refinement_consistent
    assert 1.0 < rep.t_blowup < 5.0
    assert rep.max_norm_history[-1][1] == cfg.blowup_threshold
    assert rep.to_dict()["label"] == "illustrative evidence"


def test_larger_forcing_blows_up_earlier():
    times = []
    for amp in (5.0, 10.0, 20.0):
        cfg, init = blowup_preset(amplitude=amp)
        times.append(run(cfg, init).t_blowup)
    assert times[0] > times[1] > times[2]


def test_bisection_locates_crossing_within_step():
    cfg, init = blowup_preset()
    cfg = SimConfig(**{**cfg.__dict__, "refine": False})
    rep = run(cfg, init)
    t_prev = rep.max_norm_history[-2][0]
    assert t_prev < rep.t_blowup <= t_prev + cfg.dt


def test_k3_is_flagged_exploratory():
    cfg = SimConfig(ProblemParams(3, 2.0, 2.0, 3), 10.0, 64, 0.1)
    rep = run(cfg, zeros(3))
    assert any("k >= 3" in c for c in rep.caveats)


def test_sponge_absorbs_outgoing_pulse():
    base = dict(params=ProblemParams(2, 3.0, 3.0, 3), r_max=20.0, n_r=400, t_end=25.0)
    hard = run(SimConfig(**base), _pulse())
    soft = run(SimConfig(**base, boundary="absorbing_sponge"), _pulse())
    assert sup_norm(soft.final_state) < sup_norm(hard.final_state)


def test_snapshots():
    cfg = SimConfig(P, 10.0, 64, 1.0, snapshot_stride=5)
    rep = run(cfg, zeros(2))
    assert len(rep.snapshots) == 1 + rep.steps // 5


def test_initial_state_interpolates_foreign_grid():
    cfg = SimConfig(P, 10.0, 128, 1.0)
    coarse = SimConfig(P, 10.0, 64, 1.0)
    s = initial_state(lambda r: np.stack([r, 0 * r]), coarse)
    fine = initial_state(s, cfg)
    assert fine.layers.shape == (2, 128)
    assert fine.u[:120] == pytest.approx(cfg.r[:120])
    with pytest.raises(ConfigError):
        initial_state(State(0.0, np.zeros((3, 64))), cfg)


@pytest.mark.parametrize("kw", [
    dict(n_r=16), dict(r_max=-1.0), dict(boundary="neumann"), dict(dt=1.0),
    dict(boundary_value=1.0), dict(blowup_threshold=0.0),
])
def test_config_errors(kw):
    base = dict(params=P, r_max=10.0, n_r=64, t_end=1.0)
    base.update(kw)
    with pytest.raises(ConfigError):
        SimConfig(**base)


def test_threshold_below_initial_norm_rejected():
    cfg = SimConfig(P, 10.0, 64, 1.0, blowup_threshold=0.5)
    with pytest.raises(ConfigError):
        run(cfg, lambda r: np.ones((2, r.size)))
