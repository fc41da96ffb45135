import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvflow import flows as fl
from curvflow import geometry as geo
from curvflow import spheregrid as sg
from curvflow.errors import ConeExitError, DomainError, NumericalError

from conftest import ylm


@pytest.fixture(scope="module")
def grid16():
    return sg.build_grid(2, 16, 32)


def test_config_validation():
    for bad in (
        dict(kind="mean"),
        dict(n=3),
        dict(k=3),
        dict(kind="volume_preserving", alpha=0.5),
        dict(dt_max=0.0),
        dict(cfl_safety=1.5),
        dict(diag_stride=0),
        dict(l_flow=1),
    ):
        with pytest.raises(DomainError):
            fl.FlowConfig(**bad)


def test_config_round_trip_and_unknown_keys():
    cfg = fl.FlowConfig(kind="volume_preserving", alpha=2.0, t_end=3.0, l_flow=6)
    assert fl.FlowConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(DomainError):
        fl.FlowConfig.from_dict({"kind": "inverse", "speed": 1})


@pytest.mark.parametrize("n,k,r", [(2, 1, 0.5), (2, 2, 2.0), (1, 1, 1.0)])
def test_rescale_rate(n, k, r):
    assert fl.rescale_rate(n, k) == r
    assert fl.FlowConfig(n=n, k=k).r == r
    assert fl.FlowConfig(n=n, k=k, kind="volume_preserving").r == 0.0


def test_conserved_index():
    assert fl.FlowConfig(k=2).conserved_index == 1
    assert fl.FlowConfig(kind="volume_preserving").conserved_index == -1


@given(st.floats(0.5, 2.0))
def test_speed_on_sphere(grid16, R):
    M = geo.Hypersurface(grid16, np.full(grid16.shape, R - 1))
    b = geo.curvature_bundle(M)
    np.testing.assert_allclose(fl.speed_inverse(b, 1), R / 2)
    np.testing.assert_allclose(fl.speed_inverse(b, 2), 2 * R)
    G, h = fl.speed_volume_preserving(b, grid16, 1, 1.0)
    np.testing.assert_allclose(G, 0.0, atol=1e-12)
    assert h == pytest.approx(2 / R)


def test_speed_rejects_cone_exit(grid16):
    M = geo.Hypersurface(grid16, np.zeros(grid16.shape))
    b = geo.curvature_bundle(M)
    flipped = geo.CurvatureBundle(**{**b.__dict__, "sigma": -b.sigma})
    with pytest.raises(ConeExitError) as info:
        fl.speed_inverse(flipped, 1)
    assert info.value.node is not None


def test_radial_rhs(grid16):
    w = np.full(grid16.shape, 2.0)
    np.testing.assert_allclose(fl.radial_rhs(np.ones(grid16.shape), w, grid=grid16), 1.0)
    with pytest.raises(DomainError):
        fl.radial_rhs(1.0, w)
    with pytest.raises(DomainError):
        fl.radial_rhs(1.0, -w, grad_w_sq=np.zeros(grid16.shape))


@pytest.mark.parametrize("k", [1, 2])
def test_sphere_grows_exponentially(grid16, k):
    cfg = fl.FlowConfig(k=k, t_end=0.1, dt_init=1e-3, dt_max=1e-3, fraenkel=False)
    st_ = fl.initial_state(cfg, geo.Hypersurface(grid16, np.zeros(grid16.shape)))
    while st_.t < 0.1 - 1e-12:
        st_ = fl.step(st_, cfg, 0.1)
    np.testing.assert_allclose(st_.w, np.exp(cfg.r * 0.1), rtol=1e-10)
    np.testing.assert_allclose(st_.rescaled_u, 0.0, atol=1e-10)


def test_step_respects_cfl_and_stop(grid16):
    u = ylm(grid16, [(2, 0, 0.05)])
    cfg = fl.FlowConfig(t_end=1.0, dt_init=0.5, dt_max=0.5)
    st_ = fl.initial_state(cfg, geo.Hypersurface(grid16, u))
    _, b = fl._rhs(grid16, st_.w, cfg)
    bound = fl.stable_dt(grid16, b, st_.w, cfg)
    nxt = fl.step(st_, cfg)
    assert nxt.dt <= bound + 1e-15
    last = fl.step(st_, cfg, t_stop=1e-4)
    assert last.t == pytest.approx(1e-4)


def test_step_rejects_underflow(grid16):
    cfg = fl.FlowConfig()
    st_ = fl.initial_state(cfg, geo.Hypersurface(grid16, np.zeros(grid16.shape)))
    with pytest.raises(NumericalError):
        fl.step(st_, cfg, t_stop=0.0)


def test_initial_state_normalizes(grid16):
    u = 0.1 + ylm(grid16, [(2, 0, 0.05)])
    cfg = fl.FlowConfig(k=2)
    st_ = fl.initial_state(cfg, geo.Hypersurface(grid16, u))
    M = geo.Hypersurface(grid16, st_.w - 1)
    assert geo.quermass_integral(M, 1) == pytest.approx(geo.ball_quermass(2, 1), rel=1e-12)
    with pytest.raises(DomainError):
        fl.initial_state(fl.FlowConfig(n=1), geo.Hypersurface(grid16, u))


@pytest.fixture(scope="module")
def inverse_rows(grid16):
    u = ylm(grid16, [(2, 0, 0.03), (4, 0, 0.015)])
    cfg = fl.FlowConfig(t_end=2.0, symmetrize=True, diag_stride=2, fraenkel=True)
    return fl.run(cfg, geo.Hypersurface(grid16, u))


def test_inverse_run_conserves_and_decreases(inverse_rows):
    I0 = np.array([r.I_km1 for r in inverse_rows])
    I1 = np.array([r.I_k for r in inverse_rows])
    assert np.max(np.abs(I0 / I0[0] - 1)) < 1e-8
    assert np.all(np.diff(I1) <= 1e-8)
    assert inverse_rows[-1].C0 < 0.5 * inverse_rows[0].C0
    assert inverse_rows[-1].t == pytest.approx(2.0)


def test_inverse_run_diagnostics(inverse_rows):
    for r in inverse_rows:
        assert r.gauss_bonnet == pytest.approx(4 * np.pi, rel=1e-8)
        assert r.cone_margin > 0
        assert r.bar_ok
        assert r.vp_ratio is None
        assert r.S is not None and r.S > 0.9
        assert r.alpha is not None and r.alpha >= 0
        assert abs(r.bar_x) < 1e-12 and abs(r.bar_y) < 1e-12 and abs(r.bar_z) < 1e-12
    assert [r.steps % 2 for r in inverse_rows[1:-1]] == [0] * (len(inverse_rows) - 2)


def test_sphere_run_has_empty_ratio(grid16):
    rows = fl.run(fl.FlowConfig(t_end=0.05), geo.Hypersurface(grid16, np.zeros(grid16.shape)))
    assert all(r.S is None for r in rows)


def test_volume_preserving_run(grid16):
    u = ylm(grid16, [(2, 0, 0.05)])
    cfg = fl.FlowConfig(kind="volume_preserving", t_end=1.0, symmetrize=True, diag_stride=5, fraenkel=False)
    rows = fl.run(cfg, geo.Hypersurface(grid16, u))
    V = np.array([r.Vol for r in rows])
    I0 = np.array([r.I_km1 for r in rows])
    assert np.max(np.abs(V / V[0] - 1)) < 1e-10
    assert np.all(np.diff(I0) <= 1e-8)
    assert all(r.S is None and r.vp_ratio is not None for r in rows)
    assert rows[-1].C0 < rows[0].C0


def test_run_gate_and_abort(grid16):
    u = ylm(grid16, [(2, 0, 0.5)])
    with pytest.raises(DomainError):
        fl.run(fl.FlowConfig(t_end=0.1), geo.Hypersurface(grid16, u))
    with pytest.raises(fl.FlowAborted) as info:
        fl.run(fl.FlowConfig(t_end=0.1, dt_init=1e-20, dt_max=1e-20, c2_gate=10.0), geo.Hypersurface(grid16, u))
    assert len(info.value.rows) == 1


def test_run_is_deterministic(grid16):
    u = ylm(grid16, [(2, 0, 0.05), (3, 2, 0.02)])
    cfg = fl.FlowConfig(t_end=0.2, diag_stride=3, fraenkel=False)
    a = fl.run(cfg, geo.Hypersurface(grid16, u))
    b = fl.run(cfg, geo.Hypersurface(grid16, u))
    assert [r.csv_values() for r in a] == [r.csv_values() for r in b]


def test_circle_flow():
    c = sg.build_grid(1, 0, 64)
    u = 0.03 * np.cos(2 * c.phi)
    rows = fl.run(fl.FlowConfig(n=1, k=1, t_end=0.5, diag_stride=5, fraenkel=False), geo.Hypersurface(c, u))
    assert rows[-1].C0 < rows[0].C0
    assert all(r.bar_z is None and r.A is None for r in rows)


@pytest.fixture(scope="module")
def eps_state():
    g = sg.build_grid(2, 32, 64)
    cfg = fl.FlowConfig(symmetrize=True)
    return g, cfg, fl.initial_state(cfg, geo.Hypersurface(g, ylm(g, [(2, 0, 0.02), (4, 0, 0.01)])))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_sigma_integral_evolution(eps_state, m):
    _, cfg, st_ = eps_state
    meas, pred = fl.flow_derivative_check(st_, cfg, "sigma_integral", m)
    assert meas == pytest.approx(pred, rel=1e-5, abs=1e-9)


def test_quermass_derivatives_inverse(eps_state):
    _, cfg, st_ = eps_state
    meas, pred = fl.flow_derivative_check(st_, cfg, "k_quermass")
    assert meas == pytest.approx(pred, rel=1e-4)
    meas, pred = fl.flow_derivative_check(st_, cfg, "km1_quermass")
    assert abs(meas - pred) < 1e-8


@pytest.mark.parametrize("target", ["u_l2", "grad_l2"])
def test_linearized_decay(eps_state, target):
    _, cfg, st_ = eps_state
    meas, pred = fl.flow_derivative_check(st_, cfg, target)
    assert abs(meas - pred) / abs(pred) < 0.2


def test_volume_preserving_derivatives():
    g = sg.build_grid(2, 32, 64)
    cfg = fl.FlowConfig(kind="volume_preserving", symmetrize=True)
    st_ = fl.initial_state(cfg, geo.Hypersurface(g, ylm(g, [(2, 0, 0.01)])))
    meas, pred = fl.flow_derivative_check(st_, cfg, "km1_quermass")
    assert meas == pytest.approx(pred, rel=1e-3)
    meas, pred = fl.flow_derivative_check(st_, cfg, "km1_linear")
    assert meas == pytest.approx(pred, rel=0.1)


def test_derivative_check_errors(eps_state):
    _, cfg, st_ = eps_state
    with pytest.raises(DomainError):
        fl.flow_derivative_check(st_, cfg, "nope")
    with pytest.raises(DomainError):
        fl.flow_derivative_check(st_, cfg, "sigma_integral")
    with pytest.raises(DomainError):
        fl.flow_derivative_check(st_, cfg, "km1_linear")


def test_with_overrides():
    cfg = fl.with_overrides(fl.FlowConfig(), t_end=4.0)
    assert cfg.t_end == 4.0
    with pytest.raises(DomainError):
        fl.with_overrides(cfg, k=5)
