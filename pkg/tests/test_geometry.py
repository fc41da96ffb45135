import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvflow import geometry as geo
from curvflow import oracle as orc
from curvflow import shapes
from curvflow import spheregrid as sg
from curvflow import symfun as sf
from curvflow.errors import DomainError

from conftest import ylm


def random_surface(grid, seed, c2=0.1, l_min=1, l_max=8, symmetric=False):
    rng = np.random.default_rng(seed)
    u = shapes.random_band_field(grid, l_min, l_max, rng)
    if symmetric:
        u = sg.symmetrize(grid, u)
    return geo.Hypersurface(grid, u * c2 / sg.sup_norms(grid, u)[2])


def test_rejects_non_starshaped(grid32):
    with pytest.raises(DomainError):
        geo.Hypersurface(grid32, np.full(grid32.shape, -1.0))
    with pytest.raises(DomainError):
        geo.Hypersurface(grid32, np.full(grid32.shape, np.nan))
    with pytest.raises(DomainError):
        geo.Hypersurface(grid32, np.zeros(3))


@pytest.mark.parametrize("c", [0.0, 0.2, -0.3])
def test_sphere_curvatures_and_quermass(grid64, c):
    M = geo.Hypersurface(grid64, np.full(grid64.shape, c))
    b = geo.curvature_bundle(M)
    np.testing.assert_allclose(b.kappa, 1 / (1 + c), rtol=1e-10)
    for k in range(-1, 3):
        assert geo.quermass_integral(M, k, b) == pytest.approx(geo.ball_quermass(2, k, 1 + c), rel=1e-10)


def test_ball_quermass_values():
    assert geo.ball_quermass(2, 0) == pytest.approx(4 * np.pi)
    assert geo.ball_quermass(2, 1, 2.0) == pytest.approx(2 * 2 * 4 * np.pi)
    assert geo.ball_quermass(2, -1) == pytest.approx(4 * np.pi / 3)
    assert geo.ball_quermass(1, 1) == pytest.approx(2 * np.pi)


@pytest.mark.parametrize("a,c", [(1.0, 1.1), (1.05, 0.9)])
def test_spheroid_matches_oracle(grid64, a, c):
    s = orc.SpheroidSpec(a, c)
    theta = np.broadcast_to(grid64.theta[:, None], grid64.shape)
    M = geo.Hypersurface.from_radius(grid64, orc.spheroid_radius(s, theta))
    b = geo.curvature_bundle(M)
    for k in (-1, 0, 1, 2):
        assert geo.quermass_integral(M, k, b) == pytest.approx(orc.spheroid_reference(s, k), rel=1e-8)
    k1, k2 = orc.spheroid_curvatures(s, theta)
    ref = np.sort(np.stack([k1, k2], axis=-1), axis=-1)
    np.testing.assert_allclose(b.kappa, ref, rtol=1e-8)


@given(st.integers(0, 10_000), st.floats(0.02, 0.3))
def test_gauss_bonnet(grid32, seed, c2):
    M = random_surface(grid32, seed, c2)
    assert geo.quermass_integral(M, 2) == pytest.approx(4 * np.pi, rel=1e-8)


@given(st.integers(0, 10_000))
def test_curvature_bundle_consistency(grid32, seed):
    M = random_surface(grid32, seed, 0.2)
    b = geo.curvature_bundle(M)
    np.testing.assert_allclose(b.sigma, sf.sigma_all(b.kappa), atol=1e-12)
    ev = np.sort(np.linalg.eigvals(b.shape_op).real, axis=-1)
    np.testing.assert_allclose(b.kappa, ev, atol=1e-10)
    assert np.all(b.area_element > 0)


@given(st.integers(0, 10_000), st.floats(0.7, 1.4))
def test_quermass_scaling(grid32, seed, lam):
    M = random_surface(grid32, seed, 0.1)
    L = geo.dilate(M, lam)
    for k in range(-1, 3):
        p = 3 if k == -1 else 2 - k
        assert geo.quermass_integral(L, k) == pytest.approx(lam**p * geo.quermass_integral(M, k), rel=1e-9)


@given(st.integers(0, 10_000))
def test_excess_agrees_with_direct_difference(grid32, seed):
    M = random_surface(grid32, seed, 0.2)
    for k in range(-1, 3):
        direct = geo.quermass_integral(M, k) - geo.ball_quermass(2, k)
        assert geo.quermass_excess(M, k) == pytest.approx(direct, abs=1e-10)


def test_excess_is_accurate_for_tiny_perturbations(grid32):
    u = 1e-9 * ylm(grid32, [(0, 0, 1.0)])
    M = geo.Hypersurface(grid32, u)
    eps = float(u.flat[0])
    # I_0(B_{1+eps}) - I_0(B_1) = 4 pi (2 eps + eps^2)
    assert geo.quermass_excess(M, 0) == pytest.approx(4 * np.pi * (2 * eps + eps**2), rel=1e-9)


@given(st.integers(0, 10_000))
def test_deficits_nonnegative_and_scale_invariant(grid32, seed):
    M = random_surface(grid32, seed, 0.15)
    for k in range(0, 3):
        for m in range(-1, k):
            d = geo.deficit(M, k, m)
            assert d >= -1e-10
            assert geo.deficit(geo.dilate(M, 1.3), k, m) == pytest.approx(d, rel=1e-6, abs=1e-12)


def test_deficit_argument_checks(grid32):
    M = geo.Hypersurface(grid32, np.zeros(grid32.shape))
    with pytest.raises(DomainError):
        geo.deficit(M, 1, 1)
    with pytest.raises(DomainError):
        geo.deficit(M, 3, 0)


@given(st.integers(-1, 1), st.integers(0, 10_000))
def test_normalize_quermass(grid32, m, seed):
    M = random_surface(grid32, seed, 0.2)
    N = geo.normalize_quermass(M, m)
    assert geo.quermass_integral(N, m) == pytest.approx(geo.ball_quermass(2, m), rel=1e-12)


@given(st.integers(0, 10_000))
def test_matched_ball_excess_nonnegative(grid32, seed):
    M = random_surface(grid32, seed, 0.1)
    assert geo.matched_ball_excess(M, 1, 0) >= -1e-10
    N = geo.normalize_quermass(M, 0)
    assert geo.matched_ball_excess(N, 1, 0) == pytest.approx(geo.quermass_excess(N, 1), abs=1e-10)


def test_barycenter_of_translated_ball(grid64):
    c = np.array([0.05, -0.02, 0.1])
    M = geo.Hypersurface.from_radius(grid64, orc.translated_ball_radius(grid64.x, c))
    vol = geo.quermass_integral(M, -1)
    # the weighted barycenter points along the shift
    bar = geo.barycenter(M)
    assert np.all(np.sign(bar) == np.sign(c))
    np.testing.assert_allclose(geo.barycenter(geo.Hypersurface(grid64, np.zeros(grid64.shape))), 0.0, atol=1e-14)
    assert vol == pytest.approx(4 * np.pi / 3, rel=1e-10)


def test_symmetric_difference(grid32):
    u = 0.05 * ylm(grid32, [(2, 0, 1.0)])
    M = geo.Hypersurface(grid32, u)
    # the binomial expansion is exact for outward perturbations and an upper bound otherwise
    assert geo.symmetric_difference_centered(M) >= geo.symmetric_difference_exact(M)
    P = geo.Hypersurface(grid32, np.abs(u))
    assert geo.symmetric_difference_centered(P) == pytest.approx(geo.symmetric_difference_exact(P), rel=1e-12)
    assert geo.symmetric_difference_exact(geo.Hypersurface(grid32, np.zeros(grid32.shape))) == 0.0


def test_fraenkel_translated_ball(grid32):
    c = np.array([0.0, 0.0, 0.1])
    M = geo.Hypersurface.from_radius(grid32, orc.translated_ball_radius(grid32.x, c))
    res = geo.fraenkel_asymmetry(M)
    assert res.alpha < 1e-6
    np.testing.assert_allclose(res.center, c, atol=1e-6)


def test_fraenkel_symmetric_shape_centered(grid32):
    M = geo.normalize_quermass(geo.Hypersurface(grid32, 0.05 * ylm(grid32, [(2, 0, 1.0)])), -1)
    res = geo.fraenkel_asymmetry(M)
    assert res.alpha > 0
    np.testing.assert_allclose(res.center, 0.0)
    vol = geo.ball_quermass(2, -1)
    assert res.alpha == pytest.approx(geo.symmetric_difference_exact(M) / vol, rel=1e-12)


@given(st.integers(0, 10_000))
def test_fraenkel_bounded_by_centered(grid32, seed):
    M = geo.normalize_quermass(random_surface(grid32, seed, 0.05, l_max=4), -1)
    res = geo.fraenkel_asymmetry(M, maxiter=100)
    assert 0 <= res.alpha <= geo.symmetric_difference_exact(M) / geo.ball_quermass(2, -1) + 1e-12


def test_static_stability_sample(grid64):
    M = geo.normalize_quermass(geo.Hypersurface(grid64, 0.05 * ylm(grid64, [(2, 0, 1.0)])), 0)
    alpha = geo.fraenkel_asymmetry(M).alpha
    assert geo.deficit(M, 1, 0) >= (1 / 18 - 0.01) * alpha**2


def test_stability_functional(grid32):
    u = 0.01 * ylm(grid32, [(2, 0, 1.0)])
    M = geo.Hypersurface(grid32, u)
    # C(2,1)(2-1)/4 (1 + 6/2) * 1e-4
    assert geo.stability_functional_A(M, 1) == pytest.approx(0.5 * 4 * 1e-4, rel=1e-10)
    with pytest.raises(DomainError):
        geo.stability_functional_A(M, 2)


def test_sobolev_quadrature_matches_spectrum(grid32):
    u = ylm(grid32, [(3, 1, 0.1)])
    l2, g2, lap2 = geo.sobolev_quadrature(geo.Hypersurface(grid32, u))
    assert (l2, g2, lap2) == pytest.approx((0.01, 0.12, 1.44), rel=1e-10)


@pytest.mark.parametrize("fn", [geo.linearization_residual_sigma, geo.linearization_residual_inverse_sigma])
def test_linearization_quadratic(grid64, fn):
    base = ylm(grid64, [(2, 0, 1.0), (3, 1, 0.5)])
    base /= np.max(np.abs(base))
    assert fn(geo.Hypersurface(grid64, np.zeros(grid64.shape)), 2) < 1e-12
    r1 = fn(geo.Hypersurface(grid64, 0.02 * base), 2)
    r2 = fn(geo.Hypersurface(grid64, 0.01 * base), 2)
    assert 0.15 <= r2 / r1 <= 0.35


def test_shape_report_fields(grid32):
    M = geo.Hypersurface(grid32, 0.05 * ylm(grid32, [(2, 0, 1.0)]))
    d = geo.shape_report(M).to_dict()
    assert list(d["Ik"]) == ["-1", "0", "1", "2"]
    assert {"delta_1_0", "delta_2_1", "delta_0_-1"} <= set(d)
    assert d["alpha"] > 0 and d["A"] > 0
    assert d["C2"] == pytest.approx(sg.sup_norms(grid32, M.u)[2])


def test_circle_geometry():
    c = sg.build_grid(1, 0, 64)
    M = geo.Hypersurface(c, 0.05 * np.cos(2 * c.phi))
    assert geo.quermass_integral(M, 1) == pytest.approx(2 * np.pi, rel=1e-12)
    R = geo.Hypersurface(c, np.full(c.shape, 0.5))
    assert geo.quermass_integral(R, 0) == pytest.approx(2 * np.pi * 1.5)
    assert geo.quermass_integral(R, -1) == pytest.approx(np.pi * 1.5**2)
