import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvflow import oracle as orc
from curvflow.errors import DomainError


def test_brute_sigma_examples():
    assert orc.brute_sigma([1, 2, 3], 0) == 1
    assert orc.brute_sigma([1, 2, 3], 2) == 11
    assert orc.brute_sigma([1, 2, 3], 3) == 6


@given(st.floats(0.5, 2.0))
def test_round_spheroid_is_ball(R):
    s = orc.SpheroidSpec(R, R)
    for k in range(-1, 3):
        assert orc.spheroid_reference(s, k) == pytest.approx(orc.ball_quermass(2, k, R), rel=1e-10)
    k1, k2 = orc.spheroid_curvatures(s, np.linspace(0.1, 3.0, 7))
    np.testing.assert_allclose(k1, 1 / R)
    np.testing.assert_allclose(k2, 1 / R)


@pytest.mark.parametrize("a,c", [(1.0, 1.1), (1.0, 0.8), (2.0, 1.0)])
def test_area_closed_form_matches_quadrature(a, c):
    s = orc.SpheroidSpec(a, c)
    assert orc.spheroid_reference(s, 0) == pytest.approx(orc.spheroid_area(s), rel=1e-10)
    assert orc.spheroid_reference(s, -1) == pytest.approx(4 / 3 * np.pi * a * a * c, rel=1e-12)
    assert orc.spheroid_reference(s, 2) == pytest.approx(4 * np.pi, rel=1e-10)


def test_spheroid_radius_axes():
    s = orc.SpheroidSpec(1.2, 0.9)
    assert orc.spheroid_radius(s, 0.0) == pytest.approx(0.9)
    assert orc.spheroid_radius(s, np.pi / 2) == pytest.approx(1.2)


def test_spheroid_rejects_bad_axes():
    with pytest.raises(DomainError):
        orc.SpheroidSpec(-1.0, 1.0)


@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_translated_ball_points_on_sphere(cx, cy, cz):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((50, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    c = np.array([cx, cy, cz])
    r = orc.translated_ball_radius(x, c)
    np.testing.assert_allclose(np.linalg.norm(r[:, None] * x - c, axis=1), 1.0, rtol=1e-12)


def test_translated_ball_needs_origin_inside():
    with pytest.raises(DomainError):
        orc.translated_ball_radius(np.array([[1.0, 0, 0]]), [2.0, 0, 0])


def test_fd_time_derivative():
    samples = [(t, t**2) for t in (0.9, 1.0, 1.1, 1.3)]
    assert orc.fd_time_derivative(samples, 1.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        orc.fd_time_derivative([(0.0, 0.0), (0.1, 0.0), (0.2, 0.0)], 0.5)
