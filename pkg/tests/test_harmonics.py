import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvflow import harmonics as hm
from curvflow import spheregrid as sg
from curvflow.errors import DomainError


def spectra(l_max=10):
    return st.integers(0, 10_000).map(
        lambda s: hm.HarmonicSpectrum(2, l_max, np.random.default_rng(s).standard_normal((l_max + 1) ** 2))
    )


def test_flat_index_ordering():
    assert [hm.flat_index(l, m) for l in range(3) for m in range(-l, l + 1)] == list(range(9))


def test_y00_is_normalized(grid32):
    u = hm.synthesize(hm.HarmonicSpectrum.from_modes(2, 0, [(0, 0, 1.0)]), grid32)
    np.testing.assert_allclose(u, 1 / np.sqrt(4 * np.pi))


def test_no_condon_shortley_phase(grid32):
    # Y_{1,1} is a positive multiple of x
    u = hm.synthesize(hm.HarmonicSpectrum.from_modes(2, 1, [(1, 1, 1.0)]), grid32)
    np.testing.assert_allclose(u, np.sqrt(3 / (4 * np.pi)) * grid32.x[..., 0], atol=1e-13)
    v = hm.synthesize(hm.HarmonicSpectrum.from_modes(2, 1, [(1, -1, 1.0)]), grid32)
    np.testing.assert_allclose(v, np.sqrt(3 / (4 * np.pi)) * grid32.x[..., 1], atol=1e-13)


@given(spectra())
def test_round_trip(grid32, s):
    back = hm.analyze(grid32, hm.synthesize(s, grid32), s.l_max)
    np.testing.assert_allclose(back.coeffs, s.coeffs, atol=1e-12)


@given(spectra())
def test_parseval_and_dirichlet(grid32, s):
    u = hm.synthesize(s, grid32)
    u2, g2, l2 = hm.sobolev_norms(s)
    assert sg.integrate(grid32, u * u) == pytest.approx(u2, rel=1e-11)
    grad = sg.gradient(grid32, u)
    assert sg.integrate(grid32, sg.grad_norm_sq(grid32, grad)) == pytest.approx(g2, rel=1e-9)
    assert sg.integrate(grid32, sg.laplacian(grid32, u) ** 2) == pytest.approx(l2, rel=1e-9)


@given(spectra())
def test_gap_without_first_modes(s):
    assert hm.poincare_margin(hm.strip_low_modes(s, 1)) >= -1e-10


def test_gap_fails_with_dominant_first_modes():
    s = hm.HarmonicSpectrum.from_modes(2, 3, [(1, 0, 1.0), (3, 0, 0.01)])
    assert hm.poincare_margin(s) < 0


def test_margin_on_single_mode():
    # l(l+1)^2 - 6 l(l+1) for l = 2
    s = hm.HarmonicSpectrum.from_modes(2, 2, [(2, 1, 1.0)])
    assert hm.poincare_margin(s) == pytest.approx(0.0, abs=1e-12)


def test_json_round_trip():
    s = hm.HarmonicSpectrum.from_modes(2, 4, [(2, 0, 0.5), (4, -3, -0.25)])
    back = hm.HarmonicSpectrum.from_json(s.to_json())
    np.testing.assert_array_equal(back.coeffs, s.coeffs)
    assert back.l_max == 4 and back.n == 2


def test_circle_modes():
    c = sg.build_grid(1, 0, 64)
    s = hm.HarmonicSpectrum.from_modes(1, 3, [(3, 3, 1.0), (2, -2, 0.5)])
    back = hm.analyze(c, hm.synthesize(s, c), 3)
    np.testing.assert_allclose(back.coeffs, s.coeffs, atol=1e-13)
    with pytest.raises(DomainError):
        hm.HarmonicSpectrum.from_modes(1, 3, [(3, 1, 1.0)])


def test_errors(grid32):
    with pytest.raises(DomainError):
        hm.HarmonicSpectrum(2, 2, np.zeros(4))
    with pytest.raises(DomainError):
        hm.analyze(grid32, np.zeros(grid32.shape), 40)
    with pytest.raises(DomainError):
        hm.HarmonicSpectrum.from_modes(2, 2, [(3, 0, 1.0)])
    with pytest.raises(DomainError):
        hm.strip_low_modes(hm.HarmonicSpectrum(2, 1, np.zeros(4)), 2)
