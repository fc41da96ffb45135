"""Grids on S^1 and S^2, quadrature, and covariant derivatives for the round metric.

Fields are plain numpy arrays shaped like ``grid.shape``. Covectors carry a
trailing axis of length n and symmetric tensors two trailing axes (n, n), in
the coordinate frame (colatitude, longitude) on S^2 or (angle,) on S^1.

Derivatives are computed spectrally: values are projected onto real
harmonics of degree <= ``grid.l_deriv`` and differentiated term by term, so
band-limited fields are differentiated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _transform as tr
from .errors import DomainError

__all__ = [
    "GridSpec",
    "build_grid",
    "sphere_area",
    "integrate",
    "Derivatives",
    "derivatives",
    "gradient",
    "hessian",
    "laplacian",
    "grad_norm_sq",
    "sup_norms",
    "symmetrize",
    "project",
]


def sphere_area(n: int) -> float:
    """|S^n| for n = 1, 2."""
    return {1: 2.0 * np.pi, 2: 4.0 * np.pi}[n]


@dataclass(frozen=True, eq=False)
class GridSpec:
    n: int
    n_lat: int
    n_lon: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    metric: np.ndarray = field(repr=False)
    metric_inv: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_lat, self.n_lon) if self.n == 2 else (self.n_lon,)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def l_deriv(self) -> int:
        """Band limit used for differentiation."""
        if self.n == 2:
            return min(self.n_lat - 1, self.n_lon // 2 - 1)
        return self.n_lon // 2 - 1

    @property
    def area(self) -> float:
        return sphere_area(self.n)

    def node(self, flat_index: int) -> tuple[float, ...]:
        """Coordinates of a node given its flat index (for error messages)."""
        idx = np.unravel_index(flat_index, self.shape)
        if self.n == 2:
            return float(self.theta[idx[0]]), float(self.phi[idx[1]])
        return (float(self.phi[idx[0]]),)


def build_grid(n: int, n_lat: int, n_lon: int) -> GridSpec:
    """Gauss-Legendre x uniform longitude grid on S^2, or uniform angles on S^1."""
    if n == 2:
        if n_lat < 8 or n_lat % 2:
            raise DomainError("n_lat must be even and >= 8")
        if n_lon < 16 or n_lon % 2:
            raise DomainError("n_lon must be even and >= 16")
        theta, wlat = tr.gauss_nodes(n_lat)
        phi = 2.0 * np.pi * np.arange(n_lon) / n_lon
        T, P = np.meshgrid(theta, phi, indexing="ij")
        st = np.sin(T)
        x = np.stack([st * np.cos(P), st * np.sin(P), np.cos(T)], axis=-1)
        weights = np.outer(wlat, np.full(n_lon, 2.0 * np.pi / n_lon))
        metric = np.zeros(T.shape + (2, 2))
        metric[..., 0, 0] = 1.0
        metric[..., 1, 1] = st**2
        metric_inv = np.zeros_like(metric)
        metric_inv[..., 0, 0] = 1.0
        metric_inv[..., 1, 1] = 1.0 / st**2
        return GridSpec(2, n_lat, n_lon, theta, phi, x, weights, metric, metric_inv)
    if n == 1:
        if n_lon < 16 or n_lon % 2:
            raise DomainError("circle grid needs an even node count >= 16")
        phi = 2.0 * np.pi * np.arange(n_lon) / n_lon
        x = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        weights = np.full(n_lon, 2.0 * np.pi / n_lon)
        metric = np.ones((n_lon, 1, 1))
        return GridSpec(1, 0, n_lon, np.array([]), phi, x, weights, metric, metric.copy())
    raise DomainError(f"unsupported sphere dimension n={n}; only 1 and 2")


def _check(grid: GridSpec, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise DomainError(f"field shape {f.shape} does not match grid {grid.shape}")
    return f


def integrate(grid: GridSpec, f) -> float:
    """Quadrature sum of ``f`` over the sphere."""
    return float(np.sum(grid.weights * _check(grid, f)))


def _coeffs(grid: GridSpec, f: np.ndarray, L: int):
    if grid.n == 2:
        return tr.analyze2(f, grid.weights[:, 0] * grid.n_lon / (2.0 * np.pi), grid.n_lon, L)
    return tr.analyze1(f, L)


def _synth(grid: GridSpec, A, B, table: int = 0) -> np.ndarray:
    if grid.n == 2:
        return tr.synthesize2(A, B, grid.n_lat, grid.n_lon, table)
    return tr.synthesize1(A, B, grid.n_lon, table)


class Derivatives(NamedTuple):
    """Covariant first and second derivatives of a scalar field."""

    grad: np.ndarray  # (..., n)
    hess: np.ndarray  # (..., n, n)


def derivatives(grid: GridSpec, f) -> Derivatives:
    """Gradient and covariant Hessian of ``f`` from one spectral analysis."""
    f = _check(grid, f)
    L = grid.l_deriv
    A, B = _coeffs(grid, f, L)
    if grid.n == 1:
        ft = _synth(grid, A, B, 1)
        ftt = _synth(grid, A, B, 2)
        return Derivatives(ft[..., None], ftt[..., None, None])
    Ap, Bp = tr.phi_derivative(A, B)
    App, Bpp = tr.phi_derivative(Ap, Bp)
    ft = _synth(grid, A, B, 1)
    fp = _synth(grid, Ap, Bp, 0)
    ftt = _synth(grid, A, B, 2)
    ftp = _synth(grid, Ap, Bp, 1)
    fpp = _synth(grid, App, Bpp, 0)
    t = grid.theta[:, None]
    cot = np.cos(t) / np.sin(t)
    # Christoffel symbols of ds^2 = dt^2 + sin^2 t dp^2
    hess = np.empty(f.shape + (2, 2))
    hess[..., 0, 0] = ftt
    hess[..., 0, 1] = hess[..., 1, 0] = ftp - cot * fp
    hess[..., 1, 1] = fpp + np.sin(t) * np.cos(t) * ft
    return Derivatives(np.stack([ft, fp], axis=-1), hess)


def gradient(grid: GridSpec, f) -> np.ndarray:
    return derivatives(grid, f).grad


def hessian(grid: GridSpec, f) -> np.ndarray:
    return derivatives(grid, f).hess


def laplacian(grid: GridSpec, f) -> np.ndarray:
    """Laplace-Beltrami operator, applied as -l(l+n-1) on harmonic coefficients."""
    f = _check(grid, f)
    L = grid.l_deriv
    A, B = _coeffs(grid, f, L)
    ell = np.arange(L + 1)[:, None]
    lam = ell * (ell + grid.n - 1)
    return _synth(grid, -lam * A, -lam * B, 0)


def grad_norm_sq(grid: GridSpec, grad: np.ndarray) -> np.ndarray:
    """s^{ij} u_i u_j per node."""
    return np.einsum("...i,...ij,...j->...", grad, grid.metric_inv, grad)


def hess_norm_sq(grid: GridSpec, hess: np.ndarray) -> np.ndarray:
    """s^{ik} s^{jl} u_ij u_kl per node."""
    mixed = grid.metric_inv @ hess
    return np.einsum("...ij,...ji->...", mixed, mixed)


def sup_norms(grid: GridSpec, f) -> tuple[float, float, float]:
    """Discrete sup norms of |u|, |grad u| and the Frobenius norm of the Hessian."""
    f = _check(grid, f)
    d = derivatives(grid, f)
    c0 = float(np.max(np.abs(f)))
    c1 = float(np.sqrt(np.max(grad_norm_sq(grid, d.grad))))
    c2 = float(np.sqrt(np.max(hess_norm_sq(grid, d.hess))))
    return c0, c1, c2


def project(grid: GridSpec, f, L: int) -> np.ndarray:
    """Orthogonal projection onto harmonics of degree <= L."""
    f = _check(grid, f)
    A, B = _coeffs(grid, f, L)
    return _synth(grid, A, B, 0)


def symmetrize(grid: GridSpec, f) -> np.ndarray:
    """Average of ``f`` over reflections in every coordinate hyperplane."""
    f = _check(grid, f)
    if grid.n == 2:
        N = grid.n_lon
        k = np.arange(N)
        out = 0.5 * (f + f[::-1, :])  # z -> -z (Gauss nodes are symmetric)
        out = 0.5 * (out + out[:, (-k) % N])  # y -> -y
        out = 0.5 * (out + out[:, (N // 2 - k) % N])  # x -> -x
        return out
    N = grid.n_lon
    k = np.arange(N)
    out = 0.5 * (f + f[(-k) % N])
    return 0.5 * (out + out[(N // 2 - k) % N])
