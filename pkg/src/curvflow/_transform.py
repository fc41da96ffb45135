"""Low-level real spherical-harmonic / Fourier transforms on tensor grids.

Real orthonormal harmonics on S^2, no Condon-Shortley phase:

    Y_l0  = N_l0 P_l^0(cos t)
    Y_lm  = sqrt(2) N_lm P_l^m(cos t) cos(m p)     (m > 0)
    Y_l,-m = sqrt(2) N_lm P_l^m(cos t) sin(m p)    (m > 0)

with t the colatitude and p the longitude. Coefficients are kept as two
``(L+1, L+1)`` arrays indexed ``[l, m]``: ``A`` for the cosine family
(including m = 0) and ``B`` for the sine family (column 0 unused).

On S^1 the basis is 1/sqrt(2 pi), cos(m p)/sqrt(pi), sin(m p)/sqrt(pi); the
same A/B layout is used with a single row (l = m).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=16)
def gauss_nodes(n_lat: int) -> tuple[np.ndarray, np.ndarray]:
    """Colatitudes (north to south) and Gauss-Legendre weights in cos(colatitude)."""
    x, _ = np.polynomial.legendre.leggauss(n_lat)
    x = x[::-1].copy()
    # Christoffel-function weights: 1 / sum_l p_l(x)^2 with orthonormal p_l.
    # More accurate than leggauss weights at the 1e-14 level.
    p_prev, p = np.zeros_like(x), np.full_like(x, np.sqrt(0.5))
    acc = p**2
    for l in range(1, n_lat):
        a = np.sqrt((4.0 * l * l - 1.0) / (l * l))
        b = np.sqrt(((l - 1.0) ** 2) / (4.0 * (l - 1.0) ** 2 - 1.0)) if l > 1 else 0.0
        p_prev, p = p, a * (x * p - b * p_prev)
        acc = acc + p**2
    return np.arccos(x), 1.0 / acc


@lru_cache(maxsize=16)
def legendre_tables(n_lat: int, L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalized associated Legendre functions and two colatitude derivatives.

    Returns three arrays of shape ``(L+1, n_lat, L+1)`` indexed ``[m, node, l]``,
    zero where l < m. Normalization: 2 pi * int P_lm^2 sin t dt = 1.
    """
    theta, _ = gauss_nodes(n_lat)
    c, s = np.cos(theta), np.sin(theta)
    P = np.zeros((L + 1, n_lat, L + 1))
    dP = np.zeros_like(P)
    pmm = np.full(n_lat, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(L + 1):
        if m > 0:
            pmm = np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        P[m, :, m] = pmm
        if m + 1 <= L:
            P[m, :, m + 1] = np.sqrt(2.0 * m + 3.0) * c * pmm
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[m, :, l] = a * (c * P[m, :, l - 1] - b * P[m, :, l - 2])
        for l in range(m, L + 1):
            prev = P[m, :, l - 1] if l - 1 >= m else 0.0
            f = np.sqrt((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0)) if l > m else 0.0
            dP[m, :, l] = (l * c * P[m, :, l] - f * prev) / s
    ell = np.arange(L + 1)[None, None, :]
    mm = np.arange(L + 1)[:, None, None]
    cot = (c / s)[None, :, None]
    d2P = -cot * dP - (ell * (ell + 1) - mm**2 / (s**2)[None, :, None]) * P
    for T in (P, dP, d2P):
        T.setflags(write=False)
    return P, dP, d2P


def m_factor(L: int) -> np.ndarray:
    f = np.full(L + 1, np.sqrt(2.0))
    f[0] = 1.0
    return f


def analyze2(values: np.ndarray, weights_lat: np.ndarray, n_lon: int, L: int):
    """Quadrature projection of grid values (n_lat, n_lon) onto Y_lm, l <= L."""
    n_lat = values.shape[0]
    P, _, _ = legendre_tables(n_lat, L)
    c = np.fft.rfft(values, axis=1)[:, : L + 1]
    scale = (2.0 * np.pi / n_lon) * weights_lat[:, None] * m_factor(L)[None, :]
    cr = c.real * scale
    ci = -c.imag * scale
    # batched over m: (n_lat, L+1)^T @ (n_lat,) per m
    A = np.matmul(cr.T[:, None, :], P)[:, 0, :].T
    B = np.matmul(ci.T[:, None, :], P)[:, 0, :].T
    B[:, 0] = 0.0
    return A, B


def synthesize2(A: np.ndarray, B: np.ndarray, n_lat: int, n_lon: int, table: int = 0):
    """Evaluate sum A cos + B sin with the Legendre table (0: P, 1: dP, 2: d2P)."""
    L = A.shape[0] - 1
    T = legendre_tables(n_lat, L)[table]
    Fc = np.matmul(T, A.T[:, :, None])[:, :, 0].T
    Fs = np.matmul(T, B.T[:, :, None])[:, :, 0].T
    C = np.zeros((n_lat, n_lon // 2 + 1), dtype=complex)
    f = m_factor(L)
    C[:, : L + 1] = n_lon * f[None, :] * (Fc - 1j * Fs)
    C[:, 1 : L + 1] *= 0.5
    return np.fft.irfft(C, n=n_lon, axis=1)


def analyze1(values: np.ndarray, L: int):
    """Fourier coefficients on the circle in the orthonormal cos/sin basis."""
    n = values.shape[0]
    c = np.fft.rfft(values)[: L + 1]
    dphi = 2.0 * np.pi / n
    norm = np.full(L + 1, 1.0 / np.sqrt(np.pi))
    norm[0] = 1.0 / np.sqrt(2.0 * np.pi)
    A = np.zeros((L + 1, L + 1))
    B = np.zeros((L + 1, L + 1))
    idx = np.arange(L + 1)
    A[idx, idx] = c.real * dphi * norm
    B[idx, idx] = -c.imag * dphi * norm
    B[0, 0] = 0.0
    return A, B


def synthesize1(A: np.ndarray, B: np.ndarray, n: int, deriv: int = 0):
    """Evaluate the circle series (diagonal of A, B) or its derivative of order ``deriv``."""
    L = A.shape[0] - 1
    idx = np.arange(L + 1)
    a = np.diagonal(A).copy()
    b = np.diagonal(B).copy()
    for _ in range(deriv):
        a, b = idx * b, -idx * a
    norm = np.full(L + 1, 1.0 / np.sqrt(np.pi))
    norm[0] = 1.0 / np.sqrt(2.0 * np.pi)
    C = np.zeros(n // 2 + 1, dtype=complex)
    C[: L + 1] = n * norm * (a - 1j * b)
    C[1 : L + 1] *= 0.5
    return np.fft.irfft(C, n=n)


def phi_derivative(A: np.ndarray, B: np.ndarray):
    """Coefficients of d/dphi: A cos + B sin -> m B cos - m A sin."""
    m = np.arange(A.shape[1])[None, :]
    return m * B, -m * A
