"""Independent reference values: subset sums, spheroid geometry, time derivatives.

Nothing here touches the grid or spectral code, so these values can check it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, prod

import numpy as np
from scipy.integrate import quad

from .errors import DomainError

__all__ = [
    "brute_sigma",
    "SpheroidSpec",
    "spheroid_radius",
    "spheroid_curvatures",
    "spheroid_reference",
    "spheroid_area",
    "translated_ball_radius",
    "fd_time_derivative",
]


def brute_sigma(lam, k: int) -> float:
    """Literal sum over k-subsets of products."""
    lam = [float(v) for v in lam]
    if not (0 <= k <= len(lam)):
        raise DomainError(f"k={k} outside [0, {len(lam)}]")
    return float(sum(prod(c) for c in itertools.combinations(lam, k)))


@dataclass(frozen=True)
class SpheroidSpec:
    """Spheroid x^2/a^2 + y^2/a^2 + z^2/c^2 = 1."""

    a: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise DomainError("spheroid semi-axes must be positive")


def spheroid_radius(s: SpheroidSpec, theta) -> np.ndarray:
    """Distance from the center to the surface along colatitude ``theta``."""
    theta = np.asarray(theta, dtype=float)
    return 1.0 / np.sqrt(np.sin(theta) ** 2 / s.a**2 + np.cos(theta) ** 2 / s.c**2)


def _param_angle(s: SpheroidSpec, theta) -> np.ndarray:
    r = spheroid_radius(s, theta)
    return np.arctan2(r * np.sin(theta) / s.a, r * np.cos(theta) / s.c)


def _curv_param(s: SpheroidSpec, v):
    q = np.sqrt(s.a**2 * np.cos(v) ** 2 + s.c**2 * np.sin(v) ** 2)
    meridian = s.a * s.c / q**3
    parallel = s.c / (s.a * q)
    return meridian, parallel, q


def spheroid_curvatures(s: SpheroidSpec, theta) -> tuple[np.ndarray, np.ndarray]:
    """Meridian and parallel principal curvatures on the ray at colatitude ``theta``."""
    k1, k2, _ = _curv_param(s, _param_angle(s, theta))
    return k1, k2


def spheroid_area(s: SpheroidSpec) -> float:
    """Closed-form surface area."""
    a, c = s.a, s.c
    if np.isclose(a, c, rtol=0, atol=1e-15):
        return 4.0 * np.pi * a * a
    if c > a:
        e = np.sqrt(1.0 - a * a / (c * c))
        return 2.0 * np.pi * a * a * (1.0 + c / (a * e) * np.arcsin(e))
    e = np.sqrt(1.0 - c * c / (a * a))
    return 2.0 * np.pi * a * a * (1.0 + (1.0 - e * e) / e * np.arctanh(e))


def spheroid_reference(s: SpheroidSpec, k: int) -> float:
    """I_k of the spheroid by adaptive quadrature in the parametric angle."""
    if k == -1:
        return 4.0 / 3.0 * np.pi * s.a**2 * s.c
    if k not in (0, 1, 2):
        raise DomainError(f"k={k} not in {{-1, 0, 1, 2}}")

    def integrand(v):
        k1, k2, q = _curv_param(s, v)
        sig = (1.0, k1 + k2, k1 * k2)[k]
        return sig * s.a * np.sin(v) * q

    val, _ = quad(integrand, 0.0, np.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2.0 * np.pi * val


def translated_ball_radius(x, center, R: float = 1.0) -> np.ndarray:
    """Radial function over the origin of the ball of radius R at ``center``.

    Requires |center| < R so the origin is inside.
    """
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    c2 = float(center @ center)
    if c2 >= R * R:
        raise DomainError("origin must lie inside the ball")
    p = x @ center
    return p + np.sqrt(p * p - c2 + R * R)


def fd_time_derivative(samples, at: float) -> float:
    """Derivative at ``at`` of the quadratic through the three nearest samples.

    Needs samples on both sides of ``at``; on a uniform stencil centered at
    ``at`` this is the usual centered difference.
    """
    pts = sorted((float(t), float(v)) for t, v in samples)
    if len(pts) < 3:
        raise DomainError("need at least three samples")
    ts = np.array([p[0] for p in pts])
    idx = np.argsort(np.abs(ts - at), kind="stable")[:3]
    t3 = ts[idx]
    if not (t3.min() <= at <= t3.max()):
        raise DomainError("samples must bracket the evaluation time")
    v3 = np.array([pts[i][1] for i in idx])
    t0, t1, t2 = t3
    v0, v1, v2 = v3
    # derivative of the Lagrange interpolant
    d0 = ((at - t1) + (at - t2)) / ((t0 - t1) * (t0 - t2))
    d1 = ((at - t0) + (at - t2)) / ((t1 - t0) * (t1 - t2))
    d2 = ((at - t0) + (at - t1)) / ((t2 - t0) * (t2 - t1))
    return float(v0 * d0 + v1 * d1 + v2 * d2)


def ball_quermass(n: int, k: int, R: float = 1.0) -> float:
    """C(n,k) R^{n-k} |S^n| (volume for k = -1), n = 1 or 2."""
    area = {1: 2.0 * np.pi, 2: 4.0 * np.pi}[n]
    if k == -1:
        return area * R ** (n + 1) / (n + 1)
    return comb(n, k) * R ** (n - k) * area
