"""Real spherical-harmonic spectra: analysis, synthesis and spectral norms.

Coefficients are stored flat in (l, m) order, l ascending and m from -l to l,
so index = l*l + l + m. Negative m is the sine family. The basis is
orthonormal with no Condon-Shortley phase (see ``_transform``). On S^1 only
m = +-l exist; the flat vector still has (l_max + 1)^2 slots and the unused
ones stay zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _transform as tr
from .errors import DomainError
from .spheregrid import GridSpec

__all__ = [
    "HarmonicSpectrum",
    "analyze",
    "synthesize",
    "sobolev_norms",
    "strip_low_modes",
    "poincare_margin",
    "flat_index",
]


def flat_index(l: int, m: int) -> int:
    return l * l + l + m


@dataclass(frozen=True)
class HarmonicSpectrum:
    n: int
    l_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != ((self.l_max + 1) ** 2,):
            raise DomainError(f"expected {(self.l_max + 1) ** 2} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degrees(self) -> np.ndarray:
        return np.repeat(np.arange(self.l_max + 1), 2 * np.arange(self.l_max + 1) + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        """-Delta eigenvalue l(l+n-1) for every coefficient slot."""
        l = self.degrees
        return l * (l + self.n - 1.0)

    def coeff(self, l: int, m: int) -> float:
        return float(self.coeffs[flat_index(l, m)])

    @classmethod
    def from_modes(cls, n: int, l_max: int, modes) -> "HarmonicSpectrum":
        """Build from an iterable of (l, m, amplitude)."""
        c = np.zeros((l_max + 1) ** 2)
        for l, m, a in modes:
            if not (0 <= l <= l_max and -l <= m <= l):
                raise DomainError(f"mode ({l}, {m}) outside band limit {l_max}")
            if n == 1 and l > 0 and abs(m) != l:
                raise DomainError("on S^1 only m = +-l exist")
            c[flat_index(l, m)] += a
        return cls(n, l_max, c)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "l_max": self.l_max, "coeffs": self.coeffs.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "HarmonicSpectrum":
        d = json.loads(text)
        return cls(int(d["n"]), int(d["l_max"]), np.asarray(d["coeffs"], dtype=float))

    def _to_ab(self):
        L = self.l_max
        A = np.zeros((L + 1, L + 1))
        B = np.zeros((L + 1, L + 1))
        for l in range(L + 1):
            base = l * l + l
            A[l, : l + 1] = self.coeffs[base : base + l + 1]
            B[l, 1 : l + 1] = self.coeffs[base - np.arange(1, l + 1)]
        return A, B

    @classmethod
    def _from_ab(cls, n: int, A: np.ndarray, B: np.ndarray) -> "HarmonicSpectrum":
        L = A.shape[0] - 1
        c = np.zeros((L + 1) ** 2)
        for l in range(L + 1):
            base = l * l + l
            c[base : base + l + 1] = A[l, : l + 1]
            c[base - np.arange(1, l + 1)] = B[l, 1 : l + 1]
        return cls(n, L, c)


def _capacity(grid: GridSpec) -> int:
    if grid.n == 2:
        return min(grid.n_lat - 1, grid.n_lon // 2 - 1)
    return grid.n_lon // 2 - 1


def analyze(grid: GridSpec, f, l_max: int | None = None) -> HarmonicSpectrum:
    """Quadrature projection of a grid field onto harmonics of degree <= l_max.

    ``l_max`` defaults to n_lat // 2 (n_lon // 4 on the circle).
    """
    if l_max is None:
        l_max = grid.n_lat // 2 if grid.n == 2 else grid.n_lon // 4
    if l_max > _capacity(grid) or l_max < 0:
        raise DomainError(f"l_max={l_max} exceeds grid capacity {_capacity(grid)}")
    f = np.asarray(f, dtype=float)
    if grid.n == 2:
        A, B = tr.analyze2(f, grid.weights[:, 0] * grid.n_lon / (2.0 * np.pi), grid.n_lon, l_max)
    else:
        A, B = tr.analyze1(f, l_max)
    return HarmonicSpectrum._from_ab(grid.n, A, B)


def synthesize(s: HarmonicSpectrum, grid: GridSpec) -> np.ndarray:
    if s.n != grid.n:
        raise DomainError("spectrum and grid dimensions differ")
    if s.l_max > _capacity(grid):
        raise DomainError(f"l_max={s.l_max} exceeds grid capacity {_capacity(grid)}")
    A, B = s._to_ab()
    if grid.n == 2:
        return tr.synthesize2(A, B, grid.n_lat, grid.n_lon)
    return tr.synthesize1(A, B, grid.n_lon)


def sobolev_norms(s: HarmonicSpectrum) -> tuple[float, float, float]:
    """(||u||^2, ||grad u||^2, ||Lap u||^2) from the coefficients."""
    a2 = s.coeffs**2
    lam = s.eigenvalues
    return float(a2.sum()), float((lam * a2).sum()), float((lam**2 * a2).sum())


def strip_low_modes(s: HarmonicSpectrum, up_to_l: int) -> HarmonicSpectrum:
    if up_to_l > s.l_max:
        raise DomainError("up_to_l exceeds the band limit")
    c = s.coeffs.copy()
    c[s.degrees <= up_to_l] = 0.0
    return HarmonicSpectrum(s.n, s.l_max, c)


def poincare_margin(s: HarmonicSpectrum) -> float:
    """||Lap u||^2 - 2(n+1)||grad u||^2; nonnegative once the l = 1 modes vanish."""
    _, g, lap = sobolev_norms(s)
    return lap - 2.0 * (s.n + 1) * g
