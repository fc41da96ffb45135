"""Initial surfaces: harmonic sums, spheroids, random band-limited fields, shifted balls."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from . import harmonics as hm
from . import spheregrid as sg
from .errors import DomainError
from .geometry import Hypersurface
from .oracle import SpheroidSpec, spheroid_radius, translated_ball_radius

SHAPE_TYPES = ("harmonic", "spheroid", "random_band", "translated_ball")


@dataclass(frozen=True)
class ShapeSpec:
    """Description of an initial surface.

    harmonic: list of [l, m, amplitude] in the orthonormal real basis.
    spheroid: [a, c] equatorial and polar semi-axes (ellipse on S^1).
    random_band: [l_min, l_max, target_C2]; coefficients are Gaussian with
    a seed-dependent draw, then scaled so the C2 norm hits the target.
    translated_ball: center of a unit ball containing the origin.
    """

    type: str = "harmonic"
    harmonic: tuple = ()
    spheroid: tuple = (1.0, 1.0)
    random_band: tuple = (2, 6, 0.05)
    translated_ball: tuple = (0.0, 0.0, 0.0)
    symmetrize: bool = False

    def __post_init__(self):
        if self.type not in SHAPE_TYPES:
            raise DomainError(f"shape.type must be one of {SHAPE_TYPES}, got {self.type!r}")
        object.__setattr__(self, "harmonic", tuple(tuple(h) for h in self.harmonic))
        for h in self.harmonic:
            if len(h) != 3:
                raise DomainError("shape.harmonic entries are [l, m, amplitude]")
        object.__setattr__(self, "spheroid", tuple(float(v) for v in self.spheroid))
        object.__setattr__(self, "random_band", tuple(self.random_band))
        object.__setattr__(self, "translated_ball", tuple(float(v) for v in self.translated_ball))
        if len(self.spheroid) != 2:
            raise DomainError("shape.spheroid is [a, c]")
        if len(self.random_band) != 3:
            raise DomainError("shape.random_band is [l_min, l_max, target_C2]")
        lo, hi, c2 = self.random_band
        if not (0 <= int(lo) <= int(hi)) or not c2 > 0:
            raise DomainError("shape.random_band needs 0 <= l_min <= l_max and target_C2 > 0")

    def to_dict(self) -> dict:
        return {
            "type": self.type,
            "harmonic": [list(h) for h in self.harmonic],
            "spheroid": list(self.spheroid),
            "random_band": list(self.random_band),
            "translated_ball": list(self.translated_ball),
            "symmetrize": self.symmetrize,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeSpec":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise DomainError(f"unknown shape keys: {sorted(extra)}")
        return cls(**d)


def random_band_field(grid: sg.GridSpec, l_min: int, l_max: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian coefficients on degrees l_min..l_max, decaying like 1/(1+l)."""
    if grid.n == 2:
        s = hm.HarmonicSpectrum(2, l_max, np.zeros((l_max + 1) ** 2))
        deg = s.degrees
        c = rng.standard_normal(deg.size) / (1.0 + deg)
        c[(deg < l_min)] = 0.0
        return hm.synthesize(hm.HarmonicSpectrum(2, l_max, c), grid)
    ell = np.arange(l_min, l_max + 1)
    a = rng.standard_normal((2, ell.size)) / (1.0 + ell[None, :])
    phi = grid.phi[:, None]
    return np.sum(a[0] * np.cos(ell * phi) + a[1] * np.sin(ell * phi), axis=1)


def build_field(spec: ShapeSpec, grid: sg.GridSpec, seed: int = 0) -> np.ndarray:
    """Radial perturbation u on ``grid`` described by ``spec``."""
    n = grid.n
    if spec.type == "harmonic":
        if not spec.harmonic:
            u = np.zeros(grid.shape)
        else:
            L = max(int(h[0]) for h in spec.harmonic)
            s = hm.HarmonicSpectrum.from_modes(n, L, [(int(l), int(m), float(a)) for l, m, a in spec.harmonic])
            u = hm.synthesize(s, grid)
    elif spec.type == "spheroid":
        a, c = spec.spheroid
        if n == 2:
            theta = np.broadcast_to(grid.theta[:, None], grid.shape)
            u = spheroid_radius(SpheroidSpec(a, c), theta) - 1.0
        else:
            phi = grid.phi
            u = 1.0 / np.sqrt(np.cos(phi) ** 2 / a**2 + np.sin(phi) ** 2 / c**2) - 1.0
    elif spec.type == "translated_ball":
        center = np.asarray(spec.translated_ball, dtype=float)
        if center.size != n + 1:
            raise DomainError(f"translated_ball center needs {n + 1} components")
        u = translated_ball_radius(grid.x, center) - 1.0
    else:
        lo, hi, target = int(spec.random_band[0]), int(spec.random_band[1]), float(spec.random_band[2])
        cap = grid.n_lat // 2 if n == 2 else grid.n_lon // 4
        if hi > cap:
            raise DomainError(f"random_band l_max={hi} exceeds grid band limit {cap}")
        u = random_band_field(grid, lo, hi, np.random.default_rng(seed))
        if spec.symmetrize:
            u = sg.symmetrize(grid, u)
        c2 = sg.sup_norms(grid, u)[2]
        if c2 == 0:
            raise DomainError("random_band draw vanished after symmetrization; widen the band")
        u = u * (target / c2)
    if spec.symmetrize:
        u = sg.symmetrize(grid, u)
    return u


def build_surface(spec: ShapeSpec, grid: sg.GridSpec, seed: int = 0) -> Hypersurface:
    return Hypersurface(grid, build_field(spec, grid, seed))
