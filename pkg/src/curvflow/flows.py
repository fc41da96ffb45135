"""Inverse and volume-preserving curvature flows of radial graphs.

Both flows move the surface with normal speed G; for a radial graph with
radius w this is the scalar PDE

    w_t = G sqrt(1 + |grad w|^2 / w^2) = G D / w.

The inverse flow uses G = sigma_{k-1}/sigma_k and grows like e^{rt} with
r = C(n,k-1)/C(n,k); diagnostics are taken on the rescaled radius
e^{-rt} w. The volume-preserving flow uses G = -sigma_k^alpha + h with h the
area average of sigma_k^alpha.

Time stepping is classical RK4. Each stage's right-hand side is projected
onto harmonics of degree <= l_flow, and the step obeys a spectral CFL bound
built from the largest effective diffusion coefficient |dG/dkappa_i| / w^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace
from math import comb

import numpy as np

from . import geometry as geo
from . import spheregrid as sg
from .errors import ConeExitError, DomainError, NumericalError
from .geometry import CurvatureBundle, Hypersurface
from .oracle import fd_time_derivative
from .symfun import sigma_all_without

log = logging.getLogger(__name__)

__all__ = [
    "FlowConfig",
    "FlowState",
    "DiagnosticsRow",
    "FlowAborted",
    "CSV_COLUMNS",
    "rescale_rate",
    "speed_inverse",
    "speed_volume_preserving",
    "radial_rhs",
    "initial_state",
    "stable_dt",
    "step",
    "rescale",
    "diagnostics",
    "run",
    "flow_derivative_check",
    "DERIVATIVE_TARGETS",
]

# RK4 stability interval on the negative real axis
_RK4_REAL_LIMIT = 2.785

CSV_COLUMNS = (
    "t", "I_k", "I_km1", "Vol", "A", "S", "alpha", "vp_ratio",
    "bar_x", "bar_y", "bar_z", "C0", "C1", "C2", "cone_margin",
)  # fmt: skip


@dataclass(frozen=True)
class FlowConfig:
    kind: str = "inverse"
    n: int = 2
    k: int = 1
    alpha: float = 1.0
    t_end: float = 1.0
    dt_init: float = 1e-2
    dt_max: float = 1e-2
    cfl_safety: float = 0.5
    symmetrize: bool = False
    diag_stride: int = 10
    barycenter_K: float = 10.0
    l_flow: int | None = None
    pinching_C: float | None = None
    fraenkel: bool = True
    c2_gate: float = 0.3

    def __post_init__(self):
        if self.kind not in ("inverse", "volume_preserving"):
            raise DomainError(f"unknown flow kind {self.kind!r}")
        if self.n not in (1, 2):
            raise DomainError("flows support n = 1 and n = 2")
        if not (1 <= self.k <= self.n):
            raise DomainError(f"k={self.k} outside [1, {self.n}]")
        if self.kind == "volume_preserving" and not self.alpha >= 1.0:
            raise DomainError("volume-preserving flow needs alpha >= 1")
        if not (self.t_end >= 0 and self.dt_init > 0 and self.dt_max > 0):
            raise DomainError("t_end must be >= 0 and time steps positive")
        if not (0 < self.cfl_safety <= 1):
            raise DomainError("cfl_safety must lie in (0, 1]")
        if self.diag_stride < 1:
            raise DomainError("diag_stride must be >= 1")
        if self.l_flow is not None and self.l_flow < 2:
            raise DomainError("l_flow must be >= 2")

    @property
    def r(self) -> float:
        return rescale_rate(self.n, self.k) if self.kind == "inverse" else 0.0

    @property
    def conserved_index(self) -> int:
        """Quermassintegral index fixed by the flow (-1 is volume)."""
        return self.k - 1 if self.kind == "inverse" else -1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FlowConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise DomainError(f"unknown flow keys: {sorted(extra)}")
        return cls(**d)


@dataclass
class FlowState:
    grid: sg.GridSpec = field(repr=False)
    t: float
    w: np.ndarray = field(repr=False)
    dt: float
    r: float = 0.0
    steps: int = 0

    @property
    def rescaled_u(self) -> np.ndarray:
        """e^{-rt} w - 1."""
        return math.exp(-self.r * self.t) * self.w - 1.0


@dataclass
class DiagnosticsRow:
    t: float
    I_k: float
    I_km1: float
    Vol: float
    A: float | None
    S: float | None
    alpha: float | None
    vp_ratio: float | None
    bar_x: float
    bar_y: float
    bar_z: float | None
    C0: float
    C1: float
    C2: float
    cone_margin: float
    gauss_bonnet: float | None = None
    bar_ok: bool | None = None
    steps: int = 0

    def csv_values(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


class FlowAborted(NumericalError):
    """A run stopped early; ``rows`` holds every diagnostic emitted before the abort."""

    def __init__(self, message: str, rows: list, node: int | None = None):
        super().__init__(message, node)
        self.rows = rows


def rescale_rate(n: int, k: int) -> float:
    """r = C(n,k-1)/C(n,k)."""
    return comb(n, k - 1) / comb(n, k)


def _cone_check(bundle: CurvatureBundle, k: int) -> None:
    sig = bundle.sigma[..., 1 : k + 1]
    margin = np.min(sig, axis=-1)
    if not np.all(margin > 0.0):
        worst = int(np.argmin(margin.ravel()))
        raise ConeExitError(
            f"curvature left the Garding cone (min sigma_j = {margin.ravel()[worst]:.3e})",
            node=worst,
        )


def speed_inverse(bundle: CurvatureBundle, k: int) -> np.ndarray:
    """G = sigma_{k-1}/sigma_k; requires every node inside Gamma_k^+."""
    _cone_check(bundle, k)
    return bundle.sigma[..., k - 1] / bundle.sigma[..., k]


def speed_volume_preserving(
    bundle: CurvatureBundle, grid: sg.GridSpec, k: int, alpha: float
) -> tuple[np.ndarray, float]:
    """G = -sigma_k^alpha + h with h the area average of sigma_k^alpha."""
    sk = bundle.sigma[..., k]
    if float(alpha) != int(alpha) and np.any(sk < 0):
        raise DomainError("negative sigma_k with a fractional exponent")
    p = sk**alpha
    h = sg.integrate(grid, p * bundle.area_element) / sg.integrate(grid, bundle.area_element)
    return h - p, h


def radial_rhs(G, w, grad_w_sq=None, grid: sg.GridSpec | None = None) -> np.ndarray:
    """w_t = G sqrt(1 + |grad w|^2 / w^2).

    Pass either ``grad_w_sq`` (round-metric |grad w|^2 per node) or a grid to
    differentiate ``w`` on.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise DomainError("radius must be positive")
    if grad_w_sq is None:
        if grid is None:
            raise DomainError("need grad_w_sq or a grid")
        grad_w_sq = sg.grad_norm_sq(grid, sg.gradient(grid, w))
    return np.asarray(G) * np.sqrt(1.0 + grad_w_sq / (w * w))


def _l_flow(grid: sg.GridSpec, config: FlowConfig) -> int:
    default = grid.n_lat // 2 if grid.n == 2 else grid.n_lon // 4
    L = config.l_flow if config.l_flow is not None else default
    return min(L, grid.l_deriv)


def _speed(bundle: CurvatureBundle, grid: sg.GridSpec, config: FlowConfig) -> np.ndarray:
    if config.kind == "inverse":
        return speed_inverse(bundle, config.k)
    return speed_volume_preserving(bundle, grid, config.k, config.alpha)[0]


def _rhs(grid: sg.GridSpec, w: np.ndarray, config: FlowConfig):
    if not np.all(np.isfinite(w)):
        bad = int(np.flatnonzero(~np.isfinite(w).ravel())[0])
        raise NumericalError("non-finite radius", node=bad)
    M = Hypersurface(grid, w - 1.0)
    b = geo.curvature_bundle(M)
    G = _speed(b, grid, config)
    wt = G * b.D / w
    return sg.project(grid, wt, _l_flow(grid, config)), b


def _diffusion(bundle: CurvatureBundle, w: np.ndarray, config: FlowConfig) -> float:
    """max_i |dG/dkappa_i| / w^2 over nodes."""
    k = config.k
    s = bundle.sigma
    dsig = sigma_all_without(bundle.kappa)  # [..., i, j] = d sigma_{j+1} / d kappa_i
    dk = dsig[..., :, k - 1]
    if config.kind == "inverse":
        dkm1 = dsig[..., :, k - 2] if k >= 2 else np.zeros_like(dk)
        sk = s[..., k, None]
        dG = (dkm1 * sk - s[..., k - 1, None] * dk) / (sk * sk)
    else:
        a = config.alpha
        dG = -a * np.abs(s[..., k, None]) ** (a - 1.0) * dk
    return float(np.max(np.abs(dG) / (w * w)[..., None]))


def stable_dt(grid: sg.GridSpec, bundle: CurvatureBundle, w: np.ndarray, config: FlowConfig) -> float:
    """Largest RK4 step for the linearized operator on degrees <= l_flow."""
    L = _l_flow(grid, config)
    nu = _diffusion(bundle, w, config)
    lam = L * (L + grid.n - 1)
    if nu * lam == 0:
        return config.dt_max
    return config.cfl_safety * _RK4_REAL_LIMIT / (nu * lam)


def initial_state(config: FlowConfig, initial: Hypersurface, normalize: bool = True) -> FlowState:
    """Normalize the conserved quantity to its unit-ball value and build the state."""
    if initial.n != config.n:
        raise DomainError("surface and config dimensions differ")
    M = geo.normalize_quermass(initial, config.conserved_index) if normalize else initial
    return FlowState(M.grid, 0.0, M.w.copy(), config.dt_init, config.r, 0)


def _rk4(grid, w, h, config, k1=None):
    if k1 is None:
        k1, _ = _rhs(grid, w, config)
    k2, _ = _rhs(grid, w + 0.5 * h * k1, config)
    k3, _ = _rhs(grid, w + 0.5 * h * k2, config)
    k4, _ = _rhs(grid, w + h * k3, config)
    return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state: FlowState, config: FlowConfig, t_stop: float | None = None) -> FlowState:
    """One RK4 step of size min(dt_max, CFL bound, time left)."""
    grid = state.grid
    k1, b = _rhs(grid, state.w, config)
    dt = min(config.dt_max, stable_dt(grid, b, state.w, config))
    if state.steps == 0:
        dt = min(dt, config.dt_init)
    if t_stop is not None:
        dt = min(dt, t_stop - state.t)
    if not dt > 1e-14:
        raise NumericalError(f"time step underflow (dt = {dt:.3e})")
    w = _rk4(grid, state.w, dt, config, k1)
    if config.symmetrize:
        w = sg.symmetrize(grid, w)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        bad = int(np.flatnonzero(~(np.isfinite(w) & (w > 0)).ravel())[0])
        raise NumericalError("radius became non-finite or non-positive", node=bad)
    return FlowState(grid, state.t + dt, w, dt, state.r, state.steps + 1)


def rescale(state: FlowState) -> Hypersurface:
    """Surface with radial field e^{-rt} w - 1."""
    return Hypersurface(state.grid, state.rescaled_u)


def diagnostics(state: FlowState, config: FlowConfig) -> DiagnosticsRow:
    """Row of monitored quantities.

    I_k, I_{k-1} and Vol are taken on the rescaled surface as is. The
    remaining entries use the rescaled surface dilated so that the conserved
    quantity equals its unit-ball value exactly, which makes "the unit ball"
    and "the ball matched to the current surface" coincide.
    """
    n, k = config.n, config.k
    grid = state.grid
    M_raw = rescale(state)
    b_raw = geo.curvature_bundle(M_raw)
    I_k = geo.quermass_integral(M_raw, k, b_raw)
    I_km1 = geo.quermass_integral(M_raw, k - 1, b_raw)
    vol = geo.quermass_integral(M_raw, -1)
    M = geo.normalize_quermass(M_raw, config.conserved_index)
    b = geo.curvature_bundle(M)
    c0, c1, c2 = sg.sup_norms(grid, M.u)

    A = S = vp = None
    l2, g2, lap2 = geo.sobolev_quadrature(M, b)
    if 1 <= k <= n - 1:
        A = geo.stability_functional_A(M, k, b)
    if config.kind == "inverse":
        if A is not None and c0 > 1e-12 and A > 0:
            S = geo.quermass_excess(M, k, b) / A
    elif c0 > 1e-12 and l2 > 0:
        vp = geo.quermass_excess(M, k - 1, b) / l2

    alpha = geo.fraenkel_asymmetry(M).alpha if config.fraenkel else None
    bar = geo.barycenter(M)
    hess_sq = sg.integrate(grid, sg.hess_norm_sq(grid, b.hess))
    bar_ok = bool(np.linalg.norm(bar) <= config.barycenter_K * c2 * (l2 + g2 + hess_sq) + 1e-14)
    margin = float(np.min(b.sigma[..., 1 : k + 1]))
    gb = geo.quermass_integral(M, n, b) if n == 2 else None
    return DiagnosticsRow(
        t=state.t,
        I_k=I_k,
        I_km1=I_km1,
        Vol=vol,
        A=A,
        S=S,
        alpha=alpha,
        vp_ratio=vp,
        bar_x=float(bar[0]),
        bar_y=float(bar[1]),
        bar_z=float(bar[2]) if n == 2 else None,
        C0=c0,
        C1=c1,
        C2=c2,
        cone_margin=margin,
        gauss_bonnet=gb,
        bar_ok=bar_ok,
        steps=state.steps,
    )


def _pinching_ratio(bundle: CurvatureBundle, n: int) -> float:
    s = bundle.sigma
    return float(np.min(s[..., n] / s[..., 1] ** n))


def run(config: FlowConfig, initial: Hypersurface, progress=None) -> list[DiagnosticsRow]:
    """Normalize, integrate to t_end and collect diagnostics every diag_stride steps.

    Raises ``DomainError`` before stepping if the normalized initial surface
    is not nearly spherical (C2 > c2_gate) and ``FlowAborted`` (holding the rows
    emitted so far) on any numerical failure.
    """
    state = initial_state(config, initial)
    c2 = sg.sup_norms(state.grid, state.w - 1.0)[2]
    if c2 > config.c2_gate:
        raise DomainError(f"initial C2 norm {c2:.3f} exceeds {config.c2_gate}; not nearly spherical")
    rows: list[DiagnosticsRow] = []
    pinch = None
    if config.kind == "volume_preserving" and config.n == 2:
        b0 = geo.curvature_bundle(Hypersurface(state.grid, state.w - 1.0))
        pinch = config.pinching_C if config.pinching_C is not None else 0.9 * _pinching_ratio(b0, 2)
    warned = False
    try:
        rows.append(diagnostics(state, config))
        while state.t < config.t_end - 1e-12:
            state = step(state, config, t_stop=config.t_end)
            last = state.t >= config.t_end - 1e-12
            if state.steps % config.diag_stride == 0 or last:
                rows.append(diagnostics(state, config))
                if progress is not None:
                    progress(rows[-1])
            if pinch is not None and not warned and state.steps % config.diag_stride == 0:
                b = geo.curvature_bundle(Hypersurface(state.grid, state.w - 1.0))
                if _pinching_ratio(b, 2) <= pinch:
                    log.warning("pinching condition sigma_n > C_p sigma_1^n violated at t=%.4g", state.t)
                    warned = True
    except NumericalError as exc:
        raise FlowAborted(f"run aborted at t={state.t:.6g}: {exc}", rows, exc.node) from exc
    except DomainError as exc:
        raise FlowAborted(f"run aborted at t={state.t:.6g}: {exc}", rows) from exc
    return rows


# ---- derivative checks -------------------------------------------------------

DERIVATIVE_TARGETS = (
    "sigma_integral",
    "u_l2",
    "grad_l2",
    "k_quermass",
    "km1_quermass",
    "km1_linear",
)


def _fixed_step(state: FlowState, config: FlowConfig, h: float) -> FlowState:
    w = _rk4(state.grid, state.w, h, config)
    if config.symmetrize:
        w = sg.symmetrize(state.grid, w)
    return FlowState(state.grid, state.t + h, w, abs(h), state.r, state.steps + 1)


def _surface_for(state: FlowState, config: FlowConfig, target: str) -> Hypersurface:
    if target == "sigma_integral" or config.kind != "inverse":
        return Hypersurface(state.grid, state.w - 1.0)
    return rescale(state)


def _measure(M: Hypersurface, config: FlowConfig, target: str, m: int | None) -> float:
    grid, k = M.grid, config.k
    if target == "sigma_integral":
        return geo.quermass_integral(M, m)
    if target == "u_l2":
        return sg.integrate(grid, M.u**2)
    if target == "grad_l2":
        return sg.integrate(grid, sg.grad_norm_sq(grid, sg.gradient(grid, M.u)))
    if target == "k_quermass":
        return geo.quermass_integral(M, k)
    if target in ("km1_quermass", "km1_linear"):
        return geo.quermass_integral(M, k - 1)
    raise DomainError(f"unknown derivative target {target!r}")


def _predict(M: Hypersurface, config: FlowConfig, target: str, m: int | None) -> float:
    grid, n, k = M.grid, config.n, config.k
    b = geo.curvature_bundle(M)
    dmu = b.area_element
    inverse = config.kind == "inverse"
    r = rescale_rate(n, k)
    if target == "sigma_integral":
        G = _speed(b, grid, config)
        if m >= n:
            return 0.0
        return (m + 1) * sg.integrate(grid, b.sigma[..., m + 1] * G * dmu)
    l2, g2, lap2 = geo.sobolev_quadrature(M, b)
    if target == "u_l2":
        if inverse:
            return -(2.0 / n) * r * g2
        return 2.0 * k / n * comb(n, k) * (n * l2 - g2)
    if target == "grad_l2":
        if not inverse:
            raise DomainError("grad_l2 prediction exists only for the inverse flow")
        return -(2.0 / n) * r * lap2
    if target == "k_quermass":
        if not inverse:
            raise DomainError("k_quermass prediction exists only for the inverse flow")
        s = b.sigma
        c = comb(n, k + 1) * comb(n, k - 1) / comb(n, k) ** 2
        top = s[..., k + 1] if k + 1 <= n else np.zeros(grid.shape)
        return (k + 1) * (
            sg.integrate(grid, top * s[..., k - 1] / s[..., k] * dmu)
            - c * sg.integrate(grid, s[..., k] * dmu)
        )
    if target == "km1_quermass":
        s = b.sigma
        if inverse:
            return k * (
                sg.integrate(grid, s[..., k] * s[..., k - 1] / s[..., k] * dmu)
                - sg.integrate(grid, s[..., k - 1] * dmu)
            )
        _, h = speed_volume_preserving(b, grid, k, config.alpha)
        sk = s[..., k]
        return -k * sg.integrate(grid, (sk - h ** (1.0 / config.alpha)) * (sk**config.alpha - h) * dmu)
    if target == "km1_linear":
        if inverse:
            raise DomainError("km1_linear prediction exists only for the volume-preserving flow")
        return k**3 * comb(n, k) ** 2 * (-l2 - lap2 / n**2 + (2.0 / n) * g2)
    raise DomainError(f"unknown derivative target {target!r}")


def flow_derivative_check(
    state: FlowState,
    config: FlowConfig,
    target: str,
    m: int | None = None,
    h: float = 1e-3,
) -> tuple[float, float]:
    """(measured, predicted) time derivative of ``target`` at ``state``.

    measured: centered difference over fixed RK4 steps of size +-h.
    predicted: the closed-form right-hand side at the current state.

    Targets: sigma_integral (int sigma_m dmu on the unrescaled surface),
    u_l2, grad_l2, k_quermass, km1_quermass, km1_linear. For the inverse
    flow all but sigma_integral are taken on the rescaled surface.
    """
    if target not in DERIVATIVE_TARGETS:
        raise DomainError(f"unknown derivative target {target!r}")
    if target == "sigma_integral" and (m is None or not 0 <= m <= config.n):
        raise DomainError("sigma_integral needs 0 <= m <= n")
    fwd = _fixed_step(state, config, h)
    bwd = _fixed_step(state, config, -h)
    samples = [
        (s.t, _measure(_surface_for(s, config, target), config, target, m)) for s in (bwd, state, fwd)
    ]
    measured = fd_time_derivative(samples, state.t)
    predicted = _predict(_surface_for(state, config, target), config, target, m)
    return measured, predicted


def with_overrides(config: FlowConfig, **kw) -> FlowConfig:
    return replace(config, **kw)
