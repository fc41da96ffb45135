"""Extrinsic geometry and integral quantities of radial graphs M = {(1+u(x)) x}.

The shape operator is assembled from the closed form

    h^i_j = delta/D - u^i_j/((1+u)D) + u^i u_l u^l_j/((1+u)D^3) + u^i u_j/D^3,

with D = sqrt(|grad u|^2 + (1+u)^2), written as h = (I + E)/D. Keeping the
deviation E separate lets quermassintegral excesses over the round sphere be
summed without cancellation, which matters once u is below ~1e-5.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import minimize

from . import spheregrid as sg
from .errors import DomainError, NumericalError
from .spheregrid import GridSpec
from .symfun import sigma_all, sigma_all_matrix

log = logging.getLogger(__name__)

__all__ = [
    "Hypersurface",
    "CurvatureBundle",
    "curvature_bundle",
    "quermass_integral",
    "quermass_excess",
    "ball_quermass",
    "barycenter",
    "symmetric_difference_centered",
    "symmetric_difference_exact",
    "FraenkelResult",
    "fraenkel_asymmetry",
    "deficit",
    "normalize_quermass",
    "dilate",
    "stability_functional_A",
    "linearization_residual_sigma",
    "linearization_residual_inverse_sigma",
    "sobolev_quadrature",
    "ShapeReport",
    "shape_report",
]


@dataclass(frozen=True, eq=False)
class Hypersurface:
    """Radial graph over the unit sphere; ``u`` is the radial perturbation."""

    grid: GridSpec
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != self.grid.shape:
            raise DomainError(f"u has shape {u.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(u)):
            raise DomainError("u has non-finite values")
        if np.any(1.0 + u <= 0.0):
            bad = int(np.argmin(1.0 + u))
            raise DomainError(f"not starshaped: 1+u <= 0 at node {self.grid.node(bad)}")
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def w(self) -> np.ndarray:
        return 1.0 + self.u

    @classmethod
    def from_radius(cls, grid: GridSpec, w) -> "Hypersurface":
        return cls(grid, np.asarray(w, dtype=float) - 1.0)


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    grad: np.ndarray  # covariant u_i
    hess: np.ndarray  # covariant u_ij
    grad_sq: np.ndarray  # |grad u|^2 in the round metric
    D: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    E: np.ndarray  # h = (I + E) / D
    shape_op: np.ndarray  # h^i_j
    kappa: np.ndarray  # principal curvatures, ascending
    sigma: np.ndarray  # sigma_0..sigma_n of kappa
    area_element: np.ndarray  # sqrt(det g) relative to the round measure
    sigma_E: np.ndarray  # sigma_0..sigma_n of E


def _principal_curvatures(E: np.ndarray, D: np.ndarray) -> np.ndarray:
    n = E.shape[-1]
    if n == 1:
        ev = E[..., 0, :]
    elif n == 2:
        tr = E[..., 0, 0] + E[..., 1, 1]
        det = E[..., 0, 0] * E[..., 1, 1] - E[..., 0, 1] * E[..., 1, 0]
        disc = np.sqrt(np.maximum(0.25 * tr * tr - det, 0.0))
        ev = np.stack([0.5 * tr - disc, 0.5 * tr + disc], axis=-1)
    else:
        ev = np.sort(np.linalg.eigvals(E).real, axis=-1)
    return (1.0 + ev) / D[..., None]


def _sigma_small(E: np.ndarray) -> np.ndarray:
    n = E.shape[-1]
    if n > 2:
        return sigma_all_matrix(E)
    out = np.ones(E.shape[:-2] + (n + 1,))
    out[..., 1] = np.trace(E, axis1=-2, axis2=-1)
    if n == 2:
        out[..., 2] = E[..., 0, 0] * E[..., 1, 1] - E[..., 0, 1] * E[..., 1, 0]
    return out


def curvature_bundle(M: Hypersurface) -> CurvatureBundle:
    grid = M.grid
    n = grid.n
    d = sg.derivatives(grid, M.u)
    w = M.w
    s, s_inv = grid.metric, grid.metric_inv
    # the round metric is diagonal in the coordinate charts used here
    s_inv_diag = np.diagonal(s_inv, axis1=-2, axis2=-1)
    grad_up = s_inv_diag * d.grad  # u^i
    grad_sq = np.sum(grad_up * d.grad, axis=-1)
    D2 = w * w + grad_sq
    D = np.sqrt(D2)
    g = (w * w)[..., None, None] * s + d.grad[..., :, None] * d.grad[..., None, :]
    g_inv = (s_inv - grad_up[..., :, None] * grad_up[..., None, :] / D2[..., None, None]) / (
        (w * w)[..., None, None]
    )
    hess_mixed = s_inv_diag[..., :, None] * d.hess  # u^i_j
    w_ = w[..., None, None]
    E = (
        -hess_mixed / w_
        + (grad_up[..., :, None] * np.sum(d.grad[..., :, None] * hess_mixed, axis=-2)[..., None, :])
        / (w_ * D2[..., None, None])
        + grad_up[..., :, None] * d.grad[..., None, :] / D2[..., None, None]
    )
    shape_op = (np.eye(n) + E) / D[..., None, None]
    kappa = _principal_curvatures(E, D)
    sigma = sigma_all(kappa)
    area_element = w ** (n - 1) * D
    bad = ~(np.isfinite(sigma).all(axis=-1) & np.isfinite(area_element))
    if bad.any():
        i = int(np.flatnonzero(bad.ravel())[0])
        raise NumericalError(f"non-finite curvature at node {grid.node(i)}", node=i)
    return CurvatureBundle(
        grad=d.grad,
        hess=d.hess,
        grad_sq=grad_sq,
        D=D,
        g=g,
        g_inv=g_inv,
        E=E,
        shape_op=shape_op,
        kappa=kappa,
        sigma=sigma,
        area_element=area_element,
        sigma_E=_sigma_small(E),
    )


def ball_quermass(n: int, k: int, R: float = 1.0) -> float:
    """I_k of the ball of radius R in R^{n+1}; k = -1 is the volume."""
    area = sg.sphere_area(n)
    if k == -1:
        return area * R ** (n + 1) / (n + 1)
    return comb(n, k) * R ** (n - k) * area


def _check_k(n: int, k: int) -> None:
    if not (-1 <= k <= n):
        raise DomainError(f"k={k} outside [-1, {n}]")


def quermass_integral(M: Hypersurface, k: int, bundle: CurvatureBundle | None = None) -> float:
    """I_k by quadrature of sigma_k(L) sqrt(det g); volume for k = -1."""
    _check_k(M.n, k)
    n = M.n
    if k == -1:
        return sg.integrate(M.grid, M.w ** (n + 1)) / (n + 1)
    b = bundle or curvature_bundle(M)
    return sg.integrate(M.grid, b.sigma[..., k] * b.area_element)


def _excess_density(M: Hypersurface, k: int, b: CurvatureBundle | None) -> np.ndarray:
    """Per-node sigma_k sqrt(det g) - C(n,k), evaluated without cancellation."""
    n = M.n
    if k == -1:
        return np.expm1((n + 1) * np.log1p(M.u)) / (n + 1)
    b = b or curvature_bundle(M)
    # sigma_k(I + E) = sum_j C(n-j, k-j) sigma_j(E)
    s = sum(comb(n - j, k - j) * b.sigma_E[..., j] for j in range(1, k + 1)) if k > 0 else 0.0
    D2m1 = 2.0 * M.u + M.u * M.u + b.grad_sq
    phi = np.expm1((n - 1) * np.log1p(M.u) + 0.5 * (1 - k) * np.log1p(D2m1))
    c = comb(n, k)
    return c * phi + s * (1.0 + phi)


def quermass_excess(M: Hypersurface, k: int, bundle: CurvatureBundle | None = None) -> float:
    """I_k(Omega) - I_k(B_1), summed from per-node excess densities."""
    _check_k(M.n, k)
    return sg.integrate(M.grid, _excess_density(M, k, bundle))


def _relative_excess(M: Hypersurface, k: int, bundle) -> float:
    """I_k(Omega)/I_k(B_1) - 1, using the grid's own quadrature for I_k(B_1)."""
    n = M.n
    unit = np.sum(M.grid.weights) * (1.0 / (n + 1) if k == -1 else comb(n, k))
    return quermass_excess(M, k, bundle) / unit


def barycenter(M: Hypersurface) -> np.ndarray:
    """(1/|S^n|) int (1+u)^{n+2} x dA."""
    wgt = M.grid.weights * M.w ** (M.n + 2)
    pts = (wgt[..., None] * M.grid.x).reshape(-1, M.n + 1)
    return pts.sum(axis=0) / M.grid.area


def symmetric_difference_centered(M: Hypersurface) -> float:
    """sum_{j=1}^{n+1} C(n+1, j)/(n+1) int |u|^j dA."""
    n = M.n
    a = np.abs(M.u)
    dens = sum(comb(n + 1, j) * a**j for j in range(1, n + 2)) / (n + 1)
    return sg.integrate(M.grid, dens)


def symmetric_difference_exact(M: Hypersurface, R: float = 1.0) -> float:
    """|Omega symmetric-difference B_R| from the radial overlap, ball centered at 0."""
    n = M.n
    return sg.integrate(M.grid, np.abs(M.w ** (n + 1) - R ** (n + 1))) / (n + 1)


def _overlap_volume(M: Hypersurface, center: np.ndarray, R: float) -> float:
    """|Omega cap (center + B_R)| for a ball containing the origin."""
    n = M.n
    proj = M.grid.x @ center
    c2 = float(center @ center)
    t_plus = proj + np.sqrt(np.maximum(proj * proj - c2 + R * R, 0.0))
    r = np.minimum(M.w, t_plus)
    return sg.integrate(M.grid, r ** (n + 1)) / (n + 1)


@dataclass(frozen=True)
class FraenkelResult:
    alpha: float
    center: np.ndarray
    converged: bool = True

    def __iter__(self):
        yield self.alpha
        yield self.center


def fraenkel_asymmetry(
    M: Hypersurface,
    coarse: int = 5,
    maxiter: int = 400,
    fatol: float = 1e-15,
    xatol: float = 1e-10,
    sym_rtol: float = 1e-4,
) -> FraenkelResult:
    """Minimize |Omega symdiff (x + B_Omega)| / |B_Omega| over centers x.

    B_Omega has the volume of Omega. The objective uses the per-ray overlap
    min(w, t_+)^{n+1}/(n+1). A coarse grid over |x| <= 0.5 min w seeds a
    Nelder-Mead refinement; the barycenter is also tried as a start.
    """
    n = M.n
    vol = quermass_integral(M, -1)
    R = (vol * (n + 1) / M.grid.area) ** (1.0 / (n + 1))
    ball = M.grid.area * R ** (n + 1) / (n + 1)
    rmax = 0.5 * float(np.min(M.w))
    rmax = min(rmax, 0.99 * R)

    def objective(x):
        x = np.asarray(x, dtype=float)
        if np.linalg.norm(x) >= R:
            return 2.0 + float(np.linalg.norm(x))
        return 2.0 * (vol - _overlap_volume(M, x, R)) / ball

    centered = objective(np.zeros(n + 1))
    ticks = np.linspace(-rmax, rmax, coarse)
    best_x, best_f = np.zeros(n + 1), centered
    for pt in np.stack(np.meshgrid(*([ticks] * (n + 1)), indexing="ij"), -1).reshape(-1, n + 1):
        if np.linalg.norm(pt) > rmax:
            continue
        f = objective(pt)
        if f < best_f:
            best_x, best_f = pt, f
    bar = barycenter(M)
    if np.linalg.norm(bar) < rmax:
        fb = objective(bar)
        if fb < best_f:
            best_x, best_f = bar, fb
    step = max(rmax / (coarse - 1), 1e-6)
    simplex = np.vstack([best_x] + [best_x + step * e for e in np.eye(n + 1)])
    res = minimize(
        objective,
        best_x,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "maxiter": maxiter, "fatol": fatol, "xatol": xatol},
    )
    if not np.isfinite(res.fun):
        log.warning("Fraenkel minimization failed; returning centered value")
        return FraenkelResult(max(centered, 0.0), np.zeros(n + 1), converged=False)
    # Kinks of min(w, t_+) leave quadrature noise of relative size ~1e-5 in the
    # objective. For centrally symmetric shapes the objective is even in x and
    # the minimizer is the center unless a clearly better value exists.
    if res.fun >= centered or (
        _centrally_symmetric(M) and centered - res.fun <= sym_rtol * centered
    ):
        return FraenkelResult(max(centered, 0.0), np.zeros(n + 1), bool(res.success))
    return FraenkelResult(max(float(res.fun), 0.0), np.asarray(res.x), bool(res.success))


def _centrally_symmetric(M: Hypersurface, tol: float = 1e-12) -> bool:
    """u(-x) = u(x) on the grid (antipodal nodes pair up exactly)."""
    u = M.u
    if M.n == 2:
        N = M.grid.n_lon
        flipped = u[::-1, (np.arange(N) + N // 2) % N]
    else:
        N = M.grid.n_lon
        flipped = u[(np.arange(N) + N // 2) % N]
    return bool(np.max(np.abs(u - flipped)) <= tol * max(1.0, float(np.max(np.abs(u)))))


def _matched_exponent(n: int, k: int, m: int) -> float:
    return (n - k) / (n - m) if m >= 0 else (n - k) / (n + 1)


def deficit(M: Hypersurface, k: int, m: int, bundle: CurvatureBundle | None = None) -> float:
    """(k,m)-isoperimetric deficit against the centered ball with I_m(B) = I_m(Omega)."""
    n = M.n
    if not (-1 <= m < k <= n):
        raise DomainError(f"need -1 <= m < k <= n, got k={k}, m={m}")
    b = bundle if (bundle is not None or (k < 0 and m < 0)) else curvature_bundle(M)
    rho_m = _relative_excess(M, m, b)
    rho_k = _relative_excess(M, k, b)
    if rho_m <= -1.0:
        raise DomainError("I_m(Omega) must be positive")
    gamma = _matched_exponent(n, k, m)
    return float(np.expm1(np.log1p(rho_k) - gamma * np.log1p(rho_m)))


def matched_ball_excess(M: Hypersurface, k: int, m: int, bundle: CurvatureBundle | None = None) -> float:
    """I_k(Omega) - I_k(B_R) with R chosen so that I_m(B_R) = I_m(Omega)."""
    n = M.n
    b = bundle or curvature_bundle(M)
    rho_m = _relative_excess(M, m, b)
    rho_k = _relative_excess(M, k, b)
    gamma = _matched_exponent(n, k, m)
    unit = np.sum(M.grid.weights) * comb(n, k)
    return float(unit * (rho_k - np.expm1(gamma * np.log1p(rho_m))))


def dilate(M: Hypersurface, lam: float) -> Hypersurface:
    return Hypersurface(M.grid, lam * M.w - 1.0)


def normalize_quermass(M: Hypersurface, m: int) -> Hypersurface:
    """Dilate so that I_m equals the unit-ball value."""
    n = M.n
    if not (-1 <= m < n):
        raise DomainError(f"m={m} outside [-1, {n - 1}]")
    rho = _relative_excess(M, m, None)
    if rho <= -1.0:
        raise DomainError("I_m(Omega) must be positive")
    expo = 1.0 / (n - m) if m >= 0 else 1.0 / (n + 1)
    lam = float(np.exp(-expo * np.log1p(rho)))
    # u' = lam (1 + u) - 1 computed as (lam - 1) + lam u to keep small u exact
    return Hypersurface(M.grid, np.expm1(-expo * np.log1p(rho)) + lam * M.u)


def sobolev_quadrature(M: Hypersurface, bundle: CurvatureBundle | None = None):
    """(||u||^2, ||grad u||^2, ||Lap u||^2) by quadrature on the grid."""
    grid = M.grid
    if bundle is None:
        d = sg.derivatives(grid, M.u)
        grad_sq = sg.grad_norm_sq(grid, d.grad)
        hess = d.hess
    else:
        grad_sq, hess = bundle.grad_sq, bundle.hess
    lap = np.trace(grid.metric_inv @ hess, axis1=-2, axis2=-1)
    return (
        sg.integrate(grid, M.u**2),
        sg.integrate(grid, grad_sq),
        sg.integrate(grid, lap**2),
    )


def stability_functional_A(M: Hypersurface, k: int, bundle: CurvatureBundle | None = None) -> float:
    """C(n,k) (n-k)/(2n) (||u||^2 + ||grad u||^2 / 2)."""
    n = M.n
    if not (1 <= k <= n - 1):
        raise DomainError(f"k={k} outside [1, {n - 1}]")
    l2, g2, _ = sobolev_quadrature(M, bundle)
    return comb(n, k) * (n - k) / (2.0 * n) * (l2 + 0.5 * g2)


def _laplacian_from(M: Hypersurface, b: CurvatureBundle) -> np.ndarray:
    return np.trace(M.grid.metric_inv @ b.hess, axis1=-2, axis2=-1)


def linearization_residual_sigma(M: Hypersurface, k: int, bundle: CurvatureBundle | None = None) -> float:
    """max |sigma_{k-1}(L) - C(n,k-1)(1 - (k-1)u - (k-1)/n Lap u)| over nodes."""
    n = M.n
    if not (1 <= k <= n):
        raise DomainError(f"k={k} outside [1, {n}]")
    b = bundle or curvature_bundle(M)
    lap = _laplacian_from(M, b)
    lin = comb(n, k - 1) * (1.0 - (k - 1) * M.u - (k - 1) / n * lap)
    return float(np.max(np.abs(b.sigma[..., k - 1] - lin)))


def linearization_residual_inverse_sigma(
    M: Hypersurface, k: int, bundle: CurvatureBundle | None = None
) -> float:
    """max |1/sigma_k(L) - (1 + k u + k/n Lap u)/C(n,k)| over nodes."""
    n = M.n
    if not (1 <= k <= n):
        raise DomainError(f"k={k} outside [1, {n}]")
    b = bundle or curvature_bundle(M)
    lap = _laplacian_from(M, b)
    lin = (1.0 + k * M.u + k / n * lap) / comb(n, k)
    return float(np.max(np.abs(1.0 / b.sigma[..., k] - lin)))


@dataclass
class ShapeReport:
    Ik: dict
    bar: list
    alpha: float
    deficits: dict
    A: float | None
    C0: float
    C1: float
    C2: float

    def to_dict(self) -> dict:
        out = {"Ik": {str(k): v for k, v in self.Ik.items()}}
        out["bar"] = list(self.bar)
        out["alpha"] = self.alpha
        out.update({f"delta_{k}_{m}": v for (k, m), v in self.deficits.items()})
        out.update({"A": self.A, "C0": self.C0, "C1": self.C1, "C2": self.C2})
        return out


def shape_report(M: Hypersurface, k_A: int = 1) -> ShapeReport:
    """All static measurements of a surface, ready for JSON."""
    n = M.n
    b = curvature_bundle(M)
    Ik = {k: quermass_integral(M, k, b) for k in range(-1, n + 1)}
    deficits = {(k, m): deficit(M, k, m, b) for k in range(0, n + 1) for m in range(-1, k)}
    A = stability_functional_A(M, k_A, b) if 1 <= k_A <= n - 1 else None
    c0, c1, c2 = sg.sup_norms(M.grid, M.u)
    return ShapeReport(
        Ik=Ik,
        bar=barycenter(M).tolist(),
        alpha=fraenkel_asymmetry(M).alpha,
        deficits=deficits,
        A=A,
        C0=c0,
        C1=c1,
        C2=c2,
    )
