"""Acceptance criteria 1-12, each returning a pass/fail record with measured values."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import flows as fl
from . import geometry as geo
from . import harmonics as hm
from . import oracle as orc
from . import shapes
from . import spheregrid as sg
from . import symfun as sf


@dataclass
class Criterion:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str):
    def deco(fn):
        def wrapper(*a, **kw):
            t0 = time.perf_counter()
            passed, detail = fn(*a, **kw)
            return Criterion(number, name, bool(passed), detail, time.perf_counter() - t0)

        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        return wrapper

    return deco


def _y(grid, modes, L=None):
    L = L or max(l for l, _, _ in modes)
    return hm.synthesize(hm.HarmonicSpectrum.from_modes(grid.n, L, modes), grid)


@_timed(1, "symmetric-function oracle")
def symmetric_function_oracle(samples: int = 10_000, seed: int = 1):
    """sigma_k vs subset sums, Newton cascade and trace identities, derivative identity."""
    rng = np.random.default_rng(seed)
    worst_sigma = 0.0
    by_n = {}
    ns = rng.integers(1, 9, size=samples)
    for n in range(1, 9):
        lam = rng.uniform(-2, 2, size=(int(np.sum(ns == n)), n))
        by_n[n] = lam
        fast = sf.sigma_all(lam)
        scale = sf.sigma_all(np.abs(lam))
        for i, row in enumerate(lam):
            for k in range(n + 1):
                err = abs(fast[i, k] - orc.brute_sigma(row, k)) / max(scale[i, k], 1e-300)
                worst_sigma = max(worst_sigma, err)
    worst_cascade = worst_trace = worst_deriv = 0.0
    for n in range(1, 9):
        A = rng.uniform(-1, 1, size=(50, n, n))
        A = 0.5 * (A + np.swapaxes(A, -1, -2))
        absA = np.abs(np.linalg.eigvalsh(A))
        scale = sf.sigma_all(absA)
        Ts = [sf.newton_tensor(A, m) for m in range(n + 1)]
        s = sf.sigma_all_matrix(A)
        eye = np.eye(n)
        for m in range(n):
            lhs = A @ Ts[m] + Ts[m + 1]
            rhs = s[:, m + 1, None, None] * eye
            sc = np.maximum(scale[:, m + 1], 1.0)[:, None, None]
            worst_cascade = max(worst_cascade, float(np.max(np.abs(lhs - rhs) / sc)))
        for k in range(1, n + 1):
            tr = np.trace(A @ Ts[k - 1], axis1=-2, axis2=-1) / k
            worst_trace = max(worst_trace, float(np.max(np.abs(tr - s[:, k]) / np.maximum(scale[:, k], 1.0))))
        # derivative identity on a few general (non-symmetric) matrices
        B = rng.uniform(-1, 1, size=(3, n, n))
        h = 1e-6
        for Bi in B:
            for k in range(1, n + 1):
                T = sf.newton_tensor(Bi, k - 1)
                for i in range(n):
                    for j in range(n):
                        E = np.zeros((n, n))
                        E[i, j] = h
                        fd = (sf.sigma_k_matrix(Bi + E, k) - sf.sigma_k_matrix(Bi - E, k)) / (2 * h)
                        err = abs(fd - T[j, i]) / max(1.0, abs(T[j, i]))
                        worst_deriv = max(worst_deriv, err)
    ok = worst_sigma <= 1e-12 and worst_cascade <= 1e-12 and worst_trace <= 1e-12 and worst_deriv <= 1e-6
    return ok, (
        f"sigma {worst_sigma:.1e}, cascade {worst_cascade:.1e}, trace {worst_trace:.1e}, "
        f"derivative {worst_deriv:.1e}"
    )


@_timed(2, "sphere exactness")
def sphere_exactness(n_lat: int = 64, n_lon: int = 128):
    g = sg.build_grid(2, n_lat, n_lon)
    worst = 0.0
    for c in (0.0, 0.2):
        M = geo.Hypersurface(g, np.full(g.shape, c))
        b = geo.curvature_bundle(M)
        worst = max(worst, float(np.max(np.abs(b.kappa - 1.0 / (1.0 + c)))))
        for k in range(-1, 3):
            ref = orc.ball_quermass(2, k, 1.0 + c)
            worst = max(worst, abs(geo.quermass_integral(M, k, b) - ref) / ref)
    return worst <= 1e-6, f"max error {worst:.1e}"


@_timed(3, "spheroid cross-validation")
def spheroid_cross_validation(a: float = 1.0, c: float = 1.1):
    spec = orc.SpheroidSpec(a, c)
    errs = {}
    for n_lat in (64, 128):
        g = sg.build_grid(2, n_lat, 2 * n_lat)
        theta = np.broadcast_to(g.theta[:, None], g.shape)
        M = geo.Hypersurface.from_radius(g, orc.spheroid_radius(spec, theta))
        b = geo.curvature_bundle(M)
        errs[n_lat] = max(
            abs(geo.quermass_integral(M, k, b) / orc.spheroid_reference(spec, k) - 1.0) for k in (0, 1)
        )
    ok = errs[64] <= 1e-4 and errs[128] <= 1e-6
    return ok, f"rel err 64x128 {errs[64]:.1e}, 128x256 {errs[128]:.1e}"


@_timed(4, "Gauss-Bonnet")
def gauss_bonnet(count: int = 20, seed: int = 4, n_lat: int = 64):
    g = sg.build_grid(2, n_lat, 2 * n_lat)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        u = shapes.random_band_field(g, 1, 8, rng)
        u *= rng.uniform(0.05, 0.3) / sg.sup_norms(g, u)[2]
        M = geo.Hypersurface(g, u)
        worst = max(worst, abs(geo.quermass_integral(M, 2) / (4 * np.pi) - 1.0))
    return worst <= 1e-6, f"max rel err {worst:.1e} over {count} surfaces"


@_timed(5, "Poincare spectral gap")
def poincare_gap(count: int = 100, seed: int = 5, l_max: int = 12):
    rng = np.random.default_rng(seed)
    lo, neg = np.inf, 0
    for _ in range(count):
        s = hm.HarmonicSpectrum(2, l_max, rng.standard_normal((l_max + 1) ** 2))
        lo = min(lo, hm.poincare_margin(hm.strip_low_modes(s, 1)))
        s = hm.HarmonicSpectrum(2, l_max, rng.standard_normal((l_max + 1) ** 2))
        lam = np.maximum(s.eigenvalues, 1.0)
        c = 0.1 * s.coeffs / lam
        c[1:4] = np.sign(rng.standard_normal(3)) * (1.0 + np.abs(rng.standard_normal(3)))
        if hm.poincare_margin(hm.HarmonicSpectrum(2, l_max, c)) < 0:
            neg += 1
    ok = lo >= -1e-10 and neg == count
    return ok, f"min stripped margin {lo:.2e}; l=1-dominant negative {neg}/{count}"


def inverse_acceptance_run(n_lat: int = 64, n_lon: int = 128, t_end: float = 8.0):
    g = sg.build_grid(2, n_lat, n_lon)
    u = _y(g, [(2, 0, 0.05), (4, 0, 0.025)])
    cfg = fl.FlowConfig(
        kind="inverse", n=2, k=1, t_end=t_end, dt_init=0.01, dt_max=0.01, cfl_safety=0.8,
        symmetrize=True, diag_stride=1, fraenkel=False, c2_gate=0.5,
    )  # fmt: skip
    return fl.run(cfg, geo.Hypersurface(g, u))


@_timed(6, "inverse-flow conservation and monotonicity")
def inverse_conservation(rows):
    I0 = np.array([r.I_km1 for r in rows])
    I1 = np.array([r.I_k for r in rows])
    drift = float(np.max(np.abs(I0 / I0[0] - 1.0)))
    rise = float(np.max(np.diff(I1))) if len(I1) > 1 else 0.0
    c0_ratio = rows[-1].C0 / rows[0].C0
    ok = drift <= 1e-4 and rise <= 1e-8 and c0_ratio <= 0.1
    return ok, f"I0 drift {drift:.1e}, max I1 step increase {rise:.1e}, C0 ratio {c0_ratio:.1e}"


@_timed(7, "stability ratio")
def stability_ratio(rows):
    window = [r for r in rows if 0.005 <= r.C2 <= 0.01 and r.S is not None]
    if not window:
        return False, "no row with C2 in [0.005, 0.01]"
    S_win = window[-1].S
    t_end = rows[-1].t
    tail = [r.S for r in rows if r.t >= 0.75 * t_end and r.S is not None]
    drop = max((a - b for a, b in zip(tail, tail[1:])), default=0.0)
    ok = S_win >= 0.9 and drop <= 1e-3
    return ok, f"S = {S_win:.6f} at t = {window[-1].t:.3f}; largest final-quarter drop {drop:.1e}"


@_timed(8, "linearized decay derivative check")
def decay_derivative_check(n_lat: int = 32):
    g = sg.build_grid(2, n_lat, 2 * n_lat)
    cfg = fl.FlowConfig(kind="inverse", n=2, k=1, symmetrize=True)
    parts, ok = [], True
    for eps, bound in ((0.04, 0.4), (0.02, 0.2), (0.01, 0.1)):
        st = fl.initial_state(cfg, geo.Hypersurface(g, _y(g, [(2, 0, eps), (4, 0, 0.5 * eps)])))
        errs = []
        for target in ("u_l2", "grad_l2"):
            m, p = fl.flow_derivative_check(st, cfg, target)
            errs.append(abs(m - p) / abs(p))
        ok &= max(errs) <= bound
        parts.append(f"eps {eps}: {errs[0]:.3f}/{errs[1]:.3f}")
    return ok, "; ".join(parts)


@_timed(9, "expansion order")
def expansion_order(n_lat: int = 64, eps: float = 0.02):
    g = sg.build_grid(2, n_lat, 2 * n_lat)
    base = _y(g, [(2, 0, 1.0), (3, 1, 0.5), (4, -2, 0.3)])
    base /= sg.sup_norms(g, base)[0]
    ratios = []
    for fn in (geo.linearization_residual_sigma, geo.linearization_residual_inverse_sigma):
        r1 = fn(geo.Hypersurface(g, eps * base), 2)
        r2 = fn(geo.Hypersurface(g, 0.5 * eps * base), 2)
        ratios.append(r2 / r1)
    ok = all(0.15 <= q <= 0.35 for q in ratios)
    return ok, f"sigma_1 ratio {ratios[0]:.3f}, 1/sigma_2 ratio {ratios[1]:.3f}"


def volume_preserving_acceptance_run(n_lat: int = 64, n_lon: int = 128, t_end: float = 5.0):
    g = sg.build_grid(2, n_lat, n_lon)
    cfg = fl.FlowConfig(
        kind="volume_preserving", n=2, k=1, alpha=1.0, t_end=t_end, dt_init=0.01, dt_max=0.01,
        cfl_safety=0.8, symmetrize=True, diag_stride=5, fraenkel=False,
    )  # fmt: skip
    return fl.run(cfg, geo.Hypersurface(g, _y(g, [(2, 0, 0.05)])))


@_timed(10, "volume-preserving flow")
def volume_preserving(rows):
    V = np.array([r.Vol for r in rows])
    t = np.array([r.t for r in rows])
    rate = float(np.max(np.abs(V[1:] / V[0] - 1.0) / np.maximum(t[1:], 1.0)))
    I0 = np.array([r.I_km1 for r in rows])
    rise = float(np.max(np.diff(I0)))
    window = [r for r in rows if 0.005 <= r.C2 <= 0.01 and r.vp_ratio is not None]
    if not window:
        return False, "no row with C2 in [0.005, 0.01]"
    vp = window[-1].vp_ratio
    ok = rate <= 1e-6 and rise <= 1e-8 and vp >= 0.45
    return ok, f"volume drift {rate:.1e}/unit time, max I0 increase {rise:.1e}, vp_ratio {vp:.4f}"


@_timed(11, "static stability bound")
def static_bound(count: int = 20, seed: int = 11, n_lat: int = 64):
    g = sg.build_grid(2, n_lat, 2 * n_lat)
    rng = np.random.default_rng(seed)
    const = 2 * (2 - 1) * (1 - 0) / (4 * 9) - 0.01
    worst = np.inf
    for _ in range(count):
        u = sg.symmetrize(g, shapes.random_band_field(g, 2, 8, rng))
        u *= rng.uniform(0.01, 0.05) / sg.sup_norms(g, u)[2]
        M = geo.normalize_quermass(geo.Hypersurface(g, u), 0)
        alpha = geo.fraenkel_asymmetry(M).alpha
        delta = geo.deficit(M, 1, 0)
        worst = min(worst, delta / alpha**2)
    return worst >= const, f"min delta_1_0 / alpha^2 = {worst:.4f} (needs >= {const:.4f})"


@_timed(12, "exact sphere flow")
def exact_sphere(n_lat: int = 16):
    g = sg.build_grid(2, n_lat, 2 * n_lat)
    cfg = fl.FlowConfig(kind="inverse", n=2, k=1, t_end=1.0, dt_init=1e-3, dt_max=1e-3, fraenkel=False)
    st = fl.initial_state(cfg, geo.Hypersurface(g, np.zeros(g.shape)))
    while st.t < 1.0 - 1e-12:
        st = fl.step(st, cfg, t_stop=1.0)
    err = float(np.max(np.abs(st.w / np.exp(0.5) - 1.0)))
    return err <= 1e-6, f"max rel err {err:.1e} after {st.steps} steps"


def run_all(report=print) -> list[Criterion]:
    out = [
        symmetric_function_oracle(),
        sphere_exactness(),
        spheroid_cross_validation(),
        gauss_bonnet(),
        poincare_gap(),
    ]
    for c in out:
        report(c.line())
    rows = inverse_acceptance_run()
    for c in (inverse_conservation(rows), stability_ratio(rows)):
        out.append(c)
        report(c.line())
    for c in (decay_derivative_check(), expansion_order()):
        out.append(c)
        report(c.line())
    vrows = volume_preserving_acceptance_run()
    for c in (volume_preserving(vrows), static_bound(), exact_sphere()):
        out.append(c)
        report(c.line())
    return out

