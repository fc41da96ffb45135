"""Quick invariant suites per module, printed as a pass/fail table."""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from . import acceptance as acc
from . import flows as fl
from . import geometry as geo
from . import harmonics as hm
from . import oracle as orc
from . import spheregrid as sg
from . import symfun as sf

Check = Callable[[], tuple[bool, str]]


def _symfun() -> list[tuple[str, Check]]:
    def oracle_equivalence():
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(500):
            lam = rng.uniform(-2, 2, size=rng.integers(1, 7))
            scale = sf.sigma_all(np.abs(lam))
            fast = sf.sigma_all(lam)
            for k in range(lam.size + 1):
                worst = max(worst, abs(fast[k] - orc.brute_sigma(lam, k)) / scale[k])
        return worst <= 1e-12, f"max rel err {worst:.1e}"

    def trace_identity():
        rng = np.random.default_rng(1)
        A = rng.uniform(-1, 1, size=(200, 5, 5))
        A = A + np.swapaxes(A, -1, -2)
        worst = 0.0
        for k in range(1, 6):
            tr = np.trace(A @ sf.newton_tensor(A, k - 1), axis1=-2, axis2=-1) / k
            worst = max(worst, float(np.max(np.abs(tr - sf.sigma_k_matrix(A, k)) / np.maximum(1, np.abs(tr)))))
        return worst <= 1e-12, f"max err {worst:.1e}"

    def maclaurin():
        rng = np.random.default_rng(2)
        lam = rng.uniform(0.05, 3, size=(2000, 4))
        res = sf.newton_maclaurin_gap(lam, 2)
        lo = float(np.min(res.gap))
        return lo >= -1e-12 and bool(np.all(res.in_cone)), f"min gap {lo:.2e}"

    def polarization():
        A = np.diag([1.0, 2.0, 3.0])
        v = sf.polarized_sigma([A, A, A])
        return abs(v - 18.0) < 1e-12, f"Sigma_3(A,A,A) = {v:.12g}"

    return [
        ("sigma_k vs subset sums", oracle_equivalence),
        ("trace identity", trace_identity),
        ("Newton-Maclaurin gap in cone", maclaurin),
        ("polarization equal arguments", polarization),
    ]


def _spheregrid() -> list[tuple[str, Check]]:
    g = sg.build_grid(2, 48, 96)
    Y20 = hm.synthesize(hm.HarmonicSpectrum.from_modes(2, 2, [(2, 0, 1.0)]), g)

    def weights():
        err = abs(np.sum(g.weights) / (4 * np.pi) - 1)
        return err <= 1e-12, f"rel err {err:.1e}"

    def laplacian():
        err = float(np.max(np.abs(sg.laplacian(g, Y20) + 6 * Y20)))
        return err <= 1e-6, f"max err {err:.1e}"

    def by_parts():
        rng = np.random.default_rng(3)
        s = lambda: hm.synthesize(hm.HarmonicSpectrum(2, 10, rng.standard_normal(121)), g)  # noqa: E731
        u, v = s(), s()
        lhs = sg.integrate(g, u * sg.laplacian(g, v))
        gu, gv = sg.gradient(g, u), sg.gradient(g, v)
        rhs = -sg.integrate(g, np.einsum("...i,...ij,...j->...", gu, g.metric_inv, gv))
        err = abs(lhs - rhs) / abs(rhs)
        return err <= 1e-8, f"rel err {err:.1e}"

    def trace():
        h = sg.hessian(g, Y20)
        err = float(np.max(np.abs(np.trace(g.metric_inv @ h, axis1=-2, axis2=-1) - sg.laplacian(g, Y20))))
        return err <= 1e-10, f"max err {err:.1e}"

    return [
        ("weights sum to 4 pi", weights),
        ("Laplacian of Y20", laplacian),
        ("integration by parts", by_parts),
        ("Hessian trace = Laplacian", trace),
    ]


def _harmonics() -> list[tuple[str, Check]]:
    g = sg.build_grid(2, 32, 64)

    def parseval():
        rng = np.random.default_rng(4)
        s = hm.HarmonicSpectrum(2, 12, rng.standard_normal(169))
        u = hm.synthesize(s, g)
        err = abs(hm.sobolev_norms(s)[0] - sg.integrate(g, u * u)) / hm.sobolev_norms(s)[0]
        return err <= 1e-8, f"rel err {err:.1e}"

    def round_trip():
        rng = np.random.default_rng(5)
        s = hm.HarmonicSpectrum(2, 16, rng.standard_normal(289))
        u = hm.synthesize(s, g)
        err = float(np.max(np.abs(hm.synthesize(hm.analyze(g, u, 16), g) - u)))
        return err <= 1e-10, f"max err {err:.1e}"

    def gap():
        rng = np.random.default_rng(6)
        lo = min(
            hm.poincare_margin(hm.strip_low_modes(hm.HarmonicSpectrum(2, 8, rng.standard_normal(81)), 1))
            for _ in range(100)
        )
        return lo >= -1e-10, f"min margin {lo:.2e}"

    return [("Parseval", parseval), ("analyze/synthesize round trip", round_trip), ("spectral gap", gap)]


def _geometry() -> list[tuple[str, Check]]:
    def sphere():
        return acc.sphere_exactness().passed, "see acceptance 2"

    def spheroid():
        c = acc.spheroid_cross_validation()
        return c.passed, c.detail

    def gauss_bonnet():
        c = acc.gauss_bonnet(count=5)
        return c.passed, c.detail

    def translated_ball():
        g = sg.build_grid(2, 32, 64)
        M = geo.Hypersurface.from_radius(g, orc.translated_ball_radius(g.x, [0, 0, 0.1]))
        res = geo.fraenkel_asymmetry(M)
        err = float(np.linalg.norm(res.center - [0, 0, 0.1]))
        return res.alpha <= 1e-6 and err <= 1e-6, f"alpha {res.alpha:.1e}, center err {err:.1e}"

    return [
        ("sphere exactness", sphere),
        ("spheroid vs oracle", spheroid),
        ("Gauss-Bonnet", gauss_bonnet),
        ("Fraenkel on a translated ball", translated_ball),
    ]


def _flows() -> list[tuple[str, Check]]:
    def sphere_growth():
        g = sg.build_grid(2, 16, 32)
        cfg = fl.FlowConfig(t_end=0.2, dt_init=1e-3, dt_max=1e-3, fraenkel=False)
        st = fl.initial_state(cfg, geo.Hypersurface(g, np.zeros(g.shape)))
        while st.t < 0.2 - 1e-12:
            st = fl.step(st, cfg, 0.2)
        err = float(np.max(np.abs(st.w / np.exp(0.1) - 1)))
        return err <= 1e-10, f"rel err {err:.1e}"

    def decay_remainder():
        c = acc.decay_derivative_check()
        return c.passed, c.detail

    def short_run():
        g = sg.build_grid(2, 16, 32)
        u = hm.synthesize(hm.HarmonicSpectrum.from_modes(2, 2, [(2, 0, 0.05)]), g)
        cfg = fl.FlowConfig(t_end=0.5, symmetrize=True, diag_stride=5, fraenkel=False)
        rows = fl.run(cfg, geo.Hypersurface(g, u))
        drift = abs(rows[-1].I_km1 / rows[0].I_km1 - 1)
        mono = all(b.I_k <= a.I_k + 1e-8 for a, b in zip(rows, rows[1:]))
        return drift <= 1e-6 and mono, f"I0 drift {drift:.1e}, I1 monotone {mono}"

    return [("sphere solution e^{t/2}", sphere_growth), ("linearized decay remainder", decay_remainder), ("short inverse run", short_run)]


def _oracle() -> list[tuple[str, Check]]:
    def area():
        s = orc.SpheroidSpec(1.0, 1.1)
        err = abs(orc.spheroid_reference(s, 0) / orc.spheroid_area(s) - 1)
        return err <= 1e-10, f"rel err {err:.1e}"

    def ball():
        worst = max(
            abs(orc.spheroid_reference(orc.SpheroidSpec(1.3, 1.3), k) / orc.ball_quermass(2, k, 1.3) - 1)
            for k in range(-1, 3)
        )
        return worst <= 1e-10, f"rel err {worst:.1e}"

    def fd():
        h = 1e-3
        v = orc.fd_time_derivative([(1 + d, np.exp(0.5 * (1 + d))) for d in (-h, 0, h)], 1.0)
        err = abs(v - 0.5 * np.exp(0.5))
        return err <= 1e-6, f"abs err {err:.1e}"

    return [("spheroid area closed form", area), ("round spheroid = ball", ball), ("centered difference", fd)]


SUITES = {
    "symfun": _symfun,
    "spheregrid": _spheregrid,
    "harmonics": _harmonics,
    "geometry": _geometry,
    "flows": _flows,
    "oracle": _oracle,
}


def run_suite(name: str, out=print) -> bool:
    """Run one suite (or "all", or "acceptance") and print a table; True if every check passed."""
    if name == "acceptance":
        results = acc.run_all(report=out)
        return all(c.passed for c in results)
    names = list(SUITES) if name == "all" else [name]
    ok_all = True
    out(f"{'suite':<11} {'check':<34} {'result':<6} detail")
    for sname in names:
        for cname, fn in SUITES[sname]():
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # report, do not crash the table
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            ok_all &= bool(ok)
            out(f"{sname:<11} {cname:<34} {'PASS' if ok else 'FAIL':<6} {detail} [{time.perf_counter() - t0:.2f}s]")
    return ok_all
