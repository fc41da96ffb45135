"""Stability of the quermassintegral inequality for reflection-symmetric shapes.

Each random n-symmetric, nearly spherical shape is normalized so that
I_{k-1} matches the unit ball and evolved by the inverse flow. For every
shape we record S(0) = (I_k - I_k(B)) / A and classify the trajectory:
  "above"     S(0) >= 1 - eta
  "decreasing" S(0) < 1 - eta and S never rises afterwards
The inequality I_k - I_k(B) >= (1 - eta) A at time 0 holds exactly when the
first case occurs. Writes a summary CSV and one diagnostics CSV per shape.
"""

import argparse
import csv
import sys
from pathlib import Path

from curvflow import flows as fl
from curvflow import shapes
from curvflow import spheregrid as sg
from curvflow.outputs import emit_csv


def classify(rows, eta: float) -> str:
    S = [r.S for r in rows if r.S is not None]
    if S[0] >= 1 - eta:
        return "above"
    return "decreasing" if all(b <= a + 1e-9 for a, b in zip(S, S[1:])) else "mixed"


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--c2", type=float, default=0.05, help="initial C2 norm of each shape")
    p.add_argument("--t-end", type=float, default=3.0)
    p.add_argument("--resolution", default="32,64", metavar="LAT,LON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("out/symmetric_stability"))
    args = p.parse_args(argv)
    n_lat, n_lon = (int(v) for v in args.resolution.split(","))
    grid = sg.build_grid(2, n_lat, n_lon)
    cfg = fl.FlowConfig(
        kind="inverse", n=2, k=args.k, t_end=args.t_end, cfl_safety=0.8, symmetrize=True,
        diag_stride=5, fraenkel=False,
    )  # fmt: skip
    args.out.mkdir(parents=True, exist_ok=True)
    summary = []
    for i in range(args.count):
        spec = shapes.ShapeSpec(type="random_band", random_band=(2, 8, args.c2), symmetrize=True)
        rows = fl.run(cfg, shapes.build_surface(spec, grid, args.seed + i))
        emit_csv(rows, args.out / f"shape_{i:03d}.csv")
        S = [r.S for r in rows if r.S is not None]
        rec = {"shape": i, "seed": args.seed + i, "S0": S[0], "S_min": min(S), "S_end": S[-1],
               "case": classify(rows, args.eta)}  # fmt: skip
        summary.append(rec)
        print(f"shape {i:3d}: S(0) = {rec['S0']:.4f}, min S = {rec['S_min']:.4f}, case {rec['case']}")
    with (args.out / "summary.csv").open("w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=list(summary[0]), lineterminator="\n")
        wr.writeheader()
        wr.writerows(summary)
    held = sum(r["case"] == "above" for r in summary)
    print(f"I_k - I_k(B) >= (1 - {args.eta}) A held at t = 0 for {held}/{len(summary)} shapes")
    return 0 if held == len(summary) else 1


if __name__ == "__main__":
    sys.exit(main())
