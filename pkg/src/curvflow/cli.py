"""Command line entry point: ``flow run``, ``analyze`` and ``verify``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import spheregrid as sg
from .config import ConfigError, GridConfig, RunConfig, load_config
from .errors import DomainError, NumericalError
from .flows import FlowAborted, run
from .geometry import shape_report
from .outputs import emit_csv, emit_json, emit_svg
from .shapes import build_surface
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2
SVG_COLUMNS = ("C0", "C1", "C2", "alpha")


def _resolution(text: str) -> tuple[int, int]:
    try:
        lat, lon = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LAT,LON integers, got {text!r}") from None
    if lat < 4 or lon < 4:
        raise argparse.ArgumentTypeError("LAT and LON must be at least 4")
    return lat, lon


class _Parser(argparse.ArgumentParser):
    """Usage errors are validation errors, so they exit 1 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", dest="config_flag", help="config JSON (alternative to the positional path)")
    common.add_argument("--out", help="output directory, overrides output_dir")
    common.add_argument("--svg", action="store_true", help="also write an SVG plot")
    common.add_argument("--resolution", type=_resolution, metavar="LAT,LON", help="override grid size")
    common.add_argument("--seed", type=int, help="override the random seed")

    p = _Parser(prog="curvflow", description="Curvature flows of nearly spherical radial graphs.")
    sub = p.add_subparsers(dest="command", required=True)
    flow = sub.add_parser("flow", help="curvature flow runs")
    fsub = flow.add_subparsers(dest="action", required=True)
    fr = fsub.add_parser("run", parents=[common], help="run a flow and write diagnostics CSV")
    fr.add_argument("config", nargs="?")
    an = sub.add_parser("analyze", parents=[common], help="static shape report of the initial surface")
    an.add_argument("config", nargs="?")
    ve = sub.add_parser("verify", help="run invariant suites and print a pass/fail table")
    ve.add_argument("suite", nargs="?", default="all", choices=["all", "acceptance", *SUITES])
    return p


def _load(args) -> RunConfig:
    path = args.config or args.config_flag
    if path is None:
        raise ConfigError("no config given; pass a path or --config")
    cfg = load_config(path)
    grid = cfg.grid
    if args.resolution is not None:
        grid = GridConfig(grid.n, *args.resolution)
    return dataclasses.replace(
        cfg,
        grid=grid,
        output_dir=args.out if args.out is not None else cfg.output_dir,
        emit_svg=cfg.emit_svg or args.svg,
        seed=args.seed if args.seed is not None else cfg.seed,
    )


def _surface(cfg: RunConfig):
    grid = sg.build_grid(cfg.grid.n, cfg.grid.n_lat, cfg.grid.n_lon)
    M = build_surface(cfg.shape, grid, cfg.seed)
    c2 = sg.sup_norms(grid, M.u)[2]
    print(f"initial surface: {cfg.shape.type}, C2 = {c2:.4g}", file=sys.stderr)
    return M


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(rows, cfg: RunConfig, out: Path) -> None:
    emit_csv(rows, out / "diagnostics.csv")
    if cfg.emit_svg:
        emit_svg(rows, SVG_COLUMNS, out / "diagnostics.svg")
    print(f"wrote {out / 'diagnostics.csv'} ({len(rows)} rows)")


def _flow_run(args) -> int:
    cfg = _load(args)
    if cfg.mode != "flow" or cfg.flow is None:
        raise ConfigError(f"mode: 'flow run' needs mode 'flow', got {cfg.mode!r}")
    M = _surface(cfg)
    out = _outdir(cfg)
    (out / "config.json").write_text(cfg.dumps())
    try:
        rows = run(cfg.flow, M)
    except FlowAborted as exc:
        if exc.rows:
            _write_rows(exc.rows, cfg, out)
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write_rows(rows, cfg, out)
    return EXIT_OK


def _analyze(args) -> int:
    cfg = _load(args)
    M = _surface(cfg)
    out = _outdir(cfg)
    rep = shape_report(M, cfg.k_A)
    emit_json(rep.to_dict(), out / "shape_report.json")
    print(f"wrote {out / 'shape_report.json'}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "verify":
            return EXIT_OK if run_suite(args.suite) else EXIT_VALIDATION
        if args.command == "flow":
            return _flow_run(args)
        return _analyze(args)
    except NumericalError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
