"""CSV, SVG and JSON writers for diagnostics and shape reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import DomainError
from .flows import CSV_COLUMNS, DiagnosticsRow

LOG_COLUMNS = frozenset({"A", "C0", "C1", "C2", "alpha"})


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def emit_csv(rows: list[DiagnosticsRow], path) -> None:
    """Write one line per row under the fixed diagnostics header; missing values stay empty."""
    if not rows:
        raise DomainError("no rows to write")
    p = Path(path)
    try:
        with p.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(CSV_COLUMNS)
            for r in rows:
                wr.writerow([_cell(v) for v in r.csv_values()])
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc.strerror}") from exc


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return [
            {k: (float(v) if v != "" else None) for k, v in rec.items()} for rec in csv.DictReader(fh)
        ]


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def emit_svg(rows: list[DiagnosticsRow], columns, path, log_scale: bool | None = None,
             width: int = 720, height: int = 420) -> None:
    """Multi-series line plot of ``columns`` against t.

    ``log_scale`` defaults to True when every column is a norm-like quantity.
    Non-positive values are skipped on a log axis; missing values break the line.
    """
    if not rows:
        raise DomainError("no rows to plot")
    columns = list(columns)
    for c in columns:
        if c not in CSV_COLUMNS or c == "t":
            raise DomainError(f"cannot plot column {c!r}")
    if log_scale is None:
        log_scale = all(c in LOG_COLUMNS for c in columns)
    ts = [r.t for r in rows]

    def tf(v):
        if v is None or not math.isfinite(v):
            return None
        if log_scale:
            return math.log10(v) if v > 0 else None
        return v

    series = {c: [tf(getattr(r, c)) for r in rows] for c in columns}
    vals = [v for s in series.values() for v in s if v is not None]
    if not vals:
        raise DomainError("nothing finite to plot")
    y0, y1 = min(vals), max(vals)
    if y1 - y0 < 1e-300:
        y0, y1 = y0 - 1.0, y1 + 1.0
    t0, t1 = min(ts), max(ts)
    if t1 - t0 < 1e-300:
        t1 = t0 + 1.0
    ml, mr, mt, mb = 70, 130, 20, 45
    pw, ph = width - ml - mr, height - mt - mb

    def X(t):
        return ml + pw * (t - t0) / (t1 - t0)

    def Y(v):
        return mt + ph * (1.0 - (v - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for i in range(5):
        tv = t0 + (t1 - t0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        ylab = f"1e{yv:.1f}" if log_scale else f"{yv:.3g}"
        out.append(f'<text x="{X(tv):.1f}" y="{height - mb + 16}" text-anchor="middle">{tv:.3g}</text>')
        out.append(f'<text x="{ml - 6}" y="{Y(yv) + 4:.1f}" text-anchor="end">{ylab}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" text-anchor="middle">t</text>')
    for j, c in enumerate(columns):
        color = _PALETTE[j % len(_PALETTE)]
        segs, cur = [], []
        for t, v in zip(ts, series[c]):
            if v is None:
                if cur:
                    segs.append(cur)
                cur = []
            else:
                cur.append(f"{X(t):.1f},{Y(v):.1f}")
        if cur:
            segs.append(cur)
        for seg in segs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{" ".join(seg)}"/>')
        ly = mt + 14 + 16 * j
        out.append(f'<line x1="{width - mr + 10}" y1="{ly - 4}" x2="{width - mr + 30}" y2="{ly - 4}" stroke="{color}"/>')
        out.append(f'<text x="{width - mr + 34}" y="{ly}">{c}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def emit_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
