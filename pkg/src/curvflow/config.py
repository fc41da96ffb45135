"""Run configuration: a strict JSON schema that round-trips field for field."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import DomainError
from .flows import FlowConfig
from .shapes import ShapeSpec

MODES = ("flow", "analyze", "verify")


class ConfigError(DomainError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class GridConfig:
    n: int = 2
    n_lat: int = 64
    n_lon: int = 128

    def to_dict(self) -> dict:
        return {"n": self.n, "n_lat": self.n_lat, "n_lon": self.n_lon}


@dataclass(frozen=True)
class RunConfig:
    mode: str = "flow"
    flow: FlowConfig | None = None
    shape: ShapeSpec = field(default_factory=ShapeSpec)
    grid: GridConfig = field(default_factory=GridConfig)
    output_dir: str = "out"
    emit_svg: bool = False
    seed: int = 0
    k_A: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: expected one of {MODES}, got {self.mode!r}")
        if self.mode == "flow" and self.flow is None:
            raise ConfigError("flow: required when mode is 'flow'")
        if self.flow is not None and self.flow.n != self.grid.n:
            raise ConfigError(f"flow.n={self.flow.n} differs from grid.n={self.grid.n}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "flow": None if self.flow is None else self.flow.to_dict(),
            "shape": self.shape.to_dict(),
            "grid": self.grid.to_dict(),
            "output_dir": self.output_dir,
            "emit_svg": self.emit_svg,
            "seed": self.seed,
            "k_A": self.k_A,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def _expect_obj(d, where: str) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    return d


def _check_keys(d: dict, allowed, where: str) -> None:
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {extra}")


def _typed(d: dict, cls, where: str):
    """Build a dataclass from ``d``, rejecting unknown keys and wrong JSON types."""
    _expect_obj(d, where)
    spec = {f.name: f for f in fields(cls)}
    _check_keys(d, spec, where)
    for name, value in d.items():
        default = getattr(cls(), name) if name in spec else None
        if isinstance(default, bool) and not isinstance(value, bool):
            raise ConfigError(f"{where}.{name}: expected true/false")
        if isinstance(default, int) and not isinstance(default, bool):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{where}.{name}: expected an integer")
        if isinstance(default, float) and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise ConfigError(f"{where}.{name}: expected a number")
        if isinstance(default, str) and not isinstance(value, str):
            raise ConfigError(f"{where}.{name}: expected a string")
    try:
        return cls(**{k: (float(v) if isinstance(getattr(cls(), k), float) else v) for k, v in d.items()})
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(data: dict) -> RunConfig:
    _expect_obj(data, "config")
    top = {f.name for f in fields(RunConfig)}
    _check_keys(data, top, "config")
    kw = {}
    for key in ("mode", "output_dir"):
        if key in data:
            if not isinstance(data[key], str):
                raise ConfigError(f"{key}: expected a string")
            kw[key] = data[key]
    for key in ("seed", "k_A"):
        if key in data:
            if isinstance(data[key], bool) or not isinstance(data[key], int):
                raise ConfigError(f"{key}: expected an integer")
            kw[key] = data[key]
    if "emit_svg" in data:
        if not isinstance(data["emit_svg"], bool):
            raise ConfigError("emit_svg: expected true/false")
        kw["emit_svg"] = data["emit_svg"]
    if data.get("flow") is not None:
        kw["flow"] = _typed(data["flow"], FlowConfig, "flow")
    if "shape" in data:
        kw["shape"] = _typed(data["shape"], ShapeSpec, "shape")
    if "grid" in data:
        kw["grid"] = _typed(data["grid"], GridConfig, "grid")
    try:
        return RunConfig(**kw)
    except ConfigError:
        raise
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def loads_config(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data)


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from exc
    return loads_config(text)


def dump_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(cfg.dumps())
