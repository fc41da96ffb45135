"""Spectral simulation of curvature flows for nearly spherical radial graphs."""

from .errors import ConeExitError, DomainError, NumericalError
from .flows import FlowConfig, run
from .geometry import Hypersurface, shape_report
from .spheregrid import build_grid

__all__ = [
    "ConeExitError",
    "DomainError",
    "FlowConfig",
    "Hypersurface",
    "NumericalError",
    "build_grid",
    "run",
    "shape_report",
]
__version__ = "0.1.0"
