import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvflow import harmonics as hm
from curvflow import spheregrid as sg

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid32():
    return sg.build_grid(2, 32, 64)


@pytest.fixture(scope="session")
def grid64():
    return sg.build_grid(2, 64, 128)


def ylm(grid, modes):
    L = max(l for l, _, _ in modes)
    return hm.synthesize(hm.HarmonicSpectrum.from_modes(grid.n, L, modes), grid)
