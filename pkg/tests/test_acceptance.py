"""The twelve acceptance criteria at their stated tolerances and resolutions.

Each test prints a single [PASS]/[FAIL] line with the measured values.
Run directly (python tests/test_acceptance.py) for the bare report.
"""

import time

import pytest

from curvflow import acceptance as acc


@pytest.fixture
def report(capsys):
    def emit(criterion):
        with capsys.disabled():
            print("\n" + criterion.line())
        assert criterion.passed, criterion.line()

    return emit


@pytest.fixture(scope="module")
def inverse_run():
    t0 = time.perf_counter()
    rows = acc.inverse_acceptance_run()
    return rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def volume_rows():
    return acc.volume_preserving_acceptance_run()


def test_01_symmetric_function_oracle(report):
    c = acc.symmetric_function_oracle()
    report(c)
    assert c.seconds < 5


def test_02_sphere_exactness(report):
    c = acc.sphere_exactness()
    report(c)
    assert c.seconds < 1


def test_03_spheroid_cross_validation(report):
    report(acc.spheroid_cross_validation())


def test_04_gauss_bonnet(report):
    report(acc.gauss_bonnet())


def test_05_poincare_gap(report):
    report(acc.poincare_gap())


def test_06_inverse_conservation(report, inverse_run):
    rows, seconds = inverse_run
    c = acc.inverse_conservation(rows)
    c.seconds = seconds
    report(c)
    assert seconds < 300


def test_07_stability_ratio(report, inverse_run):
    report(acc.stability_ratio(inverse_run[0]))


def test_08_decay_derivative(report):
    report(acc.decay_derivative_check())


def test_09_expansion_order(report):
    report(acc.expansion_order())


def test_10_volume_preserving(report, volume_rows):
    report(acc.volume_preserving(volume_rows))


def test_11_static_bound(report):
    report(acc.static_bound())


def test_12_exact_sphere(report):
    report(acc.exact_sphere())


if __name__ == "__main__":
    raise SystemExit(0 if all(c.passed for c in acc.run_all()) else 1)
