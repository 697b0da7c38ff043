import math

import numpy as np
import pytest

from spectral_boltzmann.acceptance import (
    ASYMPTOTIC_ABOVE,
    ASYMPTOTIC_BELOW,
    CONTOUR_SHIFT,
    SUITES,
    Check,
    asymptotic_gaps,
    cylindrical_envelope_constant,
    oracle_checks,
    recovers_monotonically,
    run_suites,
    table1_row_passes,
)
from spectral_boltzmann.advisor import MaxwellBound
from spectral_boltzmann.scenarios import cylindrical_pdf
from spectral_boltzmann.vgrid import VelocityGrid


def test_registry_holds_every_suite():
    expected = {"kernel", "table1", "bkw", "failure", "oracle", "soundness", "fits", "asymptotics",
                "conservation", "mixture", "plasma"}
    assert expected <= set(SUITES)


def test_unknown_suite():
    with pytest.raises(KeyError, match="Unknown suite"):
        run_suites(["nope"])


def test_check_to_dict():
    check = Check("bkw", "axis error", True, 1e-4, 1e-3)
    assert check.to_dict() == {
        "suite": "bkw",
        "name": "axis error",
        "passed": True,
        "measured": 1e-4,
        "limit": 1e-3,
        "detail": "",
    }


def test_asymptotics_smoke():
    checks = run_suites(["asymptotics"], smoke=True)
    assert len(checks) == 2
    assert all(c.passed for c in checks), [c.to_dict() for c in checks]


def test_asymptotic_gaps_shape():
    gaps = asymptotic_gaps([4.0, 6.0, 8.0], 2.0, MaxwellBound(c=0.1, k=0.5))
    assert gaps.shape == (3,)
    assert all(math.isfinite(g) and g >= 0 for g in gaps)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["kernel", "fits", "bkw", "failure", "soundness", "oracle",
                                  "conservation", "mixture", "plasma"])
def test_suite_smoke(name):
    checks = run_suites([name], smoke=True)
    assert checks
    failed = [c.to_dict() for c in checks if not c.passed]
    assert not failed


def test_table1_rows_are_two_sided():
    # an operator that annihilates the Maxwellian where the reference stagnates is a failure
    assert not table1_row_passes(0.0, 2e-1)
    assert not table1_row_passes(1e-12, 5e-10)
    assert not table1_row_passes(3.0, 2e-1)
    assert table1_row_passes(0.15, 2e-1)
    assert table1_row_passes(8e-10, 5e-10)


def test_table1_roundoff_rows_only_cap_the_error():
    assert table1_row_passes(0.0, 1e-14)
    assert table1_row_passes(5e-14, 1e-14)
    assert not table1_row_passes(2e-13, 1e-14)


def test_oracle_checks_are_symmetric():
    exact = np.zeros(5)
    oracle = np.full(5, 0.01)
    spectral = np.full(5, 0.1)
    budget, forward, reverse = oracle_checks(oracle, spectral, exact, 0.01, 0.1)
    assert budget.passed
    assert forward.passed
    assert not reverse.passed
    assert reverse.measured == pytest.approx(0.1)
    assert reverse.limit == pytest.approx(0.02)


def test_oracle_gap_must_fit_both_estimates():
    exact = np.zeros(3)
    budget, forward, reverse = oracle_checks(np.full(3, 0.05), np.full(3, -0.05), exact, 1e-3, 1e-3)
    assert forward.passed and reverse.passed
    assert not budget.passed


def test_asymptotic_tolerances_need_two_units_of_separation():
    # one-time sweep at k = 0.5 behind ASYMPTOTIC_BELOW and ASYMPTOTIC_ABOVE:
    # with d = g_tr - v the exact tail is e^{-kd^2}/2k + v sqrt(pi/k) erfc(sqrt(k) d)/2,
    # which leaves about 8-15% at d = -1 and 23% at d = 1.5, v = 8
    bound = MaxwellBound(c=0.1, k=0.5)
    assert np.all(asymptotic_gaps([3.0, 5.0, 8.0], -1.0, bound) > 0.05)
    assert asymptotic_gaps([8.0], 1.5, bound)[0] > 0.2
    assert np.all(asymptotic_gaps([3.0, 5.0, 8.0], ASYMPTOTIC_BELOW[0], bound) <= ASYMPTOTIC_BELOW[1])
    assert np.all(asymptotic_gaps([3.0, 5.0, 8.0], ASYMPTOTIC_ABOVE[0], bound) <= ASYMPTOTIC_ABOVE[1])


def test_contour_shift_window():
    assert CONTOUR_SHIFT == (0.2, 1.0)


@pytest.mark.parametrize(
    "series, passed, low",
    [
        ([3.0, 2.0, 1.0, 1.5, 2.0], True, 2),
        ([1.0, 1.1, 1.2], True, 0),
        ([3.0, 2.0, 1.0], False, 2),
        ([3.0, 1.0, 2.0, 1.8], False, 1),
    ],
)
def test_recovers_monotonically(series, passed, low):
    assert recovers_monotonically(series) == (passed, low)


def test_cylindrical_envelope_sits_on_the_vz_axis():
    grid = VelocityGrid(L=8.0, N=16)
    k = 1.0
    values = cylindrical_pdf(grid.mesh) * np.exp(k * grid.speed_squared)
    assert np.max(values) == pytest.approx(cylindrical_envelope_constant(grid, k), rel=1e-12)
