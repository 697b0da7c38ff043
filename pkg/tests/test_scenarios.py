import math

import numpy as np
import pytest

from spectral_boltzmann.errors import ParameterError
from spectral_boltzmann.moments import moments
from spectral_boltzmann.scenarios import (
    BKW_MIN_TIME,
    MIXTURE_EXAMPLE_2,
    SCENARIOS,
    BKWParams,
    MixtureParams,
    PlasmaParams,
    bkw_pdf,
    bkw_q,
    build_scenario,
    cylindrical_pdf,
    loss_profile,
    matched_maxwellian,
    materialize,
    maxwellian_pdf,
    mixture_pdf,
    plasma_rhs_terms,
    source_profile,
)
from spectral_boltzmann.vgrid import VelocityGrid, sample


def test_maxwellian_peak_and_validation():
    assert maxwellian_pdf(np.zeros(3)) == pytest.approx((2.0 * math.pi) ** -1.5)
    assert maxwellian_pdf(np.array([[1.0, 0.0, 0.0]]), mean=(1.0, 0.0, 0.0)).shape == (1,)
    with pytest.raises(ParameterError):
        maxwellian_pdf(np.zeros(3), T=0.0)
    with pytest.raises(ValueError):
        maxwellian_pdf(np.zeros(2))


def test_bkw_has_unit_mass_and_maxwellian_energy(fine_grid):
    base = moments(sample(fine_grid, bkw_pdf))
    assert base.mass == pytest.approx(1.0, rel=1e-9)
    assert base.energy == pytest.approx(3.0, rel=1e-9)
    assert np.min(sample(fine_grid, bkw_pdf).data) >= 0.0


def test_bkw_positivity_threshold():
    assert BKWParams().K == pytest.approx(1.0 - math.exp(-BKW_MIN_TIME / 6.0))
    with pytest.raises(ParameterError):
        BKWParams(t=1.0)
    assert BKWParams(t=1.0, allow_nonpositive=True).K < 0.6
    with pytest.raises(ParameterError):
        bkw_pdf(np.zeros(3), t=2.0)
    assert bkw_pdf(np.zeros(3), t=2.0, allow_nonpositive=True) < 0.0


def test_bkw_operator_is_the_time_derivative():
    rng = np.random.default_rng(2)
    v = rng.uniform(-3.0, 3.0, size=(20, 3))
    t, h = 7.0, 1e-4
    finite_difference = (bkw_pdf(v, t + h) - bkw_pdf(v, t - h)) / (2.0 * h)
    np.testing.assert_allclose(bkw_q(v, t), finite_difference, rtol=1e-6, atol=1e-12)


def test_cylindrical_profile_keeps_unit_mass():
    grid = VelocityGrid(L=8.0, N=48)
    base = moments(sample(grid, cylindrical_pdf))
    assert base.mass == pytest.approx(1.0, rel=1e-6)
    assert cylindrical_pdf(np.zeros(3)) == pytest.approx(4.0 * bkw_pdf(np.zeros(3)))


def test_mixture_coerces_and_validates():
    p = MixtureParams(v1=[1, 2, 3])
    assert p.v1 == (1.0, 2.0, 3.0)
    with pytest.raises(ParameterError):
        MixtureParams(omega=1.5)
    with pytest.raises(ParameterError):
        MixtureParams(v2=(1.0, 2.0))
    value = mixture_pdf(np.zeros(3), MIXTURE_EXAMPLE_2)
    assert value == pytest.approx(0.9999 * maxwellian_pdf(np.zeros(3), T=4.0), rel=1e-12)


def test_matched_maxwellian_reproduces_moments(fine_grid):
    pdf = matched_maxwellian(2.0, (2.0, 0.0, 0.0), 8.0)
    base = moments(sample(fine_grid, pdf))
    assert base.mass == pytest.approx(2.0, rel=1e-9)
    np.testing.assert_allclose(base.momentum, [2.0, 0.0, 0.0], atol=1e-9)
    assert base.energy == pytest.approx(8.0, rel=1e-9)
    with pytest.raises(ParameterError):
        matched_maxwellian(1.0, (2.0, 0.0, 0.0), 3.0)


def test_plasma_profiles():
    p = PlasmaParams()
    assert source_profile(np.array([2.0, 0.0, 0.0]), p) == pytest.approx(1.0)
    assert source_profile(np.array([3.0, 0.0, 0.0]), p) == pytest.approx(math.exp(-8.0))
    assert loss_profile(np.array([-3.0, 0.0, 0.0]), p) == pytest.approx(1.0, abs=1e-5)
    assert loss_profile(np.array([0.0, 0.0, 0.0]), p) == pytest.approx(0.0, abs=1e-5)
    assert plasma_rhs_terms(np.array([-3.0, 0.0, 0.0]), 0.5, p) == pytest.approx(-5.0, abs=1e-3)
    with pytest.raises(ParameterError):
        PlasmaParams(sigma_S=0.0)


def test_registry_builds_every_scenario():
    grid = VelocityGrid(L=8.0, N=8)
    for name in SCENARIOS:
        scenario = build_scenario(name)
        field = materialize(scenario, grid)
        assert field.grid == grid
        assert np.all(np.isfinite(field.data))
    assert build_scenario("plasma").plasma is not None
    bkw = build_scenario("bkw", {"t": 6.0})
    assert bkw.t0 == 6.0
    assert bkw.exact_q is not None


def test_registry_rejects_unknown_names_and_keys():
    with pytest.raises(ParameterError):
        build_scenario("vortex")
    with pytest.raises(ParameterError):
        build_scenario("bkw", {"tau": 6.0})
    with pytest.raises(ParameterError):
        build_scenario("maxwellian", {"T": -1.0})
    mixture = build_scenario("mixture2", {"omega": 0.5})
    assert mixture.params["omega"] == 0.5
    assert mixture.params["T1"] == 4.0
