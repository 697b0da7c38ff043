import math

import numpy as np
import pytest

from spectral_boltzmann.errors import FieldError
from spectral_boltzmann.moments import MOMENT_COLUMNS, entropy, higher_moments, moment_row, moments
from spectral_boltzmann.scenarios import MIXTURE_EXAMPLE_1, maxwellian_pdf, mixture_moments, mixture_pdf
from spectral_boltzmann.vgrid import RealField, sample


def test_maxwellian_moments(fine_grid):
    f = sample(fine_grid, maxwellian_pdf)
    base = moments(f)
    assert base.mass == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(base.momentum, 0.0, atol=1e-12)
    assert base.energy == pytest.approx(3.0, rel=1e-12)
    high = higher_moments(f)
    assert high.pressure == pytest.approx(1.0, rel=1e-12)
    assert high.fourth_moment == pytest.approx(15.0, rel=1e-10)
    np.testing.assert_allclose(base.as_vector(), [base.mass, 0.0, 0.0, 0.0, base.energy], atol=1e-12)


def test_mixture_moments_match_closed_form(fine_grid):
    f = sample(fine_grid, lambda v: mixture_pdf(v, MIXTURE_EXAMPLE_1))
    exact = mixture_moments(MIXTURE_EXAMPLE_1)
    assert exact.energy == pytest.approx(4.75)
    assert exact.fourth_moment == pytest.approx(26.9375)
    base = moments(f)
    high = higher_moments(f)
    assert base.mass == pytest.approx(exact.mass, rel=1e-7)
    assert base.energy == pytest.approx(exact.energy, rel=1e-7)
    assert high.pressure == pytest.approx(exact.pressure, rel=1e-7)
    assert high.fourth_moment == pytest.approx(exact.fourth_moment, rel=1e-7)
    np.testing.assert_allclose(high.heat_flux, exact.heat_flux, atol=1e-7)


def test_entropy_of_maxwellian(fine_grid):
    f = sample(fine_grid, maxwellian_pdf)
    assert entropy(f) == pytest.approx(-1.5 * math.log(2.0 * math.pi) - 1.5, rel=1e-9)


def test_zero_mass_field(small_grid):
    zero = RealField(small_grid, np.zeros(small_grid.shape))
    with pytest.raises(FieldError):
        higher_moments(zero)
    row = moment_row(1.5, zero)
    assert len(row) == len(MOMENT_COLUMNS)
    assert row[:6] == (1.5, 0.0, 0.0, 0.0, 0.0, 0.0)
    assert all(math.isnan(x) for x in row[6:])


def test_drifting_maxwellian_keeps_its_central_moments(fine_grid):
    w = np.array([0.5, -0.25, 0.3])
    rest = sample(fine_grid, maxwellian_pdf)
    moving = sample(fine_grid, lambda v: maxwellian_pdf(v, mean=w))
    np.testing.assert_allclose(moments(moving).momentum, w * moments(rest).mass, atol=1e-9)
    assert higher_moments(moving).pressure == pytest.approx(higher_moments(rest).pressure, abs=1e-9)
    assert higher_moments(moving).fourth_moment == pytest.approx(higher_moments(rest).fourth_moment, abs=1e-9)
    np.testing.assert_allclose(higher_moments(moving).heat_flux, 0.0, atol=1e-9)


def test_negative_mass_is_logged(small_grid, caplog):
    negative = RealField(small_grid, -sample(small_grid, maxwellian_pdf).data)
    with caplog.at_level("WARNING", logger="spectral_boltzmann.moments"):
        result = higher_moments(negative)
    assert "Negative mass" in caplog.text
    assert result.pressure == pytest.approx(-1.0, rel=1e-6)
