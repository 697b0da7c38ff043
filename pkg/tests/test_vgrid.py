import math

import numpy as np
import pytest

from spectral_boltzmann.errors import FieldError, GridError
from spectral_boltzmann.scenarios import maxwellian_pdf
from spectral_boltzmann.vgrid import (
    FOURIER_NORM,
    RealField,
    VelocityGrid,
    axis_slice,
    default_halfwidth,
    forward_transform,
    inverse_transform,
    kernel_resolution,
    nyquist_ratio,
    reflect,
    sample,
)


def test_nodes_are_left_closed_with_exact_zero():
    grid = VelocityGrid(L=4.0, N=8)
    assert grid.dv == 1.0
    np.testing.assert_array_equal(grid.nodes_v, np.arange(-4.0, 4.0))
    assert grid.zero_index() == 4
    assert grid.nodes_v[grid.zero_index()] == 0.0
    assert grid.dzeta == pytest.approx(math.pi / 4.0)
    assert grid.zeta_max == pytest.approx(math.pi)
    assert grid.nodes_zeta[0] == pytest.approx(-grid.zeta_max)


@pytest.mark.parametrize("N", [7, 6, 0, True])
def test_rejects_bad_node_counts(N):
    with pytest.raises(GridError):
        VelocityGrid(L=1.0, N=N)


@pytest.mark.parametrize("L", [0.0, -1.0, float("inf"), float("nan")])
def test_rejects_bad_half_width(L):
    with pytest.raises(GridError):
        VelocityGrid(L=L, N=8)


def test_mesh_and_speed_squared_agree():
    grid = VelocityGrid(L=3.0, N=8)
    assert grid.mesh.shape == (8, 8, 8, 3)
    np.testing.assert_allclose(np.sum(grid.mesh ** 2, axis=-1), grid.speed_squared)
    # z is the fastest index
    assert grid.mesh[0, 0, 1, 2] - grid.mesh[0, 0, 0, 2] == pytest.approx(grid.dv)


def test_field_shape_and_finiteness_are_checked():
    grid = VelocityGrid(L=1.0, N=8)
    with pytest.raises(GridError):
        RealField(grid, np.zeros(10))
    data = np.zeros(grid.shape)
    data[1, 2, 3] = np.nan
    with pytest.raises(FieldError):
        RealField(grid, data)
    field = RealField(grid, np.zeros(512))
    assert field.data.shape == grid.shape
    assert not field.data.flags.writeable


def test_forward_transform_of_maxwellian_is_gaussian():
    grid = VelocityGrid(L=8.0, N=48)
    fh = forward_transform(sample(grid, maxwellian_pdf))
    zeta = grid.nodes_zeta
    z2 = zeta[:, None, None] ** 2 + zeta[None, :, None] ** 2 + zeta[None, None, :] ** 2
    expected = FOURIER_NORM * np.exp(-0.5 * z2)
    np.testing.assert_allclose(fh.data.real, expected, atol=1e-13)
    assert np.max(np.abs(fh.data.imag)) < 1e-13


def test_fast_and_direct_transforms_agree():
    grid = VelocityGrid(L=4.0, N=8)
    rng = np.random.default_rng(3)
    f = RealField(grid, rng.standard_normal(grid.shape))
    fast = forward_transform(f)
    direct = forward_transform(f, method="direct")
    np.testing.assert_allclose(fast.data, direct.data, atol=1e-12)
    back_fast = inverse_transform(fast).field.data
    back_direct = inverse_transform(direct, method="direct").field.data
    np.testing.assert_allclose(back_fast, back_direct, atol=1e-12)


def test_inverse_undoes_forward():
    grid = VelocityGrid(L=5.0, N=16)
    f = sample(grid, lambda v: maxwellian_pdf(v, T=0.7, mean=(0.5, 0.0, -0.25)))
    result = inverse_transform(forward_transform(f))
    np.testing.assert_allclose(result.field.data, f.data, atol=1e-15)
    assert result.imag_residue < 1e-14


def test_unknown_transform_method():
    grid = VelocityGrid(L=1.0, N=8)
    with pytest.raises(ValueError):
        forward_transform(RealField(grid, np.zeros(grid.shape)), method="slow")


def test_reflect_is_an_involution_that_fixes_the_corner():
    rng = np.random.default_rng(0)
    data = rng.standard_normal((8, 8, 8))
    np.testing.assert_array_equal(reflect(reflect(data)), data)
    assert reflect(data)[0, 0, 0] == data[0, 0, 0]
    assert reflect(data)[1, 2, 3] == data[7, 6, 5]


def test_axis_slice_runs_through_the_origin():
    grid = VelocityGrid(L=4.0, N=8)
    field = sample(grid, lambda v: v[..., 0] + 10.0 * v[..., 1] + 100.0 * v[..., 2])
    coords, values, fixed = axis_slice(field, 0)
    assert fixed == (0.0, 0.0)
    np.testing.assert_allclose(values, coords)
    _, values_z, _ = axis_slice(field, 2)
    np.testing.assert_allclose(values_z, 100.0 * coords)
    with pytest.raises(ValueError):
        axis_slice(field, 3)


def test_domain_heuristics():
    assert default_halfwidth(1.0) == pytest.approx(4.0 * math.sqrt(2.0))
    with pytest.raises(GridError):
        default_halfwidth(0.0)
    grid = VelocityGrid(L=10.0, N=48)
    assert nyquist_ratio(grid, 8.0) == pytest.approx(1.25)
    assert nyquist_ratio(grid, 16.0) < 1.0


def test_transform_preserves_the_l2_norm():
    grid = VelocityGrid(L=6.0, N=16)
    rng = np.random.default_rng(5)
    f = RealField(grid, rng.standard_normal(grid.shape))
    fh = forward_transform(f)
    real_norm = grid.cell_volume * np.sum(f.data ** 2)
    spectral_norm = grid.dzeta ** 3 * np.sum(np.abs(fh.data) ** 2)
    assert spectral_norm == pytest.approx(real_norm, rel=1e-10)


def test_transform_of_a_real_field_is_hermitian_on_paired_nodes():
    grid = VelocityGrid(L=6.0, N=16)
    rng = np.random.default_rng(6)
    fh = forward_transform(RealField(grid, rng.standard_normal(grid.shape))).data
    # zeta_m and -zeta_m pair up for m >= 1; the first node has no partner
    paired = fh[1:, 1:, 1:]
    mirrored = np.conj(fh[:0:-1, :0:-1, :0:-1])
    np.testing.assert_allclose(paired, mirrored, rtol=0.0, atol=1e-13 * np.max(np.abs(fh)))


@pytest.mark.parametrize("N", [8, 16, 48])
def test_kernel_resolution_ignores_the_node_count(N):
    grid = VelocityGrid(L=10.0, N=N)
    assert kernel_resolution(10.0, 8.0) == nyquist_ratio(grid, 8.0) == pytest.approx(1.25)
