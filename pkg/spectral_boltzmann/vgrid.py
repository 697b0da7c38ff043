"""
Velocity and Fourier grids

This module defines the cubic velocity grid [-L, L)^3, its dual Fourier grid
and the trapezoid-rule discretization of the continuous Fourier transform

    F^(zeta) = (2 pi)^(-3/2) * integral F(v) exp(-i zeta . v) dv

used throughout the solver.

Data layout: every field is an (N, N, N) float64/complex128 array indexed
[ix, iy, iz] in C order, so the z index varies fastest in the flat buffer.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy import fft as sp_fft

from .errors import FieldError, GridError

logger = logging.getLogger(__name__)

FOURIER_NORM = (2.0 * math.pi) ** -1.5
MIN_NODES = 8


@dataclass(frozen=True)
class VelocityGrid:
    """Cubic velocity grid with N nodes per dimension and its Fourier dual.

    Nodes are v_k = (k - N/2) * dv, which equals -L + k * dv and puts an exact
    zero at k = N/2. The grid is left-closed: -L is a node, +L is not. The
    Fourier nodes zeta_m follow the same pattern with spacing pi/L; the xi
    grid of the convolution is the same set of nodes.

    Args:
        L (float): Half-width of the velocity cube
        N (int): Nodes per dimension (even, at least 8)
    """
    L: float
    N: int

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise GridError(f"N must be an integer, got {self.N!r}")
        if self.N % 2 != 0:
            raise GridError(f"N must be even, got {self.N}")
        if self.N < MIN_NODES:
            raise GridError(f"N must be at least {MIN_NODES}, got {self.N}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise GridError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dv(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dzeta(self) -> float:
        return math.pi / self.L

    @property
    def zeta_max(self) -> float:
        return self.N * math.pi / (2.0 * self.L)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.N, self.N, self.N)

    @property
    def cell_volume(self) -> float:
        """Trapezoid weight dv^3 shared by every velocity-space quadrature."""
        return self.dv ** 3

    @cached_property
    def nodes_v(self) -> np.ndarray:
        nodes = (np.arange(self.N) - self.N // 2) * self.dv
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def nodes_zeta(self) -> np.ndarray:
        nodes = (np.arange(self.N) - self.N // 2) * self.dzeta
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def mesh(self) -> np.ndarray:
        """Velocity node coordinates, shape (N, N, N, 3)."""
        v = self.nodes_v
        grid = np.stack(np.meshgrid(v, v, v, indexing="ij"), axis=-1)
        grid.flags.writeable = False
        return grid

    @cached_property
    def speed_squared(self) -> np.ndarray:
        v2 = self.nodes_v ** 2
        s = v2[:, None, None] + v2[None, :, None] + v2[None, None, :]
        s.flags.writeable = False
        return s

    def zero_index(self) -> int:
        """Index of the node nearest to v = 0."""
        return int(np.argmin(np.abs(self.nodes_v)))


def build_grid(L: float, N: int) -> VelocityGrid:
    """Build a velocity grid after validating L and N."""
    grid = VelocityGrid(L=L, N=N)
    logger.debug(f"Built grid L={grid.L}, N={grid.N}, dv={grid.dv:.6g}, dzeta={grid.dzeta:.6g}")
    return grid


def default_halfwidth(T: float) -> float:
    """Half-width L = 2R with R = 2*sqrt(2)*T, the domain heuristic for a
    pdf of temperature T whose support radius is R."""
    if not (math.isfinite(T) and T > 0):
        raise GridError(f"Temperature must be positive, got {T}")
    return 4.0 * math.sqrt(2.0) * T


def nyquist_ratio(grid: VelocityGrid, g_tr: float) -> float:
    """Ratio of the kernel oscillation wavelength 2*pi/g_tr to twice the
    Fourier spacing. Values below one mean the grid cannot resolve the
    weighting function."""
    return kernel_resolution(grid.L, g_tr)


def kernel_resolution(L: float, g_tr: float) -> float:
    """nyquist_ratio from the half-width alone: with dzeta = pi/L the ratio
    is L/g_tr, whatever N is."""
    return L / g_tr


def _coerce(grid: VelocityGrid, data, dtype) -> np.ndarray:
    array = np.ascontiguousarray(data, dtype=dtype)
    if array.size != grid.N ** 3:
        raise GridError(f"Field has {array.size} values, grid needs {grid.N ** 3}")
    array = array.reshape(grid.shape)
    if not np.isfinite(array).all():
        raise FieldError("Field contains non-finite values")
    view = array.view()
    view.flags.writeable = False
    return view


@dataclass(frozen=True)
class RealField:
    """Real scalar field sampled at the velocity nodes."""
    grid: VelocityGrid
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _coerce(self.grid, self.data, np.float64))

    @property
    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.data)))


@dataclass(frozen=True)
class SpectralField:
    """Complex field sampled at the Fourier nodes."""
    grid: VelocityGrid
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _coerce(self.grid, self.data, np.complex128))

    @property
    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)


class InverseResult(NamedTuple):
    field: RealField
    imag_residue: float


def reflect(data: np.ndarray) -> np.ndarray:
    """Values at the mirrored nodes -zeta (or -v), using the pairing
    m <-> (N - m) mod N of the centered grid. The node at -zeta_max pairs
    with itself."""
    n = data.shape[0]
    r = (-np.arange(n)) % n
    return data[np.ix_(r, r, r)]


def _checkerboard(n: int) -> np.ndarray:
    s = 1.0 - 2.0 * (np.arange(n) % 2)
    return s[:, None, None] * s[None, :, None] * s[None, None, :]


def _phase_sign(n: int) -> float:
    # exp(-i*pi*n/2) per dimension; real for even n
    return -1.0 if (n // 2) % 2 else 1.0


def _direct_sum(grid: VelocityGrid, data: np.ndarray, sign: float) -> np.ndarray:
    kernel = np.exp(sign * 1j * np.outer(grid.nodes_zeta, grid.nodes_v))
    if sign > 0:
        kernel = kernel.T
    return np.einsum("ai,bj,ck,ijk->abc", kernel, kernel, kernel, data, optimize=True)


def forward_transform(f: RealField, method: str = "fft", workers: Optional[int] = None) -> SpectralField:
    """Trapezoid-rule Fourier transform of a velocity-space field.

    f^(zeta_m) = (2 pi)^(-3/2) dv^3 sum_k f(v_k) exp(-i zeta_m . v_k)

    Args:
        f (RealField): Field on the velocity grid
        method (str): "fft" for the fast transform with centered-grid phase
            factors, "direct" for the explicit sum
        workers (Optional[int]): Thread count for scipy.fft

    Returns:
        SpectralField: Transform on the Fourier nodes
    """
    grid = f.grid
    weight = FOURIER_NORM * grid.dv ** 3
    if method == "direct":
        values = weight * _direct_sum(grid, f.data, -1.0)
    elif method == "fft":
        s = _checkerboard(grid.N)
        values = (weight * _phase_sign(grid.N)) * s * sp_fft.fftn(s * f.data, workers=workers)
    else:
        raise ValueError(f"Unknown transform method: {method}")
    return SpectralField(grid, values)


def inverse_transform(
    fh: SpectralField,
    tol: Optional[float] = None,
    method: str = "fft",
    workers: Optional[int] = None,
) -> InverseResult:
    """Discrete inverse of forward_transform.

    f(v_k) = (2 pi)^(-3/2) dzeta^3 sum_m f^(zeta_m) exp(+i zeta_m . v_k)

    The real part is returned together with the largest imaginary residue.
    A residue above ``tol`` is logged as a warning.

    Args:
        fh (SpectralField): Field on the Fourier grid
        tol (Optional[float]): Absolute residue tolerance
        method (str): "fft" or "direct"
        workers (Optional[int]): Thread count for scipy.fft

    Returns:
        InverseResult: Real field and max |imaginary part|
    """
    grid = fh.grid
    weight = FOURIER_NORM * grid.dzeta ** 3
    if method == "direct":
        values = weight * _direct_sum(grid, fh.data, 1.0)
    elif method == "fft":
        s = _checkerboard(grid.N)
        scale = weight * _phase_sign(grid.N) * grid.N ** 3
        values = scale * s * sp_fft.ifftn(s * fh.data, workers=workers)
    else:
        raise ValueError(f"Unknown transform method: {method}")

    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if tol is not None and residue > tol:
        logger.warning(f"Inverse transform imaginary residue {residue:.3e} exceeds tolerance {tol:.3e}")
    return InverseResult(RealField(grid, values.real), residue)


def sample(grid: VelocityGrid, pdf) -> RealField:
    """Evaluate a vectorized pdf handle (array[..., 3] -> array[...]) at the nodes."""
    return RealField(grid, pdf(grid.mesh))


def axis_slice(field: RealField, axis: int = 0) -> Tuple[np.ndarray, np.ndarray, Tuple[float, float]]:
    """Values along one velocity axis with the two other coordinates fixed
    at the node nearest zero.

    Returns:
        Tuple[np.ndarray, np.ndarray, Tuple[float, float]]: coordinates,
        values, and the fixed off-axis coordinates
    """
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {axis}")
    grid = field.grid
    i0 = grid.zero_index()
    index = [i0, i0, i0]
    index[axis] = slice(None)
    fixed = (float(grid.nodes_v[i0]), float(grid.nodes_v[i0]))
    return grid.nodes_v.copy(), field.data[tuple(index)].copy(), fixed
