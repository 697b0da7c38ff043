"""
Velocity moments

Trapezoid-weighted moments dv^3 * sum f * {1, v, |v|^2} and the central
moments used as diagnostics of relaxation runs.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import FieldError
from .vgrid import RealField

logger = logging.getLogger(__name__)

MOMENT_COLUMNS = ("t", "mass", "px", "py", "pz", "energy", "pressure", "heat_flux_x", "fourth_moment")


@dataclass(frozen=True)
class Moments:
    mass: float
    momentum: np.ndarray
    energy: float

    def as_vector(self) -> np.ndarray:
        """(mass, px, py, pz, energy), the ordering of the conservation basis."""
        return np.array([self.mass, *self.momentum, self.energy])


@dataclass(frozen=True)
class HigherMoments:
    """Central moments about the bulk velocity u.

    pressure = (1/3) int |v - u|^2 f, heat_flux = (1/2) int (v - u)|v - u|^2 f,
    fourth_moment = int |v - u|^4 f.
    """
    pressure: float
    heat_flux: np.ndarray
    fourth_moment: float


def moments(f: RealField) -> Moments:
    grid = f.grid
    w = grid.cell_volume
    data = f.data
    v = grid.nodes_v
    mass = w * float(np.sum(data))
    momentum = w * np.array(
        [
            np.sum(data * v[:, None, None]),
            np.sum(data * v[None, :, None]),
            np.sum(data * v[None, None, :]),
        ]
    )
    energy = w * float(np.sum(data * grid.speed_squared))
    return Moments(mass=mass, momentum=momentum, energy=energy)


def higher_moments(f: RealField) -> HigherMoments:
    """Pressure, heat flux and scalar fourth moment of f.

    Raises:
        FieldError: If f has zero mass
    """
    base = moments(f)
    if base.mass == 0.0:
        raise FieldError("Central moments are undefined for a field with zero mass")
    if base.mass < 0.0:
        logger.warning(f"Negative mass {base.mass:.3e}; central moments about p/rho are not physical")
    grid = f.grid
    u = base.momentum / base.mass
    c = grid.mesh - u
    c2 = np.sum(c * c, axis=-1)
    w = grid.cell_volume
    data = f.data
    return HigherMoments(
        pressure=w * float(np.sum(c2 * data)) / 3.0,
        heat_flux=0.5 * w * np.einsum("ijka,ijk->a", c, c2 * data),
        fourth_moment=w * float(np.sum(c2 * c2 * data)),
    )


def entropy(f: RealField) -> float:
    """H = int f ln f over the nodes where f > 0."""
    data = f.data
    positive = data[data > 0]
    return f.grid.cell_volume * float(np.sum(positive * np.log(positive)))


def moment_row(t: float, f: RealField) -> Tuple[float, ...]:
    """One row of the moments log, ordered as MOMENT_COLUMNS."""
    base = moments(f)
    try:
        high = higher_moments(f)
        extra = (high.pressure, float(high.heat_flux[0]), high.fourth_moment)
    except FieldError:
        extra = (float("nan"),) * 3
    return (float(t), base.mass, *(float(p) for p in base.momentum), base.energy, *extra)
