"""
Direct quadrature of the truncated collision integral

Evaluates

    Q^tr(v) = int_{|g| <= g_tr} int_{S^2} [f(v')f(w') - f(v)f(v + g)] B dTheta dg

with v' = v + (g - |g| Theta)/2, w' = v + (g + |g| Theta)/2 and
B = |g|^lambda * btilde, directly from an analytic pdf handle. Slow, but free
of any Fourier-side discretization, so it serves as the reference for the
spectral pipeline on small grids.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .ckernel import CollisionParams
from .errors import FieldError
from .vgrid import RealField, VelocityGrid

logger = logging.getLogger(__name__)

MIN_RADIAL_NODES = 8
DEFAULT_RADIAL_NODES = 32
DEFAULT_POLAR_ORDER = 16
# omega directions evaluated per vectorized pdf call
PAIR_BLOCK = 256


@dataclass(frozen=True)
class SphereRule:
    """Product rule on the unit sphere: Gauss-Legendre in cos(polar angle)
    times the trapezoid rule in azimuth.

    With n polar and 2n azimuthal points the rule integrates spherical
    harmonics up to degree 2n - 1 exactly.
    """
    directions: np.ndarray
    weights: np.ndarray
    polar: int
    azimuthal: int

    @classmethod
    def product(cls, polar: int = DEFAULT_POLAR_ORDER, azimuthal: Optional[int] = None) -> "SphereRule":
        if azimuthal is None:
            azimuthal = 2 * polar
        if polar < 1 or azimuthal < 1:
            raise ValueError(f"Sphere rule orders must be positive, got {polar}x{azimuthal}")
        mu, mu_weights = np.polynomial.legendre.leggauss(polar)
        phi = 2.0 * math.pi * np.arange(azimuthal) / azimuthal
        sin_theta = np.sqrt(1.0 - mu ** 2)
        directions = np.stack(
            [
                np.outer(sin_theta, np.cos(phi)),
                np.outer(sin_theta, np.sin(phi)),
                np.outer(mu, np.ones(azimuthal)),
            ],
            axis=-1,
        ).reshape(-1, 3)
        weights = np.outer(mu_weights, np.full(azimuthal, 2.0 * math.pi / azimuthal)).ravel()
        directions.flags.writeable = False
        weights.flags.writeable = False
        return cls(directions=directions, weights=weights, polar=polar, azimuthal=azimuthal)

    @property
    def degree(self) -> int:
        return min(2 * self.polar - 1, self.azimuthal - 1)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return self.weights.shape[0]

    def refine(self) -> "SphereRule":
        return SphereRule.product(2 * self.polar, 2 * self.azimuthal)


def _checked(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise FieldError("pdf handle returned non-finite values")
    return values


def q_direct(
    f: Callable[[np.ndarray], np.ndarray],
    v,
    params: CollisionParams,
    radial_nodes: int = DEFAULT_RADIAL_NODES,
    rule: Optional[SphereRule] = None,
    g_min: float = 0.0,
) -> float:
    """Truncated collision operator at a single velocity.

    The relative velocity g = r * omega is integrated with Gauss-Legendre
    in r on [g_min, g_tr] and ``rule`` in omega; ``rule`` also integrates
    the scattering direction Theta. A positive ``g_min`` restricts the
    integral to the shell g_min <= |g| <= g_tr.

    Args:
        f: Vectorized pdf handle, array[..., 3] -> array[...]
        v: Velocity, 3-vector
        params (CollisionParams): Collision parameters, any lambda in [0, 1]
        radial_nodes (int): Gauss-Legendre nodes in |g|
        rule (Optional[SphereRule]): Angular rule, 16x32 product by default
        g_min (float): Inner radius of the integration shell

    Returns:
        float: Q^tr(v)

    Raises:
        FieldError: If the pdf handle returns non-finite values
    """
    if radial_nodes < MIN_RADIAL_NODES:
        raise ValueError(f"radial_nodes must be at least {MIN_RADIAL_NODES}, got {radial_nodes}")
    if not 0.0 <= g_min < params.g_tr:
        raise ValueError(f"g_min must lie in [0, g_tr), got {g_min}")
    rule = rule or SphereRule.product()
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (3,):
        raise ValueError(f"v must be a 3-vector, got shape {v.shape}")

    nodes, node_weights = np.polynomial.legendre.leggauss(radial_nodes)
    half_width = 0.5 * (params.g_tr - g_min)
    radii = g_min + half_width * (nodes + 1.0)
    radial_weights = half_width * node_weights

    f_v = float(_checked(np.asarray(f(v))))
    omega = rule.directions
    w = rule.weights
    total = 0.0
    for r, rw in zip(radii, radial_weights):
        centre = v + 0.5 * r * omega
        spread = 0.5 * r * omega
        gain = 0.0
        # pairs (omega_i, Theta_j): v' = centre_i - spread_j, w' = centre_i + spread_j
        for start in range(0, len(rule), PAIR_BLOCK):
            block = centre[start:start + PAIR_BLOCK, None, :]
            products = _checked(f(block - spread[None, :, :]) * f(block + spread[None, :, :]))
            gain += w[start:start + PAIR_BLOCK] @ products @ w
        loss = rule.total * f_v * (w @ _checked(f(v + r * omega)))
        total += rw * r ** (2.0 + params.lam) * (gain - loss)
    return params.btilde * total


def q_direct_with_error(
    f: Callable[[np.ndarray], np.ndarray],
    v,
    params: CollisionParams,
    radial_nodes: int = DEFAULT_RADIAL_NODES,
    rule: Optional[SphereRule] = None,
    g_min: float = 0.0,
) -> Tuple[float, float]:
    """q_direct at doubled orders, with the change from the base orders as
    the error estimate."""
    rule = rule or SphereRule.product()
    coarse = q_direct(f, v, params, radial_nodes, rule, g_min)
    fine = q_direct(f, v, params, 2 * radial_nodes, rule.refine(), g_min)
    return fine, abs(fine - coarse)


def q_direct_field(
    f: Callable[[np.ndarray], np.ndarray],
    grid: VelocityGrid,
    params: CollisionParams,
    radial_nodes: int = DEFAULT_RADIAL_NODES,
    rule: Optional[SphereRule] = None,
    jobs: Optional[int] = None,
) -> RealField:
    """q_direct at every node of the grid, parallel over nodes."""
    rule = rule or SphereRule.product()
    points = grid.mesh.reshape(-1, 3)
    logger.info(
        f"Direct quadrature on {points.shape[0]} nodes "
        f"({radial_nodes} radial x {len(rule)}^2 angular points each)"
    )

    def evaluate(point):
        return q_direct(f, point, params, radial_nodes, rule)

    if jobs is None or jobs <= 1:
        values = [evaluate(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            values = list(executor.map(evaluate, points))
    return RealField(grid, np.array(values))
