"""
Convolution weighting function

Evaluates the truncated weighting function G^tr(xi, zeta) that turns the
Fourier transform of the truncated collision operator into a weighted
convolution of f^ with itself.

For Maxwell molecules (lambda = 0) the closed form is

    G^tr = 16 pi^2 B * [ I(|zeta|/2, |xi - zeta/2|) - J(|xi|) ]

with I(x, y) = int_0^g g^2 sinc(g x) sinc(g y) dg and
J(z) = int_0^g g^2 sinc(g z) dg, g the truncation speed and
sinc(t) = sin(t)/t. Both integrals are elementary; near their removable
singularities they are evaluated by series. For general lambda a spherical
product quadrature of the ball integral serves as a reference.

The scalar kernels are numba-compiled so that the convolution loop in
``collide`` can call them directly.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numba import njit

from .errors import ParameterError, QuadratureError

logger = logging.getLogger(__name__)

MAXWELL_BTILDE = 1.0 / (4.0 * math.pi)

# u * max(x, y) below this: double series in both arguments
PAIR_SERIES_LIMIT = 1e-2
# u * min(x, y) below this: series in the small argument only
SMALL_ARG_LIMIT = 1e-3
# u * z below this: series for sin(w) - w cos(w)
RADIAL_SERIES_LIMIT = 1e-2
# sinc'''(w)/w switches to its series below this
_SINC3_SERIES_LIMIT = 0.1


@dataclass(frozen=True)
class CollisionParams:
    """Collision model parameters for B(g, chi) = g^lam * btilde.

    Args:
        g_tr (float): Truncation speed for the relative velocity
        btilde (float): Angular kernel constant, 1/(4 pi) for the Maxwell normalization
        lam (float): Kernel exponent, 0 for Maxwell molecules and 1 for hard spheres
    """
    g_tr: float
    btilde: float = MAXWELL_BTILDE
    lam: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ParameterError(f"lambda must lie in [0, 1], got {self.lam}")
        if not (math.isfinite(self.btilde) and self.btilde > 0):
            raise ParameterError(f"Btilde must be positive, got {self.btilde}")
        if not (math.isfinite(self.g_tr) and self.g_tr > 0):
            raise ParameterError(f"g_tr must be positive, got {self.g_tr}")

    @property
    def is_maxwell(self) -> bool:
        return self.lam == 0.0

    @property
    def kernel_scale(self) -> float:
        """Prefactor 16 pi^2 B of the closed form."""
        return 16.0 * math.pi ** 2 * self.btilde

    def require_maxwell(self):
        if not self.is_maxwell:
            raise ParameterError(
                f"The closed-form weighting function needs lambda = 0, got {self.lam}; "
                "use ghat_quadrature for other kernels"
            )


@njit(cache=False)
def radial_weight(z, u):
    """J(z) = int_0^u g^2 sinc(g z) dg = (sin(uz) - uz cos(uz)) / z^3.

    Below uz = RADIAL_SERIES_LIMIT the Taylor series replaces the closed
    form. The series is truncated after w^6, leaving under 1e-20 relative;
    the closed form loses about log10(3/w^2) digits to cancellation, so the
    two agree to a few 1e-12 at the switch (held to 1e-10 by the tests).
    """
    w = u * z
    if w < RADIAL_SERIES_LIMIT:
        w2 = w * w
        return u * u * u * (1.0 / 3.0 - w2 / 30.0 + w2 * w2 / 840.0 - w2 * w2 * w2 / 45360.0)
    return (math.sin(w) - w * math.cos(w)) / (z * z * z)


@njit(cache=False)
def _sinc_third_over(w):
    # d^3/dw^3 (sin w / w), divided by w
    if w < _SINC3_SERIES_LIMIT:
        w2 = w * w
        return 0.2 - w2 / 42.0 + w2 * w2 / 1080.0 - w2 * w2 * w2 / 55440.0
    s = math.sin(w)
    c = math.cos(w)
    return (-w * w * w * c + 3.0 * w * w * s + 6.0 * w * c - 6.0 * s) / (w * w * w * w * w)


@njit(cache=False)
def pair_weight(x, y, u):
    """I(x, y) = int_0^u g^2 sinc(g x) sinc(g y) dg.

    The closed form (h(x - y) - h(x + y)) / (2xy) with h(a) = sin(ua)/a
    cancels catastrophically when xy is small, so two series branches
    cover that region. Its relative rounding error is about eps / (u^2 xy),
    which is 1e-12 at the PAIR_SERIES_LIMIT switch and 1e-11 at the
    SMALL_ARG_LIMIT switch; both series are truncated well below that.
    The continuity tests straddle each switch at 1e-10.
    """
    small = min(x, y)
    big = max(x, y)
    if u * big < PAIR_SERIES_LIMIT:
        x2 = x * x
        y2 = y * y
        u2 = u * u
        c2 = (x2 + y2) / 30.0
        c4 = ((x2 * x2 + y2 * y2) / 120.0 + x2 * y2 / 36.0) / 7.0
        c6 = ((x2 * x2 * x2 + y2 * y2 * y2) / 5040.0 + (x2 * x2 * y2 + x2 * y2 * y2) / 720.0) / 9.0
        return u * u * u * (1.0 / 3.0 - c2 * u2 + c4 * u2 * u2 - c6 * u2 * u2 * u2)
    if u * small < SMALL_ARG_LIMIT:
        u5 = u * u * u * u * u
        return radial_weight(big, u) - small * small * u5 / 6.0 * _sinc_third_over(u * big)
    p = x - y
    q = x + y
    hp = u if p == 0.0 else math.sin(u * p) / p
    hq = math.sin(u * q) / q
    return (hp - hq) / (2.0 * x * y)


@njit(cache=False)
def ghat_scalar(x, y, z, u, scale):
    """G^tr from the three magnitudes |zeta|/2, |xi - zeta/2| and |xi|."""
    return scale * (pair_weight(x, y, u) - radial_weight(z, u))


@njit(cache=False)
def _ghat_batch(x, y, z, u, scale, out):
    for i in range(x.shape[0]):
        out[i] = ghat_scalar(x[i], y[i], z[i], u, scale)


def _as_vector(value, name: str) -> np.ndarray:
    vector = np.asarray(value, dtype=np.float64)
    if vector.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {vector.shape}")
    return vector


def _magnitudes(xi: np.ndarray, zeta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = 0.5 * np.sqrt(np.sum(zeta * zeta, axis=-1))
    shifted = xi - 0.5 * zeta
    y = np.sqrt(np.sum(shifted * shifted, axis=-1))
    z = np.sqrt(np.sum(xi * xi, axis=-1))
    return x, y, z


def ghat_maxwell(xi, zeta, params: CollisionParams) -> float:
    """Closed-form G^tr(xi, zeta) for Maxwell molecules.

    Args:
        xi: Convolution variable, 3-vector
        zeta: Output frequency, 3-vector
        params (CollisionParams): Collision parameters with lam = 0

    Returns:
        float: Weighting function value
    """
    params.require_maxwell()
    x, y, z = _magnitudes(_as_vector(xi, "xi"), _as_vector(zeta, "zeta"))
    return float(ghat_scalar(float(x), float(y), float(z), params.g_tr, params.kernel_scale))


def ghat_maxwell_many(xi, zeta, params: CollisionParams) -> np.ndarray:
    """Vectorized ghat_maxwell over broadcastable arrays of 3-vectors."""
    params.require_maxwell()
    xi, zeta = np.broadcast_arrays(np.asarray(xi, dtype=np.float64), np.asarray(zeta, dtype=np.float64))
    if xi.shape[-1] != 3:
        raise ValueError(f"Trailing dimension must be 3, got {xi.shape}")
    x, y, z = _magnitudes(xi, zeta)
    out = np.empty(x.size, dtype=np.float64)
    _ghat_batch(x.ravel(), y.ravel(), z.ravel(), params.g_tr, params.kernel_scale, out)
    return out.reshape(x.shape)


def _ball_integral(xi: np.ndarray, zeta: np.ndarray, params: CollisionParams, order: int) -> complex:
    u = params.g_tr
    radii, radial_weights = np.polynomial.legendre.leggauss(order)
    radii = 0.5 * u * (radii + 1.0)
    radial_weights = 0.5 * u * radial_weights

    mu, mu_weights = np.polynomial.legendre.leggauss(order)
    n_phi = 2 * order
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    sin_theta = np.sqrt(1.0 - mu ** 2)
    directions = np.stack(
        [
            np.outer(sin_theta, np.cos(phi)),
            np.outer(sin_theta, np.sin(phi)),
            np.outer(mu, np.ones(n_phi)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    direction_weights = np.outer(mu_weights, np.full(n_phi, 2.0 * math.pi / n_phi)).ravel()

    gain_phase = directions @ (0.5 * zeta - xi)
    loss_phase = directions @ xi
    zeta_half = 0.5 * float(np.linalg.norm(zeta))

    total = 0.0 + 0.0j
    for r, w in zip(radii, radial_weights):
        gain = np.exp(1j * r * gain_phase) * np.sinc(r * zeta_half / math.pi)
        loss = np.exp(-1j * r * loss_phase)
        total += w * r ** (2.0 + params.lam) * np.dot(direction_weights, gain - loss)
    return 4.0 * math.pi * params.btilde * total


def ghat_quadrature(
    xi,
    zeta,
    params: CollisionParams,
    tol: float = 1e-10,
    start_order: int = 16,
    max_order: int = 128,
) -> complex:
    """G^tr(xi, zeta) by direct quadrature of the ball integral.

    Gauss-Legendre in radius and cos(polar angle), trapezoid in azimuth;
    all orders are doubled until two successive estimates differ by less
    than ``tol``. Valid for any lambda in [0, 1].

    Raises:
        QuadratureError: If max_order is reached without convergence
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    xi = _as_vector(xi, "xi")
    zeta = _as_vector(zeta, "zeta")
    if not np.any(zeta):
        return 0.0 + 0.0j

    order = start_order
    previous = _ball_integral(xi, zeta, params, order)
    estimate = math.inf
    while order < max_order:
        order *= 2
        current = _ball_integral(xi, zeta, params, order)
        estimate = abs(current - previous)
        logger.debug(f"Ball quadrature order {order}: value {current:.12g}, change {estimate:.3e}")
        if estimate < tol:
            return complex(current)
        previous = current
    raise QuadratureError(
        f"Weighting-function quadrature did not reach tolerance {tol:.1e} by order {max_order}",
        estimate=estimate,
        value=complex(previous),
    )


def kernel_probe(zeta, direction, xi_max: float, points: int, params: CollisionParams) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form G^tr along the ray xi = s * direction, 0 <= s <= xi_max."""
    direction = _as_vector(direction, "direction")
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        raise ValueError("direction must be non-zero")
    if points < 2 or xi_max <= 0:
        raise ValueError("kernel_probe needs at least two points and xi_max > 0")
    s = np.linspace(0.0, xi_max, points)
    xi = s[:, None] * (direction / norm)[None, :]
    return s, ghat_maxwell_many(xi, _as_vector(zeta, "zeta")[None, :], params)


def oscillation_wavelength(params: CollisionParams, z_max: float, points: int = 20001) -> float:
    """Wavelength of the radial part J(|xi|), measured as twice the mean
    spacing of its zero crossings on (0, z_max]."""
    z = np.linspace(z_max / points, z_max, points)
    values = np.array([radial_weight(zi, params.g_tr) for zi in z])
    crossings = np.nonzero(np.signbit(values[:-1]) != np.signbit(values[1:]))[0]
    if crossings.size < 2:
        raise ValueError(f"Fewer than two zero crossings below |xi| = {z_max}")
    # linear interpolation of each crossing
    left, right = z[crossings], z[crossings + 1]
    vl, vr = values[crossings], values[crossings + 1]
    roots = left - vl * (right - left) / (vr - vl)
    return 2.0 * float(np.mean(np.diff(roots)))
