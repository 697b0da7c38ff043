"""
Scenarios

Analytic initial conditions, the exact BKW solution and its collision
operator, Maxwellian mixtures and the plasma source/loss model, plus a
registry that builds any of them from a name and a JSON parameter block.

All pdf handles are vectorized: they take an array of shape (..., 3) and
return an array of shape (...).
"""

import logging
import math
from dataclasses import dataclass, field, fields
from functools import partial
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .errors import ParameterError
from .vgrid import RealField, VelocityGrid, sample

logger = logging.getLogger(__name__)

PdfHandle = Callable[[np.ndarray], np.ndarray]

# f_BKW > 0 needs K >= 3/5, i.e. t >= 6 ln(5/2) ~ 5.4977; the operating point is 5.5
BKW_MIN_TIME = 5.5


def _vectors(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != 3:
        raise ValueError(f"Velocities must have a trailing dimension of 3, got {v.shape}")
    return v


def _as_triple(value, name: str) -> Tuple[float, float, float]:
    triple = tuple(float(x) for x in np.asarray(value, dtype=np.float64).reshape(-1))
    if len(triple) != 3:
        raise ParameterError(f"{name} must be a 3-vector, got {value!r}")
    return triple


def maxwellian_pdf(v, T: float = 1.0, mean=(0.0, 0.0, 0.0)) -> np.ndarray:
    """(2 pi T)^(-3/2) exp(-|v - mean|^2 / 2T)."""
    if not T > 0:
        raise ParameterError(f"Temperature must be positive, got {T}")
    d = _vectors(v) - np.asarray(mean, dtype=np.float64)
    return (2.0 * math.pi * T) ** -1.5 * np.exp(-np.sum(d * d, axis=-1) / (2.0 * T))


@dataclass(frozen=True)
class BKWParams:
    """Parameters of the BKW solution.

    Args:
        t (float): Time; must be at least 5.5 unless allow_nonpositive is set
        T (float): Temperature
        allow_nonpositive (bool): Skip the positivity threshold check
    """
    t: float = BKW_MIN_TIME
    T: float = 1.0
    allow_nonpositive: bool = False

    def __post_init__(self):
        if not self.T > 0:
            raise ParameterError(f"Temperature must be positive, got {self.T}")
        if not self.t > 0:
            raise ParameterError(f"BKW time must be positive, got {self.t}")
        if self.t < BKW_MIN_TIME and not self.allow_nonpositive:
            raise ParameterError(
                f"BKW time {self.t} is below the positivity threshold {BKW_MIN_TIME}; "
                "pass allow_nonpositive=True to override"
            )

    @property
    def K(self) -> float:
        return -math.expm1(-self.t / 6.0)


def _bkw_parts(v, p: BKWParams):
    K = p.K
    x = np.sum(_vectors(v) ** 2, axis=-1) / p.T
    envelope = np.exp(-x / (2.0 * K)) / (2.0 * (2.0 * math.pi * K * p.T) ** 1.5)
    poly = (5.0 * K - 3.0) / K + (1.0 - K) / K ** 2 * x
    return K, x, envelope, poly


def bkw_pdf(v, t: float = BKW_MIN_TIME, T: float = 1.0, allow_nonpositive: bool = False) -> np.ndarray:
    """BKW solution of the homogeneous Boltzmann equation for Maxwell molecules."""
    _, _, envelope, poly = _bkw_parts(v, BKWParams(t, T, allow_nonpositive))
    return envelope * poly


def bkw_q(v, t: float = BKW_MIN_TIME, T: float = 1.0, allow_nonpositive: bool = False) -> np.ndarray:
    """Collision operator of the BKW solution, i.e. its time derivative.

    With x = |v|^2/T, f = A(K) exp(-x/2K) P(K, x) and dK/dt = (1 - K)/6:

        df/dK = A exp(-x/2K) [ P (x/2K^2 - 3/2K) + 3/K^2 - x (2 - K)/K^3 ]
    """
    p = BKWParams(t, T, allow_nonpositive)
    K, x, envelope, poly = _bkw_parts(v, p)
    dpoly = 3.0 / K ** 2 - x * (2.0 - K) / K ** 3
    df_dK = envelope * (poly * (x / (2.0 * K ** 2) - 1.5 / K) + dpoly)
    return df_dK * (1.0 - K) / 6.0


def cylindrical_pdf(v, dilation: float = 2.0, t0: float = BKW_MIN_TIME, T: float = 1.0) -> np.ndarray:
    """BKW profile compressed by ``dilation`` in vx and vy.

    With u = (d vx, d vy, vz) the pdf is d^2 * f_BKW(u), which has unit mass
    because dv = du / d^2.
    """
    if not dilation > 0:
        raise ParameterError(f"dilation must be positive, got {dilation}")
    scaled = _vectors(v) * np.array([dilation, dilation, 1.0])
    return dilation ** 2 * bkw_pdf(scaled, t0, T)


@dataclass(frozen=True)
class MixtureParams:
    """omega * M(v - v1, T1) + (1 - omega) * M(v - v2, T2)."""
    omega: float = 0.5
    v1: Tuple[float, float, float] = (2.0, 0.0, 0.0)
    v2: Tuple[float, float, float] = (-2.0, 0.0, 0.0)
    T1: float = 0.25
    T2: float = 0.25

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise ParameterError(f"omega must lie in [0, 1], got {self.omega}")
        if not (self.T1 > 0 and self.T2 > 0):
            raise ParameterError(f"Temperatures must be positive, got T1={self.T1}, T2={self.T2}")
        object.__setattr__(self, "v1", _as_triple(self.v1, "v1"))
        object.__setattr__(self, "v2", _as_triple(self.v2, "v2"))

    def components(self):
        return ((self.omega, np.array(self.v1), self.T1), (1.0 - self.omega, np.array(self.v2), self.T2))


MIXTURE_EXAMPLE_1 = MixtureParams(omega=0.5, v1=(2.0, 0.0, 0.0), v2=(-2.0, 0.0, 0.0), T1=0.25, T2=0.25)
MIXTURE_EXAMPLE_2 = MixtureParams(omega=0.9999, v1=(0.0, 0.0, 0.0), v2=(7.38, 0.0, 0.0), T1=4.0, T2=0.0625)


def mixture_pdf(v, p: MixtureParams) -> np.ndarray:
    return sum(w * maxwellian_pdf(v, T, mean) for w, mean, T in p.components() if w > 0) + np.zeros(
        np.shape(v)[:-1]
    )


@dataclass(frozen=True)
class MomentSet:
    mass: float
    momentum: np.ndarray
    energy: float
    pressure: float
    heat_flux: np.ndarray
    fourth_moment: float


def mixture_moments(p: MixtureParams) -> MomentSet:
    """Closed-form moments of a two-Maxwellian mixture.

    For a Maxwellian with temperature T whose mean sits at offset m from the
    bulk velocity: E|v-u|^2 = 3T + |m|^2, E[(v-u)|v-u|^2] = m(|m|^2 + 5T)
    and E|v-u|^4 = |m|^4 + 10 T |m|^2 + 15 T^2.
    """
    parts = p.components()
    u = sum(w * mean for w, mean, _ in parts)
    energy = sum(w * (3.0 * T + mean @ mean) for w, mean, T in parts)
    second = 0.0
    flux = np.zeros(3)
    fourth = 0.0
    for w, mean, T in parts:
        m = mean - u
        m2 = float(m @ m)
        second += w * (3.0 * T + m2)
        flux += w * m * (m2 + 5.0 * T)
        fourth += w * (m2 * m2 + 10.0 * T * m2 + 15.0 * T * T)
    return MomentSet(
        mass=1.0,
        momentum=u,
        energy=float(energy),
        pressure=second / 3.0,
        heat_flux=0.5 * flux,
        fourth_moment=fourth,
    )


def matched_maxwellian(mass: float, momentum, energy: float) -> PdfHandle:
    """Equilibrium pdf with the given mass, momentum and energy (E = int |v|^2 f)."""
    if not mass > 0:
        raise ParameterError(f"mass must be positive, got {mass}")
    u = np.asarray(momentum, dtype=np.float64) / mass
    T = (energy / mass - float(u @ u)) / 3.0
    if not T > 0:
        raise ParameterError(f"Moments imply a non-positive temperature {T}")
    return lambda v: mass * maxwellian_pdf(v, T, u)


@dataclass(frozen=True)
class PlasmaParams:
    """Electron-gun source and wall loss.

    S(v) = exp(-|v - v_S|^2 / 2 sigma_S^2)
    L(v) = 1/2 - arctan((vx - v_L) / sigma_L) / pi
    """
    c_S: float = 0.1
    c_L: float = 10.0
    v_S: Tuple[float, float, float] = (2.0, 0.0, 0.0)
    sigma_S: float = 0.25
    v_L: float = -2.0
    sigma_L: float = 1e-6

    def __post_init__(self):
        if not (self.sigma_S > 0 and self.sigma_L > 0):
            raise ParameterError(f"sigma_S and sigma_L must be positive, got {self.sigma_S}, {self.sigma_L}")
        object.__setattr__(self, "v_S", _as_triple(self.v_S, "v_S"))


def source_profile(v, p: PlasmaParams) -> np.ndarray:
    d = _vectors(v) - np.asarray(p.v_S)
    return np.exp(-np.sum(d * d, axis=-1) / (2.0 * p.sigma_S ** 2))


def loss_profile(v, p: PlasmaParams) -> np.ndarray:
    vx = _vectors(v)[..., 0]
    return 0.5 - np.arctan((vx - p.v_L) / p.sigma_L) / math.pi


def plasma_rhs_terms(v, f_value, p: PlasmaParams) -> np.ndarray:
    """c_S S(v) - c_L L(v) f."""
    return p.c_S * source_profile(v, p) - p.c_L * loss_profile(v, p) * np.asarray(f_value, dtype=np.float64)


@dataclass(frozen=True)
class Scenario:
    """A named initial condition with optional exact solution and plasma terms."""
    name: str
    pdf: PdfHandle
    t0: float = 0.0
    params: Dict[str, Any] = field(default_factory=dict)
    exact_pdf: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    exact_q: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    plasma: Optional[PlasmaParams] = None
    temperature: float = 1.0


def _split(params: Dict[str, Any], cls) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    names = {f.name for f in fields(cls)}
    return {k: v for k, v in params.items() if k in names}, {k: v for k, v in params.items() if k not in names}


def _reject_unknown(name: str, leftover: Dict[str, Any]):
    if leftover:
        raise ParameterError(f"Unknown parameters for scenario '{name}': {sorted(leftover)}")


def _build_maxwellian(params: Dict[str, Any]) -> Scenario:
    T = float(params.pop("T", 1.0))
    _reject_unknown("maxwellian", params)
    maxwellian_pdf(np.zeros(3), T)
    return Scenario("maxwellian", partial(maxwellian_pdf, T=T), params={"T": T}, temperature=T)


def _build_bkw(params: Dict[str, Any]) -> Scenario:
    known, leftover = _split(params, BKWParams)
    _reject_unknown("bkw", leftover)
    p = BKWParams(**known)
    return Scenario(
        "bkw",
        partial(bkw_pdf, t=p.t, T=p.T, allow_nonpositive=p.allow_nonpositive),
        t0=p.t,
        params={"t": p.t, "T": p.T},
        exact_pdf=lambda v, t: bkw_pdf(v, t, p.T, p.allow_nonpositive),
        exact_q=lambda v, t: bkw_q(v, t, p.T, p.allow_nonpositive),
        temperature=p.T,
    )


def _build_cylindrical(params: Dict[str, Any]) -> Scenario:
    dilation = float(params.pop("dilation", 2.0))
    t0 = float(params.pop("t0", BKW_MIN_TIME))
    T = float(params.pop("T", 1.0))
    _reject_unknown("cylindrical", params)
    BKWParams(t0, T)
    if not dilation > 0:
        raise ParameterError(f"dilation must be positive, got {dilation}")
    return Scenario(
        "cylindrical",
        partial(cylindrical_pdf, dilation=dilation, t0=t0, T=T),
        params={"dilation": dilation, "t0": t0, "T": T},
        temperature=T,
    )


def _mixture_builder(preset: MixtureParams, label: str):
    def build(params: Dict[str, Any]) -> Scenario:
        known, leftover = _split(params, MixtureParams)
        _reject_unknown(label, leftover)
        defaults = {f.name: getattr(preset, f.name) for f in fields(MixtureParams)}
        p = MixtureParams(**{**defaults, **known})
        return Scenario(
            label,
            partial(mixture_pdf, p=p),
            params={f.name: getattr(p, f.name) for f in fields(MixtureParams)},
            temperature=mixture_moments(p).pressure,
        )
    return build


def _build_plasma(params: Dict[str, Any]) -> Scenario:
    T = float(params.pop("T", 1.0))
    known, leftover = _split(params, PlasmaParams)
    _reject_unknown("plasma", leftover)
    p = PlasmaParams(**known)
    return Scenario(
        "plasma",
        partial(maxwellian_pdf, T=T),
        params={"T": T, **{f.name: getattr(p, f.name) for f in fields(PlasmaParams)}},
        plasma=p,
        temperature=T,
    )


SCENARIOS: Dict[str, Callable[[Dict[str, Any]], Scenario]] = {
    "maxwellian": _build_maxwellian,
    "bkw": _build_bkw,
    "cylindrical": _build_cylindrical,
    "mixture": _mixture_builder(MIXTURE_EXAMPLE_1, "mixture"),
    "mixture1": _mixture_builder(MIXTURE_EXAMPLE_1, "mixture1"),
    "mixture2": _mixture_builder(MIXTURE_EXAMPLE_2, "mixture2"),
    "plasma": _build_plasma,
}


def build_scenario(name: str, params: Optional[Dict[str, Any]] = None) -> Scenario:
    """Look up a scenario by name and build it from its parameter block."""
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise ParameterError(f"Unknown scenario '{name}'; available: {', '.join(sorted(SCENARIOS))}") from None
    try:
        scenario = builder(dict(params or {}))
    except TypeError as e:
        raise ParameterError(f"Invalid parameters for scenario '{name}': {e}") from e
    logger.debug(f"Built scenario {name} with {scenario.params}")
    return scenario


def materialize(scenario: Scenario, grid: VelocityGrid) -> RealField:
    """Sample a scenario's initial pdf on the grid."""
    return sample(grid, scenario.pdf)
