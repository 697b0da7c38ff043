"""
Truncation advisor

Evaluates the pointwise bound on the truncation error of the collision
operator for a pdf dominated by a Maxwellian envelope c*exp(-k v^2):

    E_tr^UB(g_tr, v) = c exp(-k v^2) E_rel(g_tr, v)
    E_rel(g_tr, v) = 16 pi^2 B c int_{g_tr}^inf exp(-k (v - g)^2)
                     (1 - exp(-4kvg)) / (4kvg) g^(lambda + 2) dg

fits envelopes to sampled pdfs and recommends the smallest truncation speed
that keeps E_rel below a tolerance up to a target speed.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from .ckernel import MAXWELL_BTILDE
from .errors import ParameterError, QuadratureError
from .vgrid import RealField, VelocityGrid, sample

logger = logging.getLogger(__name__)

FIT_SAFETY = 1e-6
# (1 - exp(-x))/x is replaced by its limit below this
SMALL_EXPONENT = 1e-8
# Gaussian tail cut at this many 1/sqrt(k) past the peak; exp(-1600) underflows
TAIL_WIDTHS = 40.0
EQUALITY_WIDTH = 1e-9
METHOD2_K_VALUES = np.round(np.arange(1, 501) * 0.01, 2)
GTR_PRECISION = 1e-3
SWEEP_STEP = 0.1


@dataclass(frozen=True)
class MaxwellBound:
    """Maxwellian envelope f(v) <= c exp(-k |v|^2)."""
    c: float
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ParameterError(f"Envelope amplitude c must be positive, got {self.c}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ParameterError(f"Envelope exponent k must be positive, got {self.k}")

    def envelope(self, v):
        return self.c * np.exp(-self.k * np.asarray(v, dtype=np.float64) ** 2)

    def dominates(self, f: RealField) -> bool:
        """True if f <= c exp(-k|v|^2) at every node."""
        bound = self.c * np.exp(-self.k * f.grid.speed_squared)
        return bool(np.all(f.data <= bound))

    def to_dict(self) -> dict:
        return {"c": self.c, "k": self.k}


def _relative_factor(x):
    # (1 - exp(-x))/x with the removable singularity at 0
    return 1.0 if x < SMALL_EXPONENT else -math.expm1(-x) / x


def e_rel(
    g_tr: float,
    v: float,
    bound: MaxwellBound,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
    tol: float = 1e-8,
) -> float:
    """Relative truncation-error bound E_rel(g_tr, v).

    Raises:
        QuadratureError: If the adaptive quadrature misses ``tol``
    """
    if not g_tr > 0:
        raise ParameterError(f"g_tr must be positive, got {g_tr}")
    if v < 0:
        raise ParameterError(f"Speed must be non-negative, got {v}")
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must lie in [0, 1], got {lam}")
    k = bound.k

    def integrand(g):
        return math.exp(-k * (v - g) ** 2) * _relative_factor(4.0 * k * v * g) * g ** (lam + 2.0)

    upper = max(g_tr, v) + TAIL_WIDTHS / math.sqrt(k)
    points = [v] if g_tr < v < upper else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, estimate = integrate.quad(integrand, g_tr, upper, epsabs=0.0, epsrel=tol, limit=500, points=points)
    if estimate > tol * abs(value) and estimate > 1e-300:
        raise QuadratureError(f"E_rel quadrature at g_tr={g_tr}, v={v} missed relative tolerance {tol:.1e}", estimate, value)
    return 16.0 * math.pi ** 2 * btilde * bound.c * value


def e_rel_asymptotic(g_tr: float, v: float, bound: MaxwellBound) -> float:
    """Large-argument form of E_rel for Maxwell molecules with the Maxwell
    normalization of btilde.

        g_tr < v:  c (pi/k)^(3/2)
        g_tr = v:  [c (pi/k)^(3/2) + 1/(k g_tr)] / 2
        g_tr > v:  (pi c / 2k^2) exp(-k (g_tr - v)^2) / (g_tr - v) * g_tr / v
    """
    if not v > 0:
        raise ParameterError(f"Speed must be positive, got {v}")
    c, k = bound.c, bound.k
    plateau = c * (math.pi / k) ** 1.5
    if abs(g_tr - v) < EQUALITY_WIDTH * max(g_tr, v):
        return 0.5 * (plateau + 1.0 / (k * g_tr))
    if g_tr < v:
        return plateau
    gap = g_tr - v
    return math.pi * c / (2.0 * k * k) * math.exp(-k * gap * gap) / gap * (g_tr / v)


def e_tr_ub(
    g_tr: float,
    v: float,
    bound: MaxwellBound,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
    tol: float = 1e-8,
) -> float:
    """Pointwise upper bound on |Q - Q^tr| at speed v."""
    return float(bound.envelope(v)) * e_rel(g_tr, v, bound, lam, btilde, tol)


def _as_field(f: Union[RealField, Callable], grid: Optional[VelocityGrid]) -> RealField:
    if isinstance(f, RealField):
        return f
    if grid is None:
        raise ParameterError("A grid is required to fit an envelope to a pdf handle")
    return sample(grid, f)


def _log_positive(field: RealField):
    data = field.data.reshape(-1)
    s2 = field.grid.speed_squared.reshape(-1)
    positive = data > 0
    if not np.any(positive):
        raise ParameterError("Cannot fit an envelope to a field with no positive values")
    return np.log(data[positive]), s2[positive]


def _check_mass(field: RealField):
    mass = field.grid.cell_volume * float(np.sum(field.data))
    if abs(mass - 1.0) > 1e-3:
        logger.warning(f"Envelope fit on a field with mass {mass:.6g}; the bound assumes unit mass")


def fit_method1(f: Union[RealField, Callable], grid: Optional[VelocityGrid] = None) -> MaxwellBound:
    """Envelope from the energy: k = 3/(2E) with E = int |v|^2 f, and the
    smallest c that dominates f at the grid nodes (times 1 + 1e-6).

    Dominance between nodes is not certified.
    """
    field = _as_field(f, grid)
    _check_mass(field)
    energy = field.grid.cell_volume * float(np.sum(field.data * field.grid.speed_squared))
    if not energy > 0:
        raise ParameterError(f"Method I needs positive energy, got {energy}")
    k = 1.5 / energy
    log_f, s2 = _log_positive(field)
    c = (1.0 + FIT_SAFETY) * math.exp(float(np.max(log_f + k * s2)))
    logger.info(f"Method I envelope: E={energy:.6g}, k={k:.6g}, c={c:.6g}")
    return MaxwellBound(c=c, k=k)


def fit_method2(
    f: Union[RealField, Callable],
    grid: Optional[VelocityGrid] = None,
    v_ref: float = 1.0,
    gtr_ref: float = 6.0,
    k_values: Sequence[float] = METHOD2_K_VALUES,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
) -> MaxwellBound:
    """Tightest envelope on a k grid.

    For each k the smallest dominating c(k) = max f exp(k|v|^2) is found at
    the nodes; the pair minimizing E_rel(gtr_ref, v_ref) is returned.
    """
    field = _as_field(f, grid)
    _check_mass(field)
    log_f, s2 = _log_positive(field)
    best = None
    for k in k_values:
        log_c = float(np.max(log_f + k * s2)) + math.log1p(FIT_SAFETY)
        if log_c > 700.0:
            continue
        c = math.exp(log_c)
        score = c * e_rel(gtr_ref, v_ref, MaxwellBound(1.0, float(k)), lam, btilde)
        if best is None or score < best[0]:
            best = (score, c, float(k))
    if best is None:
        raise ParameterError("No k on the search grid gives a finite envelope")
    logger.info(f"Method II envelope: k={best[2]:.4g}, c={best[1]:.6g}, E_rel({gtr_ref}, {v_ref})={best[0]:.3e}")
    return MaxwellBound(c=best[1], k=best[2])


def _sweep(v_target: float, step: float = SWEEP_STEP) -> np.ndarray:
    count = max(1, int(math.ceil(v_target / step - 1e-9)))
    speeds = step * np.arange(1, count + 1)
    speeds[-1] = v_target
    return speeds


def recommend_gtr(
    v_target: float,
    tol: float,
    bound: MaxwellBound,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
    step: float = SWEEP_STEP,
) -> float:
    """Smallest g_tr (to 1e-3) with E_rel(g_tr, v) <= tol for every v on
    the sweep 0 < v <= v_target.

    Raises:
        ParameterError: If even g_tr = 10 * v_target misses the tolerance
    """
    if not (tol > 0 and v_target > 0):
        raise ParameterError(f"tol and v_target must be positive, got {tol}, {v_target}")
    speeds = _sweep(v_target, step)[::-1]

    def acceptable(g_tr):
        return all(e_rel(g_tr, v, bound, lam, btilde) <= tol for v in speeds)

    hi = 10.0 * v_target
    if not acceptable(hi):
        raise ParameterError(f"E_rel <= {tol:g} up to v={v_target:g} is not reachable with g_tr <= {hi:g}")
    lo = 0.0
    while hi - lo > GTR_PRECISION:
        mid = 0.5 * (lo + hi)
        if acceptable(mid):
            hi = mid
        else:
            lo = mid
    logger.info(f"Recommended g_tr={hi:.3f} for E_rel <= {tol:g} up to v={v_target:g}")
    return hi


@dataclass
class ContourTable:
    """log10 E_rel on a (v, g_tr) grid; rows are speeds, columns truncation speeds."""
    v_values: np.ndarray
    gtr_values: np.ndarray
    log10_e_rel: np.ndarray

    def level_crossing(self, level: float) -> np.ndarray:
        """g_tr at which each row falls through ``level``, NaN if it never does."""
        crossings = np.full(self.v_values.shape, np.nan)
        for i, row in enumerate(self.log10_e_rel):
            finite = np.isfinite(row)
            if not finite.any() or not (row[finite].min() <= level <= row[finite].max()):
                continue
            crossings[i] = np.interp(level, row[finite][::-1], self.gtr_values[finite][::-1])
        return crossings

    def to_rows(self) -> List[List[float]]:
        header = [float("nan"), *self.gtr_values.tolist()]
        return [header] + [[float(v), *row.tolist()] for v, row in zip(self.v_values, self.log10_e_rel)]


def contour_table(
    v_values: Sequence[float],
    gtr_values: Sequence[float],
    bound: MaxwellBound,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
    jobs: Optional[int] = None,
) -> ContourTable:
    v_values = np.asarray(v_values, dtype=np.float64)
    gtr_values = np.asarray(gtr_values, dtype=np.float64)
    if np.any(v_values <= 0) or np.any(gtr_values <= 0):
        raise ParameterError("Contour ranges must be positive")

    def row(v):
        values = np.array([e_rel(g, v, bound, lam, btilde) for g in gtr_values])
        with np.errstate(divide="ignore"):
            return np.log10(values)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            rows = list(executor.map(row, v_values))
    else:
        rows = [row(v) for v in v_values]
    return ContourTable(v_values, gtr_values, np.vstack(rows))


def e_rel_profile(
    g_tr: float,
    v_values: Sequence[float],
    bound: MaxwellBound,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
) -> np.ndarray:
    """E_rel as a function of speed at fixed truncation."""
    return np.array([e_rel(g_tr, v, bound, lam, btilde) for v in v_values])


def bound_crossing(
    g_tr: float,
    bound: MaxwellBound,
    q_reference: Callable[[float], float],
    v_values: Sequence[float],
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
) -> Optional[float]:
    """Smallest sampled speed from which E_tr^UB stays at or above
    |q_reference(v)|, i.e. where the bound stops certifying any digits.

    Sign changes of the reference produce isolated low points, so the bound
    must dominate on the whole remaining sweep.
    """
    v_values = np.sort(np.asarray(v_values, dtype=np.float64))
    above = np.array([e_tr_ub(g_tr, v, bound, lam, btilde) >= abs(q_reference(v)) for v in v_values])
    if not above[-1]:
        return None
    below = np.nonzero(~above)[0]
    return float(v_values[0] if below.size == 0 else v_values[below[-1] + 1])


@dataclass
class Recommendation:
    method: str
    bound: MaxwellBound
    g_tr: float
    tol: float
    v_target: float
    sweep_v: List[float] = field(default_factory=list)
    sweep_e_rel: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.bound.k,
            "c": self.bound.c,
            "g_tr": self.g_tr,
            "tol": self.tol,
            "v_target": self.v_target,
            "sweep": [{"v": v, "e_rel": e} for v, e in zip(self.sweep_v, self.sweep_e_rel)],
        }


def fit_bound(
    f: Union[RealField, Callable],
    method: str,
    grid: Optional[VelocityGrid] = None,
    v_ref: float = 1.0,
    gtr_ref: float = 6.0,
) -> MaxwellBound:
    method = str(method).upper()
    if method in ("I", "1"):
        return fit_method1(f, grid)
    if method in ("II", "2"):
        return fit_method2(f, grid, v_ref=v_ref, gtr_ref=gtr_ref)
    raise ParameterError(f"Unknown envelope method '{method}', expected I or II")


def advise(
    f: Union[RealField, Callable],
    method: str = "I",
    tol: float = 1e-1,
    v_target: float = 4.0,
    grid: Optional[VelocityGrid] = None,
    lam: float = 0.0,
    btilde: float = MAXWELL_BTILDE,
    v_ref: float = 1.0,
    gtr_ref: float = 6.0,
) -> Recommendation:
    """Fit an envelope and recommend g_tr, reporting E_rel along the sweep."""
    bound = fit_bound(f, method, grid, v_ref, gtr_ref)
    g_tr = recommend_gtr(v_target, tol, bound, lam, btilde)
    speeds = _sweep(v_target)
    achieved = e_rel_profile(g_tr, speeds, bound, lam, btilde)
    return Recommendation(
        method="II" if str(method).upper() in ("II", "2") else "I",
        bound=bound,
        g_tr=g_tr,
        tol=tol,
        v_target=v_target,
        sweep_v=speeds.tolist(),
        sweep_e_rel=achieved.tolist(),
    )
