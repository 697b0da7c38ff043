"""
Validation suites

Each suite reproduces one group of reference results and returns a list of
pass/fail checks. ``smoke=True`` runs a reduced version at small N that
finishes in minutes; the full versions are sized for a multi-core
workstation.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .advisor import MaxwellBound, contour_table, e_rel, e_rel_asymptotic, e_tr_ub, fit_method1, fit_method2
from .ckernel import CollisionParams, ghat_maxwell, ghat_maxwell_many, ghat_quadrature
from .collide import collision_operator
from .errors import SpectralBoltzmannError
from .evolve import EvolutionOptions, run_evolution
from .moments import moments
from .oracle import DEFAULT_RADIAL_NODES, SphereRule, q_direct, q_direct_field, q_direct_with_error
from .scenarios import (
    MIXTURE_EXAMPLE_1,
    PlasmaParams,
    bkw_pdf,
    bkw_q,
    build_scenario,
    cylindrical_pdf,
    matched_maxwellian,
    materialize,
    maxwellian_pdf,
    mixture_pdf,
)
from .vgrid import VelocityGrid, axis_slice, default_halfwidth, sample

logger = logging.getLogger(__name__)

# sup-norm of Q^NC for the T=1 Maxwellian on L=10, keyed by (N, g_tr)
TABLE1 = {
    (24, 4): 2e-5, (24, 8): 3e-5, (24, 12): 4e-5, (24, 16): 2e-4, (24, 20): 2e-1,
    (36, 4): 2e-9, (36, 8): 4e-9, (36, 12): 4e-9, (36, 16): 2e-4, (36, 20): 2e-1,
    (48, 4): 8e-15, (48, 8): 1e-14, (48, 12): 5e-10, (48, 16): 2e-4, (48, 20): 2e-1,
}
TABLE1_FACTOR = 10.0
# references at or below this are rounding noise and only bound the error from above
TABLE1_ROUNDOFF = 1e-12
BKW_T0 = 5.5
CONTOUR_SHIFT = (0.2, 1.0)
# (offset of g_tr from v, relative tolerance); offsets of -1 and +1.5 miss
# these tolerances at k = 0.5, see tests/test_acceptance.py
ASYMPTOTIC_BELOW = (-2.0, 0.05)
ASYMPTOTIC_ABOVE = (2.0, 0.2)


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    measured: float
    limit: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "limit": self.limit,
            "detail": self.detail,
        }


@dataclass
class SuiteContext:
    smoke: bool = False
    jobs: Optional[int] = None
    deterministic: bool = True


SUITES: Dict[str, Callable[[SuiteContext], List[Check]]] = {}


def suite(name: str):
    def register(fn):
        SUITES[name] = fn
        return fn
    return register


def _bkw_field(grid: VelocityGrid, t: float = BKW_T0):
    return sample(grid, lambda v: bkw_pdf(v, t))


def _slice_error(field, exact: Callable[[np.ndarray], np.ndarray]):
    coords, values, fixed = axis_slice(field, 0)
    points = np.column_stack([coords, np.full_like(coords, fixed[0]), np.full_like(coords, fixed[1])])
    reference = exact(points)
    return coords, values, reference


@suite("kernel")
def kernel_suite(ctx: SuiteContext) -> List[Check]:
    """Zero-frequency nulling and closed form against the ball quadrature."""
    rng = np.random.default_rng(7)
    zero_count = 100 if ctx.smoke else 1000
    pair_count = 10 if ctx.smoke else 100
    checks = []
    for g_tr in (4.0, 8.0):
        params = CollisionParams(g_tr=g_tr)
        xi = rng.uniform(-6.0, 6.0, size=(zero_count, 3))
        worst = float(np.max(np.abs(ghat_maxwell_many(xi, np.zeros(3), params))))
        limit = 1e-12 * 4.0 * math.pi * params.btilde * g_tr ** 3
        checks.append(Check("kernel", f"G(xi, 0) = 0 at g_tr={g_tr:g}", worst <= limit, worst, limit))

        gap = 0.0
        for _ in range(pair_count):
            xi_i, zeta_i = rng.uniform(-2.0, 2.0, size=(2, 3))
            gap = max(gap, abs(ghat_maxwell(xi_i, zeta_i, params) - ghat_quadrature(xi_i, zeta_i, params, tol=1e-10)))
        checks.append(Check("kernel", f"closed form vs quadrature at g_tr={g_tr:g}", gap <= 1e-8, gap, 1e-8))
    return checks


def table1_row_passes(err: float, reference: float, factor: float = TABLE1_FACTOR) -> bool:
    """Within ``factor`` of the reference on both sides; roundoff-level
    references only cap the error."""
    if reference <= TABLE1_ROUNDOFF:
        return err <= factor * reference
    return reference / factor <= err <= factor * reference


@suite("table1")
def table1_suite(ctx: SuiteContext) -> List[Check]:
    """Sup-norm of Q^NC for a Maxwellian, which should vanish."""
    sizes = (24,) if ctx.smoke else (24, 36, 48)
    gtrs = (4, 8, 12, 16, 20)
    errors = {}
    checks = []
    for n in sizes:
        grid = VelocityGrid(L=10.0, N=n)
        f = sample(grid, maxwellian_pdf)
        for g_tr in gtrs:
            q = collision_operator(f, CollisionParams(g_tr=float(g_tr)), jobs=ctx.jobs, deterministic=ctx.deterministic)
            err = q.sup_norm()
            errors[(n, g_tr)] = err
            reference = TABLE1[(n, g_tr)]
            window = "at most" if reference <= TABLE1_ROUNDOFF else "within"
            checks.append(
                Check(
                    "table1",
                    f"N={n} g_tr={g_tr}",
                    table1_row_passes(err, reference),
                    err,
                    reference,
                    f"{window} x{TABLE1_FACTOR:g} of the reference",
                )
            )
    if not ctx.smoke:
        for g_tr in (4, 8):
            series = [errors[(n, g_tr)] for n in sizes]
            checks.append(
                Check("table1", f"convergence in N at g_tr={g_tr}", all(np.diff(series) < 0), series[-1], series[0])
            )
        spread = max(errors[(n, 20)] for n in sizes) / min(errors[(n, 20)] for n in sizes)
        checks.append(Check("table1", "N-independent failure at g_tr=20", spread <= TABLE1_FACTOR, spread, TABLE1_FACTOR))
    return checks


@suite("bkw")
def bkw_suite(ctx: SuiteContext) -> List[Check]:
    """Q^NC of the BKW pdf against its analytic time derivative on the vx axis."""
    if ctx.smoke:
        grid, g_tr, tol = VelocityGrid(L=8.0, N=32), 8.0, 1e-3
    else:
        grid, g_tr, tol = VelocityGrid(L=10.0, N=48), 8.0, 1e-7
    f = _bkw_field(grid)
    checks = []
    q = collision_operator(f, CollisionParams(g_tr=g_tr), jobs=ctx.jobs, deterministic=ctx.deterministic)
    _, values, reference = _slice_error(q, lambda v: bkw_q(v, BKW_T0))
    err = float(np.max(np.abs(values - reference)))
    checks.append(Check("bkw", f"axis error N={grid.N} g_tr={g_tr:g}", err <= tol, err, tol))
    if not ctx.smoke:
        q14 = collision_operator(f, CollisionParams(g_tr=14.0), jobs=ctx.jobs, deterministic=ctx.deterministic)
        _, values14, _ = _slice_error(q14, lambda v: bkw_q(v, BKW_T0))
        floor = float(np.max(np.abs(values14 - reference)))
        checks.append(Check("bkw", "error floor at g_tr=14", floor >= 1e-10, floor, 1e-10, "oscillation-limited"))
    return checks


@suite("failure")
def failure_suite(ctx: SuiteContext) -> List[Check]:
    """Under-resolved kernel oscillation on a tight domain."""
    L = default_halfwidth(1.0)
    grid = VelocityGrid(L=L, N=32 if ctx.smoke else 48)
    f = _bkw_field(grid)
    checks = []
    for label, g_tr, bad in (("g_tr=2*sqrt(3)*L", 2.0 * math.sqrt(3.0) * L, True), ("g_tr=L", L, False)):
        q = collision_operator(f, CollisionParams(g_tr=g_tr), jobs=ctx.jobs, deterministic=ctx.deterministic)
        _, values, reference = _slice_error(q, lambda v: bkw_q(v, BKW_T0))
        scale = float(np.max(np.abs(reference)))
        rel = float(np.max(np.abs(values - reference))) / scale
        if bad:
            checks.append(Check("failure", f"{label} deviates", rel > 0.1, rel, 0.1))
        else:
            checks.append(Check("failure", f"{label} accurate", rel <= 0.01, rel, 0.01))
    return checks


def oracle_checks(q_or, q_nc, q_exact, quad_estimate: float, spectral_estimate: float) -> List[Check]:
    """Oracle and spectral values at the same points.

    Their gap must fit within the sum of the two error estimates, and each
    must be within 2x of the other's distance to the exact operator.
    """
    q_or, q_nc, q_exact = (np.asarray(a, dtype=np.float64) for a in (q_or, q_nc, q_exact))
    d_oracle = float(np.max(np.abs(q_or - q_exact)))
    d_spectral = float(np.max(np.abs(q_nc - q_exact)))
    gap = float(np.max(np.abs(q_or - q_nc)))
    budget = quad_estimate + spectral_estimate
    scale = max(float(np.max(np.abs(q_exact))), 1e-300)
    return [
        Check("oracle", "gap within combined budget", gap <= budget, gap / scale, budget / scale,
              f"relative to |Q_exact|; quadrature {quad_estimate:.3e}, spectral {spectral_estimate:.3e}"),
        Check("oracle", "oracle within 2x of spectral distance", d_oracle <= 2.0 * d_spectral, d_oracle, 2.0 * d_spectral),
        Check("oracle", "spectral within 2x of oracle distance", d_spectral <= 2.0 * d_oracle, d_spectral, 2.0 * d_oracle),
    ]


@suite("oracle")
def oracle_suite(ctx: SuiteContext) -> List[Check]:
    """Direct quadrature against the spectral pipeline at N=16."""
    grid = VelocityGrid(L=10.0, N=16)
    # every node of the coarse grid is a node of the doubled one
    fine_grid = VelocityGrid(L=10.0, N=32)
    params = CollisionParams(g_tr=6.0)
    pdf = lambda v: bkw_pdf(v, BKW_T0)  # noqa: E731
    q_nc = collision_operator(sample(grid, pdf), params, jobs=ctx.jobs, deterministic=ctx.deterministic)
    q_fine = collision_operator(sample(fine_grid, pdf), params, jobs=ctx.jobs, deterministic=ctx.deterministic)
    q_exact = bkw_q(grid.mesh, BKW_T0)
    refinement = np.abs(q_nc.data - q_fine.data[::2, ::2, ::2])

    rule = SphereRule.product(12)
    radial = 24 if ctx.smoke else DEFAULT_RADIAL_NODES
    if ctx.smoke:
        i0 = grid.zero_index()
        points = grid.mesh[:, i0, i0]
        q_or = np.array([q_direct(pdf, p, params, radial, rule) for p in points])
        q_nc_values = q_nc.data[:, i0, i0]
        q_exact_values = q_exact[:, i0, i0]
        spectral_estimate = float(np.max(refinement[:, i0, i0]))
    else:
        points = grid.mesh.reshape(-1, 3)
        q_or = q_direct_field(pdf, grid, params, radial, rule, jobs=ctx.jobs).flat
        q_nc_values = q_nc.flat
        q_exact_values = q_exact.reshape(-1)
        spectral_estimate = float(np.max(refinement))

    peak = int(np.argmax(np.abs(q_exact_values)))
    _, quad_estimate = q_direct_with_error(pdf, points[peak], params, radial, rule)
    return oracle_checks(q_or, q_nc_values, q_exact_values, quad_estimate, spectral_estimate)


@suite("soundness")
def soundness_suite(ctx: SuiteContext) -> List[Check]:
    """The truncation bound must dominate |Q^14 - Q^g| for the BKW pdf."""
    rng = np.random.default_rng(11)
    speeds = np.linspace(0.25, 5.0, 5 if ctx.smoke else 20)
    directions = rng.normal(size=(speeds.size, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    rule = SphereRule.product(16 if ctx.smoke else 24)
    radial = 32 if ctx.smoke else 48
    pdf = lambda v: bkw_pdf(v, BKW_T0)  # noqa: E731
    bound = fit_method1(_bkw_field(VelocityGrid(L=10.0, N=48)))
    outer = CollisionParams(g_tr=14.0)
    checks = []
    for g_tr in (4.0, 6.0, 8.0):
        violations = 0
        worst = 0.0
        for s, d in zip(speeds, directions):
            shell = abs(q_direct(pdf, s * d, outer, radial, rule, g_min=g_tr))
            limit = e_tr_ub(g_tr, s, bound)
            worst = max(worst, shell / limit)
            violations += shell > limit
        checks.append(Check("soundness", f"no violations at g_tr={g_tr:g}", violations == 0, worst, 1.0, "max |dQ|/bound"))
    return checks


def cylindrical_envelope_constant(grid: VelocityGrid, k: float, dilation: float = 2.0) -> float:
    """Method I constant for the cylindrical pdf on ``grid``.

    For k above the BKW exponent 1/(2K) the product f exp(k|v|^2) still
    decays along the compressed vx and vy axes but grows along vz, so its
    largest node value sits at (0, 0, -L).
    """
    far_end = np.array([[0.0, 0.0, -grid.L]])
    return float(cylindrical_pdf(far_end, dilation)[0]) * math.exp(k * grid.L ** 2)


@suite("fits")
def fits_suite(ctx: SuiteContext) -> List[Check]:
    """Method I envelopes and the contour readings for the BKW bound."""
    grid = VelocityGrid(L=10.0, N=32 if ctx.smoke else 48)
    checks = []

    bkw = fit_method1(_bkw_field(grid))
    checks.append(Check("fits", "BKW k", abs(bkw.k - 0.5) <= 1e-3, bkw.k, 0.5))
    checks.append(Check("fits", "BKW c", 0.1 / 1.2 <= bkw.c <= 0.1 * 1.2, bkw.c, 0.1))

    cyl = fit_method1(sample(grid, cylindrical_pdf))
    checks.append(Check("fits", "cylindrical k", abs(cyl.k - 1.0) <= 0.05, cyl.k, 1.0, "k = 3/(2E) with E = 1.5"))
    envelope = cylindrical_envelope_constant(grid, cyl.k)
    checks.append(Check("fits", "cylindrical c", envelope / 3 <= cyl.c <= envelope * 3, cyl.c, envelope,
                        "f exp(k|v|^2) at the far end of the vz axis"))

    mix = fit_method1(sample(grid, lambda v: mixture_pdf(v, MIXTURE_EXAMPLE_1)))
    checks.append(Check("fits", "mixture k", abs(mix.k - 0.32) <= 0.05 * 0.32, mix.k, 0.32))
    checks.append(Check("fits", "mixture c", 1.1 / 3 <= mix.c <= 1.1 * 3, mix.c, 1.1))

    # Method II contours sit a fraction of a unit in g_tr away from Method I
    bkw_tight = fit_method2(_bkw_field(grid))
    speeds = np.arange(1.0, 6.01, 0.5)
    gtrs = np.arange(1.0, 14.01, 0.125)
    loose_levels = contour_table(speeds, gtrs, bkw, jobs=ctx.jobs).level_crossing(-1.0)
    tight_levels = contour_table(speeds, gtrs, bkw_tight, jobs=ctx.jobs).level_crossing(-1.0)
    shift = float(np.nanmedian(np.abs(loose_levels - tight_levels)))
    checks.append(Check("fits", "Method I vs II contour shift at E_rel=0.1", CONTOUR_SHIFT[0] <= shift <= CONTOUR_SHIFT[1],
                        shift, CONTOUR_SHIFT[1], f"window {CONTOUR_SHIFT}"))

    reference = MaxwellBound(c=0.1, k=0.5)
    for g_tr, v_max in ((6.0, 4.0), (8.0, 6.0)):
        speeds = np.arange(0.1, v_max + 1e-9, 0.1)
        worst = max(e_rel(g_tr, v, reference) for v in speeds)
        checks.append(Check("fits", f"E_rel < 0.1 for v <= {v_max:g} at g_tr={g_tr:g}", worst < 0.1, worst, 0.1))
    return checks


def asymptotic_gaps(speeds: Iterable[float], offset: float, bound: MaxwellBound) -> np.ndarray:
    """|E_rel - asymptotic| / E_rel at g_tr = v + offset."""
    gaps = []
    for v in speeds:
        exact = e_rel(v + offset, v, bound)
        gaps.append(abs(exact - e_rel_asymptotic(v + offset, v, bound)) / exact)
    return np.array(gaps)


@suite("asymptotics")
def asymptotics_suite(ctx: SuiteContext) -> List[Check]:
    bound = MaxwellBound(c=0.1, k=0.5)
    speeds = np.linspace(3.0, 8.0, 10 if ctx.smoke else 50)
    checks = []
    for relation, (offset, tol) in (("<=", ASYMPTOTIC_BELOW), (">=", ASYMPTOTIC_ABOVE)):
        worst = float(asymptotic_gaps(speeds, offset, bound).max())
        checks.append(Check("asymptotics", f"g_tr {relation} v {offset:+g} within {tol:.0%}", worst <= tol, worst, tol))
    return checks


def _relative_drift(log: np.ndarray) -> float:
    invariants = log[:, [1, 2, 3, 4, 5]]
    scale = np.maximum(np.abs(invariants[0]), 1.0)
    return float(np.max(np.abs(invariants - invariants[0]) / scale))


@suite("conservation")
def conservation_suite(ctx: SuiteContext) -> List[Check]:
    """BKW evolution with projection: invariants and agreement with the exact pdf."""
    if ctx.smoke:
        grid, g_tr, t_final, tol = VelocityGrid(L=8.0, N=32), 8.0, 6.0, 1e-4
    else:
        grid, g_tr, t_final, tol = VelocityGrid(L=10.0, N=48), 8.0, 9.0, 0.2
    scenario = build_scenario("bkw", {"t": BKW_T0})
    options = EvolutionOptions(integrator="euler", jobs=ctx.jobs, deterministic=ctx.deterministic)
    result = run_evolution(scenario, grid, CollisionParams(g_tr=g_tr), BKW_T0, t_final, 0.05, options)
    drift = _relative_drift(result.moment_log)
    _, values, reference = _slice_error(result.final, lambda v: bkw_pdf(v, t_final))
    if ctx.smoke:
        err = float(np.max(np.abs(values - reference)))
        agreement = Check("conservation", f"pdf at t={t_final:g}", err <= tol, err, tol, "absolute")
    else:
        resolved = reference >= 1e-7
        err = float(np.max(np.abs(values[resolved] - reference[resolved]) / reference[resolved]))
        agreement = Check("conservation", f"pdf at t={t_final:g} down to 1e-7", err <= tol, err, tol, "relative")
    return [Check("conservation", "invariant drift", drift <= 1e-12, drift, 1e-12), agreement]


@suite("mixture")
def mixture_suite(ctx: SuiteContext) -> List[Check]:
    """Two-beam mixture relaxing to the Maxwellian with its invariants."""
    if ctx.smoke:
        grid, g_tr, t_final, dt = VelocityGrid(L=8.0, N=16), 4.0, 2.0, 0.25
    else:
        grid, g_tr, t_final, dt = VelocityGrid(L=8.0, N=32), 8.0, 15.0, 0.125
    scenario = build_scenario("mixture1")
    f0 = materialize(scenario, grid)
    start = moments(f0)
    equilibrium = sample(grid, matched_maxwellian(start.mass, start.momentum, start.energy))

    options = EvolutionOptions(integrator="ab4", jobs=ctx.jobs, deterministic=ctx.deterministic)
    result = run_evolution(f0, grid, CollisionParams(g_tr=g_tr), 0.0, t_final, dt, options)
    _, final_slice, _ = axis_slice(result.final, 0)
    _, eq_slice, _ = axis_slice(equilibrium, 0)
    _, initial_slice, _ = axis_slice(f0, 0)
    gap = float(np.max(np.abs(final_slice - eq_slice)))
    checks = [Check("mixture", "invariant drift", _relative_drift(result.moment_log) <= 1e-12, _relative_drift(result.moment_log), 1e-12)]
    if ctx.smoke:
        initial_gap = float(np.max(np.abs(initial_slice - eq_slice)))
        checks.append(Check("mixture", "approaches equilibrium", gap < initial_gap, gap, initial_gap))
    else:
        checks.append(Check("mixture", f"axis gap to equilibrium at t={t_final:g}", gap <= 1e-4, gap, 1e-4))
    return checks


@suite("plasma")
def plasma_suite(ctx: SuiteContext) -> List[Check]:
    """Electron-gun source with wall loss."""
    checks = []

    # zero coefficients must leave the collision trajectory untouched
    small = VelocityGrid(L=8.0, N=16)
    params = CollisionParams(g_tr=6.0)
    options = EvolutionOptions(integrator="ab4", jobs=ctx.jobs, deterministic=True, output_times=(0.12,))
    f0 = sample(small, maxwellian_pdf)
    pure = run_evolution(f0, small, params, 0.0, 0.12, 0.02, options)
    inert = run_evolution(f0, small, params, 0.0, 0.12, 0.02, options, plasma=PlasmaParams(c_S=0.0, c_L=0.0))
    identical = bool(np.array_equal(pure.final.data, inert.final.data))
    checks.append(Check("plasma", "c_S = c_L = 0 matches collisions only", identical, float(identical), 1.0))

    if ctx.smoke:
        grid, g_tr, t_final = VelocityGrid(L=8.0, N=16), 6.0, 1.0
    else:
        grid, g_tr, t_final = VelocityGrid(L=10.0, N=32), 8.0, 5.0
    scenario = build_scenario("plasma")
    run_options = EvolutionOptions(integrator="ab4", jobs=ctx.jobs, deterministic=ctx.deterministic)
    result = run_evolution(scenario, grid, CollisionParams(g_tr=g_tr), 0.0, t_final, 0.02, run_options)
    log = result.moment_log

    final = result.final
    i0 = grid.zero_index()
    right = final.data[int(np.argmin(np.abs(grid.nodes_v - 3.0))), i0, i0]
    left = final.data[int(np.argmin(np.abs(grid.nodes_v + 3.0))), i0, i0]
    ratio = right / max(abs(left), 1e-300)
    checks.append(Check("plasma", "tail asymmetry f(3)/f(-3)", ratio > 2.0, float(ratio), 2.0))
    checks.append(Check("plasma", "x-momentum increases", bool(np.all(np.diff(log[:, 2]) > 0)), float(log[-1, 2]), float(log[0, 2])))
    if not ctx.smoke:
        # the wall empties the vx < -2 tail faster than the gun refills it, so
        # density and energy first dip; from the dip on they must rise
        for column, label in ((1, "density"), (5, "energy")):
            series = log[:, column]
            passed, low = recovers_monotonically(series)
            checks.append(
                Check("plasma", f"{label} increases after its dip", passed, float(series[-1]), float(series[low]),
                      f"start {series[0]:.6g}, dip {series[low]:.6g} at t={log[low, 0]:.3g}, end {series[-1]:.6g}")
            )
    return checks


def recovers_monotonically(series) -> Tuple[bool, int]:
    """Whether ``series`` is non-decreasing from its minimum on, with the
    minimum strictly before the last entry; also returns the minimum's index."""
    series = np.asarray(series, dtype=np.float64)
    low = int(np.argmin(series))
    passed = low < series.size - 1 and bool(np.all(np.diff(series[low:]) >= 0))
    return passed, low


def run_suites(names: Iterable[str], smoke: bool = False, jobs: Optional[int] = None, deterministic: bool = True) -> List[Check]:
    """Run the named suites; an exception inside a suite becomes a failed check."""
    ctx = SuiteContext(smoke=smoke, jobs=jobs, deterministic=deterministic)
    checks = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"Unknown suite '{name}'; available: {', '.join(SUITES)}")
        start = time.perf_counter()
        logger.info(f"Running suite {name}{' (smoke)' if smoke else ''}")
        try:
            checks.extend(SUITES[name](ctx))
        except SpectralBoltzmannError as e:
            logger.error(f"Suite {name} failed: {e}")
            checks.append(Check(name, "suite completed", False, float("nan"), float("nan"), str(e)))
        logger.info(f"Suite {name} finished in {time.perf_counter() - start:.1f}s")
    return checks
