"""
Time integration

Integrates df/dt = Q^tr(f, f) (+ source - loss) with forward Euler, classical
RK4 or the four-step Adams-Bashforth scheme bootstrapped by RK4. The
conservation projection, when enabled, acts on the collision term of every
right-hand-side evaluation and never on the plasma terms.
"""

import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Deque, List, Optional, Sequence, Union

import numpy as np

from .ckernel import CollisionParams
from .collide import ConservationBasis, collide
from .errors import EvolutionError, ParameterError
from .moments import MOMENT_COLUMNS, moment_row
from .scenarios import PlasmaParams, Scenario, loss_profile, materialize, source_profile
from .vgrid import RealField, VelocityGrid

logger = logging.getLogger(__name__)

AB4_COEFFICIENTS = (55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0)
HISTORY_LENGTH = 4
INTEGRATORS = ("euler", "rk4", "ab4")

Rhs = Callable[[RealField], np.ndarray]


class CollisionRHS:
    """Right-hand side Q^tr(f, f) + c_S S(v) - c_L L(v) f.

    Args:
        grid (VelocityGrid): Grid the pdf lives on
        params (CollisionParams): Collision parameters
        collisions (bool): Include the collision operator
        project (bool): Apply the conservation projection to the collision term
        plasma (Optional[PlasmaParams]): Source and loss terms, if any
        jobs (Optional[int]): Thread count for the convolution
        deterministic (bool): Forbid reassociation in the convolution
    """

    def __init__(
        self,
        grid: VelocityGrid,
        params: CollisionParams,
        collisions: bool = True,
        project: bool = True,
        plasma: Optional[PlasmaParams] = None,
        jobs: Optional[int] = None,
        deterministic: bool = True,
    ):
        self.grid = grid
        self.params = params
        self.collisions = collisions
        self.project = project
        self.plasma = plasma
        self.jobs = jobs
        self.deterministic = deterministic
        self.basis = ConservationBasis.build(grid) if (collisions and project) else None
        self.evaluations = 0
        if plasma is not None:
            self._source = plasma.c_S * source_profile(grid.mesh, plasma)
            self._loss_rate = plasma.c_L * loss_profile(grid.mesh, plasma)

    def __call__(self, f: RealField) -> np.ndarray:
        self.evaluations += 1
        rhs = np.zeros(self.grid.shape)
        if self.collisions:
            result = collide(f, self.params, basis=self.basis, jobs=self.jobs, deterministic=self.deterministic)
            rhs = np.array(result.output.data)
        if self.plasma is not None:
            rhs = rhs + (self._source - self._loss_rate * f.data)
        return rhs


@dataclass
class EvolutionState:
    """Integrator state.

    ``history`` holds the right-hand sides evaluated at the start of the most
    recent steps, newest last; it has min(step_index, 4) entries.
    """
    f: RealField
    t: float
    dt: float
    rhs: Rhs
    step_index: int = 0
    history: Deque[np.ndarray] = field(default_factory=lambda: deque(maxlen=HISTORY_LENGTH))

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")


def _advance(state: EvolutionState, data: np.ndarray, evaluated: np.ndarray) -> EvolutionState:
    step = state.step_index + 1
    if not np.all(np.isfinite(data)):
        raise EvolutionError("Non-finite pdf values", step)
    history = deque(state.history, maxlen=HISTORY_LENGTH)
    history.append(evaluated)
    return replace(
        state,
        f=RealField(state.f.grid, data),
        t=state.t + state.dt,
        step_index=step,
        history=history,
    )


def _evaluate(state: EvolutionState, data: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(data)):
        raise EvolutionError("Non-finite intermediate stage", state.step_index + 1)
    values = state.rhs(RealField(state.f.grid, data))
    if not np.all(np.isfinite(values)):
        raise EvolutionError("Non-finite right-hand side", state.step_index + 1)
    return values


def step_euler(state: EvolutionState) -> EvolutionState:
    """f <- f + dt * RHS(f)."""
    k1 = _evaluate(state, state.f.data)
    return _advance(state, state.f.data + state.dt * k1, k1)


def step_rk4(state: EvolutionState) -> EvolutionState:
    f0 = state.f.data
    dt = state.dt
    k1 = _evaluate(state, f0)
    k2 = _evaluate(state, f0 + 0.5 * dt * k1)
    k3 = _evaluate(state, f0 + 0.5 * dt * k2)
    k4 = _evaluate(state, f0 + dt * k3)
    return _advance(state, f0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1)


def step_ab4(state: EvolutionState) -> EvolutionState:
    """f_{i+4} = f_{i+3} + dt/24 [55 Q_{i+3} - 59 Q_{i+2} + 37 Q_{i+1} - 9 Q_i].

    Raises:
        ParameterError: If fewer than four previous right-hand sides are stored
    """
    if len(state.history) < HISTORY_LENGTH:
        raise ParameterError(
            f"Adams-Bashforth needs {HISTORY_LENGTH} stored right-hand sides, have {len(state.history)}; "
            "bootstrap with step_rk4"
        )
    current = _evaluate(state, state.f.data)
    q3, q2, q1 = state.history[-1], state.history[-2], state.history[-3]
    b0, b1, b2, b3 = AB4_COEFFICIENTS
    update = b0 * current + b1 * q3 + b2 * q2 + b3 * q1
    return _advance(state, state.f.data + state.dt * update, current)


STEPPERS = {"euler": step_euler, "rk4": step_rk4, "ab4": step_ab4}


@dataclass
class EvolutionOptions:
    """Run options.

    Args:
        integrator (str): "euler", "rk4", or "ab4" (RK4 for the first four steps)
        output_times (Sequence[float]): Times at which fields are stored; the
            final time when empty
        project (bool): Conservation projection on the collision term
        collisions (bool): Include the collision operator
        plasma (bool): Include the scenario's source and loss terms
        negativity_abort (Optional[float]): Abort when min f < -threshold
        jobs (Optional[int]): Thread count for the convolution
        deterministic (bool): Reproducible reductions
    """
    integrator: str = "ab4"
    output_times: Sequence[float] = ()
    project: bool = True
    collisions: bool = True
    plasma: bool = True
    negativity_abort: Optional[float] = None
    jobs: Optional[int] = None
    deterministic: bool = True

    def __post_init__(self):
        if self.integrator not in INTEGRATORS:
            raise ParameterError(f"Unknown integrator '{self.integrator}', expected one of {INTEGRATORS}")


@dataclass
class EvolutionResult:
    times: List[float]
    fields: List[RealField]
    moment_log: np.ndarray
    negativity: List[tuple]
    wall_time: float
    rhs_evaluations: int
    columns: tuple = MOMENT_COLUMNS

    def field_at(self, t: float) -> RealField:
        for ti, f in zip(self.times, self.fields):
            if math.isclose(ti, t, rel_tol=1e-9, abs_tol=1e-9):
                return f
        raise KeyError(f"No stored field at t={t}")

    @property
    def final(self) -> RealField:
        return self.fields[-1]


def _step_count(t0: float, t_final: float, dt: float) -> int:
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if t_final < t0:
        raise ParameterError(f"t_final={t_final} precedes t0={t0}")
    steps = int(round((t_final - t0) / dt))
    if abs(steps * dt - (t_final - t0)) > 1e-9 * max(1.0, abs(t_final)):
        raise ParameterError(f"dt={dt} does not divide the interval [{t0}, {t_final}]")
    return steps


def _output_steps(times: Sequence[float], t0: float, dt: float, steps: int) -> dict:
    indices = {}
    for t in times:
        i = int(round((t - t0) / dt))
        if not 0 <= i <= steps or abs(t0 + i * dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ParameterError(f"Output time {t} is not a step of dt={dt} from t0={t0}")
        indices[i] = float(t)
    return indices or {steps: t0 + steps * dt}


def run_evolution(
    initial: Union[Scenario, RealField],
    grid: VelocityGrid,
    params: CollisionParams,
    t0: float,
    t_final: float,
    dt: float,
    options: Optional[EvolutionOptions] = None,
    plasma: Optional[PlasmaParams] = None,
) -> EvolutionResult:
    """Evolve a scenario or a sampled pdf from t0 to t_final.

    Moments are logged every step and fields stored at the requested output
    times. Negative pdf values are logged with the most negative value and
    abort the run only beyond ``options.negativity_abort``.

    Raises:
        EvolutionError: On non-finite values, or negativity beyond the threshold
    """
    options = options or EvolutionOptions()
    if isinstance(initial, Scenario):
        f0 = materialize(initial, grid)
        if plasma is None and options.plasma:
            plasma = initial.plasma
    else:
        f0 = initial
    if f0.grid != grid:
        raise ParameterError(f"Initial field grid {f0.grid} does not match {grid}")
    if not options.plasma:
        plasma = None

    steps = _step_count(t0, t_final, dt)
    outputs = _output_steps(options.output_times, t0, dt, steps)
    rhs = CollisionRHS(
        grid,
        params,
        collisions=options.collisions,
        project=options.project,
        plasma=plasma,
        jobs=options.jobs,
        deterministic=options.deterministic,
    )
    state = EvolutionState(f=f0, t=t0, dt=dt, rhs=rhs)

    times, fields = [], []
    log = [moment_row(t0, f0)]
    negativity = []
    if 0 in outputs:
        times.append(outputs[0])
        fields.append(f0)

    logger.info(f"Evolving N={grid.N} from t={t0} to t={t_final} in {steps} {options.integrator} steps of dt={dt}")
    start = time.perf_counter()
    for i in range(1, steps + 1):
        if options.integrator == "ab4" and len(state.history) < HISTORY_LENGTH:
            stepper = step_rk4
        else:
            stepper = STEPPERS[options.integrator]
        state = stepper(state)
        t = t0 + i * dt
        state.t = t

        lowest = float(np.min(state.f.data))
        if lowest < 0:
            negativity.append((t, lowest))
            logger.warning(f"Negative pdf at step {i} (t={t:.6g}): min f = {lowest:.3e}")
            if options.negativity_abort is not None and lowest < -options.negativity_abort:
                raise EvolutionError(f"pdf fell to {lowest:.3e}, below -{options.negativity_abort:g}", i)

        log.append(moment_row(t, state.f))
        if i in outputs:
            times.append(outputs[i])
            fields.append(state.f)
        logger.info(f"Step {i}/{steps} t={t:.6g} mass={log[-1][1]:.15g} energy={log[-1][5]:.15g}")

    elapsed = time.perf_counter() - start
    logger.info(f"Evolution finished in {elapsed:.1f}s with {rhs.evaluations} right-hand-side evaluations")
    return EvolutionResult(
        times=times,
        fields=fields,
        moment_log=np.array(log),
        negativity=negativity,
        wall_time=elapsed,
        rhs_evaluations=rhs.evaluations,
    )
