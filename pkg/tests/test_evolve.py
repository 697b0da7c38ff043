import math

import numpy as np
import pytest

from spectral_boltzmann.ckernel import CollisionParams
from spectral_boltzmann.errors import EvolutionError, ParameterError
from spectral_boltzmann.evolve import (
    AB4_COEFFICIENTS,
    HISTORY_LENGTH,
    CollisionRHS,
    EvolutionOptions,
    EvolutionState,
    run_evolution,
    step_ab4,
    step_euler,
    step_rk4,
)
from spectral_boltzmann.moments import MOMENT_COLUMNS
from spectral_boltzmann.scenarios import PlasmaParams, build_scenario, loss_profile, maxwellian_pdf, source_profile
from spectral_boltzmann.vgrid import RealField, VelocityGrid, sample


def _decay_state(dt):
    grid = VelocityGrid(L=1.0, N=8)
    return EvolutionState(f=RealField(grid, np.ones(grid.shape)), t=0.0, dt=dt, rhs=lambda f: -f.data)


def _integrate_decay(dt, t_final):
    state = _decay_state(dt)
    for _ in range(int(round(t_final / dt))):
        stepper = step_rk4 if len(state.history) < HISTORY_LENGTH else step_ab4
        state = stepper(state)
    return state


def test_ab4_coefficients_are_consistent():
    assert sum(AB4_COEFFICIENTS) == pytest.approx(1.0)


def test_euler_step():
    state = step_euler(_decay_state(0.1))
    np.testing.assert_allclose(state.f.data, 0.9)
    assert state.t == pytest.approx(0.1)
    assert state.step_index == 1
    assert len(state.history) == 1


def test_rk4_step_matches_taylor_polynomial():
    dt = 0.1
    state = step_rk4(_decay_state(dt))
    expected = 1.0 - dt + dt ** 2 / 2.0 - dt ** 3 / 6.0 + dt ** 4 / 24.0
    np.testing.assert_allclose(state.f.data, expected, rtol=1e-14)


def test_ab4_needs_four_stored_right_hand_sides():
    state = _decay_state(0.1)
    for _ in range(3):
        state = step_rk4(state)
    with pytest.raises(ParameterError):
        step_ab4(state)


def test_history_keeps_the_last_four_evaluations():
    state = _integrate_decay(0.1, 0.7)
    assert len(state.history) == HISTORY_LENGTH
    assert state.step_index == 7
    # newest entry is the right-hand side at the start of the last step
    np.testing.assert_allclose(state.history[-1], -math.exp(-0.6), rtol=1e-4)


def test_multistep_scheme_is_fourth_order():
    coarse = abs(_integrate_decay(0.1, 2.0).f.data[0, 0, 0] - math.exp(-2.0))
    fine = abs(_integrate_decay(0.05, 2.0).f.data[0, 0, 0] - math.exp(-2.0))
    assert coarse < 2e-4 * math.exp(-2.0)
    assert coarse / fine > 10.0


def test_state_rejects_non_positive_step():
    with pytest.raises(ParameterError):
        _decay_state(0.0)


def test_non_finite_values_abort():
    grid = VelocityGrid(L=1.0, N=8)
    state = EvolutionState(f=RealField(grid, np.ones(grid.shape)), t=0.0, dt=1.0, rhs=lambda f: np.full(grid.shape, np.inf))
    with pytest.raises(EvolutionError) as info:
        step_euler(state)
    assert info.value.step_index == 1


def test_plasma_terms_without_collisions(small_grid, maxwell):
    plasma = PlasmaParams()
    rhs = CollisionRHS(small_grid, maxwell, collisions=False, plasma=plasma)
    f = sample(small_grid, maxwellian_pdf)
    expected = plasma.c_S * source_profile(small_grid.mesh, plasma) - plasma.c_L * loss_profile(small_grid.mesh, plasma) * f.data
    np.testing.assert_allclose(rhs(f), expected, rtol=1e-15)
    assert rhs.evaluations == 1
    assert rhs.basis is None


def test_frozen_pdf_without_collisions(small_grid, maxwell):
    f0 = sample(small_grid, maxwellian_pdf)
    options = EvolutionOptions(integrator="euler", collisions=False, output_times=[0.0, 0.5, 1.0])
    result = run_evolution(f0, small_grid, maxwell, 0.0, 1.0, 0.25, options)
    assert result.times == [0.0, 0.5, 1.0]
    np.testing.assert_array_equal(result.final.data, f0.data)
    assert result.moment_log.shape == (5, len(MOMENT_COLUMNS))
    assert result.rhs_evaluations == 4
    assert result.field_at(0.5) is result.fields[1]
    with pytest.raises(KeyError):
        result.field_at(0.3)


def test_negativity_is_logged_and_can_abort(small_grid, maxwell):
    data = np.array(sample(small_grid, maxwellian_pdf).data)
    data[0, 0, 0] = -1e-3
    f0 = RealField(small_grid, data)
    result = run_evolution(f0, small_grid, maxwell, 0.0, 0.5, 0.25, EvolutionOptions(integrator="rk4", collisions=False))
    assert [t for t, _ in result.negativity] == [0.25, 0.5]
    assert result.negativity[0][1] == pytest.approx(-1e-3)
    with pytest.raises(EvolutionError):
        run_evolution(
            f0, small_grid, maxwell, 0.0, 0.5, 0.25,
            EvolutionOptions(integrator="rk4", collisions=False, negativity_abort=1e-4),
        )


def test_schedule_validation(small_grid, maxwell):
    f0 = sample(small_grid, maxwellian_pdf)
    options = EvolutionOptions(collisions=False)
    with pytest.raises(ParameterError):
        run_evolution(f0, small_grid, maxwell, 0.0, 1.0, 0.3, options)
    with pytest.raises(ParameterError):
        run_evolution(f0, small_grid, maxwell, 1.0, 0.0, 0.25, options)
    with pytest.raises(ParameterError):
        run_evolution(f0, small_grid, maxwell, 0.0, 1.0, 0.25, EvolutionOptions(collisions=False, output_times=[0.1]))
    with pytest.raises(ParameterError):
        run_evolution(f0, VelocityGrid(L=4.0, N=16), maxwell, 0.0, 1.0, 0.25, options)
    with pytest.raises(ParameterError):
        EvolutionOptions(integrator="leapfrog")


def test_projected_collisions_conserve_invariants(small_grid):
    scenario = build_scenario("bkw")
    params = CollisionParams(g_tr=6.0)
    options = EvolutionOptions(integrator="euler", output_times=[scenario.t0 + 0.5])
    result = run_evolution(scenario, small_grid, params, scenario.t0, scenario.t0 + 0.5, 0.25, options)
    log = result.moment_log
    for column in (1, 5):
        assert np.max(np.abs(log[:, column] - log[0, column])) <= 1e-12 * abs(log[0, column])
    np.testing.assert_allclose(log[:, 2:5], log[0, 2:5], atol=1e-12)
    assert result.rhs_evaluations == 2


def test_plasma_scenario_attaches_its_terms(small_grid):
    scenario = build_scenario("plasma", {"c_S": 0.0, "c_L": 0.0})
    params = CollisionParams(g_tr=6.0)
    with_terms = run_evolution(scenario, small_grid, params, 0.0, 0.25, 0.25, EvolutionOptions(integrator="euler", collisions=False))
    np.testing.assert_array_equal(with_terms.final.data, sample(small_grid, maxwellian_pdf).data)

    driven = build_scenario("plasma")
    result = run_evolution(driven, small_grid, params, 0.0, 0.25, 0.25, EvolutionOptions(integrator="euler", collisions=False))
    assert result.moment_log[-1, 1] != result.moment_log[0, 1]
    skipped = run_evolution(
        driven, small_grid, params, 0.0, 0.25, 0.25, EvolutionOptions(integrator="euler", collisions=False, plasma=False)
    )
    np.testing.assert_array_equal(skipped.final.data, sample(small_grid, maxwellian_pdf).data)
