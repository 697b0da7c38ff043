#!/usr/bin/env python3
"""
Example usage of the spectral Boltzmann solver

This script demonstrates how to use the library programmatically: sample a
scenario, compute its collision operator, ask the advisor for g_tr and run a
short conservative evolution.
"""

import sys

import numpy as np

from spectral_boltzmann import (
    CollisionParams,
    ConservationBasis,
    EvolutionOptions,
    VelocityGrid,
    advise,
    build_scenario,
    collide,
    materialize,
    run_evolution,
)
from spectral_boltzmann.errors import SpectralBoltzmannError
from spectral_boltzmann.moments import moments
from spectral_boltzmann.scenarios import bkw_q
from spectral_boltzmann.vgrid import axis_slice


def main():
    """Main example function."""

    # Optional grid size on the command line
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 24
    if n % 2 or n < 8:
        print(f"Error: N must be even and at least 8, got {n}")
        sys.exit(1)

    try:
        grid = VelocityGrid(L=8.0, N=n)
        scenario = build_scenario("bkw")
        print(f"🌀 BKW scenario at t={scenario.t0:g} on L={grid.L:g}, N={grid.N}")
        print("=" * 50)

        # Step 1: Sample the initial pdf
        f = materialize(scenario, grid)
        start = moments(f)
        print(f"⚖️  Mass={start.mass:.12g}, energy={start.energy:.12g}")

        # Step 2: Ask the advisor for a truncation speed
        recommendation = advise(f, "I", tol=0.1, v_target=4.0)
        print(f"\n🎯 Envelope k={recommendation.bound.k:.4f}, c={recommendation.bound.c:.4g}")
        print(f"   Recommended g_tr = {recommendation.g_tr:.3f}")

        # Step 3: Collision operator against the analytic BKW derivative
        params = CollisionParams(g_tr=recommendation.g_tr)
        print("\n🔄 Computing the collision operator...")
        result = collide(f, params, basis=ConservationBasis.build(grid))
        coords, values, fixed = axis_slice(result.output, 0)
        points = np.column_stack([coords, np.full_like(coords, fixed[0]), np.full_like(coords, fixed[1])])
        error = float(np.max(np.abs(values - bkw_q(points, scenario.t0))))
        print(f"   |Q|_inf = {result.q.sup_norm():.3e}, axis error vs exact = {error:.3e}")
        print(f"   Done in {result.wall_time:.2f}s")

        # Step 4: A short evolution with the conservation projection
        print("\n⏱️  Evolving to t=6.5 with AB4...")
        options = EvolutionOptions(integrator="ab4", output_times=(6.0, 6.5))
        run = run_evolution(scenario, grid, params, scenario.t0, 6.5, 0.05, options)
        for t, field in zip(run.times, run.fields):
            m = moments(field)
            print(f"  t={t:.2f}  mass={m.mass:.15g}  energy={m.energy:.15g}")
        print(f"\n✅ {run.rhs_evaluations} collision evaluations in {run.wall_time:.1f}s")

    except SpectralBoltzmannError as e:
        print(f"❌ Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
