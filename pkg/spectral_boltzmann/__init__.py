"""
Spectral Boltzmann Solver

Spectral-Lagrangian solver for the space-homogeneous Boltzmann equation with
Maxwell molecules, plus an advisor for the truncation speed g_tr.
"""

__version__ = "0.1.0"

from .advisor import MaxwellBound, Recommendation, advise, e_rel, fit_method1, fit_method2, recommend_gtr
from .ckernel import CollisionParams, ghat_maxwell, ghat_quadrature
from .collide import ConservationBasis, collide, collision_operator, conserve_project
from .errors import SpectralBoltzmannError
from .evolve import EvolutionOptions, run_evolution
from .oracle import SphereRule, q_direct
from .scenarios import build_scenario, materialize
from .vgrid import RealField, SpectralField, VelocityGrid, forward_transform, inverse_transform

__all__ = [
    "__version__",
    "CollisionParams",
    "ConservationBasis",
    "EvolutionOptions",
    "MaxwellBound",
    "RealField",
    "Recommendation",
    "SpectralBoltzmannError",
    "SpectralField",
    "SphereRule",
    "VelocityGrid",
    "advise",
    "build_scenario",
    "collide",
    "collision_operator",
    "conserve_project",
    "e_rel",
    "fit_method1",
    "fit_method2",
    "forward_transform",
    "ghat_maxwell",
    "ghat_quadrature",
    "inverse_transform",
    "materialize",
    "q_direct",
    "recommend_gtr",
    "run_evolution",
]
