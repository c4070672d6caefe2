"""Fully spectral solver for the linear BGK equation with polynomial confinement.

Velocity is discretized on orthonormal Hermite polynomials, space on the
orthonormal polynomials of the weight exp(-phi) for an even polynomial
potential phi, and time by implicit Euler.  The discretization preserves the
conservation laws of the continuous model exactly and keeps the norm of the
perturbation non-increasing step by step.
"""

from .conjecture_lab import KNReport, estimate_kn, kn_sweep
from .diagnostics import (ConservedSet, DecayFit, DiagnosticsSeries,
                          FunctionalBasis, build_functional_basis,
                          conserved_functionals, fit_decay_rate, l2_norm,
                          per_mode_norms, snapshot)
from .errors import (ConfigError, IntegrationFailureError,
                     InvalidPotentialError, PrecisionFailureError,
                     SolverConsistencyError)
from .operators import (BandedOperator, DerivCouplings,
                        adjoint_derivative_matrix, build_deriv_couplings,
                        build_omega_matrix, build_phi_matrix,
                        derivative_matrix, jacobi_matrix)
from .orthopoly import (QuadratureRule, RecurrenceTable, build_quadrature,
                        build_recurrence, eval_poly, eval_poly_all,
                        eval_poly_and_deriv_all, hermite_eval_all,
                        inner_products, magnus_constant)
from .potential import (NormalizedPotential, RawPotential, normalize_potential,
                        tail_cutoff)
from .scheme import (Generator, SpectralState, SteppingPlan,
                     assemble_generator, make_stepping_plan,
                     project_initial_condition, purge_equilibrium_components,
                     step)

__version__ = "0.1.0"

__all__ = [
    "BandedOperator", "ConfigError", "ConservedSet", "DecayFit",
    "DerivCouplings", "DiagnosticsSeries", "FunctionalBasis", "Generator",
    "IntegrationFailureError", "InvalidPotentialError", "KNReport",
    "NormalizedPotential", "PrecisionFailureError", "QuadratureRule",
    "RawPotential", "RecurrenceTable", "SolverConsistencyError",
    "SpectralState", "SteppingPlan", "adjoint_derivative_matrix",
    "assemble_generator", "build_deriv_couplings", "build_functional_basis",
    "build_omega_matrix", "build_phi_matrix", "build_quadrature",
    "build_recurrence", "conserved_functionals", "derivative_matrix",
    "estimate_kn", "eval_poly", "eval_poly_all", "eval_poly_and_deriv_all",
    "fit_decay_rate", "hermite_eval_all", "inner_products", "jacobi_matrix",
    "kn_sweep", "l2_norm", "magnus_constant", "make_stepping_plan",
    "normalize_potential", "per_mode_norms", "project_initial_condition",
    "purge_equilibrium_components", "snapshot", "step", "tail_cutoff",
]
