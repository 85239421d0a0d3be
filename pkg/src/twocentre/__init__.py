"""Planar three-body / two-centre toolkit: coordinates, integrals, flows,
phase portraits, action-angle quadratures, a truncated Taylor-Fourier
normal-form engine and the Euler-integral collision-exclusion predicate."""

from .model import (MassModel, CartesianState, ChartBox, derive_reduced_masses,
                    validate_state, DomainError, SingularityError,
                    HyperbolicError, ConvergenceError, HypothesisViolation)

__all__ = [
    "MassModel", "CartesianState", "ChartBox", "derive_reduced_masses",
    "validate_state", "DomainError", "SingularityError", "HyperbolicError",
    "ConvergenceError", "HypothesisViolation",
]

__version__ = "0.1.0"
