"""Desk-scale numerics for scalar-curvature band-width inequalities."""

from scband.errors import DomainError, NumericalFailure

__version__ = "0.1.0"

__all__ = ["DomainError", "NumericalFailure", "__version__"]
