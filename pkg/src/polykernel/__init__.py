"""Exact polynomial integration, Handelman certificates, polynomial optimization
bounds, knapsack denumerant coefficients and dancing-links exact cover."""

from .exact_arith import Rational, TruncatedSeries, bernoulli, faulhaber, power_sum
from .polyhedra import DomainError, Polytope, SimplicialCone
from .polynomial import SparsePolynomial, parse_polynomial

__version__ = "0.1.0"

__all__ = [
    "DomainError", "Polytope", "Rational", "SimplicialCone", "SparsePolynomial",
    "TruncatedSeries", "bernoulli", "faulhaber", "parse_polynomial", "power_sum",
]
