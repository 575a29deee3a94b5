"""Exact computations in the homology of configuration spaces of R^n."""
from confstab.algebra import (
    Bidegree,
    Case,
    DomainError,
    Generator,
    GeneratorSet,
    Monomial,
    Polynomial,
    QValue,
    apply_Q,
    apply_xi,
    bidegree_of,
    multiply,
)

__all__ = [
    "Bidegree",
    "Case",
    "DomainError",
    "Generator",
    "GeneratorSet",
    "Monomial",
    "Polynomial",
    "QValue",
    "apply_Q",
    "apply_xi",
    "bidegree_of",
    "multiply",
]

__version__ = "0.1.0"
