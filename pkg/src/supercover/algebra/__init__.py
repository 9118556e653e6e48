"""Exact arithmetic for supercommutative algebras with weighted generators."""

from .base import BaseFunction, Poly
from .substitution import (
    DerivationTable,
    Substitution,
    apply_log_series,
    check_aut2,
    compose,
    exp_derivation,
    lambda2,
    log_automorphism,
    rename_generators,
    substitute,
)
from .superfunction import EVEN, ODD, Generator, GeneratorSet, Superfunction

__all__ = [
    "BaseFunction",
    "DerivationTable",
    "EVEN",
    "Generator",
    "GeneratorSet",
    "ODD",
    "Poly",
    "Substitution",
    "Superfunction",
    "apply_log_series",
    "check_aut2",
    "compose",
    "exp_derivation",
    "lambda2",
    "log_automorphism",
    "rename_generators",
    "substitute",
]
