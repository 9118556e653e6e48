"""Exact computations with Z>=0-coverings of supermanifolds.

The package works at the level of coordinate atlases with rational
coefficients: superfunction arithmetic, coverings and their functor on
morphisms, the split retract, first obstruction classes, odd-dimension-2
reconstruction, and loop coverings of Lie superalgebras.
"""

from .algebra import (
    BaseFunction,
    DerivationTable,
    Generator,
    GeneratorSet,
    Poly,
    Substitution,
    Superfunction,
    exp_derivation,
    log_automorphism,
    substitute,
)
from .atlas import Atlas, Chart, TransitionMap, atlas_from_json, check_cocycle, compose, gr_atlas, load_atlas
from .covering import (
    build_covering_atlas,
    check_injectivity,
    lift_morphism,
    lift_superfunction,
    reconstruct_odd2,
)
from .expr import parse, render
from .loop import LieSuperalgebra, LoopAlgebra, build_loop, gl, gl_matrix_realization, lift_homomorphism
from .obstruction import (
    CechCocycle,
    atiyah_cocycle_P2,
    donagi_witten_transitions,
    green_cocycle,
    omega2,
)

__version__ = "0.1.0"

__all__ = [
    "Atlas",
    "BaseFunction",
    "CechCocycle",
    "Chart",
    "DerivationTable",
    "Generator",
    "GeneratorSet",
    "LieSuperalgebra",
    "LoopAlgebra",
    "Poly",
    "Substitution",
    "Superfunction",
    "TransitionMap",
    "atiyah_cocycle_P2",
    "atlas_from_json",
    "build_covering_atlas",
    "build_loop",
    "check_cocycle",
    "check_injectivity",
    "compose",
    "donagi_witten_transitions",
    "exp_derivation",
    "gl",
    "gl_matrix_realization",
    "gr_atlas",
    "green_cocycle",
    "lift_homomorphism",
    "lift_morphism",
    "lift_superfunction",
    "load_atlas",
    "log_automorphism",
    "omega2",
    "parse",
    "reconstruct_odd2",
    "render",
    "substitute",
]
