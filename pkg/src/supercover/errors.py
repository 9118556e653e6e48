"""Exception hierarchy shared by every module of the package."""


class SupercoverError(Exception):
    """Base class for all errors raised by supercover."""


class GeneratorMismatchError(SupercoverError, ValueError):
    """Operands live over different generator sets, or a generator is unknown."""


class CutoffMismatchError(SupercoverError, ValueError):
    """Operands carry incompatible truncation levels."""


class DegenerateDenominatorError(SupercoverError, ZeroDivisionError):
    """A denominator became the zero rational function."""


class SubstitutionError(SupercoverError, ValueError):
    """A substitution violates parity, weight or completeness requirements."""


class FiltrationError(SupercoverError, ValueError):
    """An automorphism or derivation does not raise the filtration as required."""


class ParseError(SupercoverError, ValueError):
    """Syntax or semantic error in an expression, with a 1-based position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class AtlasError(SupercoverError, ValueError):
    """Malformed atlas or transition data."""


class ObstructionError(SupercoverError, ValueError):
    """Transition data inconsistent with the obstruction-class constructions."""


class LieAlgebraError(SupercoverError, ValueError):
    """Structure constants violate the Lie superalgebra axioms."""
