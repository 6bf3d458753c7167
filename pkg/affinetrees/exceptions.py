"""Exceptions raised by affinetrees.

Everything derives from `AffineTreesError`, so callers (the CLI in particular)
can catch a single type. Most classes also derive from the builtin exception
that best describes them.
"""


class AffineTreesError(Exception):
    """Base class for all errors raised by this package."""


class ModulusMismatchError(AffineTreesError, ValueError):
    """Two operands live over different rings Z_d."""


class NonUnitError(AffineTreesError, ValueError):
    """An entry that must be a unit of Z_d is not."""


class AlphabetMismatchError(AffineTreesError, ValueError):
    """Two automorphisms act on trees of different degree."""


class LetterRangeError(AffineTreesError, ValueError):
    """A letter lies outside the alphabet {0, ..., d-1}."""


class WreathSyntaxError(AffineTreesError, ValueError):
    """The wreath recursion DSL could not be parsed.

    Attributes:
        line (int): 1-based line of the offending token.
        column (int): 1-based column of the offending token.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UndefinedStateError(AffineTreesError, ValueError):
    """A wreath recursion refers to a state that is never defined."""


class NotPermutationError(AffineTreesError, ValueError):
    """An output row does not permute the alphabet."""


class StateBudgetExceeded(AffineTreesError, RuntimeError):
    """A construction produced more states than the configured budget."""


class NotHomogeneousError(AffineTreesError, ValueError):
    """An operation needs a spherically homogeneous automorphism."""


class DegreeBoundError(AffineTreesError, ValueError):
    """A polynomial degree or exponent exceeds the configured bound."""


class NotInSubgroupError(AffineTreesError, ValueError):
    """A lamplighter element lies outside the index two subgroup H."""


class SimilarityPairError(AffineTreesError, ValueError):
    """The data of a similarity pair violate its preconditions."""


class AffineDetectionError(AffineTreesError, RuntimeError):
    """Affine extraction failed where it cannot fail for correct code."""
