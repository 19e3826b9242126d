"""Exception hierarchy.

Every error carries the CLI exit code of its category:

    2  parse        3  validation     4  infeasible / structural
    5  budget       6  numerical breakdown
"""


class KemenyError(Exception):
    exit_code = 1


class ParseError(KemenyError, ValueError):
    exit_code = 2


class ValidationError(KemenyError, ValueError):
    exit_code = 3


class StructureError(KemenyError):
    exit_code = 4


class BudgetExceeded(KemenyError):
    exit_code = 5


class NumericalError(KemenyError, ArithmeticError):
    exit_code = 6


# stochastic matrices
class NotSquare(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class RowSumViolation(ValidationError):
    pass


# partial matrices
class NegativeSpecified(ValidationError):
    pass


class RowSumExceedsOne(ValidationError):
    pass


class FullySpecifiedSumNotOne(ValidationError):
    pass


class SingleFreeCellInRow(ValidationError):
    pass


class RowSumOneWithFreeCells(ValidationError):
    pass


class MissingAssignment(ValidationError):
    pass


class NegativeAssignment(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    """The partial matrix does not have the shape a solver requires."""


# solver arguments
class OutOfRange(ValidationError):
    pass


class DiagonalAtOne(ValidationError):
    pass


class TwoDiagonalOnes(ValidationError):
    pass


class DimensionTooSmall(ValidationError):
    pass


class DiagonalMismatch(ValidationError):
    pass


class NonPositiveEntry(ValidationError):
    pass


class BadCycleLength(ValidationError):
    pass


class EmptyPartition(ValidationError):
    pass


class MassNotOne(ValidationError):
    pass


class BadIndices(ValidationError):
    pass


class BadK(ValidationError):
    pass


class R0OutOfRange(ValidationError):
    """Generated diagonal entry of the specified row fell outside (0, 1)."""


# structure
class MultipleEssentialClasses(StructureError):
    pass


class NotIrreducible(StructureError):
    pass


class Infeasible(StructureError):
    """No completion has a single essential class."""


# limits
class DimensionTooLarge(BudgetExceeded):
    pass


# numerics
class SingularSystem(NumericalError):
    pass


class EigenvalueAtOne(NumericalError):
    pass


class SpectralRadiusNotLessThanOne(NumericalError):
    pass


class DenominatorVanishes(NumericalError):
    pass
