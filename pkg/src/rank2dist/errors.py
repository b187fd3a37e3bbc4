"""Exception hierarchy.

Errors fall in three families that the CLI maps onto exit codes:
``InputError`` (2), ``DegeneracyError`` (3) and ``TruncationExceeded`` (4).
"""


class Rank2Error(Exception):
    """Base class for all library errors."""


class InputError(Rank2Error, ValueError):
    pass


class DegeneracyError(Rank2Error, ArithmeticError):
    pass


class TruncationExceeded(Rank2Error):
    """A jet (or truncated series) is too short for the requested operation."""


# --- exact algebra -------------------------------------------------------

class DimensionMismatch(InputError):
    pass


class DivisionByZeroSeries(DegeneracyError, ZeroDivisionError):
    pass


class NonCompositionalArgument(DegeneracyError):
    pass


class NonInvertibleSeries(DegeneracyError):
    pass


class InconsistentSystem(DegeneracyError):
    pass


class IrrationalValue(DegeneracyError):
    """An exact root was requested of a rational that has no rational root."""


class SingularReparametrization(DegeneracyError):
    pass


# --- projective curves ---------------------------------------------------

class WrongGauge(InputError):
    pass


class NotSelfDual(DegeneracyError):
    pass


class DegenerateForm(DegeneracyError):
    pass


class AllInvariantsVanish(DegeneracyError):
    pass


# --- classification ------------------------------------------------------

class ExceptionalTuple(DegeneracyError):
    pass


# --- models --------------------------------------------------------------

class BadDimension(InputError):
    pass


class DegenerateDistribution(DegeneracyError):
    pass


class EmptyIntersection(DegeneracyError):
    pass


class OnD3Annihilator(DegeneracyError):
    pass


# --- jacobi pipeline -----------------------------------------------------

class NotRegularPoint(DegeneracyError):
    pass


class RankDropAlongCurve(DegeneracyError):
    pass


class DegenerateOsculation(DegeneracyError):
    pass
