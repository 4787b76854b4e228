"""Exception hierarchy shared by every dagsp module."""

from sklearn.exceptions import ConvergenceWarning


class DagspError(Exception):
    """Base class for all errors raised by dagsp."""


class CycleDetected(DagspError, ValueError):
    pass


class ZeroWeight(DagspError, ValueError):
    pass


class DuplicateEdge(DagspError, ValueError):
    pass


class EmptyWeightRange(DagspError, ValueError):
    pass


class SemiringViolation(DagspError, ValueError):
    pass


class NonRealizableSemiring(DagspError, ValueError):
    pass


class NegativeDistance(DagspError, ValueError):
    pass


class DimensionMismatch(DagspError, ValueError):
    pass


class DegenerateLabels(DagspError, ValueError):
    pass


class ZeroReference(DagspError, ValueError):
    pass


class InitialExceedsPopulation(DagspError, ValueError):
    pass


class NotSymmetric(DagspError, ValueError):
    pass


class ParseError(DagspError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotConverged(DagspError, ConvergenceWarning):
    """Iteration limit reached.

    Raised by the eigensolver; issued as a warning by the sparse solvers,
    whose partial result is still returned.
    """
