"""Exception types raised across the package."""


class Elastica2DError(Exception):
    """Base class for all package errors."""


class PoleEvaluation(Elastica2DError, ZeroDivisionError):
    pass


class LogarithmRequired(Elastica2DError, ValueError):
    pass


class WrongZeroOrder(Elastica2DError, ValueError):
    pass


class MissingZero(Elastica2DError, ValueError):
    pass


class BranchPoint(Elastica2DError, ValueError):
    pass


class DomainViolation(Elastica2DError, ValueError):
    pass


class DomainViolationWarning(UserWarning):
    """Evaluation outside the nominal domain of a closed-form family."""


class DegenerateRadii(Elastica2DError, ValueError):
    pass


class NoRealRoots(Elastica2DError, ValueError):
    pass


class MeshError(Elastica2DError, ValueError):
    """Malformed mesh input (bad indices, non-manifold edges, bad markers)."""


class DegenerateTriangle(MeshError):
    pass


class VariationOnBoundary(Elastica2DError, ValueError):
    pass


class SolverError(Elastica2DError, RuntimeError):
    """Base for solver failures.

    ``state`` and ``report`` hold the last accepted iterate when available;
    ``step`` is set by ``ramp_solve`` to the failing ramp step (1-based).
    """

    def __init__(self, message, state=None, report=None, step=None):
        super().__init__(message)
        self.state = state
        self.report = report
        self.step = step


class LineSearchFailure(SolverError):
    pass


class NonFiniteEnergy(SolverError):
    pass
