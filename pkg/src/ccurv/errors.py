"""Exception hierarchy shared by all modules."""


class CCurvError(Exception):
    """Base class for all package errors."""


class ConfigError(CCurvError):
    pass


class NumericalFailure(CCurvError):
    """Base class for failures of an iterative or integrating procedure."""


class OutOfChart(CCurvError):
    pass


class NonSmoothPoint(CCurvError):
    pass


class StepFailure(NumericalFailure):
    pass


class AmbiguousSide(CCurvError):
    pass


class DegenerateVertex(NumericalFailure):
    pass


class NodeInSupport(CCurvError):
    pass


class AngleDegenerate(CCurvError):
    pass


class MultipleNodes(CCurvError):
    pass


class WrongFamily(CCurvError):
    pass


class SegmentTooLong(NumericalFailure):
    pass


class GeodesicSubproblemFailure(NumericalFailure):
    pass


class StabilityViolation(NumericalFailure):
    pass


class CollapseDetected(NumericalFailure):
    """Raised by a single flow step when the enclosed area falls below the floor."""


class NoCollapse(NumericalFailure):
    pass


class ScaleTooLarge(CCurvError):
    pass


class NoConvergence(NumericalFailure):
    pass


class EmbeddednessLost(NumericalFailure):
    pass


class OrderingAmbiguous(NumericalFailure):
    pass


class NoNegativeDirection(CCurvError):
    pass


class IterationBudget(NumericalFailure):
    pass


class MonotonicityViolation(NumericalFailure):
    pass


class DomainError(CCurvError, ValueError):
    pass


class RootBracketFailure(NumericalFailure):
    pass


class NotEmbeddable(NumericalFailure):
    """No embedded curve of the requested curvature exists in the seed's class."""
