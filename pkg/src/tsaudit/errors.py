"""Exception hierarchy shared by every pipeline stage."""


class AuditError(Exception):
    """Base class for all errors raised by tsaudit."""

    exit_code = 2


# ingestion
class ParseError(AuditError):
    exit_code = 3


class NonMonotoneTime(AuditError):
    exit_code = 3


class DegenerateSeries(AuditError):
    exit_code = 3


# diagnostics
class LowSample(AuditError):
    exit_code = 4


class ConstantColumn(AuditError):
    exit_code = 4


class ConstantSeries(AuditError):
    exit_code = 4


class DegenerateTarget(AuditError):
    exit_code = 4


class SingularDesign(AuditError):
    exit_code = 4


class TooFewPoints(AuditError):
    exit_code = 4


class InvalidP(AuditError, ValueError):
    exit_code = 4


# risk
class MissingFeature(AuditError, KeyError):
    exit_code = 5


class DegenerateInput(AuditError):
    exit_code = 5


class InvalidTeff(AuditError, ValueError):
    exit_code = 5


class InsufficientLabels(AuditError):
    exit_code = 5


class NonConvergence(AuditError):
    exit_code = 5


# decision
class ZeroDenominator(AuditError, ZeroDivisionError):
    exit_code = 6


class EmptyCatalog(AuditError):
    exit_code = 6


# atlas / discovery
class DegenerateDraw(AuditError):
    exit_code = 7


class UnstableSimulation(AuditError):
    exit_code = 7


class UniverseMismatch(AuditError, ValueError):
    exit_code = 7


# evaluation
class SingleClass(AuditError, ValueError):
    exit_code = 8


class DegenerateP(AuditError, ValueError):
    exit_code = 8
