"""Exception types shared across the package."""


class TrendIntervenError(Exception):
    """Base class for all errors raised by this package."""


# --- ingestion ---------------------------------------------------------


class MissingHeader(TrendIntervenError):
    pass


class GapInMonths(TrendIntervenError):
    pass


class BadValue(TrendIntervenError):
    pass


class EmptySeries(TrendIntervenError):
    pass


class AlreadyRescaled(TrendIntervenError):
    pass


class BadMonth(TrendIntervenError):
    pass


# --- numerics ----------------------------------------------------------


class NonFiniteObjectiveAtStart(TrendIntervenError):
    pass


class NonFiniteEvaluation(TrendIntervenError):
    pass


class RankDeficient(TrendIntervenError):
    pass


class TooShort(TrendIntervenError):
    pass


# --- model fitting -----------------------------------------------------


class NonStationaryParams(TrendIntervenError):
    pass


class NumericalBreakdown(TrendIntervenError):
    pass


class OptimizerFailed(TrendIntervenError):
    pass


class AllFitsFailed(TrendIntervenError):
    pass


class DegenerateVariance(TrendIntervenError):
    pass


class DegenerateInput(TrendIntervenError):
    pass


class SingularHessian(TrendIntervenError):
    pass


# --- rank / peak statistics -------------------------------------------


class EmptyGroup(TrendIntervenError):
    pass


class DegenerateTies(TrendIntervenError):
    pass


class NoCompleteYear(TrendIntervenError):
    pass


class BadArgs(TrendIntervenError):
    pass


# --- batch runner ------------------------------------------------------


class UnreadableInput(TrendIntervenError):
    pass


class NoEntries(TrendIntervenError):
    pass
