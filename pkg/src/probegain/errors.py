"""Exception hierarchy shared by every module."""


class ProbeGainError(ValueError):
    """Base class for domain errors raised by this package."""


class InvariantError(ProbeGainError):
    """A parameter object violates one of its invariants.

    ``field`` names the offending field so callers can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(ProbeGainError):
    """An input lies outside the domain where an operation is defined."""


class UndefinedRatioError(DomainError):
    """The ratio x = dn_mn / dn_gn is undefined because dn_gn == 0."""


class CurveUndefinedError(DomainError):
    """A critical curve kappa_i(x) is requested at x <= x_i."""


class AbsentBranchError(DomainError):
    """The third critical branch does not exist for this medium."""


class NoRootError(DomainError):
    """Bisection found no sign change."""


class NoOptimumError(DomainError):
    """No finite optimum drive exists (x <= x1)."""


class ConfigError(ProbeGainError):
    """Malformed configuration text; carries 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
