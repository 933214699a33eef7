"""Exception hierarchy shared by all qcnms modules."""


class QcnmsError(Exception):
    """Base class for every error raised by the library."""


class DomainError(QcnmsError, ValueError):
    """Input outside the domain where a formula is defined."""


class OracleInfeasibleError(DomainError):
    """The number-basis oracle would need more terms than the hard cap."""


class NumericFailure(QcnmsError):
    """A numerical procedure could not produce a trustworthy result."""


class NoPeakError(NumericFailure):
    pass


class NoCrossingError(NumericFailure):
    pass


class ResolutionTooCoarseError(NumericFailure):
    pass


class QuadratureError(NumericFailure):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(QcnmsError):
    """Invalid experiment configuration; ``problems`` maps field paths to messages."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = {"config": problems}
        self.problems = dict(problems)
        lines = [f"{k}: {v}" for k, v in self.problems.items()]
        super().__init__("invalid configuration\n  " + "\n  ".join(lines))
