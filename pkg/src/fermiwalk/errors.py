"""Exception hierarchy shared by every module.

The command line runner maps these onto process exit codes, so library code
raises the most specific class that applies.
"""


class FermiWalkError(Exception):
    """Base class for all errors raised by :mod:`fermiwalk`."""


class InvalidArgument(FermiWalkError, ValueError):
    """An input violates a documented precondition on its shape or range."""


class InvalidSymbol(InvalidArgument):
    """A reservoir symbol does not define a density with ``0 <= Sigma <= 1``."""


class PreconditionViolation(FermiWalkError):
    """A mathematical precondition (spectral condition, horizon, ...) fails."""


class NumericFailure(FermiWalkError, ArithmeticError):
    """A numerical routine failed or produced output breaking an invariant."""


class ResourceLimit(FermiWalkError):
    """The requested problem exceeds the supported desk-scale dimensions."""
