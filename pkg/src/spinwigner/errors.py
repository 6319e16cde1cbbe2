"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 1, numeric
failures exit 2, capacity overruns exit 3.
"""


class SpinWignerError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SpinWignerError):
    """Input violates a documented precondition or contract."""


class NumericError(SpinWignerError):
    """A numerical procedure failed to meet its accuracy contract."""


class CapacityError(SpinWignerError):
    """Requested problem size exceeds the configured memory budget."""
