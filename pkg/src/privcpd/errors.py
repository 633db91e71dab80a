"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` that the CLI uses to
emit single-line diagnostics.
"""


class PrivcpdError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidParameterError(PrivcpdError, ValueError):
    code = "invalid-parameter"


class InvalidInputError(PrivcpdError, ValueError):
    code = "invalid-input"


class InvalidObservationError(PrivcpdError, ValueError):
    """A data point outside the support of the hypothesized distributions.

    ``index`` is the 1-based position of the offending observation when it
    is known (one observation per input line, so it doubles as a line
    number for the CLI).
    """

    code = "invalid-observation"

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class InfiniteSensitivityError(PrivcpdError):
    code = "infinite-sensitivity"


class InsufficientDataError(PrivcpdError):
    code = "insufficient-data"


class NotReadyError(PrivcpdError):
    code = "not-ready"


class NumericError(PrivcpdError):
    code = "numeric-error"
