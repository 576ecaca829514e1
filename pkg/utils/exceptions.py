class ToolkitError(Exception):
    exit_code = 1

    def __init__(self, message="", **context):
        super().__init__(message)
        self.context = context


class InvalidConfiguration(ToolkitError):
    exit_code = 2


class InvalidArgument(ToolkitError):
    exit_code = 2


class FieldMismatch(ToolkitError):
    exit_code = 2


class ZeroDivisorError(ToolkitError):
    exit_code = 2


class RankBelowThreshold(ToolkitError):
    """t does not exceed t0 for any admissible parameter choice."""
    exit_code = 3


class EnumerationUnavailable(ToolkitError):
    """Bounded-height enumeration cannot be certified complete for this field."""
    exit_code = 4


class PrecisionFailure(ToolkitError):
    exit_code = 5


class RamifiedPrime(ToolkitError):
    exit_code = 2


class DimensionTooLarge(ToolkitError):
    exit_code = 2


class LatticeInvariantError(ToolkitError):
    exit_code = 6


class SampleFailure(ToolkitError):
    exit_code = 6

    def __init__(self, message="", index=None, **context):
        super().__init__(message, index=index, **context)
        self.index = index
