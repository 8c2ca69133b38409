"""Exception hierarchy shared by the library and the command-line tool."""


class StrainspaceError(Exception):
    """Base class; ``code`` is a stable machine-readable identifier."""

    code = "error"


class ConfigurationError(StrainspaceError, ValueError):
    """Invalid grid, parameter or run configuration."""

    code = "configuration"


class UsageError(StrainspaceError, ValueError):
    """An operation was called on data in the wrong representation or shape."""

    code = "usage"


class PreconditionError(StrainspaceError, ValueError):
    """Input violates a mathematical precondition; ``residual`` holds the measurement."""

    code = "precondition"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResolutionError(StrainspaceError, ValueError):
    """The grid is too coarse for the requested construction."""

    code = "resolution"

    def __init__(self, message, min_n=None):
        super().__init__(message)
        self.min_n = min_n


class UnsupportedRotationError(StrainspaceError, ValueError):
    """Rotation is not a symmetry of the cubic grid."""

    code = "unsupported-rotation"


class DivergenceError(StrainspaceError, RuntimeError):
    """Time integration blew up; ``last_valid_time`` records how far it got."""

    code = "divergence"

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class FieldFileError(StrainspaceError, ValueError):
    """Base class for field-file decoding failures."""

    code = "field-file"


class MalformedHeaderError(FieldFileError):
    code = "malformed-header"


class TruncatedPayloadError(FieldFileError):
    code = "truncated-payload"


class KindMismatchError(FieldFileError):
    code = "kind-mismatch"
