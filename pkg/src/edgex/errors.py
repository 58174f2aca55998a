"""Exception hierarchy shared by all edgex modules."""


class EdgexError(Exception):
    """Base class for errors raised by edgex."""


class InvalidInputError(EdgexError, ValueError):
    """Malformed interaction, permutation, or parameter value."""


class RegimeError(InvalidInputError):
    """Parameters violate the constraints of the requested Hollywood regime."""


class DomainError(EdgexError, ValueError):
    """A quantity is evaluated outside the region where it is defined."""


class SamplerError(EdgexError, RuntimeError):
    """A sampler cannot continue (e.g. explicit weights exhausted)."""


class UnsupportedError(EdgexError, ValueError):
    """Operation not available for this kind of network."""


class ParseError(EdgexError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
