class WcsError(ValueError):
    """Base class for errors raised by this package."""


class EmptyGraphError(WcsError):
    pass


class MapFormatError(WcsError):
    pass


class DisconnectedError(WcsError):
    pass


class InactiveVertexError(WcsError):
    pass


class GraphTooLargeError(WcsError):
    pass


class DimacsError(WcsError):
    pass


class DecodeError(WcsError):
    """A set of the target size decoded to an inconsistent assignment."""


class InfeasibleError(WcsError):
    pass
