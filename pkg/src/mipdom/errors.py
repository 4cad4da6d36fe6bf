"""Exception hierarchy shared by all modules."""


class DomError(Exception):
    """Base class for every error raised by mipdom."""


class InvalidInputError(DomError, ValueError):
    """Malformed point sets, dimension mismatches, bad arguments."""


class BackendError(DomError, RuntimeError):
    """A solver backend failed or refused to run."""


class VerificationError(DomError, RuntimeError):
    """A reconstructed solution violates the dominance-move invariants."""
