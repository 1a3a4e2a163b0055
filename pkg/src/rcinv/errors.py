"""Exception hierarchy shared by all modules."""


class RcinvError(Exception):
    """Base class for library errors."""


class InputError(RcinvError, ValueError):
    """Malformed arguments: dimension mismatch, bad parameters, bad files."""


class NumericError(RcinvError, ArithmeticError):
    """Numerical breakdown inside the LP solver."""


class EmptySetError(RcinvError):
    """An operation requiring a nonempty set received an empty one."""


class UnboundedError(RcinvError):
    """A set expected to be bounded is unbounded in some direction."""


class ResourceError(RcinvError):
    """A configured size limit (FM rows, union pieces) was exceeded."""


class DegenerateError(RcinvError):
    """A set is empty or lower-dimensional where full dimension is required."""


class HorizonTooShortError(InputError):
    """The null-controllability LP is infeasible for the chosen horizon."""


class CertificateError(RcinvError):
    """A computed certificate failed its verification."""


class InvarianceViolation(RcinvError):
    """A closed-loop trajectory left the set or ran out of admissible inputs."""

    def __init__(self, message, state=None, trajectory=None):
        super().__init__(message)
        self.state = state
        self.trajectory = trajectory


class EpsilonExceeded(InputError):
    """The reference set inflated by the maximal radius still misses part of a set."""
