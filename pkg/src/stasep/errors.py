"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


class DomainError(ValueError):
    """A lattice index or function argument is outside the supported domain."""


class FrameError(ValueError):
    """A scaling frame is too small to host the requested scaled coordinates."""


class RefusalError(RuntimeError):
    """A computation was refused because its preconditions make it meaningless
    (size caps, degenerate configurations, empty inputs)."""


class AccuracyError(RuntimeError):
    """A quadrature self-check failed.  Carries both estimates."""

    def __init__(self, message, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class InvertibilityError(RuntimeError):
    """The discretized Fredholm determinant came out non-positive.

    The continuum determinant is provably positive, so this signals a
    discretization failure rather than mathematics."""


class WindowError(RuntimeError):
    """A simulated particle left the declared lattice window."""
