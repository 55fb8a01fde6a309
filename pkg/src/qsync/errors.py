"""Exception types shared across the toolkit."""


class QsyncError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(QsyncError):
    """Array shapes are inconsistent with each other or with the model."""


class NonPositiveDefinite(QsyncError):
    """The potential matrix has a non-positive eigenvalue (unstable network)."""


class UnstableIntegration(QsyncError):
    """A trajectory violated the physicality bound; the step size is too large."""


class DefectiveSpectrum(QsyncError):
    """Biorthogonal normalization failed (exceptional point); fall back to
    direct propagation."""


class NoDecayingModes(QsyncError):
    """Every eigenvalue is stationary or non-decaying; no time-scale gap exists."""


class NegativeFrequency(QsyncError):
    """Spectral densities are defined for non-negative frequencies only."""


class ParseError(QsyncError):
    """A scenario file is not syntactically valid."""


class ValidationError(QsyncError):
    """A scenario file is well-formed but violates a model invariant."""


class NonPSDRateMatrixWarning(UserWarning):
    """The rate matrix passed to the radiated-intensity sum is not positive
    semidefinite; the result may be negative."""
