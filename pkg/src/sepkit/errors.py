"""Exception types raised across the package."""


class SepkitError(Exception):
    """Base class for all sepkit errors."""


class DegenerateNull(SepkitError, ValueError):
    """A spectral null coincides with the drive (target) frequency."""


class InvalidWidth(SepkitError, ValueError):
    """Spectral width sigma must be positive."""


class EmptyGrid(SepkitError, ValueError):
    """A frequency grid is empty or unusable."""


class InvalidGrid(SepkitError, ValueError):
    """Time grid is invalid (non-positive dt/duration or too few samples)."""


class ZeroArea(SepkitError, ValueError):
    """Waveform area is too small to normalize against."""


class ZeroAnharmonicity(SepkitError, ValueError):
    """Anharmonicity must be nonzero for the requested operation."""


class IndexOutOfRange(SepkitError, IndexError):
    """Sample or qubit index outside the valid range."""


class NonUnitaryDrift(SepkitError, ArithmeticError):
    """Accumulated propagator failed the unitarity check."""


class NonUnitary(SepkitError, ValueError):
    """Matrix expected to be unitary is not, within tolerance."""


class MissingCoherence(SepkitError, ValueError):
    """Open-system evolution requires T1 on every qubit."""


class NegativeDephasing(SepkitError, ValueError):
    """T2_echo exceeds 2*T1, implying a negative pure-dephasing rate."""


class NoBracket(SepkitError, RuntimeError):
    """Root finding could not bracket the target rotation angle."""


class NonConvergence(SepkitError, RuntimeError):
    """Iterative routine exceeded its iteration budget."""


class FitFailure(SepkitError, RuntimeError):
    """Nonlinear least squares failed to converge or was singular."""


class ConfigError(SepkitError, ValueError):
    """Device/configuration file is malformed or inconsistent."""
