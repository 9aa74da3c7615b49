"""Exception types shared across the package."""


class NoiseMaskError(Exception):
    """Base class for every error this package raises on purpose."""


class ShapeError(NoiseMaskError):
    """Invalid grid shape, or a rank mismatch between two grids."""


class ParameterError(NoiseMaskError):
    """A scalar parameter (sigma, gamma, window, weight, seed) is out of range."""


class PositionError(NoiseMaskError):
    """A grid position lies outside the mask bounds."""


class ConfigError(NoiseMaskError):
    """A generation config is internally inconsistent (e.g. color/rank conflict)."""


class SamplingError(NoiseMaskError):
    """A bank sampling request violates the bank's contract."""


class BankFormatError(NoiseMaskError):
    """An on-disk bank is malformed; the message names the offending field."""


class UndefinedProfileError(NoiseMaskError):
    """A radial spectrum was requested for a field with no non-DC power."""
