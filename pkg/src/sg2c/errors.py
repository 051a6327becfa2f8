"""Exception types shared across the package."""


class Sg2cError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimension(Sg2cError):
    """A dimension argument is out of the supported range."""


class NonSquare(Sg2cError):
    """A square matrix was required."""


class NotSkewSymmetric(Sg2cError):
    """Input matrix fails the skew-symmetry tolerance."""


class InvalidPartition(Sg2cError):
    """Block partition sizes do not match the matrix."""


class DimensionMismatch(Sg2cError):
    """Vector or matrix dimensions are inconsistent."""


class InvalidParameter(Sg2cError):
    """A model parameter is outside its admissible range."""


class NoFiniteGain(Sg2cError):
    """The gain LMI is infeasible for every finite gain value."""


class SolverFailure(Sg2cError):
    """The SDP backend stalled or returned an unusable solution."""


class ParseError(Sg2cError):
    """A model file could not be parsed; message carries the location."""


class SchemaError(Sg2cError):
    """A model file violates the expected schema; message names the field."""


class NoSignChange(Sg2cError):
    """Bisection endpoints yield the same verdict."""


class NonFinite(Sg2cError):
    """A simulated trajectory left the guard box or became non-finite."""
