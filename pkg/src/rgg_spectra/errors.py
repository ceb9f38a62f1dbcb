"""Exception types raised across the package."""


class RggSpectraError(Exception):
    """Base class for all package errors."""


class InvalidParams(RggSpectraError, ValueError):
    """Model parameters violate a standing assumption."""


class WrongRegime(RggSpectraError, ValueError):
    """An operation was called for a regime it does not cover."""


class NotPSD(RggSpectraError, ValueError):
    """A Cholesky pivot went below the negative tolerance."""


class NoConvergence(RggSpectraError, RuntimeError):
    pass


class Singular(RggSpectraError, ValueError):
    """Inverse requested for a (numerically) rank-deficient matrix."""


class NaturalPowersOnly(RggSpectraError, ValueError):
    """Closed form exists only for d = 2 and powers 0, 1, ..., n-1."""


class TorusDeltaTooLarge(RggSpectraError, ValueError):
    pass


class ZeroLengthEdge(RggSpectraError, ValueError):
    """Zero edge length met with a negative power (duplicated points)."""


class TauVectorShape(RggSpectraError, ValueError):
    pass
