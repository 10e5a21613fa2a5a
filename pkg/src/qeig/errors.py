"""Exception hierarchy shared by all solver modules."""


class QeigError(Exception):
    """Base class for errors raised by qeig."""


class SameClassError(QeigError, ValueError):
    """Scalar Sylvester equation whose coefficients are in the same similarity class."""


class EigenvalueCollisionError(SameClassError):
    """Shift collides with the similarity class of a diagonal entry."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"eigenvalue collision at diagonal index {index}")


class NonDistinctSpectrumError(QeigError, ValueError):
    """Two diagonal entries of a Schur form share a similarity class."""

    def __init__(self, i, k):
        self.indices = (i, k)
        super().__init__(f"non-distinct spectrum: diagonal entries {i} and {k} are in the same class")


class NonConvergenceError(QeigError, RuntimeError):
    """QR iteration exceeded its sweep budget.

    ``partial`` holds the SchurDecomposition reached so far (T is only
    block triangular above ``active_hi``).
    """

    def __init__(self, message, partial=None, active_hi=None):
        super().__init__(message)
        self.partial = partial
        self.active_hi = active_hi


class QMatFormatError(QeigError, ValueError):
    """Malformed quaternion matrix file."""
