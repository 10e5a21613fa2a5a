"""Right eigenvectors ``A x = x lam`` from a standardized quaternion Schur form."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonDistinctSpectrumError
from .qmat import QMatrix, matmul
from .quat import EPS


@dataclass
class EigenSystem:
    """Upper triangular ``X`` with ``T X = X diag(lambdas)``.

    ``X[k, k] == 1`` exactly unless the overflow guard rescaled column ``k``
    (then ``X[k, k]`` holds the scale factor), or columns were normalized.
    """

    X: QMatrix
    lambdas: np.ndarray


def _check_distinct(lam: np.ndarray) -> None:
    n = lam.size
    if n < 2:
        return
    a = np.abs(lam)
    tol = EPS * (a[:, None] + a[None, :] + 1.0)
    d = np.minimum(np.abs(lam[:, None] - lam[None, :]), np.abs(lam[:, None] - lam[None, :].conj()))
    bad = np.triu(d <= tol, 1)
    if bad.any():
        i, k = np.argwhere(bad)[0]
        raise NonDistinctSpectrumError(int(i), int(k))


def triangular_eigenvectors(T: QMatrix, normalize: bool = False) -> EigenSystem:
    """Eigenvectors of an upper triangular ``T`` with distinct standardized eigenvalues.

    Column ``k`` is ``(y, 1, 0, ..., 0)`` where ``y`` solves
    ``T[:k, :k] y - y T[k, k] = -T[:k, k]`` by back substitution.

    Parameters
    ----------
    T : QMatrix
    normalize : bool
        Scale each column to unit 2-norm instead of keeping the unit diagonal.
    """
    if T.nrows != T.ncols:
        raise ValueError("T must be square")
    n = T.nrows
    Td = T.data
    lam = Td[np.arange(n), np.arange(n), 0] + 1j * Td[np.arange(n), np.arange(n), 1]
    _check_distinct(lam)
    X = np.zeros((n, n, 4))
    X[0, 0, 0] = 1.0
    b = np.empty((n, 4))
    for k in range(1, n):
        b[:k] = -Td[:k, k]
        scale, bad = _kernels.solve_triu(Td, k, lam[k].real, lam[k].imag, b)
        if bad >= 0:
            raise NonDistinctSpectrumError(int(bad), k)
        X[:k, k] = b[:k]
        X[k, k, 0] = scale
    if normalize:
        nrm = np.sqrt(np.sum(X * X, axis=(0, 2)))
        X /= nrm[None, :, None]
    return EigenSystem(QMatrix._wrap(X), lam)


def full_eigenvectors(U: QMatrix, es: EigenSystem) -> QMatrix:
    """Eigenvectors of ``A = U T U^H``: ``U X``."""
    if U.ncols != es.X.nrows:
        raise ValueError(f"dimension mismatch: {U.shape} vs {es.X.shape}")
    return matmul(U, es.X)


def eig(A: QMatrix, use_aed: bool = True, aed=None, normalize: bool = False):
    """Standardized eigenvalues and right eigenvectors of ``A``.

    Returns ``(lambdas, X, schur)`` with ``A X ~= X diag(lambdas)``.
    """
    from .schur import schur_decompose

    dec = schur_decompose(A, use_aed=use_aed, aed=aed)
    es = triangular_eigenvectors(dec.T, normalize=normalize)
    return es.lambdas, full_eigenvectors(dec.U, es), dec
