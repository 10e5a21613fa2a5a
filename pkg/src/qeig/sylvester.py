"""Quaternion Sylvester equations ``alpha chi - chi beta = gamma`` and ``T x - x lam = b``."""
from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import EigenvalueCollisionError, SameClassError
from .qmat import QMatrix
from .quat import EPS, Quaternion, as_quaternion, join, split


def _degenerate(alpha: complex, beta: complex) -> bool:
    tol = EPS * (abs(alpha) + abs(beta))
    return abs(alpha - beta) <= tol or abs(alpha - beta.conjugate()) <= tol


def solve_scalar(alpha: complex, beta: complex, gamma) -> Quaternion:
    """Solve ``alpha chi - chi beta = gamma`` for complex ``alpha``, ``beta``.

    Writing ``gamma = g1 + g2 j`` the equation decouples into
    ``(alpha - beta) chi1 = g1`` and ``(alpha - conj(beta)) chi2 = g2``.

    Raises
    ------
    SameClassError
        If ``alpha`` equals ``beta`` or ``conj(beta)`` up to roundoff, i.e. both
        lie in one similarity class and the solution is not unique.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    if _degenerate(alpha, beta):
        raise SameClassError(f"alpha={alpha} and beta={beta} lie in the same similarity class")
    g1, g2 = split(as_quaternion(gamma))
    return join((g1 / (alpha - beta), g2 / (alpha - beta.conjugate())))


def _left_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([[w, -x, -y, -z],
                     [x, w, -z, y],
                     [y, z, w, -x],
                     [z, -y, x, w]])


def _right_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([[w, -x, -y, -z],
                     [x, w, z, -y],
                     [y, -z, w, x],
                     [z, y, -x, w]])


def _gepp(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    A = M.astype(np.float64).copy()
    b = rhs.astype(np.float64).copy()
    n = A.shape[0]
    scale = np.max(np.abs(A))
    if scale == 0.0:
        raise SameClassError("singular 4x4 Sylvester system")
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= 8 * EPS * scale:
            raise SameClassError("numerically singular 4x4 Sylvester system")
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            f = A[i, k] / A[k, k]
            A[i, k:] -= f * A[k, k:]
            b[i] -= f * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def oracle_scalar(alpha, beta, gamma) -> Quaternion:
    """Reference solver for ``alpha chi - chi beta = gamma`` with arbitrary quaternions.

    Forms the real 4x4 matrix of ``chi -> alpha chi - chi beta`` in the basis
    ``(1, i, j, k)`` and solves it by Gaussian elimination with partial pivoting.
    """
    a = as_quaternion(alpha).to_array()
    b = as_quaternion(beta).to_array()
    g = as_quaternion(gamma).to_array()
    M = _left_matrix(a) - _right_matrix(b)
    return Quaternion.from_array(_gepp(M, g))


def solve_triu(T, lam: complex, b, overwrite_b: bool = False):
    """Back substitution for ``T x - x lam = b`` with ``T`` upper triangular.

    Only the upper triangle of ``T`` and the complex part of its diagonal are
    read; the diagonal is expected to be standardized.

    Parameters
    ----------
    T : QMatrix or (n, n, 4) array
    lam : complex
        Must not share a similarity class with any ``T[i, i]``.
    b : (n, 4) array
        Right-hand side.  Overwritten by the solution when ``overwrite_b``.

    Returns
    -------
    x : (n, 4) ndarray
    scale : float
        ``1.0`` unless the overflow guard fired, in which case the returned ``x``
        solves ``T x - x lam = scale * b`` with ``0 < scale < 1``.

    Raises
    ------
    EigenvalueCollisionError
        With ``.index`` naming the diagonal entry that collides with ``lam``.
    """
    Td = T.data if isinstance(T, QMatrix) else np.asarray(T, dtype=np.float64)
    n = Td.shape[0]
    if Td.ndim != 3 or Td.shape[1] != n or Td.shape[2] != 4:
        raise ValueError("T must be square")
    if overwrite_b and isinstance(b, np.ndarray) and b.dtype == np.float64 and b.flags.c_contiguous:
        x = b
    else:
        x = np.array(b, dtype=np.float64, order="C")
    if x.shape != (n, 4):
        raise ValueError(f"b must have shape ({n}, 4), got {x.shape}")
    lam = complex(lam)
    Td = np.ascontiguousarray(Td)
    scale, bad = _kernels.solve_triu(Td, n, lam.real, lam.imag, x)
    if bad >= 0:
        raise EigenvalueCollisionError(bad, f"lam={lam} collides with T[{bad},{bad}]")
    return x, float(scale)
