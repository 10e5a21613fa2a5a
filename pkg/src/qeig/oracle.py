"""Independent checks: complex adjoint embedding, a small complex QR eigensolver, error metrics.

Nothing here calls the quaternion solver; the complex eigensolver is a
deliberately plain single-shift Hessenberg QR so that a bug in the
quaternion path cannot hide behind a shared routine.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NonConvergenceError
from .qmat import QMatrix, adjoint_data, frob_norm_data, qmatmul_data

ORACLE_MAX_DIM = 64
_EPS = np.finfo(np.float64).eps


def complex_adjoint(A: QMatrix) -> np.ndarray:
    """``[[A1, A2], [-conj(A2), conj(A1)]]`` for ``A = A1 + A2 j``."""
    d = A.data
    a1 = d[..., 0] + 1j * d[..., 1]
    a2 = d[..., 2] + 1j * d[..., 3]
    return np.block([[a1, a2], [-a2.conj(), a1.conj()]])


def _house_vec(x):
    alpha = x[0]
    xn = np.linalg.norm(x)
    if xn == 0.0:
        return None
    phase = alpha / abs(alpha) if alpha != 0 else 1.0
    v = x.astype(np.complex128).copy()
    v[0] += phase * xn
    return v / np.linalg.norm(v)


def _to_hessenberg(M):
    H = np.array(M, dtype=np.complex128)
    n = H.shape[0]
    for j in range(n - 2):
        v = _house_vec(H[j + 1:, j])
        if v is None:
            continue
        H[j + 1:, j:] -= 2.0 * np.outer(v, v.conj() @ H[j + 1:, j:])
        H[:, j + 1:] -= 2.0 * np.outer(H[:, j + 1:] @ v, v.conj())
        H[j + 2:, j] = 0.0
    return H


def _givens(x, y):
    r = math.hypot(abs(x), abs(y))
    if r == 0.0:
        return 1.0 + 0j, 0j
    return x / r, y / r


def _qr_eigenvalues(H, max_iter):
    n = H.shape[0]
    eig = np.zeros(n, dtype=np.complex128)
    ihi = n - 1
    its = 0
    total = 0
    while ihi >= 0:
        l = ihi
        while l > 0:
            tst = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if abs(H[l, l - 1]) <= max(_EPS * tst, np.finfo(float).tiny):
                H[l, l - 1] = 0.0
                break
            l -= 1
        if l == ihi:
            eig[ihi] = H[ihi, ihi]
            ihi -= 1
            its = 0
            continue
        if total >= max_iter:
            raise NonConvergenceError("reference complex QR did not converge")
        a, b = H[ihi - 1, ihi - 1], H[ihi - 1, ihi]
        c, d = H[ihi, ihi - 1], H[ihi, ihi]
        if its and its % 10 == 0:
            mu = d + abs(c) * (1.0 + 0.5j)
        else:
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            m1, m2 = d + half + disc, d + half - disc
            mu = m1 if abs(m1 - d) < abs(m2 - d) else m2
        B = H[l:ihi + 1, l:ihi + 1]
        m = B.shape[0]
        B[np.arange(m), np.arange(m)] -= mu
        rots = []
        for k in range(m - 1):
            cs, sn = _givens(B[k, k], B[k + 1, k])
            rows = B[k:k + 2, k:].copy()
            B[k, k:] = cs.conjugate() * rows[0] + sn.conjugate() * rows[1]
            B[k + 1, k:] = -sn * rows[0] + cs * rows[1]
            B[k + 1, k] = 0.0
            rots.append((cs, sn))
        for k, (cs, sn) in enumerate(rots):
            cols = B[:k + 2, k:k + 2].copy()
            B[:k + 2, k] = cols[:, 0] * cs + cols[:, 1] * sn
            B[:k + 2, k + 1] = -cols[:, 0] * sn.conjugate() + cols[:, 1] * cs.conjugate()
        B[np.arange(m), np.arange(m)] += mu
        its += 1
        total += 1
    return eig


def reference_spectrum(M, verify: bool = True) -> np.ndarray:
    """Eigenvalues of a complex matrix of dimension at most 64.

    With ``verify`` each eigenvalue must satisfy
    ``sigma_min(M - lam I) <= 1e-10 ||M||_F``.
    """
    M = np.asarray(M, dtype=np.complex128)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError("reference_spectrum needs a square matrix")
    if n > ORACLE_MAX_DIM:
        raise ValueError(f"oracle limited to dimension {ORACLE_MAX_DIM}, got {n}")
    eig = _qr_eigenvalues(_to_hessenberg(M), max_iter=60 * n)
    if verify:
        mn = np.linalg.norm(M)
        for lam in eig:
            smin = np.linalg.svd(M - lam * np.eye(n), compute_uv=False)[-1]
            if smin > 1e-10 * max(mn, 1.0):
                raise NonConvergenceError(f"eigenvalue {lam} failed residual check ({smin:.3e})")
    return eig


class PlusRepresentatives(NamedTuple):
    values: np.ndarray
    near_real: int


def c_plus_representatives(eigs, near_real_tol: float = 1e-8) -> PlusRepresentatives:
    """Collapse a conjugation-closed spectrum of size 2n to its n standardized classes.

    Every value is mapped to ``Re + i |Im|``; values are then paired
    greedily with their nearest partner and each pair contributes its mean.
    ``near_real`` counts classes with ``|Im| <= near_real_tol``.
    """
    z = np.asarray(eigs, dtype=np.complex128)
    z = z.real + 1j * np.abs(z.imag)
    if z.size % 2:
        raise ValueError("conjugation-closed spectrum must have even size")
    order = np.lexsort((z.imag, z.real))
    left = list(z[order])
    reps = []
    while left:
        a = left.pop(0)
        j = int(np.argmin(np.abs(np.asarray(left) - a)))
        b = left.pop(j)
        reps.append(0.5 * (a + b))
    reps = np.array(reps)
    return PlusRepresentatives(reps, int(np.sum(reps.imag <= near_real_tol)))


def match_spectra(a, b) -> float:
    """Largest distance under the optimal one-to-one assignment of ``a`` onto ``b``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError("spectra differ in size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def standardized_spectrum_oracle(A: QMatrix) -> np.ndarray:
    """Standardized eigenvalues of ``A`` computed only through the complex embedding."""
    return c_plus_representatives(reference_spectrum(complex_adjoint(A))).values


# ---------------------------------------------------------------------------
# error metrics


class Metrics(NamedTuple):
    e1: float | None
    e2: float | None
    e3: float | None


def orthogonality_error(U: QMatrix) -> float:
    """``||U^H U - I||_F / sqrt(n)``."""
    n = U.ncols
    G = qmatmul_data(adjoint_data(U.data), U.data)
    G[np.arange(n), np.arange(n), 0] -= 1.0
    return frob_norm_data(G) / math.sqrt(n)


def schur_error(A: QMatrix, U: QMatrix, T: QMatrix) -> float:
    """``||U^H A U - T||_F / ||A||_F``."""
    if A.shape != U.shape or A.shape != T.shape:
        raise ValueError("dimension mismatch")
    R = qmatmul_data(qmatmul_data(adjoint_data(U.data), A.data), U.data) - T.data
    an = frob_norm_data(A.data)
    return frob_norm_data(R) / an if an > 0 else frob_norm_data(R)


def eigenpair_error(A: QMatrix, X: QMatrix, lambdas) -> float:
    """``||A X - X Lambda||_F / ((||A||_F + ||Lambda||_F) ||X||_F)``."""
    lam = np.asarray(lambdas, dtype=np.complex128)
    if A.shape != X.shape or lam.size != X.ncols:
        raise ValueError("dimension mismatch")
    L = np.zeros((lam.size, lam.size, 4))
    L[np.arange(lam.size), np.arange(lam.size), 0] = lam.real
    L[np.arange(lam.size), np.arange(lam.size), 1] = lam.imag
    R = qmatmul_data(A.data, X.data) - qmatmul_data(X.data, L)
    den = (frob_norm_data(A.data) + float(np.linalg.norm(lam))) * frob_norm_data(X.data)
    return frob_norm_data(R) / den if den > 0 else frob_norm_data(R)


def metrics(A: QMatrix, U: QMatrix | None = None, T: QMatrix | None = None,
            X: QMatrix | None = None, lambdas=None) -> Metrics:
    """The three stability measures; any whose inputs are missing is ``None``."""
    e1 = orthogonality_error(U) if U is not None else None
    e2 = schur_error(A, U, T) if U is not None and T is not None else None
    e3 = eigenpair_error(A, X, lambdas) if X is not None and lambdas is not None else None
    return Metrics(e1, e2, e3)
