"""Quaternion Schur decomposition by the implicit double-shift QR algorithm.

The pipeline is: Householder reduction to Hessenberg form, implicit QR
sweeps driven by a real quadratic shift polynomial, subdiagonal deflation
(optionally preceded by aggressive early deflation on a trailing window),
and finally a diagonal unitary similarity that moves every diagonal entry
into the closed upper half of the complex plane.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NonConvergenceError
from .qmat import QMatrix, frob_norm_data
from .quat import EPS, SAFMIN, qabs_arr, qconj_arr, qmul_arr, standardize, Quaternion

AED_MIN_ACTIVE = 12


@dataclass(frozen=True)
class ShiftPoly:
    """``p(z) = z**2 + p1 z + p0`` with real coefficients."""

    p1: float
    p0: float

    @classmethod
    def from_eigenvalue(cls, lam: complex) -> ShiftPoly:
        lam = complex(lam)
        return cls(-2.0 * lam.real, lam.real * lam.real + lam.imag * lam.imag)

    def roots(self) -> tuple[complex, complex]:
        r = np.roots([1.0, self.p1, self.p0])
        return complex(r[0]), complex(r[1])


@dataclass
class IterationStats:
    """Counters and phase timers gathered during one decomposition."""

    sweeps: int = 0
    aed_calls: int = 0
    aed_deflated: int = 0
    aed_undeflatable: int = 0
    aed_skipped_sweeps: int = 0
    aed_inner_sweeps: int = 0
    exceptional_shifts: int = 0
    t_total: float = 0.0
    t_q: float = 0.0
    t_aed: float = 0.0


@dataclass
class SchurDecomposition:
    """``A = U T U^H`` with ``T`` upper triangular and a standardized complex diagonal."""

    U: QMatrix
    T: QMatrix
    sweeps: int
    stats: IterationStats = field(default_factory=IterationStats)
    used_aed: bool = False

    @property
    def eigenvalues(self) -> np.ndarray:
        d = self.T.diagonal()
        return d[:, 0] + 1j * d[:, 1]

    @property
    def aed_stats(self) -> IterationStats | None:
        return self.stats if self.used_aed else None


# ---------------------------------------------------------------------------
# Hessenberg reduction


def _hessenberg_inplace(H, Z, lo, hi, zshift=0, row_end=None, stats=None):
    """Reduce ``H[lo:hi+1, lo:hi+1]`` to Hessenberg form by reflectors on rows/cols ``lo+1..hi``.

    Left transforms cover every column from the current one to the end of
    ``H``; right transforms cover rows ``0..row_end``.  Each reflector is also
    applied to columns ``k - zshift`` of ``Z``.
    """
    ncols = H.shape[1]
    row_end = hi + 1 if row_end is None else row_end
    nz = Z.shape[0] if Z is not None else 0
    x = np.empty((hi - lo + 1, 4))
    v = np.empty_like(x)
    tau = np.zeros(4)
    for j in range(lo, hi - 1):
        m = hi - j
        x[:m] = H[j + 1:hi + 1, j]
        beta = _kernels.house(x, m, v, tau)
        H[j + 1:hi + 1, j] = 0.0
        H[j + 1, j, 0] = beta
        vm = np.ascontiguousarray(v[:m])
        _kernels.reflect_left(H, vm, tau, m, j + 1, j + 1, ncols)
        _kernels.reflect_right(H, vm, tau, m, j + 1, 0, row_end)
        if Z is not None:
            t0 = time.perf_counter()
            _kernels.reflect_right(Z, vm, tau, m, j + 1 - zshift, 0, nz)
            if stats is not None:
                stats.t_q += time.perf_counter() - t0


def hessenberg_reduce(A: QMatrix) -> tuple[QMatrix, QMatrix]:
    """Unitary similarity ``H = U^H A U`` with ``H`` upper Hessenberg.

    Entries below the first subdiagonal of ``H`` are exact zeros.
    """
    if A.nrows != A.ncols:
        raise ValueError("hessenberg_reduce needs a square matrix")
    n = A.nrows
    H = A.data.copy()
    U = QMatrix.identity(n).data
    _hessenberg_inplace(H, U, 0, n - 1, row_end=n)
    return QMatrix._wrap(H), QMatrix._wrap(U)


# ---------------------------------------------------------------------------
# shifts


def _complex_adjoint_small(b: np.ndarray) -> np.ndarray:
    c1 = b[..., 0] + 1j * b[..., 1]
    c2 = b[..., 2] + 1j * b[..., 3]
    return np.block([[c1, c2], [-c2.conj(), c1.conj()]])


def _eig2x2_data(b: np.ndarray) -> complex:
    ev = np.linalg.eigvals(_complex_adjoint_small(b))
    cand = ev.real + 1j * np.abs(ev.imag)
    target, _ = standardize(Quaternion.from_array(b[1, 1]))
    return complex(cand[np.argmin(np.abs(cand - target))])


def eig2x2(B: QMatrix) -> complex:
    """Standardized eigenvalue of a 2x2 quaternion matrix nearest to ``B[1, 1]``'s class.

    The eigenvalues come from the 4x4 complex adjoint of ``B``.
    """
    if B.shape != (2, 2):
        raise ValueError("eig2x2 needs a 2x2 matrix")
    return _eig2x2_data(B.data)


def make_shift(H: QMatrix, lo: int, hi: int, exceptional: bool = False) -> ShiftPoly:
    """Real shift polynomial from the trailing (or, if ``exceptional``, leading) 2x2 of a window."""
    return _make_shift_data(H.data, lo, hi, exceptional)


def _make_shift_data(H, lo, hi, exceptional=False):
    if hi - lo < 1:
        raise ValueError("shift window needs at least 2 rows")
    k = lo if exceptional else hi - 1
    return ShiftPoly.from_eigenvalue(_eig2x2_data(H[k:k + 2, k:k + 2]))


# ---------------------------------------------------------------------------
# sweeps and deflation


def _sweep_data(H, U, lo, hi, p, stats=None):
    n = H.shape[0]
    V = np.zeros((max(n, 1), 3, 4))
    TAU = np.zeros((max(n, 1), 4))
    nref = _kernels.chase(H, lo, hi, float(p.p1), float(p.p0), V, TAU)
    if U is not None:
        t0 = time.perf_counter()
        _kernels.apply_seq_right(U, V, TAU, lo, hi, nref)
        if stats is not None:
            stats.t_q += time.perf_counter() - t0


def qr_sweep(H: QMatrix, U: QMatrix | None, lo: int, hi: int, p: ShiftPoly) -> None:
    """One implicit QR sweep on the window ``[lo, hi]`` (inclusive) of Hessenberg ``H``.

    The whole of ``H`` is updated (full Schur form) and the transform is
    accumulated into ``U`` when given.
    """
    if hi - lo < 1:
        raise ValueError("QR sweep window must contain at least 2 rows")
    if not (0 <= lo and hi < H.nrows):
        raise IndexError("sweep window out of range")
    _sweep_data(H.data, None if U is None else U.data, lo, hi, p)


def _negligible(H, lo, hi):
    """Boolean mask over k in (lo, hi]: is ``H[k, k-1]`` negligible?"""
    k = np.arange(lo + 1, hi + 1)
    sub = qabs_arr(H[k, k - 1])
    tst = qabs_arr(H[k - 1, k - 1]) + qabs_arr(H[k, k])
    return sub <= np.maximum(EPS * tst, SAFMIN)


def _deflation_scan_data(H, lo, hi):
    if hi <= lo:
        return []
    mask = _negligible(H, lo, hi)
    ks = (np.nonzero(mask)[0] + lo + 1).tolist()
    for k in ks:
        H[k, k - 1] = 0.0
    return ks


def deflation_scan(H: QMatrix, lo: int, hi: int) -> list[int]:
    """Zero every negligible subdiagonal entry of the window ``[lo, hi]``.

    ``H[k, k-1]`` is negligible when its modulus is at most
    ``eps * (|H[k-1, k-1]| + |H[k, k]|)`` (or below the underflow threshold).
    Returns the split points ``k``, i.e. the rows whose subdiagonal was zeroed.
    """
    return _deflation_scan_data(H.data, lo, hi)


def _block_start(H, ihi):
    ks = _deflation_scan_data(H, 0, ihi)
    return ks[-1] if ks else 0


# ---------------------------------------------------------------------------
# standardization


def _standardize_diagonal_data(T, U):
    n = T.shape[0]
    for k in range(n):
        d = T[k, k]
        if d[2] == 0.0 and d[3] == 0.0 and d[1] >= 0.0:
            continue
        lam_c, omega = standardize(Quaternion.from_array(d))
        om = omega.to_array()
        if k + 1 < n:
            T[k, k + 1:] = qmul_arr(qconj_arr(om), T[k, k + 1:])
        if k > 0:
            T[:k, k] = qmul_arr(T[:k, k], om)
        T[k, k] = (lam_c.real, lam_c.imag, 0.0, 0.0)
        if U is not None:
            U[:, k] = qmul_arr(U[:, k], om)


def standardize_diagonal(T: QMatrix, U: QMatrix | None = None) -> None:
    """Diagonal unitary similarity putting each ``T[k, k]`` into the closed upper half plane."""
    _standardize_diagonal_data(T.data, None if U is None else U.data)


# ---------------------------------------------------------------------------
# driver


def _qr_iterate(H, U, max_sweeps, use_aed=False, cfg=None, stats=None):
    """Run QR iterations on Hessenberg ``H`` (in place) until it is triangular."""
    from .reorder import _aed_data, aed_window_size

    n = H.shape[0]
    stats = IterationStats() if stats is None else stats
    nw_max = aed_window_size(n, cfg) if use_aed else 0
    nibble = 14.0 if cfg is None else cfg.nibble
    ihi = n - 1
    its = 0
    while ihi > 0:
        ilo = _block_start(H, ihi)
        if ilo == ihi:
            ihi -= 1
            its = 0
            continue
        m = ihi - ilo + 1
        if nw_max and m >= AED_MIN_ACTIVE:
            nw = min(nw_max, m - 1)
            t0 = time.perf_counter()
            out = _aed_data(H, U, ilo, ihi, nw, cfg, stats)
            stats.t_aed += time.perf_counter() - t0
            if out.n_deflated:
                ihi -= out.n_deflated
                its = 0
                if 100.0 * out.n_deflated >= nibble * nw:
                    stats.aed_skipped_sweeps += 1
                    continue
                ilo = _block_start(H, ihi)
                if ilo >= ihi:
                    continue
        if stats.sweeps >= max_sweeps:
            raise NonConvergenceError(
                f"no convergence after {stats.sweeps} QR sweeps", active_hi=ihi)
        exceptional = its > 0 and its % 10 == 0
        if exceptional:
            stats.exceptional_shifts += 1
        p = _make_shift_data(H, ilo, ihi, exceptional)
        _sweep_data(H, U, ilo, ihi, p, stats)
        stats.sweeps += 1
        its += 1
    return stats


def _window_schur_py(T, V, max_sweeps):
    try:
        st = _qr_iterate(T, V, max_sweeps)
    except NonConvergenceError:
        return -1
    _standardize_diagonal_data(T, V)
    return st.sweeps


# standardized Schur form of a small Hessenberg window; returns sweeps or -1
window_schur = (_kernels.FUSED_NUMBA["window_schur"] if _kernels.BACKEND == "numba"
                else _window_schur_py)


def schur_decompose(A: QMatrix, use_aed: bool = True, aed=None, max_sweeps: int | None = None) -> SchurDecomposition:
    """Quaternion Schur decomposition ``A = U T U^H``.

    Parameters
    ----------
    A : QMatrix
        Square matrix with finite entries.
    use_aed : bool
        Run aggressive early deflation on a trailing window before each sweep
        (only while the active block has at least 12 rows).
    aed : AedConfig, optional
        Window size, NIBBLE threshold and spike test; defaults to ``AedConfig()``.
    max_sweeps : int, optional
        Budget of QR sweeps, default ``30 n``.

    Returns
    -------
    SchurDecomposition
        ``sweeps`` counts the QR sweeps of the main iteration; sweeps spent
        inside AED windows are reported separately in ``stats.aed_inner_sweeps``.

    Raises
    ------
    NonConvergenceError
        When the sweep budget runs out; ``err.partial`` holds the current (U, T).
    """
    from .reorder import AedConfig

    if A.nrows != A.ncols:
        raise ValueError("schur_decompose needs a square matrix")
    if not np.all(np.isfinite(A.data)):
        raise ValueError("matrix has non-finite entries")
    n = A.nrows
    cfg = AedConfig() if aed is None else aed
    max_sweeps = 30 * n if max_sweeps is None else int(max_sweeps)
    stats = IterationStats()
    t_start = time.perf_counter()
    H = A.data.copy()
    U = QMatrix.identity(n).data
    _hessenberg_inplace(H, U, 0, n - 1, row_end=n, stats=stats)
    try:
        _qr_iterate(H, U, max_sweeps, use_aed=use_aed, cfg=cfg, stats=stats)
    except NonConvergenceError as err:
        stats.t_total = time.perf_counter() - t_start
        err.partial = SchurDecomposition(QMatrix._wrap(U), QMatrix._wrap(H), stats.sweeps, stats, use_aed)
        raise
    t0 = time.perf_counter()
    _standardize_diagonal_data(H, U)
    stats.t_q += time.perf_counter() - t0
    stats.t_total = time.perf_counter() - t_start
    return SchurDecomposition(QMatrix._wrap(U), QMatrix._wrap(H), stats.sweeps, stats, use_aed)


def schur_residuals(A: QMatrix, dec: SchurDecomposition) -> tuple[float, float]:
    """``(||U^H U - I||_F / sqrt(n), ||U^H A U - T||_F / ||A||_F)``."""
    from .qmat import adjoint_data, qmatmul_data

    n = A.nrows
    Uh = adjoint_data(dec.U.data)
    G = qmatmul_data(Uh, dec.U.data)
    G[np.arange(n), np.arange(n), 0] -= 1.0
    R = qmatmul_data(qmatmul_data(Uh, A.data), dec.U.data) - dec.T.data
    an = frob_norm_data(A.data)
    return frob_norm_data(G) / np.sqrt(n), frob_norm_data(R) / (an if an > 0 else 1.0)
