"""Eigenvalue swapping, Schur form reordering and aggressive early deflation (AED)."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .qmat import QMatrix, Rotation2, adjoint_data, frob_norm_data, qmatmul_data
from .quat import EPS, SAFMIN, Quaternion, qabs_arr, qconj_arr, qmul_arr
from .sylvester import solve_scalar

# (upper bound on active size, window) pairs; sizes below 12 run without AED
WINDOW_SCHEDULE = ((12, 0), (30, 4), (60, 6), (150, 10), (590, 24))
WINDOW_LARGE = 64


@dataclass(frozen=True)
class AedConfig:
    """Settings for aggressive early deflation.

    Attributes
    ----------
    window : int or None
        Fixed window size; ``None`` uses :data:`WINDOW_SCHEDULE`.
    nibble : float
        Skip the next QR sweep when at least this percentage of the window deflated.
    spike_rule : {"standard", "never"}
        ``"never"`` treats every spike entry as undeflatable (diagnostics only).
    """

    window: int | None = None
    nibble: float = 14.0
    spike_rule: str = "standard"

    def __post_init__(self):
        if not (0.0 <= self.nibble <= 100.0):
            raise ValueError("nibble must lie in [0, 100]")
        if self.spike_rule not in ("standard", "never"):
            raise ValueError(f"unknown spike_rule {self.spike_rule!r}")
        if self.window is not None and self.window < 2:
            raise ValueError("AED window must be at least 2")


@dataclass
class AedOutcome:
    """Result of one AED call: ``n_deflated + n_undeflatable == window``."""

    window: int
    n_deflated: int
    n_undeflatable: int
    spike: np.ndarray
    inner_sweeps: int = 0


def aed_window_size(n: int, cfg: AedConfig | None = None) -> int:
    """AED window for an ``n x n`` problem, or 0 when AED is off (``n < 12``)."""
    if n < 12:
        return 0
    if cfg is not None and cfg.window is not None:
        return max(2, min(cfg.window, n - 1))
    for bound, nw in WINDOW_SCHEDULE:
        if n < bound:
            return nw
    return WINDOW_LARGE


# ---------------------------------------------------------------------------
# swapping


def _swap_data(T, Q, k, spike=None, col_end=None):
    """Exchange ``T[k, k]`` and ``T[k+1, k+1]``; returns the rotation used."""
    ncols = T.shape[1] if col_end is None else col_end
    t11 = complex(T[k, k, 0], T[k, k, 1])
    t22 = complex(T[k + 1, k + 1, 0], T[k + 1, k + 1, 1])
    tol = EPS * (abs(t11) + abs(t22))
    if abs(t11 - t22) <= tol or abs(t11 - t22.conjugate()) <= tol:
        return Rotation2.identity()
    d11 = T[k, k].copy()
    d22 = T[k + 1, k + 1].copy()
    t12 = Quaternion.from_array(T[k, k + 1])
    chi = solve_scalar(t11, t22, -t12)
    G = Rotation2.from_chi(chi)
    c = G.c.to_array()
    _kernels.rot_left(T, k, c, G.s, k, ncols)
    _kernels.rot_right(T, k, c, G.s, 0, k + 2)
    if Q is not None:
        _kernels.rot_right(Q, k, c, G.s, 0, Q.shape[0])
    if spike is not None:
        a = spike[k].copy()
        b = spike[k + 1].copy()
        spike[k] = qmul_arr(qconj_arr(c), a) + G.s * b
        spike[k + 1] = qmul_arr(c, b) - G.s * a
    chib = chi.conj()
    T[k, k] = d22
    T[k + 1, k + 1] = d11
    T[k, k + 1] = (Quaternion.from_array(d22) * chib - chib * Quaternion.from_array(d11)).to_array()
    T[k + 1, k] = 0.0
    return G


_FUSED_SWAP = _kernels.FUSED_NUMBA.get("swap") if _kernels.BACKEND == "numba" else None
_NO_Q = np.zeros((0, 2, 4))
_NO_SPIKE = np.zeros((2, 4))


def _swap_fast(T, Q, k, spike=None):
    """Same effect as :func:`_swap_data` without building the rotation object."""
    if _FUSED_SWAP is None:
        _swap_data(T, Q, k, spike)
        return
    _FUSED_SWAP(T, _NO_Q if Q is None else Q, k, _NO_SPIKE if spike is None else spike,
                T.shape[1], 0 if Q is None else Q.shape[0], spike is not None)


def swap_adjacent(T: QMatrix, Q: QMatrix | None, k: int) -> Rotation2:
    """Swap diagonal entries ``k`` and ``k+1`` of a standardized Schur form in place.

    ``T <- G^H T G`` and ``Q <- Q G`` with ``G = [[c, -s], [s, conj(c)]]`` built
    from the solution ``chi`` of ``t11 chi - chi t22 = -t12``.  The diagonal
    entries are copied, so they move bit-for-bit; the new ``T[k, k+1]`` is
    ``t22 conj(chi) - conj(chi) t11``.  Entries of one similarity class leave
    everything untouched and return the identity rotation.
    """
    n = T.nrows
    if not (0 <= k < n - 1):
        raise IndexError(f"swap position {k} outside [0, {n - 1})")
    return _swap_data(T.data, None if Q is None else Q.data, k)


def reorder_selected(T: QMatrix, Q: QMatrix | None, select) -> list[int]:
    """Move the selected eigenvalues to the leading positions, stably.

    Returns ``perm`` with ``perm[i]`` the original index of the eigenvalue now
    at position ``i``.
    """
    select = [bool(s) for s in select]
    n = T.nrows
    if len(select) != n:
        raise ValueError(f"mask length {len(select)} != {n}")
    perm = list(range(n))
    Qd = None if Q is None else Q.data
    ks = 0
    for k in range(n):
        if not select[k]:
            continue
        for j in range(k - 1, ks - 1, -1):
            _swap_fast(T.data, Qd, j)
            perm[j], perm[j + 1] = perm[j + 1], perm[j]
        ks += 1
    return perm


# ---------------------------------------------------------------------------
# aggressive early deflation


def _aed_data(H, U, lo, hi, nw, cfg, stats=None):
    from .schur import _hessenberg_inplace, window_schur

    n = H.shape[0]
    kwtop = hi - nw + 1
    if nw < 1 or kwtop <= lo:
        return AedOutcome(0, 0, 0, np.zeros(0))
    if stats is not None:
        stats.aed_calls += 1
    s = H[kwtop, kwtop - 1].copy()
    Tw = H[kwtop:hi + 1, kwtop:hi + 1].copy()
    hnorm = frob_norm_data(Tw)
    V = np.zeros((nw, nw, 4))
    V[np.arange(nw), np.arange(nw), 0] = 1.0

    # stage 1: Schur form of the window
    inner_sweeps = window_schur(Tw, V, 30 * max(nw, 10))
    if inner_sweeps < 0:
        # window did not converge: give up on this pass, H is untouched
        return AedOutcome(nw, 0, nw, np.zeros(nw), 30 * max(nw, 10))
    if stats is not None:
        stats.aed_inner_sweeps += inner_sweeps
    spike = qmul_arr(qconj_arr(V[0]), s)
    spike_mag = qabs_arr(spike)

    # stage 2: test the spike bottom-up; undeflatable eigenvalues rotate to the top
    never = cfg is not None and cfg.spike_rule == "never"
    floor = max(EPS * hnorm / nw, SAFMIN)
    ns = nw
    ilst = 0
    while ilst < ns:
        k = ns - 1
        lam_abs = math.hypot(Tw[k, k, 0], Tw[k, k, 1])
        sk = math.sqrt(float(spike[k] @ spike[k]))
        if not never and sk <= max(EPS * lam_abs, floor):
            spike[k] = 0.0
            ns -= 1
        else:
            for j in range(k - 1, ilst - 1, -1):
                _swap_fast(Tw, V, j, spike)
            ilst += 1
    ndfl = nw - ns
    if stats is not None:
        stats.aed_deflated += ndfl
        stats.aed_undeflatable += ns
    if ndfl == 0:
        return AedOutcome(nw, 0, nw, spike_mag, inner_sweeps)

    # stage 3: fold the spike back and restore Hessenberg form
    if ns > 1:
        G = np.zeros((nw + 1, nw + 1, 4))
        G[1:, 0] = spike
        G[1:, 1:] = Tw
        _hessenberg_inplace(G, V, 0, ns, zshift=1, row_end=ns + 1)
        spike = G[1:, 0].copy()
        Tw = G[1:, 1:].copy()
    H[kwtop:hi + 1, kwtop - 1] = spike
    H[kwtop:hi + 1, kwtop:hi + 1] = Tw
    if kwtop > 0:
        H[:kwtop, kwtop:hi + 1] = qmatmul_data(H[:kwtop, kwtop:hi + 1], V)
    if hi + 1 < n:
        H[kwtop:hi + 1, hi + 1:] = qmatmul_data(adjoint_data(V), H[kwtop:hi + 1, hi + 1:])
    if U is not None:
        t0 = time.perf_counter()
        U[:, kwtop:hi + 1] = qmatmul_data(U[:, kwtop:hi + 1], V)
        if stats is not None:
            stats.t_q += time.perf_counter() - t0
    return AedOutcome(nw, ndfl, ns, spike_mag, inner_sweeps)


def aed_step(H: QMatrix, U: QMatrix | None, lo: int, hi: int, cfg: AedConfig | None = None) -> AedOutcome:
    """One aggressive-early-deflation pass on the active Hessenberg block ``[lo, hi]``.

    The trailing window is brought to standardized Schur form, its spike is
    tested from the bottom, and eigenvalues whose spike entry is tiny are
    deflated.  ``H`` and ``U`` are updated in place; the caller may shrink
    the active block by ``n_deflated``.  When nothing deflates, or the block
    is too small to hold a window plus spike, ``H`` is left untouched.
    """
    cfg = AedConfig() if cfg is None else cfg
    n = H.nrows
    if not (0 <= lo <= hi < n):
        raise IndexError("active block out of range")
    m = hi - lo + 1
    if cfg.window is not None:
        nw = min(cfg.window, m - 1)
    else:
        nw = min(aed_window_size(n, cfg), m - 1)
    if nw < 2:
        return AedOutcome(0, 0, 0, np.zeros(0))
    return _aed_data(H.data, None if U is None else U.data, lo, hi, nw, cfg)
