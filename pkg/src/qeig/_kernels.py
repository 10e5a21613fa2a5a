"""Inner loops of the eigensolver.

Every kernel exists twice with the same signature: a scalar-loop version
compiled with numba, and a vectorised numpy version.  The environment
variable ``QEIG_BACKEND`` (``numba`` or ``numpy``) picks the one exported
under the public name; the default is numba when it imports.  Both sets are
always reachable through :data:`NUMBA_KERNELS` / :data:`NUMPY_KERNELS` so
the test-suite and the benchmark can compare them.

Arrays are quaternion arrays with a trailing axis of length 4, ``(w, x, y, z)``.
A reflector is ``P = I - v tau v^H`` with ``v[0] = 1`` and a quaternion ``tau``.
A rotation is the 2x2 block ``[[c, -s], [s, conj(c)]]`` with quaternion ``c``
and real ``s``.
"""
from __future__ import annotations

import math
import os

import numpy as np

from .quat import EPS, SAFMIN, qabs_arr, qconj_arr, qmul_arr

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

_requested = os.environ.get("QEIG_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"QEIG_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
BACKEND = "numpy" if (_requested == "numpy" or not HAVE_NUMBA) else "numba"

_BIG = np.finfo(np.float64).max / 16.0


def _njit(fn):
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# scalar-loop implementations (compiled by numba)


def _qm(a0, a1, a2, a3, b0, b1, b2, b3):
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


_qm_nb = _njit(_qm)


def _qnorm(a0, a1, a2, a3):
    # modulus without overflow/underflow in the squares
    m = max(abs(a0), abs(a1), abs(a2), abs(a3))
    if m == 0.0 or m == np.inf:
        return m
    a0 /= m
    a1 /= m
    a2 /= m
    a3 /= m
    return m * math.sqrt(a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3)


_qnorm_nb = _njit(_qnorm)


def _house_loop(x, m, v, tau):
    s = 0.0
    for i in range(m):
        for c in range(4):
            a = abs(x[i, c])
            if a > s:
                s = a
    for c in range(4):
        tau[c] = 0.0
        v[0, c] = 0.0
    v[0, 0] = 1.0
    for i in range(1, m):
        for c in range(4):
            v[i, c] = 0.0
    if s == 0.0:
        return 0.0
    inv = 1.0 / s
    a0 = x[0, 0] * inv
    a1 = x[0, 1] * inv
    a2 = x[0, 2] * inv
    a3 = x[0, 3] * inv
    tail = 0.0
    for i in range(1, m):
        for c in range(4):
            t = x[i, c] * inv
            tail += t * t
    im2 = a1 * a1 + a2 * a2 + a3 * a3
    if tail == 0.0 and im2 == 0.0 and a0 >= 0.0:
        return x[0, 0]
    beta = math.sqrt(a0 * a0 + im2 + tail)
    if a0 <= 0.0:
        c0 = a0 - beta
    else:
        c0 = -(im2 + tail) / (a0 + beta)
    cn2 = c0 * c0 + im2
    if cn2 == 0.0:
        return x[0, 0]
    tau[0] = -c0 / beta
    tau[1] = -a1 / beta
    tau[2] = -a2 / beta
    tau[3] = -a3 / beta
    # v_i = x_i c^{-1}, c^{-1} = conj(c) / |c|^2
    i0 = c0 / cn2
    i1 = -a1 / cn2
    i2 = -a2 / cn2
    i3 = -a3 / cn2
    for i in range(1, m):
        r = _qm_nb(x[i, 0] * inv, x[i, 1] * inv, x[i, 2] * inv, x[i, 3] * inv, i0, i1, i2, i3)
        v[i, 0] = r[0]
        v[i, 1] = r[1]
        v[i, 2] = r[2]
        v[i, 3] = r[3]
    return beta * s


def _reflect_left_loop(A, v, tau, m, r0, c0, c1):
    # A[r0:r0+m, c0:c1] <- (I - v conj(tau) v^H) A
    t0, t1, t2, t3 = tau[0], -tau[1], -tau[2], -tau[3]
    for j in range(c0, c1):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        for i in range(m):
            p = _qm_nb(v[i, 0], -v[i, 1], -v[i, 2], -v[i, 3],
                       A[r0 + i, j, 0], A[r0 + i, j, 1], A[r0 + i, j, 2], A[r0 + i, j, 3])
            s0 += p[0]
            s1 += p[1]
            s2 += p[2]
            s3 += p[3]
        s0, s1, s2, s3 = _qm_nb(t0, t1, t2, t3, s0, s1, s2, s3)
        for i in range(m):
            p = _qm_nb(v[i, 0], v[i, 1], v[i, 2], v[i, 3], s0, s1, s2, s3)
            A[r0 + i, j, 0] -= p[0]
            A[r0 + i, j, 1] -= p[1]
            A[r0 + i, j, 2] -= p[2]
            A[r0 + i, j, 3] -= p[3]


def _reflect_right_loop(A, v, tau, m, c0, r0, r1):
    # A[r0:r1, c0:c0+m] <- A (I - v tau v^H)
    for i in range(r0, r1):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        for k in range(m):
            p = _qm_nb(A[i, c0 + k, 0], A[i, c0 + k, 1], A[i, c0 + k, 2], A[i, c0 + k, 3],
                       v[k, 0], v[k, 1], v[k, 2], v[k, 3])
            s0 += p[0]
            s1 += p[1]
            s2 += p[2]
            s3 += p[3]
        s0, s1, s2, s3 = _qm_nb(s0, s1, s2, s3, tau[0], tau[1], tau[2], tau[3])
        for k in range(m):
            p = _qm_nb(s0, s1, s2, s3, v[k, 0], -v[k, 1], -v[k, 2], -v[k, 3])
            A[i, c0 + k, 0] -= p[0]
            A[i, c0 + k, 1] -= p[1]
            A[i, c0 + k, 2] -= p[2]
            A[i, c0 + k, 3] -= p[3]


_house_nb = _njit(_house_loop)
_reflect_left_nb = _njit(_reflect_left_loop)
_reflect_right_nb = _njit(_reflect_right_loop)


def _chase_loop(H, lo, hi, p1, p0, V, TAU):
    n = H.shape[0]
    x = np.zeros((3, 4))
    v = np.zeros((3, 4))
    tau = np.zeros(4)
    h00 = H[lo, lo]
    h10 = H[lo + 1, lo]
    h01 = H[lo, lo + 1]
    h11 = H[lo + 1, lo + 1]
    a = _qm_nb(h00[0], h00[1], h00[2], h00[3], h00[0], h00[1], h00[2], h00[3])
    b = _qm_nb(h01[0], h01[1], h01[2], h01[3], h10[0], h10[1], h10[2], h10[3])
    for c in range(4):
        x[0, c] = a[c] + b[c] + p1 * h00[c]
    x[0, 0] += p0
    a = _qm_nb(h10[0], h10[1], h10[2], h10[3], h00[0], h00[1], h00[2], h00[3])
    b = _qm_nb(h11[0], h11[1], h11[2], h11[3], h10[0], h10[1], h10[2], h10[3])
    for c in range(4):
        x[1, c] = a[c] + b[c] + p1 * h10[c]
    if hi - lo >= 2:
        h21 = H[lo + 2, lo + 1]
        a = _qm_nb(h21[0], h21[1], h21[2], h21[3], h10[0], h10[1], h10[2], h10[3])
        for c in range(4):
            x[2, c] = a[c]
    nref = 0
    for k in range(lo, hi):
        m = min(3, hi - k + 1)
        if k > lo:
            for i in range(m):
                for c in range(4):
                    x[i, c] = H[k + i, k - 1, c]
        beta = _house_nb(x, m, v, tau)
        cstart = lo
        if k > lo:
            H[k, k - 1, 0] = beta
            for c in range(1, 4):
                H[k, k - 1, c] = 0.0
            for i in range(1, m):
                for c in range(4):
                    H[k + i, k - 1, c] = 0.0
            cstart = k
        _reflect_left_nb(H, v, tau, m, k, cstart, n)
        _reflect_right_nb(H, v, tau, m, k, 0, min(k + 3, hi) + 1)
        for i in range(3):
            for c in range(4):
                V[nref, i, c] = v[i, c]
        for c in range(4):
            TAU[nref, c] = tau[c]
        nref += 1
    return nref


def _apply_seq_right_loop(U, V, TAU, lo, hi, nref):
    n = U.shape[0]
    for idx in range(nref):
        k = lo + idx
        m = min(3, hi - k + 1)
        _reflect_right_nb(U, V[idx], TAU[idx], m, k, 0, n)


def _rot_left_loop(A, k, c, s, c0, c1):
    # rows k, k+1 of A[:, c0:c1] <- [[conj(c), s], [-s, c]] @ rows
    for j in range(c0, c1):
        a0, a1, a2, a3 = A[k, j, 0], A[k, j, 1], A[k, j, 2], A[k, j, 3]
        b0, b1, b2, b3 = A[k + 1, j, 0], A[k + 1, j, 1], A[k + 1, j, 2], A[k + 1, j, 3]
        p = _qm_nb(c[0], -c[1], -c[2], -c[3], a0, a1, a2, a3)
        q = _qm_nb(c[0], c[1], c[2], c[3], b0, b1, b2, b3)
        A[k, j, 0] = p[0] + s * b0
        A[k, j, 1] = p[1] + s * b1
        A[k, j, 2] = p[2] + s * b2
        A[k, j, 3] = p[3] + s * b3
        A[k + 1, j, 0] = q[0] - s * a0
        A[k + 1, j, 1] = q[1] - s * a1
        A[k + 1, j, 2] = q[2] - s * a2
        A[k + 1, j, 3] = q[3] - s * a3


def _rot_right_loop(A, k, c, s, r0, r1):
    # columns k, k+1 of A[r0:r1] <- cols @ [[c, -s], [s, conj(c)]]
    for i in range(r0, r1):
        a0, a1, a2, a3 = A[i, k, 0], A[i, k, 1], A[i, k, 2], A[i, k, 3]
        b0, b1, b2, b3 = A[i, k + 1, 0], A[i, k + 1, 1], A[i, k + 1, 2], A[i, k + 1, 3]
        p = _qm_nb(a0, a1, a2, a3, c[0], c[1], c[2], c[3])
        q = _qm_nb(b0, b1, b2, b3, c[0], -c[1], -c[2], -c[3])
        A[i, k, 0] = p[0] + s * b0
        A[i, k, 1] = p[1] + s * b1
        A[i, k, 2] = p[2] + s * b2
        A[i, k, 3] = p[3] + s * b3
        A[i, k + 1, 0] = q[0] - s * a0
        A[i, k + 1, 1] = q[1] - s * a1
        A[i, k + 1, 2] = q[2] - s * a2
        A[i, k + 1, 3] = q[3] - s * a3


def _cdiv(gr, gi, dr, di, dn):
    # (gr + gi i) / (dr + di i) with dn = |d| > 0; avoids squaring |d|
    ur = dr / dn
    ui = di / dn
    return (gr * ur + gi * ui) / dn, (gi * ur - gr * ui) / dn


_cdiv_nb = _njit(_cdiv)
_chase_nb = _njit(_chase_loop)
_apply_seq_right_nb = _njit(_apply_seq_right_loop)
_rot_left_nb = _njit(_rot_left_loop)
_rot_right_nb = _njit(_rot_right_loop)


def _solve_triu_loop(T, n, lr, li, b):
    # T[:n,:n] x - x (lr + li i) = b, b overwritten by x.
    # Returns (scale, bad) with bad = -1 unless a diagonal entry collides.
    scale = 1.0
    lam_abs = math.hypot(lr, li)
    for i in range(n - 1, -1, -1):
        ar = T[i, i, 0]
        ai = T[i, i, 1]
        d1r = ar - lr
        d1i = ai - li
        d2r = ar - lr
        d2i = ai + li
        n1 = math.hypot(d1r, d1i)
        n2 = math.hypot(d2r, d2i)
        tol = EPS * (math.hypot(ar, ai) + lam_abs)
        if n1 <= tol or n2 <= tol:
            return scale, i
        g1r, g1i, g2r, g2i = b[i, 0], b[i, 1], b[i, 2], b[i, 3]
        bmax = max(math.hypot(g1r, g1i), math.hypot(g2r, g2i))
        dmin = min(n1, n2)
        if dmin < 1.0 and bmax > dmin * _BIG:
            f = dmin * _BIG / bmax
            for r in range(n):
                for c in range(4):
                    b[r, c] *= f
            scale *= f
            g1r, g1i, g2r, g2i = b[i, 0], b[i, 1], b[i, 2], b[i, 3]
        x0, x1 = _cdiv_nb(g1r, g1i, d1r, d1i, n1)
        x2, x3 = _cdiv_nb(g2r, g2i, d2r, d2i, n2)
        b[i, 0] = x0
        b[i, 1] = x1
        b[i, 2] = x2
        b[i, 3] = x3
        if i == 0:
            break
        xabs = _qnorm_nb(x0, x1, x2, x3)
        cmax = 0.0
        rmax = 0.0
        for r in range(i):
            t = _qnorm_nb(T[r, i, 0], T[r, i, 1], T[r, i, 2], T[r, i, 3])
            if t > cmax:
                cmax = t
            t = _qnorm_nb(b[r, 0], b[r, 1], b[r, 2], b[r, 3])
            if t > rmax:
                rmax = t
        if xabs > 1.0 and cmax > (_BIG - rmax) / xabs:
            f = 0.5 * (_BIG / xabs) / (cmax + rmax / xabs)
            for r in range(n):
                for c in range(4):
                    b[r, c] *= f
            scale *= f
            x0, x1, x2, x3 = b[i, 0], b[i, 1], b[i, 2], b[i, 3]
        for r in range(i):
            p = _qm_nb(T[r, i, 0], T[r, i, 1], T[r, i, 2], T[r, i, 3], x0, x1, x2, x3)
            b[r, 0] -= p[0]
            b[r, 1] -= p[1]
            b[r, 2] -= p[2]
            b[r, 3] -= p[3]
    return scale, -1


def _swap_loop(T, Q, k, spike, ncols, nq, use_spike):
    # Exchange T[k,k] and T[k+1,k+1] of a standardized Schur form; returns 0
    # when both lie in one similarity class (nothing done), else 1.
    ar, ai = T[k, k, 0], T[k, k, 1]
    br, bi = T[k + 1, k + 1, 0], T[k + 1, k + 1, 1]
    tol = EPS * (math.hypot(ar, ai) + math.hypot(br, bi))
    d1r, d1i = ar - br, ai - bi
    d2r, d2i = ar - br, ai + bi
    if math.hypot(d1r, d1i) <= tol or math.hypot(d2r, d2i) <= tol:
        return 0
    # chi solves t11 chi - chi t22 = -t12
    g1r, g1i = -T[k, k + 1, 0], -T[k, k + 1, 1]
    g2r, g2i = -T[k, k + 1, 2], -T[k, k + 1, 3]
    x0, x1 = _cdiv_nb(g1r, g1i, d1r, d1i, math.hypot(d1r, d1i))
    x2, x3 = _cdiv_nb(g2r, g2i, d2r, d2i, math.hypot(d2r, d2i))
    a = _qnorm_nb(x0, x1, x2, x3)
    if a <= 1.0:
        s = 1.0 / math.sqrt(1.0 + a * a)
        f = s
    else:
        r = 1.0 / a
        s = r / math.sqrt(1.0 + r * r)
        f = s
    c = np.empty(4)
    c[0], c[1], c[2], c[3] = x0 * f, x1 * f, x2 * f, x3 * f
    _rot_left_nb(T, k, c, s, k, ncols)
    _rot_right_nb(T, k, c, s, 0, k + 2)
    if nq > 0:
        _rot_right_nb(Q, k, c, s, 0, nq)
    if use_spike:
        a0, a1, a2, a3 = spike[k, 0], spike[k, 1], spike[k, 2], spike[k, 3]
        b0, b1, b2, b3 = spike[k + 1, 0], spike[k + 1, 1], spike[k + 1, 2], spike[k + 1, 3]
        p = _qm_nb(c[0], -c[1], -c[2], -c[3], a0, a1, a2, a3)
        q = _qm_nb(c[0], c[1], c[2], c[3], b0, b1, b2, b3)
        spike[k, 0] = p[0] + s * b0
        spike[k, 1] = p[1] + s * b1
        spike[k, 2] = p[2] + s * b2
        spike[k, 3] = p[3] + s * b3
        spike[k + 1, 0] = q[0] - s * a0
        spike[k + 1, 1] = q[1] - s * a1
        spike[k + 1, 2] = q[2] - s * a2
        spike[k + 1, 3] = q[3] - s * a3
    # new T[k, k+1] = t22 conj(chi) - conj(chi) t11, diagonals copied exactly
    p = _qm_nb(br, bi, 0.0, 0.0, x0, -x1, -x2, -x3)
    q = _qm_nb(x0, -x1, -x2, -x3, ar, ai, 0.0, 0.0)
    T[k, k, 0], T[k, k, 1], T[k, k, 2], T[k, k, 3] = br, bi, 0.0, 0.0
    T[k + 1, k + 1, 0], T[k + 1, k + 1, 1], T[k + 1, k + 1, 2], T[k + 1, k + 1, 3] = ar, ai, 0.0, 0.0
    for cc in range(4):
        T[k, k + 1, cc] = p[cc] - q[cc]
        T[k + 1, k, cc] = 0.0
    return 1


def _eig2x2_loop(H, k):
    # standardized eigenvalue of H[k:k+2, k:k+2] nearest to the class of H[k+1, k+1]
    M = np.empty((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            c1 = complex(H[k + i, k + j, 0], H[k + i, k + j, 1])
            c2 = complex(H[k + i, k + j, 2], H[k + i, k + j, 3])
            M[i, j] = c1
            M[i, j + 2] = c2
            M[i + 2, j] = -c2.conjugate()
            M[i + 2, j + 2] = c1.conjugate()
    ev = np.linalg.eigvals(M)
    tr = H[k + 1, k + 1, 0]
    ti = math.sqrt(H[k + 1, k + 1, 1] ** 2 + H[k + 1, k + 1, 2] ** 2 + H[k + 1, k + 1, 3] ** 2)
    best = 0
    bd = np.inf
    for i in range(4):
        d = math.hypot(ev[i].real - tr, abs(ev[i].imag) - ti)
        if d < bd:
            bd = d
            best = i
    return ev[best].real, abs(ev[best].imag)


def _standardize_loop(T, U):
    n = T.shape[0]
    nu = U.shape[0]
    for k in range(n):
        w, x, y, z = T[k, k, 0], T[k, k, 1], T[k, k, 2], T[k, k, 3]
        if y == 0.0 and z == 0.0 and x >= 0.0:
            continue
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            T[k, k, 0], T[k, k, 1], T[k, k, 2], T[k, k, 3] = w, 0.0, 0.0, 0.0
            continue
        ux, uy, uz = x / r, y / r, z / r
        if ux >= 0.0:
            a = 1.0 + ux
        else:
            a = (uy * uy + uz * uz) / (1.0 - ux)
        nrm = math.sqrt(a * a + uz * uz + uy * uy)
        if nrm == 0.0:
            o0, o1, o2, o3 = 0.0, 0.0, 1.0, 0.0
        else:
            o0, o1, o2, o3 = a / nrm, 0.0, -uz / nrm, uy / nrm
        for j in range(k + 1, n):
            p = _qm_nb(o0, -o1, -o2, -o3, T[k, j, 0], T[k, j, 1], T[k, j, 2], T[k, j, 3])
            T[k, j, 0], T[k, j, 1], T[k, j, 2], T[k, j, 3] = p[0], p[1], p[2], p[3]
        for i in range(k):
            p = _qm_nb(T[i, k, 0], T[i, k, 1], T[i, k, 2], T[i, k, 3], o0, o1, o2, o3)
            T[i, k, 0], T[i, k, 1], T[i, k, 2], T[i, k, 3] = p[0], p[1], p[2], p[3]
        for i in range(nu):
            p = _qm_nb(U[i, k, 0], U[i, k, 1], U[i, k, 2], U[i, k, 3], o0, o1, o2, o3)
            U[i, k, 0], U[i, k, 1], U[i, k, 2], U[i, k, 3] = p[0], p[1], p[2], p[3]
        T[k, k, 0], T[k, k, 1], T[k, k, 2], T[k, k, 3] = w, r, 0.0, 0.0


_eig2x2_nb = _njit(_eig2x2_loop)
_standardize_nb = _njit(_standardize_loop)


def _window_schur_loop(T, V, max_sweeps):
    # Standardized Schur form of a small Hessenberg T (in place), transforms
    # accumulated into V.  Returns the sweep count, or -1 on nonconvergence.
    n = T.shape[0]
    VV = np.zeros((max(n, 1), 3, 4))
    TAU = np.zeros((max(n, 1), 4))
    sweeps = 0
    its = 0
    ihi = n - 1
    while ihi > 0:
        ilo = 0
        for k in range(1, ihi + 1):
            sub = math.sqrt(T[k, k - 1, 0] ** 2 + T[k, k - 1, 1] ** 2 + T[k, k - 1, 2] ** 2 + T[k, k - 1, 3] ** 2)
            tst = (math.sqrt(T[k - 1, k - 1, 0] ** 2 + T[k - 1, k - 1, 1] ** 2
                             + T[k - 1, k - 1, 2] ** 2 + T[k - 1, k - 1, 3] ** 2)
                   + math.sqrt(T[k, k, 0] ** 2 + T[k, k, 1] ** 2 + T[k, k, 2] ** 2 + T[k, k, 3] ** 2))
            if sub <= max(EPS * tst, SAFMIN):
                for c in range(4):
                    T[k, k - 1, c] = 0.0
                ilo = k
        if ilo == ihi:
            ihi -= 1
            its = 0
            continue
        if sweeps >= max_sweeps:
            return -1
        kk = ihi - 1
        if its > 0 and its % 10 == 0:
            kk = ilo
        lr, li = _eig2x2_nb(T, kk)
        nref = _chase_nb(T, ilo, ihi, -2.0 * lr, lr * lr + li * li, VV, TAU)
        _apply_seq_right_nb(V, VV, TAU, ilo, ihi, nref)
        sweeps += 1
        its += 1
    _standardize_nb(T, V)
    return sweeps


# ---------------------------------------------------------------------------
# numpy implementations


def _house_np(x, m, v, tau):
    x = np.asarray(x[:m], dtype=np.float64)
    v[:] = 0.0
    v[0, 0] = 1.0
    tau[:] = 0.0
    s = np.max(np.abs(x)) if x.size else 0.0
    if s == 0.0:
        return 0.0
    xs = x / s
    a = xs[0]
    tail = float(np.sum(xs[1:] ** 2))
    im2 = float(a[1] ** 2 + a[2] ** 2 + a[3] ** 2)
    if tail == 0.0 and im2 == 0.0 and a[0] >= 0.0:
        return float(x[0, 0])
    beta = math.sqrt(a[0] ** 2 + im2 + tail)
    c = a.copy()
    c[0] = a[0] - beta if a[0] <= 0.0 else -(im2 + tail) / (a[0] + beta)
    cn2 = float(c @ c)
    if cn2 == 0.0:
        return float(x[0, 0])
    tau[:] = -c / beta
    if m > 1:
        v[1:m] = qmul_arr(xs[1:], qconj_arr(c) / cn2)
    return beta * s


def _reflect_left_np(A, v, tau, m, r0, c0, c1):
    if c1 <= c0:
        return
    blk = A[r0:r0 + m, c0:c1]
    s = qmul_arr(qconj_arr(v[:m])[:, None, :], blk).sum(axis=0)
    s = qmul_arr(qconj_arr(tau), s)
    blk -= qmul_arr(v[:m, None, :], s[None, :, :])


def _reflect_right_np(A, v, tau, m, c0, r0, r1):
    if r1 <= r0:
        return
    blk = A[r0:r1, c0:c0 + m]
    s = qmul_arr(blk, v[None, :m, :]).sum(axis=1)
    s = qmul_arr(s, tau)
    blk -= qmul_arr(s[:, None, :], qconj_arr(v[:m])[None, :, :])


def _chase_np(H, lo, hi, p1, p0, V, TAU):
    n = H.shape[0]
    x = np.zeros((3, 4))
    v = np.zeros((3, 4))
    tau = np.zeros(4)
    h00, h10, h01, h11 = H[lo, lo], H[lo + 1, lo], H[lo, lo + 1], H[lo + 1, lo + 1]
    x[0] = qmul_arr(h00, h00) + qmul_arr(h01, h10) + p1 * h00
    x[0, 0] += p0
    x[1] = qmul_arr(h10, h00) + qmul_arr(h11, h10) + p1 * h10
    if hi - lo >= 2:
        x[2] = qmul_arr(H[lo + 2, lo + 1], h10)
    nref = 0
    for k in range(lo, hi):
        m = min(3, hi - k + 1)
        if k > lo:
            x[:m] = H[k:k + m, k - 1]
        beta = _house_np(x, m, v, tau)
        cstart = lo
        if k > lo:
            H[k:k + m, k - 1] = 0.0
            H[k, k - 1, 0] = beta
            cstart = k
        _reflect_left_np(H, v, tau, m, k, cstart, n)
        _reflect_right_np(H, v, tau, m, k, 0, min(k + 3, hi) + 1)
        V[nref] = v
        TAU[nref] = tau
        nref += 1
    return nref


def _apply_seq_right_np(U, V, TAU, lo, hi, nref):
    n = U.shape[0]
    for idx in range(nref):
        k = lo + idx
        _reflect_right_np(U, V[idx], TAU[idx], min(3, hi - k + 1), k, 0, n)


def _rot_left_np(A, k, c, s, c0, c1):
    a = A[k, c0:c1].copy()
    b = A[k + 1, c0:c1].copy()
    A[k, c0:c1] = qmul_arr(qconj_arr(c), a) + s * b
    A[k + 1, c0:c1] = qmul_arr(c, b) - s * a


def _rot_right_np(A, k, c, s, r0, r1):
    a = A[r0:r1, k].copy()
    b = A[r0:r1, k + 1].copy()
    A[r0:r1, k] = qmul_arr(a, c) + s * b
    A[r0:r1, k + 1] = qmul_arr(b, qconj_arr(c)) - s * a


def _solve_triu_np(T, n, lr, li, b):
    scale = 1.0
    lam = complex(lr, li)
    for i in range(n - 1, -1, -1):
        alpha = complex(T[i, i, 0], T[i, i, 1])
        d1 = alpha - lam
        d2 = alpha - lam.conjugate()
        tol = EPS * (abs(alpha) + abs(lam))
        if abs(d1) <= tol or abs(d2) <= tol:
            return scale, i
        g1 = complex(b[i, 0], b[i, 1])
        g2 = complex(b[i, 2], b[i, 3])
        dmin = min(abs(d1), abs(d2))
        bmax = max(abs(g1), abs(g2))
        if dmin < 1.0 and bmax > dmin * _BIG:
            f = dmin * _BIG / bmax
            b[:n] *= f
            scale *= f
            g1 = complex(b[i, 0], b[i, 1])
            g2 = complex(b[i, 2], b[i, 3])
        c1 = g1 / d1
        c2 = g2 / d2
        b[i] = (c1.real, c1.imag, c2.real, c2.imag)
        if i == 0:
            break
        xabs = float(qabs_arr(b[i]))
        col = T[:i, i]
        cmax = float(qabs_arr(col).max())
        rmax = float(qabs_arr(b[:i]).max())
        if xabs > 1.0 and cmax > (_BIG - rmax) / xabs:
            f = 0.5 * (_BIG / xabs) / (cmax + rmax / xabs)
            b[:n] *= f
            scale *= f
        b[:i] -= qmul_arr(col, b[i])
    return scale, -1


# ---------------------------------------------------------------------------
# dispatch

_NAMES = ("house", "reflect_left", "reflect_right", "chase", "apply_seq_right",
          "rot_left", "rot_right", "solve_triu")

NUMPY_KERNELS = {
    "house": _house_np,
    "reflect_left": _reflect_left_np,
    "reflect_right": _reflect_right_np,
    "chase": _chase_np,
    "apply_seq_right": _apply_seq_right_np,
    "rot_left": _rot_left_np,
    "rot_right": _rot_right_np,
    "solve_triu": _solve_triu_np,
}

if HAVE_NUMBA:
    NUMBA_KERNELS = {
        "house": _house_nb,
        "reflect_left": _reflect_left_nb,
        "reflect_right": _reflect_right_nb,
        "chase": _chase_nb,
        "apply_seq_right": _apply_seq_right_nb,
        "rot_left": _rot_left_nb,
        "rot_right": _rot_right_nb,
        "solve_triu": _njit(_solve_triu_loop),
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}

# fused loops: numba only; the numpy path runs the equivalent Python drivers
FUSED_NUMBA = {
    "swap": _njit(_swap_loop),
    "window_schur": _njit(_window_schur_loop),
} if HAVE_NUMBA else {}

_ACTIVE = NUMBA_KERNELS if BACKEND == "numba" else NUMPY_KERNELS

house = _ACTIVE["house"]
reflect_left = _ACTIVE["reflect_left"]
reflect_right = _ACTIVE["reflect_right"]
chase = _ACTIVE["chase"]
apply_seq_right = _ACTIVE["apply_seq_right"]
rot_left = _ACTIVE["rot_left"]
rot_right = _ACTIVE["rot_right"]
solve_triu = _ACTIVE["solve_triu"]
