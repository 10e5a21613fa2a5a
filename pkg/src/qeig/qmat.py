"""Dense quaternion matrices, elementary unitary transforms, test matrices and file I/O."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import QMatFormatError
from .quat import (
    Quaternion,
    as_quaternion,
    from_complex_pair,
    qabs_arr,
    qconj_arr,
    qmul_arr,
    to_complex_pair,
)

__all__ = [
    "QMatrix", "Reflector", "Rotation2",
    "matmul", "adjoint", "frob_norm",
    "make_reflector", "apply_reflector_left", "apply_reflector_right",
    "apply_rotation_left", "apply_rotation_right",
    "fullrand", "hessrand", "read_qmatrix", "write_qmatrix",
]


class QMatrix:
    """Dense quaternion matrix.

    ``data`` is a C-ordered float64 array of shape ``(nrows, ncols, 4)``;
    ``data[i, j]`` holds entry ``(i, j)`` as ``(w, x, y, z)``.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.array(data, dtype=np.float64, order="C", copy=True)
        if data.ndim != 3 or data.shape[2] != 4:
            raise ValueError(f"expected an (nrows, ncols, 4) array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("QMatrix dimensions must be positive")
        self.data = data

    @classmethod
    def _wrap(cls, data: np.ndarray) -> QMatrix:
        obj = cls.__new__(cls)
        obj.data = np.ascontiguousarray(data, dtype=np.float64)
        return obj

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> QMatrix:
        ncols = nrows if ncols is None else ncols
        return cls._wrap(np.zeros((nrows, ncols, 4)))

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        d = np.zeros((n, n, 4))
        d[np.arange(n), np.arange(n), 0] = 1.0
        return cls._wrap(d)

    @classmethod
    def from_complex(cls, c) -> QMatrix:
        c = np.atleast_2d(np.asarray(c, dtype=np.complex128))
        return cls._wrap(from_complex_pair(c, np.zeros_like(c)))

    @classmethod
    def from_complex_pair(cls, c1, c2) -> QMatrix:
        return cls._wrap(from_complex_pair(np.atleast_2d(c1), np.atleast_2d(c2)))

    @classmethod
    def from_entries(cls, rows) -> QMatrix:
        """Build from nested sequences of numbers / complex / Quaternion."""
        rows = [list(r) for r in rows]
        d = np.array([[as_quaternion(e).to_array() for e in r] for r in rows], dtype=np.float64)
        return cls._wrap(d)

    @property
    def nrows(self) -> int:
        return self.data.shape[0]

    @property
    def ncols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def __getitem__(self, idx):
        i, j = idx
        if isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)):
            return Quaternion.from_array(self.data[i, j])
        sub = self.data[i, j]
        if sub.ndim != 3:
            raise IndexError("use integer pairs for entries and slice pairs for submatrices")
        return QMatrix(sub)

    def __setitem__(self, idx, value):
        i, j = idx
        if isinstance(value, QMatrix):
            self.data[i, j] = value.data
        else:
            self.data[i, j] = as_quaternion(value).to_array()

    def copy(self) -> QMatrix:
        return QMatrix._wrap(self.data.copy())

    def adjoint(self) -> QMatrix:
        return adjoint(self)

    @property
    def H(self) -> QMatrix:
        return adjoint(self)

    def to_complex_pair(self) -> tuple[np.ndarray, np.ndarray]:
        return to_complex_pair(self.data)

    def diagonal(self) -> np.ndarray:
        return self.data[np.arange(min(self.shape)), np.arange(min(self.shape))].copy()

    def is_upper_triangular(self) -> bool:
        return not np.any(np.tril(np.any(self.data != 0.0, axis=-1), -1))

    def is_hessenberg(self) -> bool:
        return not np.any(np.tril(np.any(self.data != 0.0, axis=-1), -2))

    def __matmul__(self, other: QMatrix) -> QMatrix:
        return matmul(self, other)

    def __add__(self, other: QMatrix) -> QMatrix:
        _same_shape(self, other)
        return QMatrix._wrap(self.data + other.data)

    def __sub__(self, other: QMatrix) -> QMatrix:
        _same_shape(self, other)
        return QMatrix._wrap(self.data - other.data)

    def __neg__(self) -> QMatrix:
        return QMatrix._wrap(-self.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols})"


def _same_shape(a: QMatrix, b: QMatrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def qmatmul_data(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of quaternion arrays ``(m, k, 4) @ (k, n, 4)`` through complex BLAS.

    With ``a = a1 + a2 j`` and ``b = b1 + b2 j`` the product is
    ``(a1 b1 - a2 conj(b2)) + (a1 b2 + a2 conj(b1)) j``.
    """
    a1, a2 = to_complex_pair(a)
    b1, b2 = to_complex_pair(b)
    c1 = a1 @ b1 - a2 @ b2.conj()
    c2 = a1 @ b2 + a2 @ b1.conj()
    return from_complex_pair(c1, c2)


def adjoint_data(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(qconj_arr(a).transpose(1, 0, 2))


def matmul(A: QMatrix, B: QMatrix) -> QMatrix:
    if A.ncols != B.nrows:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    return QMatrix._wrap(qmatmul_data(A.data, B.data))


def adjoint(A: QMatrix) -> QMatrix:
    return QMatrix._wrap(adjoint_data(A.data))


def frob_norm_data(a: np.ndarray) -> float:
    s = float(np.max(np.abs(a))) if a.size else 0.0
    if s == 0.0 or not math.isfinite(s):
        return s
    return s * math.sqrt(float(np.sum((a / s) ** 2)))


def frob_norm(A: QMatrix) -> float:
    """Frobenius norm, scaled against overflow."""
    return frob_norm_data(A.data)


# ---------------------------------------------------------------------------
# elementary transforms


@dataclass(frozen=True)
class Reflector:
    """``P = I - v tau v^H`` with ``v[0] = 1``; unitary, not Hermitian unless tau is real.

    ``v`` is an ``(m, 4)`` quaternion vector and ``tau`` a quaternion stored as
    a length-4 array.
    """

    v: np.ndarray
    tau: np.ndarray

    @property
    def size(self) -> int:
        return self.v.shape[0]

    def matrix(self) -> QMatrix:
        m = self.size
        vt = self.v[:, None, :]
        outer = qmul_arr(qmul_arr(vt, self.tau), qconj_arr(self.v)[None, :, :])
        return QMatrix._wrap(QMatrix.identity(m).data - outer)


def _as_qvector(x) -> np.ndarray:
    if isinstance(x, QMatrix):
        if x.ncols != 1:
            raise ValueError("expected a single-column QMatrix")
        return x.data[:, 0, :].copy()
    if isinstance(x, np.ndarray) and x.ndim == 2 and x.shape[1] == 4 and x.dtype.kind in "fi":
        return np.array(x, dtype=np.float64)
    return np.array([as_quaternion(e).to_array() for e in x], dtype=np.float64).reshape(-1, 4)


def make_reflector(x) -> tuple[Reflector, float]:
    """Reflector ``P`` with ``P^H x = beta e1``, ``beta = ||x||_2 >= 0``.

    A zero vector gives the identity reflector and ``beta = 0``.
    """
    xv = _as_qvector(x)
    m = xv.shape[0]
    v = np.zeros((m, 4))
    tau = np.zeros(4)
    beta = _kernels.NUMPY_KERNELS["house"](xv, m, v, tau)
    return Reflector(v, tau), float(beta)


def _check_range(lo, hi, limit, what):
    if not (0 <= lo <= hi <= limit):
        raise IndexError(f"{what} range [{lo}, {hi}) outside [0, {limit})")


def apply_reflector_left(P: Reflector, A: QMatrix, row: int = 0, cols: tuple[int, int] | None = None) -> None:
    """In place ``A[row:row+m, c0:c1] <- P^H A[row:row+m, c0:c1]``."""
    m = P.size
    c0, c1 = (0, A.ncols) if cols is None else cols
    _check_range(row, row + m, A.nrows, "row")
    _check_range(c0, c1, A.ncols, "column")
    _kernels.reflect_left(A.data, P.v, P.tau, m, row, c0, c1)


def apply_reflector_right(P: Reflector, A: QMatrix, col: int = 0, rows: tuple[int, int] | None = None) -> None:
    """In place ``A[r0:r1, col:col+m] <- A[r0:r1, col:col+m] P``."""
    m = P.size
    r0, r1 = (0, A.nrows) if rows is None else rows
    _check_range(col, col + m, A.ncols, "column")
    _check_range(r0, r1, A.nrows, "row")
    _kernels.reflect_right(A.data, P.v, P.tau, m, col, r0, r1)


@dataclass(frozen=True)
class Rotation2:
    """2x2 unitary ``G = [[c, -s], [s, conj(c)]]`` with quaternion ``c`` and real ``s``."""

    c: Quaternion
    s: float

    @classmethod
    def from_chi(cls, chi) -> Rotation2:
        """Rotation built from ``s = (1 + |chi|^2)^(-1/2)`` and ``c = s chi``."""
        chi = as_quaternion(chi)
        a = abs(chi)
        if a <= 1.0:
            s = 1.0 / math.sqrt(1.0 + a * a)
            return cls(chi * s, s)
        r = 1.0 / a
        root = math.sqrt(1.0 + r * r)
        return cls(chi * (r / root), r / root)

    @classmethod
    def identity(cls) -> Rotation2:
        return cls(Quaternion(1.0), 0.0)

    def matrix(self) -> QMatrix:
        return QMatrix.from_entries([[self.c, -self.s], [self.s, self.c.conj()]])


def apply_rotation_left(G: Rotation2, A: QMatrix, k: int, cols: tuple[int, int] | None = None) -> None:
    """In place rows ``k, k+1``: ``A <- G^H A``."""
    c0, c1 = (0, A.ncols) if cols is None else cols
    _check_range(k, k + 2, A.nrows, "row")
    _check_range(c0, c1, A.ncols, "column")
    _kernels.rot_left(A.data, k, G.c.to_array(), float(G.s), c0, c1)


def apply_rotation_right(G: Rotation2, A: QMatrix, k: int, rows: tuple[int, int] | None = None) -> None:
    """In place columns ``k, k+1``: ``A <- A G``."""
    r0, r1 = (0, A.nrows) if rows is None else rows
    _check_range(k, k + 2, A.ncols, "column")
    _check_range(r0, r1, A.nrows, "row")
    _kernels.rot_right(A.data, k, G.c.to_array(), float(G.s), r0, r1)


# ---------------------------------------------------------------------------
# random test matrices

_CLASS_KEYS = {"fullrand": 0, "hessrand": 1}


def rng_for(kind: str, n: int, seed: int) -> np.random.Generator:
    """PCG64 stream for one test matrix: ``SeedSequence(seed, spawn_key=(class, n))``.

    ``class`` is 0 for fullrand and 1 for hessrand, so every (class, size, seed)
    triple owns an independent, platform-independent stream.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(_CLASS_KEYS[kind], int(n)))
    return np.random.Generator(np.random.PCG64(ss))


def _random_entries(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n, 4))
    nrm = np.sqrt(np.sum(g * g, axis=-1, keepdims=True))
    alpha = rng.uniform(0.0, 1.0, size=(n, n, 1))
    return g / nrm * alpha


def fullrand(n: int, seed: int = 0) -> QMatrix:
    """Dense n x n matrix; each entry is a uniform unit quaternion times U[0, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return QMatrix._wrap(_random_entries(rng_for("fullrand", n, seed), n))


def hessrand(n: int, seed: int = 0) -> QMatrix:
    """Upper Hessenberg analogue of :func:`fullrand` with exact zeros below the subdiagonal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = _random_entries(rng_for("hessrand", n, seed), n)
    d[np.tril(np.ones((n, n), dtype=bool), -2)] = 0.0
    return QMatrix._wrap(d)


# ---------------------------------------------------------------------------
# text format: "QMAT <nrows> <ncols>" then one "w x y z" line per entry, row-major


def write_qmatrix(A: QMatrix, path) -> None:
    if not np.all(np.isfinite(A.data)):
        raise QMatFormatError("refusing to write non-finite entries")
    lines = [f"QMAT {A.nrows} {A.ncols}"]
    for q in A.data.reshape(-1, 4):
        lines.append(" ".join(format(float(c), ".17g") for c in q))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_qmatrix(path) -> QMatrix:
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise QMatFormatError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "QMAT":
        raise QMatFormatError(f"{path}: bad header {lines[0]!r}")
    try:
        nrows, ncols = int(head[1]), int(head[2])
    except ValueError:
        raise QMatFormatError(f"{path}: bad dimensions in header {lines[0]!r}") from None
    if nrows < 1 or ncols < 1:
        raise QMatFormatError(f"{path}: dimensions must be positive")
    body = lines[1:]
    if len(body) != nrows * ncols:
        raise QMatFormatError(f"{path}: expected {nrows * ncols} entries, found {len(body)}")
    data = np.empty((nrows * ncols, 4))
    for idx, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 4:
            raise QMatFormatError(f"{path}: line {idx + 2} does not hold 4 components")
        try:
            data[idx] = [float(p) for p in parts]
        except ValueError:
            raise QMatFormatError(f"{path}: line {idx + 2} is not numeric") from None
    if not np.all(np.isfinite(data)):
        raise QMatFormatError(f"{path}: non-finite entry")
    return QMatrix._wrap(data.reshape(nrows, ncols, 4))


def entry_abs(A: QMatrix) -> np.ndarray:
    """Matrix of entry moduli."""
    return qabs_arr(A.data)
