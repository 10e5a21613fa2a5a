"""Quaternion scalars and the vectorised array arithmetic built on them.

A quaternion ``w + x i + y j + z k`` is stored as four real numbers in
``(w, x, y, z)`` order, both in the :class:`Quaternion` value type and in
the trailing axis of every quaternion array used by the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

EPS = np.finfo(np.float64).eps
SAFMIN = np.finfo(np.float64).tiny


@dataclass(frozen=True, slots=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_complex(cls, c: complex) -> Quaternion:
        c = complex(c)
        return cls(c.real, c.imag, 0.0, 0.0)

    @classmethod
    def from_array(cls, a) -> Quaternion:
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=np.float64)

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inv(self) -> Quaternion:
        n2 = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    @property
    def real(self) -> float:
        return self.w

    def is_complex(self) -> bool:
        return self.y == 0.0 and self.z == 0.0

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return mul(self, o)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return mul(o, self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return mul(self, o.inv())

    def __abs__(self) -> float:
        return qabs(self)

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _coerce(v) -> Quaternion | None:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion(float(v))
    if isinstance(v, complex):
        return Quaternion(v.real, v.imag)
    if isinstance(v, np.generic):
        return _coerce(v.item())
    return None


def as_quaternion(v) -> Quaternion:
    """Convert a real, complex, 4-sequence or Quaternion to a Quaternion."""
    q = _coerce(v)
    if q is not None:
        return q
    if isinstance(v, (str, bytes)):
        raise TypeError(f"cannot interpret {v!r} as a quaternion")
    try:
        a = np.asarray(v, dtype=np.float64)
    except (TypeError, ValueError):
        raise TypeError(f"cannot interpret {v!r} as a quaternion") from None
    if a.shape != (4,):
        raise TypeError(f"cannot interpret {v!r} as a quaternion")
    return Quaternion.from_array(a)


I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
ONE = Quaternion(1.0)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p * q``."""
    a0, a1, a2, a3 = p.w, p.x, p.y, p.z
    b0, b1, b2, b3 = q.w, q.x, q.y, q.z
    return Quaternion(
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


class ComplexPair(NamedTuple):
    """``q = c1 + c2 j`` with complex ``c1``, ``c2``."""

    c1: complex
    c2: complex


def split(q: Quaternion) -> ComplexPair:
    return ComplexPair(complex(q.w, q.x), complex(q.y, q.z))


def join(p: ComplexPair) -> Quaternion:
    c1, c2 = complex(p[0]), complex(p[1])
    return Quaternion(c1.real, c1.imag, c2.real, c2.imag)


def _scaled_norm(*comps: float) -> float:
    m = max(abs(c) for c in comps)
    if m == 0.0 or not math.isfinite(m):
        return m
    return m * math.sqrt(sum((c / m) ** 2 for c in comps))


def qabs(q: Quaternion) -> float:
    """Euclidean norm of the four components, safe against overflow."""
    return _scaled_norm(q.w, q.x, q.y, q.z)


def standardize(lam: Quaternion) -> tuple[complex, Quaternion]:
    """Representative of the similarity class of ``lam`` in the closed upper half plane.

    Returns ``(lam_c, omega)`` with ``omega`` a unit quaternion such that
    ``conj(omega) * lam * omega == lam_c``.  For a complex ``lam`` with
    nonnegative imaginary part ``omega`` is exactly 1.
    """
    lam = as_quaternion(lam)
    r = _scaled_norm(lam.x, lam.y, lam.z)
    if r == 0.0:
        return complex(lam.w, 0.0), ONE
    ux, uy, uz = lam.x / r, lam.y / r, lam.z / r
    # omega rotates i onto u: omega ~ (1 + ux, 0, -uz, uy).
    # 1 + ux cancels near u = -i; use (1 - ux)(1 + ux) = uy^2 + uz^2 there.
    if ux >= 0.0:
        a = 1.0 + ux
    else:
        a = (uy * uy + uz * uz) / (1.0 - ux)
    nrm = _scaled_norm(a, uz, uy)
    if nrm == 0.0:
        omega = J
    else:
        omega = Quaternion(a / nrm, 0.0, -uz / nrm, uy / nrm)
    return complex(lam.w, r), omega


# ---------------------------------------------------------------------------
# array arithmetic on (..., 4) float arrays


def qmul_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product over the trailing axis."""
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        (
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ),
        axis=-1,
    )


def qconj_arr(a: np.ndarray) -> np.ndarray:
    out = -a
    out[..., 0] = a[..., 0]
    return out


def qabs_arr(a: np.ndarray) -> np.ndarray:
    """Elementwise quaternion modulus of a ``(..., 4)`` array (scaled)."""
    m = np.max(np.abs(a), axis=-1)
    safe = np.where(m > 0.0, m, 1.0)
    return m * np.sqrt(np.sum((a / safe[..., None]) ** 2, axis=-1))


def to_complex_pair(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a quaternion array into complex arrays ``(c1, c2)``, ``a = c1 + c2 j``."""
    return a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3]


def from_complex_pair(c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    c1 = np.asarray(c1)
    c2 = np.asarray(c2)
    return np.stack((c1.real, c1.imag, c2.real, c2.imag), axis=-1).astype(np.float64)
