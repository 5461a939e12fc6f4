"""Exact Gaussian-rational scalars and small exact linear algebra.

Parameters (eigenvalues, quiver parameters, realization data) must be
compared exactly, so they live in Q(i).  Matrices over Q(i) are numpy
object arrays holding :class:`CQ` entries; numpy's matmul works on them
unchanged.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

RationalLike = Union[int, Fraction, str]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    raise TypeError(f"cannot interpret {x!r} as a rational")


class CQ:
    """A complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "CQ":
        if isinstance(x, CQ):
            return x
        if isinstance(x, (list, tuple)):
            if len(x) != 2:
                raise ValueError(f"expected [re, im], got {x!r}")
            return cls(x[0], x[1])
        if isinstance(x, complex):
            raise TypeError("complex floats are not exact")
        return cls(x)

    @classmethod
    def parse(cls, text: str) -> "CQ":
        """Parse ``"p/q"``, ``"a+bi"``, ``"-3/2i"`` style strings."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        if not s.endswith(("i", "j")):
            return cls(s)
        body = s[:-1]
        # split at the last sign that is not the leading one or after '/'
        cut = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "/eE":
                cut = k
                break
        if cut is None:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return cls(re_part, im_part)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return CQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return CQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return CQ(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return CQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        return CQ((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = _lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "CQ":
        return CQ(self.re, -self.im)

    def __abs__(self) -> float:
        return abs(complex(self))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        o = _lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def sort_key(self) -> tuple[Fraction, Fraction]:
        return (self.re, self.im)

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __repr__(self) -> str:
        return f"CQ({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


def _lift(x):
    if isinstance(x, CQ):
        return x
    if isinstance(x, (int, Fraction)):
        return CQ(x)
    return NotImplemented


Scalar = Union[CQ, complex]

ZERO = CQ(0)
ONE = CQ(1)


def format_scalar(x: CQ) -> str:
    """Exact text form: ``"3/2"``, ``"1/2-1i"``, ``"2i"``."""
    if x.im == 0:
        return str(x.re)
    if x.re == 0:
        return f"{x.im}i"
    sign = "+" if x.im > 0 else "-"
    return f"{x.re}{sign}{abs(x.im)}i"


def to_json_scalar(x: CQ) -> list[str]:
    return [str(x.re), str(x.im)]


def is_exact(x) -> bool:
    return isinstance(x, (CQ, int, Fraction))


def to_complex(x) -> complex:
    return complex(x)


# matrices ------------------------------------------------------------------

def exact_matrix(rows: Iterable[Iterable]) -> np.ndarray:
    data = [[CQ.coerce(v) for v in row] for row in rows]
    out = np.empty((len(data), len(data[0]) if data else 0), dtype=object)
    for i, row in enumerate(data):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def zeros(m: int, n: int, exact: bool = True) -> np.ndarray:
    if not exact:
        return np.zeros((m, n), dtype=complex)
    out = np.empty((m, n), dtype=object)
    out.fill(ZERO)
    return out


def identity(n: int, exact: bool = True) -> np.ndarray:
    out = zeros(n, n, exact)
    for k in range(n):
        out[k, k] = ONE if exact else 1.0
    return out


def is_exact_array(a: np.ndarray) -> bool:
    return a.dtype == object


def to_complex_array(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.array([[complex(v) for v in row] for row in a], dtype=complex).reshape(a.shape)
    return np.asarray(a, dtype=complex)


def scale(a: np.ndarray, c) -> np.ndarray:
    """Multiply by a scalar, staying exact when both are exact."""
    if a.dtype == object:
        c = CQ.coerce(c)
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = v * c
        return out
    return a * complex(c)


def shift(a: np.ndarray, c) -> np.ndarray:
    """Return ``a + c*Id`` (square ``a``)."""
    n = a.shape[0]
    out = a.copy()
    if a.dtype == object:
        c = CQ.coerce(c)
        for k in range(n):
            out[k, k] = out[k, k] + c
    else:
        out = out + complex(c) * np.eye(n)
    return out


def exact_equal(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        return False
    return all(x == y for x, y in zip(a.flat, b.flat))


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Q(i) and the pivot columns."""
    m = a.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((k for k in range(r, rows) if m[k, c]), None)
        if p is None:
            continue
        if p != r:
            m[[r, p]] = m[[p, r]]
        inv = ONE / m[r, c]
        for j in range(cols):
            m[r, j] = m[r, j] * inv
        for k in range(rows):
            if k != r and m[k, c]:
                f = m[k, c]
                for j in range(cols):
                    m[k, j] = m[k, j] - f * m[r, j]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def image_factorization(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact ``a = q @ p`` with ``q`` injective (pivot columns of ``a``) and
    ``p`` surjective (nonzero rows of the RREF)."""
    rows, cols = a.shape
    if a.size == 0:
        return zeros(rows, 0), zeros(0, cols)
    red, piv = rref(a)
    q = a[:, piv].copy() if piv else zeros(rows, 0)
    p = red[: len(piv), :].copy() if piv else zeros(0, cols)
    return q, p


def nullspace(a: np.ndarray) -> np.ndarray:
    """Columns spanning the kernel of ``a`` (exact)."""
    rows, cols = a.shape
    if rows == 0:
        return identity(cols)
    red, piv = rref(a)
    free = [c for c in range(cols) if c not in piv]
    out = zeros(cols, len(free))
    for k, f in enumerate(free):
        out[f, k] = ONE
        for r, pc in enumerate(piv):
            out[pc, k] = -red[r, f]
    return out


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError("length mismatch")
    total = ZERO
    for x, y in zip(u, v):
        total = total + x * y
    return total
