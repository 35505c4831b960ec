"""Small dense complex linear algebra with an exact and a floating backend.

Exact matrices hold Gaussian rationals as integer numerator arrays (real and
imaginary part) over one shared positive denominator. Floating matrices wrap a
``complex128`` array. Every operation on exact operands stays exact; mixing an
exact and a floating operand yields a floating result.

Vectors are row vectors, i.e. ``1 x n`` matrices, and act on the right:
``v @ P``.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

DEFAULT_TOL = float(os.environ.get("MONQFA_TOL", "1e-9"))


class LinalgError(ValueError):
    """Raised on shape mismatches and malformed matrix literals."""


class QComplex:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "QComplex":
        if isinstance(x, QComplex):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return cls(x, 0)
        if isinstance(x, str):
            return cls(Fraction(x), 0)
        raise TypeError(f"cannot use {x!r} as an exact scalar")

    def conjugate(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        other = _maybe_exact(other)
        if other is None:
            return complex(self) + other
        return QComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = QComplex.coerce(other)
        return QComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return QComplex.coerce(other) - self

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __mul__(self, other):
        other = _maybe_exact(other)
        if other is None:
            return NotImplemented
        return QComplex(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QComplex.coerce(other)
        n = other.abs2()
        if n == 0:
            raise ZeroDivisionError("exact complex division by zero")
        num = self * other.conjugate()
        return QComplex(num.re / n, num.im / n)

    def __eq__(self, other):
        if isinstance(other, complex | float):
            return complex(self) == other
        try:
            other = QComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"QComplex({self.re})"
        return f"QComplex({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


Scalar = Union[QComplex, complex]


def _maybe_exact(x):
    try:
        return QComplex.coerce(x)
    except TypeError:
        return None


def is_exact_scalar(x) -> bool:
    return isinstance(x, (QComplex, int, Fraction, Rational, str)) and not isinstance(x, bool)


def rational_sqrt(q) -> Fraction | None:
    """Square root of a nonnegative rational if it is itself rational."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _parse_entry(x):
    """Entry literal: number, ``"p/q"`` string, or ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise LinalgError(f"complex entry must be a [re, im] pair, got {x!r}")
        re, im = (_parse_entry(p) for p in x)
        if isinstance(re, QComplex) and isinstance(im, QComplex):
            return QComplex(re.re, im.re)
        return complex(re) + 1j * complex(im).real
    if isinstance(x, bool):
        raise LinalgError("booleans are not matrix entries")
    if isinstance(x, QComplex):
        return x
    if isinstance(x, (int, Fraction)):
        return QComplex(x)
    if isinstance(x, str):
        try:
            return QComplex(Fraction(x))
        except ValueError as exc:
            raise LinalgError(f"bad rational literal {x!r}") from exc
    if isinstance(x, (float, complex, np.floating, np.complexfloating)):
        return complex(x)
    raise LinalgError(f"unsupported matrix entry {x!r}")


class Matrix:
    """Immutable dense complex matrix."""

    __slots__ = ("_re", "_im", "_den", "_arr")

    # -- construction -----------------------------------------------------

    def __init__(self):
        raise TypeError("use Matrix.from_rows / identity / zeros")

    @classmethod
    def _exact(cls, re: np.ndarray, im: np.ndarray | None, den: int) -> "Matrix":
        if den <= 0:
            raise LinalgError("denominator must be positive")
        if im is not None and not any(im.flat):
            im = None
        flat = list(re.flat)
        if im is not None:
            flat += list(im.flat)
        g = math.gcd(den, *flat) if flat else den
        if g > 1:
            re = re // g
            im = None if im is None else im // g
            den //= g
        self = object.__new__(cls)
        self._re, self._im, self._den, self._arr = re, im, den, None
        return self

    @classmethod
    def _float(cls, arr: np.ndarray) -> "Matrix":
        self = object.__new__(cls)
        self._re = self._im = None
        self._den = 1
        self._arr = np.asarray(arr, dtype=np.complex128)
        return self

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], exact: bool | None = None) -> "Matrix":
        """Build from nested rows of entry literals.

        Entries may be ints, Fractions, ``"p/q"`` strings, QComplex values,
        floats, complex numbers or ``[re, im]`` pairs. The result is exact when
        every entry is exact unless ``exact=False`` forces floats.
        """
        parsed = [[_parse_entry(x) for x in row] for row in rows]
        if not parsed or not parsed[0]:
            raise LinalgError("matrices must have at least one row and column")
        ncols = len(parsed[0])
        if any(len(r) != ncols for r in parsed):
            raise LinalgError("ragged matrix literal")
        all_exact = all(isinstance(x, QComplex) for r in parsed for x in r)
        if exact and not all_exact:
            raise LinalgError("exact mode requested but an entry is not rational")
        if all_exact and exact is not False:
            den = 1
            for r in parsed:
                for x in r:
                    den = math.lcm(den, x.re.denominator, x.im.denominator)
            re = np.array([[int(x.re * den) for x in r] for r in parsed], dtype=object)
            im = np.array([[int(x.im * den) for x in r] for r in parsed], dtype=object)
            return cls._exact(re, im, den)
        return cls._float(np.array([[complex(x) for x in r] for r in parsed]))

    @classmethod
    def from_numpy(cls, arr) -> "Matrix":
        arr = np.atleast_2d(np.asarray(arr))
        return cls._float(arr)

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "Matrix":
        if exact:
            re = np.zeros((n, n), dtype=object)
            for i in range(n):
                re[i, i] = 1
            return cls._exact(re, None, 1)
        return cls._float(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int, exact: bool = True) -> "Matrix":
        if exact:
            return cls._exact(np.zeros((rows, cols), dtype=object), None, 1)
        return cls._float(np.zeros((rows, cols)))

    @classmethod
    def basis_vector(cls, i: int, n: int, exact: bool = True) -> "Matrix":
        """Row vector e_i (0-based index) of length n."""
        if not 0 <= i < n:
            raise LinalgError(f"basis index {i} out of range for dimension {n}")
        v = cls.zeros(1, n, exact)
        if exact:
            re = v._re.copy()
            re[0, i] = 1
            return cls._exact(re, None, 1)
        arr = v._arr.copy()
        arr[0, i] = 1
        return cls._float(arr)

    @classmethod
    def vector(cls, entries: Iterable, exact: bool | None = None) -> "Matrix":
        return cls.from_rows([list(entries)], exact=exact)

    # -- basic properties -------------------------------------------------

    @property
    def exact(self) -> bool:
        return self._arr is None

    @property
    def shape(self) -> tuple[int, int]:
        return self._re.shape if self.exact else self._arr.shape

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_real(self) -> bool:
        if self.exact:
            return self._im is None
        return not np.any(self._arr.imag)

    def entry(self, i: int, j: int) -> Scalar:
        if self.exact:
            im = 0 if self._im is None else self._im[i, j]
            return QComplex(Fraction(self._re[i, j], self._den), Fraction(im, self._den))
        return complex(self._arr[i, j])

    def entries(self) -> list[list[Scalar]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        if self.exact:
            re = np.array([[float(Fraction(x, self._den)) for x in r] for r in self._re])
            if self._im is None:
                return re.astype(np.complex128)
            im = np.array([[float(Fraction(x, self._den)) for x in r] for r in self._im])
            return re + 1j * im
        return self._arr.copy()

    def to_float(self) -> "Matrix":
        return self if not self.exact else Matrix._float(self.to_numpy())

    # -- arithmetic -------------------------------------------------------

    def _pair(self, other: "Matrix"):
        if self.exact and other.exact:
            return True
        return False

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __add__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, 1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self._combine(other, -1)

    def _combine(self, other: "Matrix", sign: int) -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")
        if self._pair(other):
            den = math.lcm(self._den, other._den)
            fa, fb = den // self._den, den // other._den
            re = self._re * fa + sign * other._re * fb
            im = _add_opt(_scale_opt(self._im, fa), _scale_opt(other._im, sign * fb))
            return Matrix._exact(re, im, den)
        return Matrix._float(self.to_numpy() + sign * other.to_numpy())

    def __neg__(self) -> "Matrix":
        if self.exact:
            return Matrix._exact(-self._re, _scale_opt(self._im, -1), self._den)
        return Matrix._float(-self._arr)

    def scale(self, s) -> "Matrix":
        """Multiply every entry by the scalar ``s``."""
        if self.exact and is_exact_scalar(s):
            s = QComplex.coerce(s)
            den = self._den * math.lcm(s.re.denominator, s.im.denominator)
            a = int(s.re * den / self._den)
            b = int(s.im * den / self._den)
            im0 = self._im if self._im is not None else np.zeros_like(self._re)
            re = self._re * a - im0 * b
            im = self._re * b + im0 * a
            return Matrix._exact(re, im, den)
        return Matrix._float(self.to_numpy() * complex(s))

    def conj(self) -> "Matrix":
        if self.exact:
            return Matrix._exact(self._re, _scale_opt(self._im, -1), self._den)
        return Matrix._float(self._arr.conj())

    @property
    def T(self) -> "Matrix":
        if self.exact:
            im = None if self._im is None else self._im.T.copy()
            return Matrix._exact(self._re.T.copy(), im, self._den)
        return Matrix._float(self._arr.T.copy())

    def adjoint(self) -> "Matrix":
        return self.conj().T

    def trace(self) -> Scalar:
        if not self.is_square:
            raise LinalgError("trace of a non-square matrix")
        if self.exact:
            re = sum(self._re[i, i] for i in range(self.rows))
            im = 0 if self._im is None else sum(self._im[i, i] for i in range(self.rows))
            return QComplex(Fraction(re, self._den), Fraction(im, self._den))
        return complex(np.trace(self._arr))

    def flatten_rows(self) -> "Matrix":
        """Row-major flattening into a 1 x (rows*cols) vector."""
        if self.exact:
            im = None if self._im is None else self._im.reshape(1, -1)
            return Matrix._exact(self._re.reshape(1, -1), im, self._den)
        return Matrix._float(self._arr.reshape(1, -1))

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        if self.exact:
            im = None if self._im is None else self._im[r0:r1, c0:c1].copy()
            return Matrix._exact(self._re[r0:r1, c0:c1].copy(), im, self._den)
        return Matrix._float(self._arr[r0:r1, c0:c1].copy())

    # -- comparisons ------------------------------------------------------

    def max_abs_diff(self, other: "Matrix") -> float:
        """Max-entry distance; exactly 0.0 when two exact matrices coincide."""
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.exact and other.exact:
            d = self - other
            if not any(d._re.flat) and d._im is None:
                return 0.0
        return float(np.max(np.abs(self.to_numpy() - other.to_numpy())))

    def close_to(self, other: "Matrix", tol: float = DEFAULT_TOL) -> bool:
        if self.exact and other.exact:
            return self == other
        return self.max_abs_diff(other) <= tol

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact:
            return not any(self._re.flat) and self._im is None
        return float(np.max(np.abs(self._arr), initial=0.0)) <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        if self.exact and other.exact:
            return (self - other).is_zero()
        return bool(np.array_equal(self.to_numpy(), other.to_numpy()))

    __hash__ = None

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "float"
        rows = [[str(x) if self.exact else f"{x:.6g}" for x in r] for r in self.entries()]
        return f"Matrix<{kind}>({rows})"

    # -- serialization ----------------------------------------------------

    def to_literal(self) -> list:
        """Nested ``[re, im]`` pairs; exact parts become ``"p/q"`` strings."""
        out = []
        for row in self.entries():
            if self.exact:
                out.append([[str(x.re), str(x.im)] for x in row])
            else:
                out.append([[x.real, x.imag] for x in row])
        return out

    @classmethod
    def from_literal(cls, lit, exact: bool | None = None) -> "Matrix":
        return cls.from_rows(lit, exact=exact)


def _scale_opt(a, k):
    return None if a is None else a * k


def _add_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product; exact inputs give an exact output."""
    if a.cols != b.rows:
        raise LinalgError(f"cannot multiply {a.shape} by {b.shape}")
    if a.exact and b.exact:
        re = a._re @ b._re
        im = None
        if a._im is not None and b._im is not None:
            re = re - a._im @ b._im
        if a._im is not None:
            im = a._im @ b._re
        if b._im is not None:
            im = _add_opt(im, a._re @ b._im)
        return Matrix._exact(re, im, a._den * b._den)
    return Matrix._float(a.to_numpy() @ b.to_numpy())


def tensor(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product."""
    if a.exact and b.exact:
        re = np.kron(a._re, b._re)
        im = None
        if a._im is not None and b._im is not None:
            re = re - np.kron(a._im, b._im)
        if a._im is not None:
            im = np.kron(a._im, b._re)
        if b._im is not None:
            im = _add_opt(im, np.kron(a._re, b._im))
        return Matrix._exact(re, im, a._den * b._den)
    return Matrix._float(np.kron(a.to_numpy(), b.to_numpy()))


def tensor_all(mats: Sequence[Matrix]) -> Matrix:
    out = mats[0]
    for m in mats[1:]:
        out = tensor(out, m)
    return out


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    """Block-diagonal matrix with ``a`` top-left and ``b`` bottom-right."""
    (m, n), (p, q) = a.shape, b.shape
    if a.exact and b.exact:
        den = math.lcm(a._den, b._den)
        fa, fb = den // a._den, den // b._den
        re = np.zeros((m + p, n + q), dtype=object)
        re[:m, :n] = a._re * fa
        re[m:, n:] = b._re * fb
        im = None
        if a._im is not None or b._im is not None:
            im = np.zeros((m + p, n + q), dtype=object)
            if a._im is not None:
                im[:m, :n] = a._im * fa
            if b._im is not None:
                im[m:, n:] = b._im * fb
        return Matrix._exact(re, im, den)
    out = np.zeros((m + p, n + q), dtype=np.complex128)
    out[:m, :n] = a.to_numpy()
    out[m:, n:] = b.to_numpy()
    return Matrix._float(out)


def direct_sum_all(mats: Sequence[Matrix]) -> Matrix:
    out = mats[0]
    for m in mats[1:]:
        out = direct_sum(out, m)
    return out


def is_hermitian(m: Matrix, tol: float = DEFAULT_TOL) -> bool:
    if not m.is_square:
        raise LinalgError("hermiticity of a non-square matrix")
    return m.close_to(m.adjoint(), tol)


def is_projector(m: Matrix, tol: float = DEFAULT_TOL) -> bool:
    """Hermitian and idempotent, to ``tol`` in max-entry norm (exactly if exact)."""
    if not m.is_square:
        raise LinalgError("projector test on a non-square matrix")
    return m.close_to(m.adjoint(), tol) and m.close_to(m @ m, tol)


def is_unitary(m: Matrix, tol: float = DEFAULT_TOL) -> bool:
    if not m.is_square:
        raise LinalgError("unitarity test on a non-square matrix")
    return (m @ m.adjoint()).close_to(Matrix.identity(m.rows, m.exact), tol)


def norm_sq(v: Matrix):
    """Squared Euclidean norm ``v v^dagger`` of a row vector (Fraction if exact)."""
    s = (v @ v.adjoint()).entry(0, 0)
    if isinstance(s, QComplex):
        return s.re
    return s.real


def vec_norm2(v: Matrix):
    """Euclidean norm; a Fraction when the exact norm happens to be rational."""
    sq = norm_sq(v)
    if isinstance(sq, Fraction):
        r = rational_sqrt(sq)
        if r is not None:
            return r
    return math.sqrt(sq)


def real_value(s: Scalar):
    """Real part of a scalar, as a Fraction in exact mode."""
    if isinstance(s, QComplex):
        return s.re
    return s.real


def hconcat(mats: Sequence[Matrix]) -> Matrix:
    """Side-by-side concatenation; for row vectors this is their direct sum."""
    rows = {m.rows for m in mats}
    if len(rows) != 1:
        raise LinalgError("hconcat needs equal row counts")
    if all(m.exact for m in mats):
        den = math.lcm(*(m._den for m in mats))
        re = np.concatenate([m._re * (den // m._den) for m in mats], axis=1)
        ims = [m._im if m._im is not None else np.zeros_like(m._re) for m in mats]
        im = np.concatenate([i * (den // m._den) for i, m in zip(ims, mats)], axis=1)
        return Matrix._exact(re, im, den)
    return Matrix._float(np.concatenate([m.to_numpy() for m in mats], axis=1))
