"""Exact field arithmetic and the dense matrix kernel shared by every module.

Two exact coefficient fields are supported: the rationals (``fractions.Fraction``)
and a prime field Z/p with a fixed large prime, default p = 2^31 - 1.  All
arithmetic is exact; there is no floating point anywhere in this package.

Rank computations dispatch on the field: fraction-free (Bareiss) elimination
over the rationals, plain Gaussian elimination on int64 numpy arrays over the
prime field.  With p < 2^31.5 the products in the elimination update stay
below 2^63, so int64 never overflows.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

DEFAULT_PRIME = 2**31 - 1


class Fp:
    """Immutable element of the prime field Z/p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other) -> "Fp":
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return Fp(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else Fp(self.v + o.v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else Fp(self.v - o.v, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else Fp(o.v - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else Fp(self.v * o.v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.v == 0:
            raise ZeroDivisionError("division by zero in prime field")
        return Fp(self.v * pow(o.v, -1, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pow__(self, e: int):
        return Fp(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        return isinstance(other, Fp) and self.v == other.v and self.p == other.p

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Fp({self.v} mod {self.p})"


Scalar = Union[Fraction, Fp]


@dataclass(frozen=True)
class RationalField:
    """The field of arbitrary-precision rationals."""

    name = "q"

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def sample(self, rng: random.Random) -> Fraction:
        # Small numerators/denominators keep exact arithmetic fast while
        # avoiding accidental degeneracies.
        return Fraction(rng.randint(-100, 100), rng.randint(1, 10))

    def element_to_str(self, x: Fraction) -> str:
        return f"{x.numerator}/{x.denominator}"

    def element_from_str(self, s: str) -> Fraction:
        num, _, den = s.partition("/")
        return Fraction(int(num), int(den) if den else 1)

    def is_element(self, x) -> bool:
        return isinstance(x, Fraction)


@dataclass(frozen=True)
class PrimeField:
    """The prime field Z/p for a fixed prime p."""

    p: int = DEFAULT_PRIME

    name = "fp"

    def zero(self) -> Fp:
        return Fp(0, self.p)

    def one(self) -> Fp:
        return Fp(1, self.p)

    def from_int(self, n: int) -> Fp:
        return Fp(n, self.p)

    def sample(self, rng: random.Random) -> Fp:
        return Fp(rng.randrange(self.p), self.p)

    def element_to_str(self, x: Fp) -> str:
        return str(x.v)

    def element_from_str(self, s: str) -> Fp:
        return Fp(int(s), self.p)

    def is_element(self, x) -> bool:
        return isinstance(x, Fp) and x.p == self.p


Field = Union[RationalField, PrimeField]

QQ = RationalField()


def field_of(x: Scalar) -> Field:
    if isinstance(x, Fraction):
        return QQ
    if isinstance(x, Fp):
        return PrimeField(x.p)
    raise TypeError(f"not a field element: {x!r}")


def field_from_name(name: str, prime: int = DEFAULT_PRIME) -> Field:
    if name == "q":
        return QQ
    if name == "fp":
        return PrimeField(prime)
    raise ValueError(f"unknown field tag {name!r}")


def sample_scalar(field: Field, rng: random.Random) -> Scalar:
    """Draw one field element from a value-passed RNG stream."""
    return field.sample(rng)


@dataclass(frozen=True)
class DenseMatrix:
    """Immutable row-major dense matrix of field elements."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Scalar]]) -> "DenseMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(row)
        return DenseMatrix(r, c, tuple(flat))

    @staticmethod
    def zeros(rows: int, cols: int, field: Field) -> "DenseMatrix":
        z = field.zero()
        return DenseMatrix(rows, cols, (z,) * (rows * cols))

    @staticmethod
    def identity(n: int, field: Field) -> "DenseMatrix":
        z, o = field.zero(), field.one()
        ent = [z] * (n * n)
        for i in range(n):
            ent[i * n + i] = o
        return DenseMatrix(n, n, tuple(ent))

    def at(self, i: int, j: int) -> Scalar:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> "DenseMatrix":
        ent = [None] * (self.rows * self.cols)
        for i in range(self.rows):
            base = i * self.cols
            for j in range(self.cols):
                ent[j * self.rows + i] = self.entries[base + j]
        return DenseMatrix(self.cols, self.rows, tuple(ent))


def _matrix_field(M: DenseMatrix) -> Field:
    """Field of a nonempty matrix; raises on mixed-field entries."""
    first = M.entries[0]
    field = field_of(first)
    if isinstance(first, Fraction):
        for e in M.entries:
            if not isinstance(e, Fraction):
                raise ValueError("mixed-field entries")
    else:
        p = first.p
        for e in M.entries:
            if not isinstance(e, Fp) or e.p != p:
                raise ValueError("mixed-field entries")
    return field


def _rows_as_integers(M: DenseMatrix) -> list[list[int]]:
    # Clearing denominators row by row leaves the rank unchanged.
    out = []
    for i in range(M.rows):
        row = M.row(i)
        l = 1
        for e in row:
            l = l * e.denominator // math.gcd(l, e.denominator)
        out.append([int(e * l) for e in row])
    return out


def _rank_bareiss(rows: list[list[int]]) -> int:
    m = len(rows)
    n = len(rows[0]) if m else 0
    prev = 1
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
        pc = rows[r][c]
        for i in range(r + 1, m):
            ic = rows[i][c]
            ri, rr = rows[i], rows[r]
            for j in range(c + 1, n):
                # Exact by the Sylvester identity for fraction-free elimination.
                ri[j] = (pc * ri[j] - ic * rr[j]) // prev
            ri[c] = 0
        prev = pc
        r += 1
        if r == m:
            break
    return r


def _to_residue_array(M: DenseMatrix) -> np.ndarray:
    a = np.fromiter((e.v for e in M.entries), dtype=np.int64, count=M.rows * M.cols)
    return a.reshape(M.rows, M.cols)


def _rank_mod_p(A: np.ndarray, p: int) -> int:
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r, c:] = (A[r, c:] * inv) % p
        below = A[r + 1 :, c]
        nzb = np.nonzero(below)[0]
        if nzb.size:
            f = below[nzb]
            A[r + 1 + nzb, c:] = (A[r + 1 + nzb, c:] - np.outer(f, A[r, c:])) % p
        r += 1
    return r


def mat_rank(M: DenseMatrix) -> int:
    """Exact rank of a dense matrix over its coefficient field."""
    if M.rows == 0 or M.cols == 0:
        return 0
    field = _matrix_field(M)
    if isinstance(field, RationalField):
        return _rank_bareiss(_rows_as_integers(M))
    return _rank_mod_p(_to_residue_array(M), field.p)


def mat_det(M: DenseMatrix) -> Scalar:
    """Exact determinant of a square matrix (Gaussian elimination with division)."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    field = _matrix_field(M)
    n = M.rows
    rows = [list(M.row(i)) for i in range(n)]
    det = field.one()
    for c in range(n):
        piv = None
        for i in range(c, n):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            return field.zero()
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        pv = rows[c][c]
        det = det * pv
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] / pv
                ri, rc = rows[i], rows[c]
                for j in range(c, n):
                    ri[j] = ri[j] - f * rc[j]
    return det


def mat_vec(M: DenseMatrix, v: Sequence[Scalar]) -> list[Scalar]:
    if len(v) != M.cols:
        raise ValueError("dimension mismatch")
    out = []
    for i in range(M.rows):
        row = M.row(i)
        acc = row[0] * v[0]
        for j in range(1, M.cols):
            acc = acc + row[j] * v[j]
        out.append(acc)
    return out


def random_matrix(rows: int, cols: int, field: Field, rng: random.Random) -> DenseMatrix:
    return DenseMatrix(
        rows, cols, tuple(field.sample(rng) for _ in range(rows * cols))
    )


def poly_interpolate(xs: Sequence[Scalar], ys: Sequence[Scalar]) -> list[Scalar]:
    """Coefficients (ascending degree) of the unique interpolating polynomial.

    Exact Lagrange interpolation; the evaluation points must be pairwise
    distinct elements of one field.
    """
    if len(xs) != len(ys) or not xs:
        raise ValueError("need equally many points and values")
    field = field_of(xs[0])
    n = len(xs)
    coeffs = [field.zero()] * n
    for i in range(n):
        basis = [field.one()]
        denom = field.one()
        for j in range(n):
            if j == i:
                continue
            new = [field.zero()] * (len(basis) + 1)
            for t, c in enumerate(basis):
                new[t + 1] = new[t + 1] + c
                new[t] = new[t] - c * xs[j]
            basis = new
            denom = denom * (xs[i] - xs[j])
        w = ys[i] / denom
        coeffs = [a + w * b for a, b in zip(coeffs, basis)]
    return coeffs
