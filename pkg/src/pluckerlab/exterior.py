"""Exterior algebra over an exact field with bitmask-indexed basis.

A degree-k basis element e_I of wedge^k(V), with dim V = n <= 64, is labelled
by the strictly increasing index set I in {1, ..., n}, encoded as the bitmask
with bit (i-1) set for each i in I.  All signs in the package reduce to one
kernel: the parity of the merge permutation interleaving two disjoint sorted
index sets (``merge_sign``).

The sign convention for contraction is fixed so that
``contract(phi, e_{phi + {j}}) = (-1)^pos e_j`` where pos is the 1-based
position of j inside the sorted set phi + {j}.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .scalars import (
    DenseMatrix,
    Field,
    Scalar,
    field_of,
    sample_scalar,
)


def _mask_from_indices(indices: Iterable[int], n: int) -> int:
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"index {i} out of range 1..{n}")
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValueError(f"repeated index {i}")
        mask |= bit
    return mask


@lru_cache(maxsize=None)
def _indices_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _merge_parity(a: int, b: int) -> int:
    """Parity of inversions between sorted(a) followed by sorted(b)."""
    inv = 0
    while a:
        low = a & -a
        inv += (b & (low - 1)).bit_count()
        a ^= low
    return inv & 1


@lru_cache(maxsize=None)
def lex_masks(n: int, k: int) -> tuple[int, ...]:
    """All degree-k basis masks on n letters, ordered by their index tuples."""
    if k < 0 or k > n:
        return ()
    return tuple(
        _mask_from_indices(c, n) for c in itertools.combinations(range(1, n + 1), k)
    )


@dataclass(frozen=True)
class MultiIndex:
    """A strictly increasing subset of {1, ..., n} as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if not 0 < self.n <= 64:
            raise ValueError("ambient dimension must be in 1..64")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError("mask has bits outside the ambient dimension")

    @classmethod
    def from_indices(cls, indices: Iterable[int], n: int) -> "MultiIndex":
        return cls(_mask_from_indices(indices, n), n)

    @property
    def degree(self) -> int:
        return self.mask.bit_count()

    @property
    def indices(self) -> tuple[int, ...]:
        return _indices_from_mask(self.mask)


def merge_sign(I: MultiIndex, J: MultiIndex) -> int:
    """Sign of e_I ^ e_J relative to e_{I+J}: 0 on overlap, else +-1."""
    if I.n != J.n:
        raise ValueError("ambient dimension mismatch")
    if I.mask & J.mask:
        return 0
    return -1 if _merge_parity(I.mask, J.mask) else 1


class ExteriorVector:
    """Homogeneous element of wedge^k(V) as a sparse mask -> coefficient map."""

    __slots__ = ("n", "degree", "field", "terms")

    def __init__(self, n: int, degree: int, terms: dict, field: Field):
        if not 0 < n <= 64:
            raise ValueError("ambient dimension must be in 1..64")
        if not 0 <= degree <= n:
            raise ValueError("degree out of range")
        clean = {}
        for mask, coeff in terms.items():
            if mask.bit_count() != degree or mask >> n:
                raise ValueError(f"mask {mask:b} has wrong degree or range")
            if coeff:
                clean[mask] = coeff
        self.n = n
        self.degree = degree
        self.field = field
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int, degree: int, field: Field) -> "ExteriorVector":
        return ExteriorVector(n, degree, {}, field)

    @staticmethod
    def basis(n: int, indices: Iterable[int], field: Field) -> "ExteriorVector":
        mask = _mask_from_indices(indices, n)
        return ExteriorVector(n, mask.bit_count(), {mask: field.one()}, field)

    @staticmethod
    def from_coefficients(
        n: int, degree: int, coeffs: Sequence[Scalar], field: Field
    ) -> "ExteriorVector":
        masks = lex_masks(n, degree)
        if len(coeffs) != len(masks):
            raise ValueError("coefficient count mismatch")
        return ExteriorVector(n, degree, dict(zip(masks, coeffs)), field)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, index) -> Scalar:
        mask = index.mask if isinstance(index, MultiIndex) else index
        return self.terms.get(mask, self.field.zero())

    def coefficient_vector(self) -> list[Scalar]:
        """Dense coefficients in the lex basis order of this degree."""
        z = self.field.zero()
        return [self.terms.get(m, z) for m in lex_masks(self.n, self.degree)]

    def support(self) -> list[MultiIndex]:
        return [
            MultiIndex(m, self.n)
            for m in sorted(self.terms, key=_indices_from_mask)
        ]

    # -- algebra -----------------------------------------------------------

    def _check_compatible(self, other: "ExteriorVector"):
        if self.n != other.n or self.degree != other.degree:
            raise ValueError("shape mismatch")
        if self.field != other.field:
            raise ValueError("field mismatch")

    def __add__(self, other: "ExteriorVector") -> "ExteriorVector":
        self._check_compatible(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            acc = terms.get(m)
            terms[m] = c if acc is None else acc + c
        return ExteriorVector(self.n, self.degree, terms, self.field)

    def __sub__(self, other: "ExteriorVector") -> "ExteriorVector":
        return self + (-other)

    def __neg__(self) -> "ExteriorVector":
        return ExteriorVector(
            self.n, self.degree, {m: -c for m, c in self.terms.items()}, self.field
        )

    def scale(self, scalar: Scalar) -> "ExteriorVector":
        return ExteriorVector(
            self.n,
            self.degree,
            {m: scalar * c for m, c in self.terms.items()},
            self.field,
        )

    def __rmul__(self, scalar) -> "ExteriorVector":
        if isinstance(scalar, int):
            scalar = self.field.from_int(scalar)
        return self.scale(scalar)

    def leading_mask(self) -> int:
        """Mask of the lexicographically smallest nonzero coordinate."""
        if self.is_zero:
            raise ValueError("zero vector has no leading term")
        return min(self.terms, key=_indices_from_mask)

    def normalized(self) -> "ExteriorVector":
        """Canonical projective representative: leading coefficient one."""
        lead = self.terms[self.leading_mask()]
        if lead == self.field.one():
            return self
        return self.scale(self.field.one() / lead)

    def __eq__(self, other):
        return (
            isinstance(other, ExteriorVector)
            and self.n == other.n
            and self.degree == other.degree
            and self.field == other.field
            and self.terms == other.terms
        )

    def __repr__(self):
        if self.is_zero:
            return f"ExteriorVector(0; n={self.n}, k={self.degree})"
        parts = [
            f"{c!r}*e{list(_indices_from_mask(m))}"
            for m, c in sorted(self.terms.items(), key=lambda kv: _indices_from_mask(kv[0]))
        ]
        return " + ".join(parts)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "terms": [
                [list(_indices_from_mask(m)), self.field.element_to_str(c)]
                for m, c in sorted(
                    self.terms.items(), key=lambda kv: _indices_from_mask(kv[0])
                )
            ],
        }

    @staticmethod
    def from_json(data: dict, field: Field) -> "ExteriorVector":
        n = data["n"]
        terms = {
            _mask_from_indices(idx, n): field.element_from_str(s)
            for idx, s in data["terms"]
        }
        return ExteriorVector(n, data["degree"], terms, field)


def wedge(u: ExteriorVector, v: ExteriorVector) -> ExteriorVector:
    """Bilinear wedge product, signed by the merge permutation parity."""
    if u.n != v.n:
        raise ValueError("ambient dimension mismatch")
    if u.field != v.field:
        raise ValueError("field mismatch")
    total = u.degree + v.degree
    if total > u.n:
        raise ValueError(
            f"degree overflow: {u.degree} + {v.degree} > {u.n}"
        )
    terms: dict = {}
    for mu, cu in u.terms.items():
        for mv, cv in v.terms.items():
            if mu & mv:
                continue
            c = cu * cv
            if _merge_parity(mu, mv):
                c = -c
            m = mu | mv
            acc = terms.get(m)
            terms[m] = c if acc is None else acc + c
    return ExteriorVector(u.n, total, terms, u.field)


def top_wedge_coefficient(vectors: Sequence[ExteriorVector]) -> Scalar:
    """Coefficient of e_{1..n} in the ordered wedge of the given vectors.

    The degrees must add up to the ambient dimension exactly.
    """
    if not vectors:
        raise ValueError("empty wedge")
    n = vectors[0].n
    if sum(v.degree for v in vectors) != n:
        raise ValueError("degrees must sum to the ambient dimension")
    acc = vectors[0]
    for v in vectors[1:]:
        if acc.is_zero:
            break
        acc = wedge(acc, v)
    full = (1 << n) - 1
    return acc.terms.get(full, acc.field.zero())


def _contract_mask(phi_mask: int, w: ExteriorVector) -> ExteriorVector:
    out: dict = {}
    for mask, c in w.terms.items():
        if mask & phi_mask != phi_mask:
            continue
        jbit = mask ^ phi_mask
        pos = 1 + (phi_mask & (jbit - 1)).bit_count()
        val = -c if pos & 1 else c
        acc = out.get(jbit)
        out[jbit] = val if acc is None else acc + val
    return ExteriorVector(w.n, 1, out, w.field)


def contract(phi: MultiIndex, w: ExteriorVector) -> ExteriorVector:
    """Interior product of w with the dual basis covector labelled by phi."""
    if phi.n != w.n:
        raise ValueError("ambient dimension mismatch")
    if phi.degree != w.degree - 1:
        raise ValueError("contraction degree must be one less than the vector degree")
    return _contract_mask(phi.mask, w)


def plucker_relations_hold(w: ExteriorVector) -> bool:
    """Classical decomposability test: contract(phi, w) ^ w = 0 for all phi.

    Exact for every degree; serves as the independent oracle for the rank
    based criterion in :mod:`pluckerlab.grassmann`.
    """
    if w.is_zero:
        raise ValueError("zero vector")
    r, n = w.degree, w.n
    if r <= 1 or r + 1 > n:
        return True
    for phi_mask in lex_masks(n, r - 1):
        v = _contract_mask(phi_mask, w)
        if v.is_zero:
            continue
        if not wedge(v, w).is_zero:
            return False
    return True


def random_exterior(
    n: int, degree: int, field: Field, rng: random.Random
) -> ExteriorVector:
    """Dense random vector with all coefficients sampled; retried if zero."""
    if degree > n:
        raise ValueError(f"degree {degree} exceeds ambient dimension {n}")
    while True:
        terms = {m: sample_scalar(field, rng) for m in lex_masks(n, degree)}
        vec = ExteriorVector(n, degree, terms, field)
        if not vec.is_zero:
            return vec


def wedge_matrix(u: ExteriorVector, s: int) -> DenseMatrix:
    """Matrix of t |-> u ^ t on wedge^s(V), in lex bases on both sides."""
    n = u.n
    target = u.degree + s
    if target > n:
        raise ValueError("degree overflow")
    col_masks = lex_masks(n, s)
    row_masks = lex_masks(n, target)
    row_pos = {m: i for i, m in enumerate(row_masks)}
    ncols = len(col_masks)
    z = u.field.zero()
    entries = [z] * (len(row_masks) * ncols)
    for j, tm in enumerate(col_masks):
        for um, c in u.terms.items():
            if um & tm:
                continue
            val = -c if _merge_parity(um, tm) else c
            entries[row_pos[um | tm] * ncols + j] = val
    return DenseMatrix(len(row_masks), ncols, tuple(entries))
