"""The total wedge form on m-tuples of degree-r vectors, its polars, and
the local data of its zero divisor: multiplicity at a point, tangent systems
of the singular strata, and the diagonal specialization.

Conventions.  All slot tuples live in wedge^r(V) with dim V = n = r*m.  A
point of the product of projective spaces is stored with each slot scaled so
its lexicographically smallest nonzero coordinate is one.  Every sign is
obtained by evaluating wedges in natural slot order, never from a separate
permutation-parity formula; the Taylor-coefficient identity (checked by the
test suite) pins the convention.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .exterior import (
    ExteriorVector,
    MultiIndex,
    _merge_parity,
    lex_masks,
    top_wedge_coefficient,
    wedge,
)
from .scalars import DenseMatrix, Field, Scalar, mat_rank


@dataclass(frozen=True)
class PointTuple:
    """An m-tuple of nonzero degree-r vectors, one per projective factor."""

    r: int
    m: int
    slots: tuple

    @classmethod
    def of(cls, slots: Sequence[ExteriorVector]) -> "PointTuple":
        if not slots:
            raise ValueError("empty tuple")
        r = slots[0].degree
        m = len(slots)
        n = r * m
        field = slots[0].field
        norm = []
        for s in slots:
            if s.degree != r or s.n != n:
                raise ValueError("all slots must share degree r and ambient r*m")
            if s.field != field:
                raise ValueError("field mismatch between slots")
            if s.is_zero:
                raise ValueError("slots must be nonzero")
            norm.append(s.normalized())
        return cls(r, m, tuple(norm))

    @classmethod
    def diagonal(cls, w: ExteriorVector, m: int) -> "PointTuple":
        return cls.of([w] * m)

    @property
    def n(self) -> int:
        return self.r * self.m

    @property
    def field(self) -> Field:
        return self.slots[0].field


def eval_form(p: PointTuple) -> Scalar:
    """Coefficient of the top basis element in the ordered wedge of all slots."""
    return top_wedge_coefficient(p.slots)


def expand_form(r: int, m: int):
    """Shuffle expansion of the total wedge form.

    Returns one entry per ordered partition of {1, ..., r*m} into m blocks of
    size r: a tuple of the m block MultiIndexes together with the sign of the
    corresponding shuffle permutation.  The number of entries is
    (rm)! / (r!)^m.
    """
    n = r * m
    if n > 64:
        raise ValueError("ambient dimension exceeds 64")
    full = (1 << n) - 1
    out = []

    def rec(remaining: int, blocks: tuple, acc_mask: int, parity: int):
        if len(blocks) == m:
            out.append((blocks, -1 if parity else 1))
            return
        free = _indices_of(remaining)
        for comb in itertools.combinations(free, r):
            bm = 0
            for i in comb:
                bm |= 1 << (i - 1)
            rec(
                remaining ^ bm,
                blocks + (MultiIndex(bm, n),),
                acc_mask | bm,
                parity ^ _merge_parity(acc_mask, bm),
            )

    rec(full, (), 0, 0)
    return out


def _indices_of(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def expand_form_term_count(r: int, m: int) -> int:
    return math.factorial(r * m) // math.factorial(r) ** m


def expand_form_json(r: int, m: int) -> list:
    """Shuffle expansion as JSON-ready [[blocks, sign], ...] records."""
    return [
        [[list(b.indices) for b in blocks], sign]
        for blocks, sign in expand_form(r, m)
    ]


def evaluate_expansion(expansion, p: PointTuple) -> Scalar:
    """Sum of sign * product of slot coordinates over a shuffle expansion."""
    total = p.field.zero()
    for blocks, sign in expansion:
        prod = p.field.one()
        for slot, block in zip(p.slots, blocks):
            c = slot.terms.get(block.mask)
            if c is None:
                prod = None
                break
            prod = prod * c
        if prod is not None:
            total = total + (prod if sign > 0 else -prod)
    return total


def polar(k: int, w: PointTuple, t: Sequence[ExteriorVector]) -> Scalar:
    """k-th Taylor coefficient of the form along the line w + eps*t.

    Computed as the sum over all k-subsets S of the slot set of the ordered
    wedge with t substituted in the slots of S.  No extra signs enter: the
    substitution keeps natural slot order.
    """
    m = w.m
    if not 0 <= k <= m:
        raise ValueError("polar order out of range")
    if len(t) != m:
        raise ValueError("direction tuple has wrong length")
    for ti in t:
        if ti.n != w.n or ti.degree != w.r:
            raise ValueError("direction slots must share degree r and ambient r*m")
        if ti.field != w.field:
            raise ValueError("field mismatch")
    total = w.field.zero()
    for S in itertools.combinations(range(m), k):
        sset = set(S)
        vecs = [t[i] if i in sset else w.slots[i] for i in range(m)]
        total = total + top_wedge_coefficient(vecs)
    return total


def _subset_wedges(slots: Sequence[ExteriorVector], max_size: int) -> dict:
    """Ordered wedges w_S for all slot subsets S with 1 <= |S| <= max_size.

    Keys are bitmasks over slot positions (bit i = slot i).  Built bottom-up:
    w_S = w_min ^ w_{S - min}.
    """
    m = len(slots)
    memo = {1 << i: slots[i] for i in range(m)}
    for size in range(2, max_size + 1):
        for comb in itertools.combinations(range(m), size):
            smask = 0
            for i in comb:
                smask |= 1 << i
            low = smask & -smask
            memo[smask] = wedge(slots[comb[0]], memo[smask ^ low])
    return memo


def multiplicity_at(p: PointTuple) -> int:
    """Multiplicity of the zero divisor of the form at the given point.

    Largest k with all partial wedges w_S, |S| = m-k+1, vanishing; ascends
    the subset lattice and stops at the first all-zero level.  Always at most
    m-1 because the slots are nonzero.
    """
    m = p.m
    prev = {1 << i: p.slots[i] for i in range(m)}
    for size in range(2, m + 1):
        cur = {}
        all_zero = True
        for comb in itertools.combinations(range(m), size):
            smask = 0
            for i in comb:
                smask |= 1 << i
            low = smask & -smask
            val = wedge(p.slots[comb[0]], prev[smask ^ low])
            cur[smask] = val
            if not val.is_zero:
                all_zero = False
        if all_zero:
            return m - size + 1
        prev = cur
    return 0


@dataclass(frozen=True)
class TangentSystem:
    """Linear conditions cutting the tangent space to the k-th singular
    stratum at a base point, as one dense matrix.

    Rows are indexed by pairs (slot subset S with |S| = m-k+1, top-degree
    basis mask); columns by (slot, degree-r basis mask).
    """

    k: int
    base: PointTuple
    matrix: DenseMatrix


def build_tangent_system(p: PointTuple, k: int) -> TangentSystem:
    """Matrix of the conditions for a direction tuple t to be tangent to the
    k-th singular stratum at p.

    For each slot subset S of size m-k+1 the condition is the vanishing of
    the eps-coefficient of the ordered wedge over S of (w_s + eps*t_s); the
    block of columns for slot i inside S is (+-1) times the matrix of
    t |-> t ^ w_{S - i}, the sign coming from moving t_i to the front across
    blocks of degree r.
    """
    r, m, n = p.r, p.m, p.n
    ncols_slot = len(lex_masks(n, r))
    cols_total = m * ncols_slot
    if k == 0:
        return TangentSystem(0, p, DenseMatrix(0, cols_total, ()))
    if not 1 <= k <= m - 1:
        raise ValueError("singularity order must be in 0..m-1")
    if multiplicity_at(p) < k:
        raise ValueError("point does not lie on the k-th singular stratum")
    ssize = m - k + 1
    target = r * ssize
    row_masks = lex_masks(n, target)
    rows_per_block = len(row_masks)
    row_pos = {mask: i for i, mask in enumerate(row_masks)}
    subsets = list(itertools.combinations(range(m), ssize))
    rows_total = len(subsets) * rows_per_block

    memo = _subset_wedges(p.slots, ssize - 1) if ssize >= 2 else {}
    z = p.field.zero()
    entries = [z] * (rows_total * cols_total)
    col_masks = lex_masks(n, r)

    for b, S in enumerate(subsets):
        row_off = b * rows_per_block
        for pos, i in enumerate(S):
            rest = 0
            for j in S:
                if j != i:
                    rest |= 1 << j
            u = memo[rest]
            # Substituting t_i in place inside the ordered wedge over S equals
            # (-1)^(r*(pos + |S| - 1)) times u ^ t_i with u = w_{S - i}.
            negate = bool((r * (pos + ssize - 1)) & 1)
            col_off = i * ncols_slot
            for j, tm in enumerate(col_masks):
                base = col_off + j
                for um, c in u.terms.items():
                    if um & tm:
                        continue
                    val = -c if _merge_parity(um, tm) else c
                    if negate:
                        val = -val
                    entries[(row_off + row_pos[um | tm]) * cols_total + base] = val
    matrix = DenseMatrix(rows_total, cols_total, tuple(entries))
    return TangentSystem(k, p, matrix)


def tangent_codim(p: PointTuple, k: int) -> int:
    """Codimension of the tangent space to the k-th singular stratum at p,
    i.e. the rank of its defining linear system."""
    return mat_rank(build_tangent_system(p, k).matrix)


def diagonal_multiplicity(w: ExteriorVector) -> int:
    """Multiplicity of the divisor at the diagonal point of w, from powers
    of w alone: the largest k with w^(m-k+1) = 0."""
    if w.is_zero:
        raise ValueError("zero vector")
    r, n = w.degree, w.n
    if r == 0 or n % r:
        raise ValueError("ambient dimension must be a multiple of the degree")
    m = n // r
    power = w
    for j in range(2, m + 1):
        power = wedge(power, w)
        if power.is_zero:
            return m - j + 1
    return 0
