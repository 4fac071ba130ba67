"""Decomposability criteria, diagonal codimension thresholds, and the
reconstruction classifier for Grassmannian cone membership.

Two independent decomposability routes are kept side by side: the rank of
the wedge-multiplication map (``mu_rank``) and the classical contraction
relations (:func:`pluckerlab.exterior.plucker_relations_hold`).  The test
suite cross-asserts them; disagreement is a hard failure, never resolved by
preferring one side.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .exterior import (
    ExteriorVector,
    plucker_relations_hold,
    wedge,
    wedge_matrix,
)
from .plucker_form import PointTuple, diagonal_multiplicity, tangent_codim
from .scalars import (
    DenseMatrix,
    Field,
    Scalar,
    field_of,
    mat_det,
    mat_rank,
    random_matrix,
)


@dataclass(frozen=True)
class GrassPoint:
    """A point of the Grassmannian cone: a full-rank r x n matrix together
    with the wedge of its rows (whose coordinates are the r x r minors in
    column-subset order)."""

    r: int
    n: int
    basis_matrix: DenseMatrix
    plucker: ExteriorVector


def plucker_embed(A: DenseMatrix) -> GrassPoint:
    """Wedge of the rows of a full-rank r x n matrix."""
    r, n = A.rows, A.cols
    if r == 0 or r > n:
        raise ValueError("need 1 <= rows <= cols")
    field = field_of(A.entries[0])
    vec = _row_vector(A, 0, field)
    for i in range(1, r):
        vec = wedge(vec, _row_vector(A, i, field))
    if vec.is_zero:
        raise ValueError("matrix is rank deficient")
    return GrassPoint(r, n, A, vec)


def _row_vector(A: DenseMatrix, i: int, field: Field) -> ExteriorVector:
    terms = {}
    for j, c in enumerate(A.row(i)):
        if c:
            terms[1 << j] = c
    return ExteriorVector(A.cols, 1, terms, field)


def mu_rank(w: ExteriorVector, s: int) -> int:
    """Rank of the wedge-multiplication map t |-> w ^ t on degree-s vectors."""
    if w.is_zero:
        raise ValueError("zero vector")
    if s < 1:
        raise ValueError("s must be at least 1")
    if w.degree + s > w.n:
        raise ValueError("degree overflow")
    return mat_rank(wedge_matrix(w, s))


def is_decomposable(w: ExteriorVector) -> bool:
    """Rank criterion for decomposability; falls back to the contraction
    oracle when the ambient dimension is too small for the criterion."""
    if w.is_zero:
        raise ValueError("zero vector")
    d, r = w.n, w.degree
    if d - 2 * r >= 1:
        return mu_rank(w, 1) == d - r
    return plucker_relations_hold(w)


def codim_threshold(r: int, m: int) -> int:
    """Minimal codimension of the tangent space to the deepest singular
    stratum at a diagonal point, attained exactly on the Grassmannian cone.

    Equals m * binom((m-1)r, r) for even r and (m-1) * binom((m-1)r, r) for
    odd r.  Requires m >= 3; see :func:`codim_small_m` for m = 2.
    """
    if m < 3:
        raise ValueError("threshold formula requires m >= 3")
    B = math.comb((m - 1) * r, r)
    return m * B if r % 2 == 0 else (m - 1) * B


def codim_small_m(m: int) -> int:
    """Degenerate regime m = 2: the codimension is m - 1 for every point of
    the stratum, so it carries no membership information."""
    if m != 2:
        raise ValueError("small-m value is only defined for m = 2")
    return m - 1


class Verdict(enum.Enum):
    IN_GRASSMANNIAN = "InGrassmannian"
    FAILS_MULTIPLICITY = "FailsMultiplicity"
    FAILS_TANGENT_BOUND = "FailsTangentBound"


@dataclass(frozen=True)
class ClassifierVerdict:
    tag: Verdict
    threshold: int
    observed_codim: Optional[int] = None

    def __post_init__(self):
        present = self.observed_codim is not None
        if present == (self.tag is Verdict.FAILS_MULTIPLICITY):
            raise ValueError(
                "observed_codim must be present exactly when the diagonal "
                "multiplicity test passes"
            )


def classify_membership(w: ExteriorVector, m: int) -> ClassifierVerdict:
    """Decide whether a nonzero degree-r vector lies on the Grassmannian
    cone, using only the divisor-side data of the diagonal point.

    First the diagonal multiplicity must reach m-1 (for even r this is the
    vanishing of w ^ w; for odd r it holds automatically, so discrimination
    happens entirely through the tangent bound).  Then the codimension of
    the tangent system at the deepest stratum is compared with the closed
    form threshold: equality characterizes membership.
    """
    if m < 3:
        raise ValueError("classification requires m >= 3")
    if w.is_zero:
        raise ValueError("zero vector")
    r = w.degree
    if w.n != r * m:
        raise ValueError("ambient dimension must equal degree * m")
    threshold = codim_threshold(r, m)
    if diagonal_multiplicity(w) < m - 1:
        return ClassifierVerdict(Verdict.FAILS_MULTIPLICITY, threshold)
    c_o = tangent_codim(PointTuple.diagonal(w, m), m - 1)
    if c_o == threshold:
        return ClassifierVerdict(Verdict.IN_GRASSMANNIAN, threshold, c_o)
    if c_o < threshold:
        raise AssertionError(
            f"observed codimension {c_o} below the provable minimum {threshold}"
        )
    return ClassifierVerdict(Verdict.FAILS_TANGENT_BOUND, threshold, c_o)


def ev_m_det(points: Sequence[GrassPoint]) -> Scalar:
    """Determinant of the stacked basis matrices of m subspace points.

    Zero exactly when the union of the subspaces lies in a hyperplane.
    """
    m = len(points)
    if m == 0:
        raise ValueError("empty tuple")
    r, n = points[0].r, points[0].n
    if n != r * m:
        raise ValueError("need n = r * m for a square evaluation matrix")
    rows = []
    for pt in points:
        if pt.r != r or pt.n != n:
            raise ValueError("shape mismatch between points")
        for i in range(pt.basis_matrix.rows):
            rows.append(pt.basis_matrix.row(i))
    return mat_det(DenseMatrix.from_rows(rows))


def random_grass_point(
    r: int, n: int, field: Field, rng: random.Random
) -> GrassPoint:
    """Plucker point of a random full-rank r x n matrix (resampled if
    degenerate, which has negligible probability over a large field)."""
    while True:
        A = random_matrix(r, n, field, rng)
        try:
            return plucker_embed(A)
        except ValueError:
            continue
