"""Split bundle pairs on the projective line and their determinant divisors.

A pair is a splitting type (d_1, ..., d_r) with sum r*(m-1) together with the
complete monomial section basis: component i carries the forms u^a v^(d_i-a).
Binary forms are coefficient tuples; points of the line are stored with the
canonical representative (u, 1), or (1, 0) at infinity.

The determinant divisor is the vanishing of the determinant of the m-point
evaluation matrix.  On the line it factors as a constant times the r-th power
of the pairwise-difference product; both the sampled and the fully symbolic
verification of that identity live here.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .exterior import ExteriorVector, lex_masks, wedge
from .scalars import (
    DEFAULT_PRIME,
    DenseMatrix,
    Field,
    PrimeField,
    Scalar,
    field_from_name,
    mat_det,
    mat_rank,
    sample_scalar,
)

Form = tuple  # coefficients, entry a multiplies u^a v^(deg-a)
Section = tuple  # one Form per bundle component


@dataclass(frozen=True)
class P1Point:
    """Point of the projective line, canonical representative fixed."""

    u: Scalar
    v: Scalar

    @classmethod
    def of(cls, u: Scalar, v: Scalar) -> "P1Point":
        if v:
            one = v / v
            return cls(u / v, one)
        if not u:
            raise ValueError("(0, 0) is not a point")
        return cls(u / u, v)

    @classmethod
    def affine(cls, x: Scalar) -> "P1Point":
        return cls.of(x, _one_like(x))

    @classmethod
    def infinity(cls, field: Field) -> "P1Point":
        return cls(field.one(), field.zero())


def _one_like(x: Scalar) -> Scalar:
    from .scalars import field_of

    return field_of(x).one()


def _zero_form(degree: int, field: Field) -> Form:
    return (field.zero(),) * (degree + 1)


def _monomial_form(degree: int, a: int, field: Field) -> Form:
    coeffs = [field.zero()] * (degree + 1)
    coeffs[a] = field.one()
    return tuple(coeffs)


def _form_add(a: Form, b: Form) -> Form:
    return tuple(x + y for x, y in zip(a, b))


def _form_scale(c: Scalar, a: Form) -> Form:
    return tuple(c * x for x in a)


def _form_mul(a: Form, b: Form, field: Field) -> Form:
    out = [field.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return tuple(out)


def _form_eval(coeffs: Form, pt: P1Point, field: Field) -> Scalar:
    d = len(coeffs) - 1
    upow = field.one()
    # value = sum coeffs[a] u^a v^(d-a); accumulate u powers, then v powers.
    vals = []
    for a in range(d + 1):
        vals.append(coeffs[a] * upow)
        upow = upow * pt.u
    total = field.zero()
    vpow = field.one()
    for a in range(d, -1, -1):
        total = total + vals[a] * vpow
        vpow = vpow * pt.v
    return total


@dataclass(frozen=True)
class BundlePairP1:
    """Split bundle with its full monomial-coordinate section space."""

    r: int
    m: int
    splitting: tuple
    sections: tuple
    field: Field
    complete: bool = True

    def __post_init__(self):
        rm = self.r * self.m
        if len(self.sections) != rm:
            raise ValueError(f"need {rm} sections, got {len(self.sections)}")
        rows = [_flatten_section(s) for s in self.sections]
        if mat_rank(DenseMatrix.from_rows(rows)) != rm:
            raise ValueError("sections are linearly dependent")

    @property
    def section_count(self) -> int:
        return len(self.sections)


def _flatten_section(section: Section) -> list:
    flat = []
    for form in section:
        flat.extend(form)
    return flat


@dataclass(frozen=True)
class DivisorReport:
    """Outcome of the diagonal-factorization identity check."""

    constant_c: Optional[Scalar]
    trials: int
    all_matched: bool
    identically_zero: bool

    def __post_init__(self):
        if self.identically_zero and self.all_matched:
            raise ValueError("identically_zero and all_matched are exclusive")

    def to_json(self, field: Field) -> dict:
        return {
            "constant_c": None
            if self.constant_c is None
            else field.element_to_str(self.constant_c),
            "trials": self.trials,
            "all_matched": self.all_matched,
            "identically_zero": self.identically_zero,
        }


def make_pair(
    splitting: Sequence[int], m: int, field: Field = PrimeField(DEFAULT_PRIME)
) -> BundlePairP1:
    """Complete monomial pair for a splitting type summing to r*(m-1)."""
    splitting = tuple(splitting)
    r = len(splitting)
    if m < 2:
        raise ValueError("need m >= 2")
    if sum(splitting) != r * (m - 1):
        raise ValueError(
            f"splitting must sum to {r * (m - 1)}, got {sum(splitting)}"
        )
    if any(d < 0 for d in splitting):
        raise ValueError(
            "negative summand: the section space falls short of dimension r*m"
        )
    sections = []
    for i, d in enumerate(splitting):
        for a in range(d + 1):
            comp = tuple(
                _monomial_form(dj, a, field) if j == i else _zero_form(dj, field)
                for j, dj in enumerate(splitting)
            )
            sections.append(comp)
    return BundlePairP1(r, m, splitting, tuple(sections), field)


def is_balanced(pair: BundlePairP1) -> bool:
    return all(d == pair.m - 1 for d in pair.splitting)


def evaluation_matrix(pair: BundlePairP1, points: Sequence[P1Point]) -> DenseMatrix:
    """rm x rm matrix: one row per section, an r-column block per point."""
    if len(points) != pair.m:
        raise ValueError(f"need {pair.m} points")
    field = pair.field
    rows = []
    for section in pair.sections:
        row = []
        for pt in points:
            for j in range(pair.r):
                row.append(_form_eval(section[j], pt, field))
        rows.append(row)
    return DenseMatrix.from_rows(rows)


def divisor_value(pair: BundlePairP1, points: Sequence[P1Point]) -> Scalar:
    """Value at the chosen representatives of the multihomogeneous form
    cutting the determinant divisor."""
    return mat_det(evaluation_matrix(pair, points))


def sample_affine_point(field: Field, rng: random.Random) -> P1Point:
    return P1Point.affine(sample_scalar(field, rng))


def sample_points(pair_m: int, field: Field, rng: random.Random) -> list[P1Point]:
    return [sample_affine_point(field, rng) for _ in range(pair_m)]


def sample_distinct_points(
    count: int, field: Field, rng: random.Random
) -> list[P1Point]:
    pts: list[P1Point] = []
    seen = set()
    while len(pts) < count:
        p = sample_affine_point(field, rng)
        if p.u not in seen:
            seen.add(p.u)
            pts.append(p)
    return pts


def has_plucker_form(pair: BundlePairP1, trials: int, seed: int) -> bool:
    """Randomized test for non-degeneracy of the evaluation determinant.

    True as soon as one sampled point tuple gives a nonzero value; over a
    large prime field the chance that a nonzero form evaluates to zero at
    all `trials` samples is at most (total degree / p)^trials.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = random.Random(seed)
    for _ in range(trials):
        pts = sample_points(pair.m, pair.field, rng)
        if divisor_value(pair, pts):
            return True
    return False


def pairwise_product(points: Sequence[P1Point], power: int, field: Field) -> Scalar:
    """Product over i < j of (u_i v_j - u_j v_i)^power."""
    total = field.one()
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = points[i].u * points[j].v - points[j].u * points[i].v
            total = total * d**power
    return total


def diagonal_factor_check(pair: BundlePairP1, trials: int, seed: int) -> DivisorReport:
    """Fit det = c * prod_{i<j}(u_i v_j - u_j v_i)^r at one generic sample and
    verify the identity exactly at `trials` further samples.

    For a balanced splitting the value is additionally matched against the
    r-th power of the rank-one divisor, up to a second fitted constant.
    """
    field = pair.field
    rng = random.Random(seed)
    det0 = None
    for _ in range(32):
        pts = sample_distinct_points(pair.m, field, rng)
        det0 = divisor_value(pair, pts)
        if det0:
            break
    if not det0:
        raise ValueError("degenerate pair: the determinant vanishes identically")
    c = det0 / pairwise_product(pts, pair.r, field)
    balanced = is_balanced(pair)
    base = None
    c_power = None
    if balanced and pair.r > 1:
        base = make_pair((pair.m - 1,), pair.m, field)
        c_power = det0 / divisor_value(base, pts) ** pair.r
    all_matched = True
    for _ in range(trials):
        pts = sample_distinct_points(pair.m, field, rng)
        det = divisor_value(pair, pts)
        ok = det == c * pairwise_product(pts, pair.r, field)
        if ok and base is not None:
            ok = det == c_power * divisor_value(base, pts) ** pair.r
        if not ok:
            all_matched = False
            break
    return DivisorReport(c, trials, all_matched, False)


def _perm_sign(perm: Sequence[int]) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv & 1 else 1


def det_map_matrix(pair: BundlePairP1) -> DenseMatrix:
    """Matrix of the determinant map from wedges of sections to forms.

    Columns follow the lex wedge basis on section indices; rows are the
    monomial basis u^a v^(D-a) of degree D = r(m-1) forms, a ascending.
    """
    field = pair.field
    r = pair.r
    D = r * (pair.m - 1)
    combos = list(itertools.combinations(range(len(pair.sections)), r))
    entries = [field.zero()] * ((D + 1) * len(combos))
    ncols = len(combos)
    for cidx, comb in enumerate(combos):
        col = _zero_form(D, field)
        for perm in itertools.permutations(range(r)):
            f: Form = (field.one(),)
            for a in range(r):
                f = _form_mul(f, pair.sections[comb[a]][perm[a]], field)
            if _perm_sign(perm) < 0:
                f = tuple(-x for x in f)
            col = _form_add(col, f)
        for a in range(D + 1):
            entries[a * ncols + cidx] = col[a]
    return DenseMatrix(D + 1, ncols, tuple(entries))


def det_map_rank(pair: BundlePairP1) -> int:
    return mat_rank(det_map_matrix(pair))


def _value_rows(pair: BundlePairP1, x: P1Point) -> list[list[Scalar]]:
    field = pair.field
    return [
        [_form_eval(section[j], x, field) for section in pair.sections]
        for j in range(pair.r)
    ]


def classify_point(pair: BundlePairP1, x: P1Point) -> ExteriorVector:
    """Plucker vector of the row space of the r x rm section-value matrix:
    the image of the point under the classifying map, with coordinates the
    r x r minors."""
    rm = pair.r * pair.m
    rows = _value_rows(pair, x)
    vec = None
    for row in rows:
        terms = {1 << j: c for j, c in enumerate(row) if c}
        rv = ExteriorVector(rm, 1, terms, pair.field)
        vec = rv if vec is None else wedge(vec, rv)
    if vec.is_zero:
        raise ValueError("evaluation drops rank: not globally generated here")
    return vec


def lambda_image(pair: BundlePairP1, functional: Sequence[Scalar]) -> ExteriorVector:
    """Transpose of the determinant map applied to a linear functional on
    degree r(m-1) forms, read in the wedge basis dual to the sections."""
    D = pair.r * (pair.m - 1)
    if len(functional) != D + 1:
        raise ValueError(f"functional must have {D + 1} coefficients")
    M = det_map_matrix(pair)
    coeffs = []
    for cidx in range(M.cols):
        acc = pair.field.zero()
        for a in range(M.rows):
            f = functional[a]
            if f:
                acc = acc + M.at(a, cidx) * f
        coeffs.append(acc)
    vec = ExteriorVector.from_coefficients(pair.r * pair.m, pair.r, coeffs, pair.field)
    if vec.is_zero:
        raise ValueError("functional annihilates the image: indeterminacy point")
    return vec


def evaluation_functional(pair: BundlePairP1, x: P1Point) -> list[Scalar]:
    """Coefficients of 'evaluate a degree r(m-1) form at x' in the monomial
    dual basis."""
    D = pair.r * (pair.m - 1)
    field = pair.field
    out = []
    for a in range(D + 1):
        out.append(_form_eval(_monomial_form(D, a, field), x, field))
    return out


def span_dimension(pair: BundlePairP1, samples: int, seed: int) -> int:
    """Rank of the matrix of classifying-map images at random points."""
    nmasks = len(lex_masks(pair.r * pair.m, pair.r))
    if samples < nmasks:
        raise ValueError(f"need at least {nmasks} samples")
    rng = random.Random(seed)
    rows = []
    seen = set()
    while len(rows) < samples:
        x = sample_affine_point(pair.field, rng)
        if x.u in seen:
            continue
        seen.add(x.u)
        try:
            vec = classify_point(pair, x)
        except ValueError:
            continue
        rows.append(vec.coefficient_vector())
    return mat_rank(DenseMatrix.from_rows(rows))


def two_point_surjectivity(pair: BundlePairP1, x: P1Point, y: P1Point) -> bool:
    """Whether sections evaluated at two distinct points fill both fibers."""
    if x == y:
        raise ValueError("points must be distinct")
    field = pair.field
    rows = []
    for section in pair.sections:
        row = []
        for pt in (x, y):
            for j in range(pair.r):
                row.append(_form_eval(section[j], pt, field))
        rows.append(row)
    return mat_rank(DenseMatrix.from_rows(rows)) == 2 * pair.r


def change_basis(pair: BundlePairP1, G: DenseMatrix) -> BundlePairP1:
    """Replace the section basis by G applied to it (rows of G give the new
    sections as combinations of the old)."""
    rm = pair.r * pair.m
    if G.rows != rm or G.cols != rm:
        raise ValueError(f"basis change must be {rm} x {rm}")
    new_sections = []
    for i in range(rm):
        comps = [_zero_form(d, pair.field) for d in pair.splitting]
        for k in range(rm):
            g = G.at(i, k)
            if not g:
                continue
            old = pair.sections[k]
            comps = [
                _form_add(comp, _form_scale(g, form))
                for comp, form in zip(comps, old)
            ]
        new_sections.append(tuple(comps))
    return BundlePairP1(
        pair.r, pair.m, pair.splitting, tuple(new_sections), pair.field, pair.complete
    )


# -- symbolic second witness -------------------------------------------------


def divisor_coefficient_tensor(pair: BundlePairP1) -> dict:
    """Full symbolic expansion of the evaluation determinant.

    Keys are tuples (a_1, ..., a_m) of u-exponents, one per point; the
    v-exponent at point i is r(m-1) - a_i by multihomogeneity.  Only usable
    at desk scale (rm <= 7)."""
    rm = pair.r * pair.m
    if math.factorial(rm) > 5040:
        raise ValueError("symbolic expansion is limited to rm <= 7")
    field = pair.field
    out: dict = {}
    for perm in itertools.permutations(range(rm)):
        sign = _perm_sign(perm)
        point_forms = []
        for i in range(pair.m):
            f: Form = (field.one(),)
            for j in range(pair.r):
                f = _form_mul(f, pair.sections[perm[i * pair.r + j]][j], field)
            point_forms.append([(a, c) for a, c in enumerate(f) if c])
        for combo in itertools.product(*point_forms):
            key = tuple(a for a, _ in combo)
            coeff = combo[0][1]
            for _, c in combo[1:]:
                coeff = coeff * c
            if sign < 0:
                coeff = -coeff
            acc = out.get(key)
            total = coeff if acc is None else acc + coeff
            if total:
                out[key] = total
            elif acc is not None:
                del out[key]
    return out


def diagonal_power_tensor(r: int, m: int, field: Field) -> dict:
    """Symbolic expansion of prod_{i<j} (u_i v_j - u_j v_i)^r with the same
    u-exponent keys as :func:`divisor_coefficient_tensor`."""
    acc = {(0,) * m: field.one()}
    for i in range(m):
        for j in range(i + 1, m):
            for _ in range(r):
                new: dict = {}
                for key, c in acc.items():
                    for idx, val in ((i, c), (j, -c)):
                        k2 = list(key)
                        k2[idx] += 1
                        k2 = tuple(k2)
                        prev = new.get(k2)
                        total = val if prev is None else prev + val
                        if total:
                            new[k2] = total
                        elif prev is not None:
                            del new[k2]
                acc = new
    return acc


def symbolic_diagonal_witness(pair: BundlePairP1):
    """Exact polynomial identity det = c * (pairwise product)^r, checked on
    full coefficient tensors.  Returns (holds, c)."""
    div = divisor_coefficient_tensor(pair)
    diag = diagonal_power_tensor(pair.r, pair.m, pair.field)
    if not div:
        return False, None
    key = sorted(diag)[0]
    if key not in div:
        return False, None
    c = div[key] / diag[key]
    zero = pair.field.zero()
    for k in set(div) | set(diag):
        if div.get(k, zero) != c * diag.get(k, zero):
            return False, c
    return True, c


# -- serialization ------------------------------------------------------------


def pair_to_json(pair: BundlePairP1) -> dict:
    data = {
        "r": pair.r,
        "m": pair.m,
        "splitting": list(pair.splitting),
        "field": pair.field.name,
    }
    if isinstance(pair.field, PrimeField):
        data["prime"] = pair.field.p
    return data


def pair_from_json(data: dict) -> BundlePairP1:
    field = field_from_name(data["field"], data.get("prime", DEFAULT_PRIME))
    splitting = tuple(data["splitting"])
    if data.get("r") is not None and data["r"] != len(splitting):
        raise ValueError("rank does not match the splitting length")
    return make_pair(splitting, data["m"], field)
