import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pluckerlab.exterior import (
    ExteriorVector,
    MultiIndex,
    contract,
    lex_masks,
    merge_sign,
    plucker_relations_hold,
    random_exterior,
    top_wedge_coefficient,
    wedge,
)
from pluckerlab.scalars import QQ, PrimeField, sample_scalar

F = PrimeField()


def ev(n, *index_sets, field=QQ):
    out = ExteriorVector.basis(n, index_sets[0], field)
    for idx in index_sets[1:]:
        out = out + ExteriorVector.basis(n, idx, field)
    return out


# -- wedge and signs ----------------------------------------------------------


def test_wedge_disjoint_ordered():
    assert wedge(ev(6, (1, 2)), ev(6, (3, 4))) == ev(6, (1, 2, 3, 4))


def test_wedge_single_inversion():
    # merging (1,3) and (2) costs one transposition
    assert wedge(ev(4, (1, 3)), ev(4, (2,))) == -1 * ev(4, (1, 2, 3))


def test_wedge_shared_index_vanishes():
    assert wedge(ev(6, (1, 2)), ev(6, (1, 3))).is_zero


def test_wedge_degree_overflow_rejected():
    with pytest.raises(ValueError, match="overflow"):
        wedge(ev(4, (1, 2, 3)), ev(4, (2, 3)))


def test_wedge_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(ev(4, (1,)), ev(6, (2,)))
    with pytest.raises(ValueError):
        wedge(ev(4, (1,)), ExteriorVector.basis(4, (2,), F))


def test_merge_sign_examples():
    assert merge_sign(MultiIndex.from_indices((1, 2), 6), MultiIndex.from_indices((3, 4), 6)) == 1
    assert merge_sign(MultiIndex.from_indices((2,), 4), MultiIndex.from_indices((1,), 4)) == -1
    assert merge_sign(MultiIndex.from_indices((1, 3), 4), MultiIndex.from_indices((3,), 4)) == 0


@st.composite
def vectors(draw, n=5, degree=2):
    coeffs = draw(
        st.lists(
            st.integers(-9, 9),
            min_size=len(lex_masks(n, degree)),
            max_size=len(lex_masks(n, degree)),
        )
    )
    return ExteriorVector.from_coefficients(
        n, degree, [QQ.from_int(c) for c in coeffs], QQ
    )


@given(vectors(5, 2), vectors(5, 2))
@settings(max_examples=60, deadline=None)
def test_graded_anticommutativity(u, v):
    sign = (-1) ** (u.degree * v.degree)
    assert wedge(u, v) == sign * wedge(v, u)


@given(vectors(6, 2), vectors(6, 1), vectors(6, 2))
@settings(max_examples=60, deadline=None)
def test_associativity(u, v, w):
    assert wedge(wedge(u, v), w) == wedge(u, wedge(v, w))


@given(vectors(5, 2), vectors(5, 2), vectors(5, 2), st.integers(-5, 5), st.integers(-5, 5))
@settings(max_examples=60, deadline=None)
def test_bilinearity(u, u2, v, a, b):
    left = wedge(a * u + b * u2, v)
    right = a * wedge(u, v) + b * wedge(u2, v)
    assert left == right


# -- contraction and the decomposability oracle -------------------------------


def test_contract_examples():
    assert contract(MultiIndex.from_indices((1,), 4), ev(4, (1, 2))) == ev(4, (2,))
    assert contract(MultiIndex.from_indices((2,), 4), ev(4, (1, 2))) == -1 * ev(4, (1,))
    assert contract(MultiIndex.from_indices((3,), 4), ev(4, (1, 2))).is_zero


def test_contract_degree_mismatch():
    with pytest.raises(ValueError):
        contract(MultiIndex.from_indices((1, 2), 4), ev(4, (1, 2)))


def test_relations_basis_vector():
    assert plucker_relations_hold(ev(6, (1, 2)))


def test_relations_reject_sum_of_disjoint_blades():
    assert not plucker_relations_hold(ev(6, (1, 2), (3, 4)))


def test_relations_accept_factorable_sum():
    # e12 + e13 = e1 ^ (e2 + e3)
    assert plucker_relations_hold(ev(6, (1, 2), (1, 3)))


def test_relations_zero_vector_rejected():
    with pytest.raises(ValueError):
        plucker_relations_hold(ExteriorVector.zero(6, 2, QQ))


def test_relations_completeness_degree_two():
    # In degree 2 the relations reduce to the vanishing of the square.
    rng = random.Random(31)
    for _ in range(40):
        w = random_exterior(6, 2, F, rng)
        assert plucker_relations_hold(w) == wedge(w, w).is_zero


# -- generation and serialization ---------------------------------------------


def test_random_exterior_shape_and_determinism():
    w1 = random_exterior(6, 2, F, random.Random(4))
    w2 = random_exterior(6, 2, F, random.Random(4))
    assert w1 == w2
    assert len(w1.terms) == 15  # dense with overwhelming probability


def test_random_exterior_degree_error():
    with pytest.raises(ValueError):
        random_exterior(4, 5, QQ, random.Random(0))


def test_json_roundtrip_exact():
    rng = random.Random(8)
    for field in (QQ, F):
        w = random_exterior(6, 2, field, rng)
        data = json.loads(json.dumps(w.to_json()))
        assert ExteriorVector.from_json(data, field) == w


def test_json_term_format():
    w = ev(6, (1, 2)) + 3 * ev(6, (3, 4))
    data = w.to_json()
    assert data["n"] == 6 and data["degree"] == 2
    assert data["terms"] == [[[1, 2], "1/1"], [[3, 4], "3/1"]]


def test_normalized_leading_coefficient():
    w = 4 * ev(6, (2, 3)) + 2 * ev(6, (1, 4))
    nw = w.normalized()
    # (1,4) precedes (2,3) in index-tuple order
    assert nw.coefficient(MultiIndex.from_indices((1, 4), 6)) == QQ.one()
    assert nw == w.scale(QQ.from_int(1) / QQ.from_int(2))


def test_top_wedge_coefficient():
    slots = [ev(4, (1, 2)), ev(4, (3, 4))]
    assert top_wedge_coefficient(slots) == QQ.one()
    with pytest.raises(ValueError):
        top_wedge_coefficient([ev(4, (1, 2))])


def test_ambient_dimension_cap():
    with pytest.raises(ValueError):
        ExteriorVector.zero(65, 1, QQ)
