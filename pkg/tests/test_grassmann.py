import math
import random

import pytest

from pluckerlab.exterior import (
    ExteriorVector,
    plucker_relations_hold,
    random_exterior,
    top_wedge_coefficient,
    wedge,
)
from pluckerlab.grassmann import (
    ClassifierVerdict,
    Verdict,
    classify_membership,
    codim_small_m,
    codim_threshold,
    ev_m_det,
    is_decomposable,
    mu_rank,
    plucker_embed,
    random_grass_point,
)
from pluckerlab.plucker_form import PointTuple, eval_form
from pluckerlab.scalars import DenseMatrix, QQ, PrimeField

F = PrimeField()


def basis(n, idx, field=QQ):
    return ExteriorVector.basis(n, idx, field)


def rows_matrix(rows, field=QQ):
    return DenseMatrix.from_rows([[field.from_int(x) for x in row] for row in rows])


# -- embedding -----------------------------------------------------------------


def test_embed_coordinate_rows():
    gp = plucker_embed(rows_matrix([[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]]))
    assert gp.plucker == basis(6, (1, 2))


def test_embed_bilinear():
    gp = plucker_embed(rows_matrix([[1, 0, 0, 0, 0, 0], [0, 1, 1, 0, 0, 0]]))
    assert gp.plucker == basis(6, (1, 2)) + basis(6, (1, 3))


def test_embed_outputs_satisfy_relations():
    rng = random.Random(41)
    for _ in range(20):
        gp = random_grass_point(2, 6, F, rng)
        assert plucker_relations_hold(gp.plucker)
    for _ in range(5):
        gp = random_grass_point(3, 9, F, rng)
        assert plucker_relations_hold(gp.plucker)


def test_embed_rank_deficient_rejected():
    with pytest.raises(ValueError, match="rank"):
        plucker_embed(rows_matrix([[1, 2, 3, 4], [2, 4, 6, 8]]))


def test_embed_coordinates_are_minors():
    rng = random.Random(43)
    gp = random_grass_point(2, 5, F, rng)
    A = gp.basis_matrix
    for j1 in range(5):
        for j2 in range(j1 + 1, 5):
            minor = A.at(0, j1) * A.at(1, j2) - A.at(0, j2) * A.at(1, j1)
            mask = (1 << j1) | (1 << j2)
            assert gp.plucker.coefficient(mask) == minor


# -- rank criterion --------------------------------------------------------------


def test_mu_rank_decomposable_values():
    assert mu_rank(basis(6, (1, 2)), 1) == 4
    assert mu_rank(basis(6, (1, 2)), 2) == 6


def test_mu_rank_indecomposable_value():
    w = basis(6, (1, 2)) + basis(6, (3, 4))
    assert mu_rank(w, 1) == 6


def test_mu_rank_errors():
    with pytest.raises(ValueError):
        mu_rank(ExteriorVector.zero(6, 2, QQ), 1)
    with pytest.raises(ValueError):
        mu_rank(basis(6, (1, 2)), 5)


def test_is_decomposable_examples():
    assert is_decomposable(basis(9, (1, 2, 3)))
    assert not is_decomposable(basis(9, (1, 2, 3)) + basis(9, (4, 5, 6)))
    assert is_decomposable(basis(6, (1, 2)) + basis(6, (1, 3)))


def test_decomposability_routes_agree():
    rng = random.Random(47)
    for _ in range(25):
        w = random_exterior(6, 2, F, rng)
        assert is_decomposable(w) == plucker_relations_hold(w)
    for _ in range(10):
        w = random_grass_point(3, 9, F, rng).plucker
        assert is_decomposable(w) and plucker_relations_hold(w)


def test_rank_bound_and_equality_characterization():
    rng = random.Random(53)
    for r, s, d in [(2, 1, 6), (2, 2, 6), (3, 1, 9), (3, 2, 9)]:
        bound = math.comb(d - r, s)
        for trial in range(6):
            if trial % 2 == 0:
                w = random_exterior(d, r, F, rng)
            else:
                w = random_grass_point(r, d, F, rng).plucker
            rank = mu_rank(w, s)
            assert rank >= bound
            assert (rank == bound) == plucker_relations_hold(w)


# -- thresholds ------------------------------------------------------------------


def test_codim_threshold_values():
    assert codim_threshold(2, 3) == 18
    assert codim_threshold(3, 3) == 40
    assert codim_threshold(4, 3) == 210


def test_codim_threshold_requires_m_three():
    with pytest.raises(ValueError):
        codim_threshold(2, 2)
    assert codim_small_m(2) == 1
    with pytest.raises(ValueError):
        codim_small_m(3)


# -- classifier ------------------------------------------------------------------


def test_classifier_member():
    rng = random.Random(59)
    for _ in range(5):
        w = random_grass_point(2, 6, F, rng).plucker
        v = classify_membership(w, 3)
        assert v.tag is Verdict.IN_GRASSMANNIAN
        assert v.observed_codim == v.threshold == 18


def test_classifier_fails_multiplicity():
    w = ExteriorVector.basis(6, (1, 2), F) + ExteriorVector.basis(6, (3, 4), F)
    v = classify_membership(w, 3)
    assert v.tag is Verdict.FAILS_MULTIPLICITY
    assert v.observed_codim is None


def test_classifier_fails_tangent_bound_odd_degree():
    rng = random.Random(61)
    while True:
        w = random_exterior(9, 3, F, rng)
        if not plucker_relations_hold(w):
            break
    v = classify_membership(w, 3)
    assert v.tag is Verdict.FAILS_TANGENT_BOUND
    assert v.observed_codim > v.threshold == 40


def test_classifier_crafted_even_degree_square_zero():
    w = ExteriorVector.basis(12, (1, 2, 3, 4), F) + ExteriorVector.basis(
        12, (1, 2, 5, 6), F
    )
    assert wedge(w, w).is_zero
    assert not plucker_relations_hold(w)
    v = classify_membership(w, 3)
    assert v.tag is Verdict.FAILS_TANGENT_BOUND
    assert v.threshold == 210 and v.observed_codim > 210


def test_classifier_sound_at_two_four():
    rng = random.Random(63)
    threshold = codim_threshold(2, 4)
    assert threshold == 4 * math.comb(6, 2)
    for _ in range(3):
        w = random_grass_point(2, 8, F, rng).plucker
        v = classify_membership(w, 4)
        assert v.tag is Verdict.IN_GRASSMANNIAN and v.observed_codim == threshold
    while True:
        w = random_exterior(8, 2, F, rng)
        if not plucker_relations_hold(w):
            break
    assert classify_membership(w, 4).tag is not Verdict.IN_GRASSMANNIAN


def test_classifier_projective_invariance():
    rng = random.Random(67)
    w = random_grass_point(2, 6, F, rng).plucker
    scaled = w.scale(F.from_int(987654321))
    assert classify_membership(w, 3) == classify_membership(scaled, 3)


def test_classifier_rejects_small_m():
    with pytest.raises(ValueError):
        classify_membership(ExteriorVector.basis(4, (1, 2), F), 2)


def test_classifier_verdict_invariant():
    with pytest.raises(ValueError):
        ClassifierVerdict(Verdict.FAILS_MULTIPLICITY, 18, 20)
    with pytest.raises(ValueError):
        ClassifierVerdict(Verdict.IN_GRASSMANNIAN, 18, None)


# -- stacked determinant -----------------------------------------------------------


def test_ev_det_coordinate_blocks():
    pts = [
        plucker_embed(rows_matrix([[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]])),
        plucker_embed(rows_matrix([[0, 0, 1, 0, 0, 0], [0, 0, 0, 1, 0, 0]])),
        plucker_embed(rows_matrix([[0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]])),
    ]
    det = ev_m_det(pts)
    assert det == QQ.one() or det == -QQ.one()


def test_ev_det_shared_vector_vanishes():
    shared = [1, 1, 1, 0, 0, 0]
    pts = [
        plucker_embed(rows_matrix([shared, [0, 1, 0, 0, 0, 0]])),
        plucker_embed(rows_matrix([shared, [0, 0, 0, 1, 0, 0]])),
        plucker_embed(rows_matrix([[0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]])),
    ]
    assert not ev_m_det(pts)


def test_ev_det_matches_wedge_form():
    rng = random.Random(71)
    for _ in range(25):
        pts = [random_grass_point(2, 6, F, rng) for _ in range(3)]
        det = ev_m_det(pts)
        raw = top_wedge_coefficient([p.plucker for p in pts])
        assert raw == det
        form = eval_form(PointTuple.of([p.plucker for p in pts]))
        assert (not det) == (not form)


def test_ev_det_shape_errors():
    rng = random.Random(73)
    pts = [random_grass_point(2, 6, F, rng) for _ in range(2)]
    with pytest.raises(ValueError):
        ev_m_det(pts)
