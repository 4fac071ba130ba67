import math
import random

import pytest

from pluckerlab.exterior import ExteriorVector, random_exterior, top_wedge_coefficient
from pluckerlab.plucker_form import (
    PointTuple,
    build_tangent_system,
    diagonal_multiplicity,
    evaluate_expansion,
    eval_form,
    expand_form,
    expand_form_json,
    expand_form_term_count,
    multiplicity_at,
    polar,
    tangent_codim,
)
from pluckerlab.scalars import QQ, PrimeField, poly_interpolate

F = PrimeField()


def basis(n, idx, field=F):
    return ExteriorVector.basis(n, idx, field)


def random_tuple(r, m, field, rng):
    return PointTuple.of([random_exterior(r * m, r, field, rng) for _ in range(m)])


# -- eval_form ------------------------------------------------------------------


def test_eval_consecutive_blocks_is_one():
    for r, m in [(1, 3), (2, 3), (3, 2)]:
        n = r * m
        slots = [
            basis(n, tuple(range(i * r + 1, (i + 1) * r + 1))) for i in range(m)
        ]
        assert eval_form(PointTuple.of(slots)) == F.one()


def test_eval_missing_index_vanishes():
    slots = [basis(6, (1, 2)), basis(6, (1, 3)), basis(6, (4, 5))]
    assert not eval_form(PointTuple.of(slots))


def test_slot_swap_symmetry():
    rng = random.Random(2)
    for r, m in [(1, 3), (2, 3), (3, 3)]:
        p = random_tuple(r, m, F, rng)
        for _ in range(3):
            i, j = rng.sample(range(m), 2)
            slots = list(p.slots)
            slots[i], slots[j] = slots[j], slots[i]
            swapped = PointTuple.of(slots)
            expected = eval_form(p) if r % 2 == 0 else -eval_form(p)
            assert eval_form(swapped) == expected


def test_point_tuple_validation():
    with pytest.raises(ValueError):
        PointTuple.of([basis(6, (1, 2)), ExteriorVector.zero(6, 2, F), basis(6, (3, 4))])
    with pytest.raises(ValueError):
        PointTuple.of([basis(6, (1, 2)), basis(6, (1,)), basis(6, (3, 4))])


def test_point_tuple_slots_are_normalized():
    w = 7 * random_exterior(6, 2, QQ, random.Random(1))
    p = PointTuple.of([w, w, w])
    lead = p.slots[0].terms[p.slots[0].leading_mask()]
    assert lead == QQ.one()


# -- expansion ------------------------------------------------------------------


def test_expansion_counts():
    assert len(expand_form(2, 2)) == 6
    assert len(expand_form(2, 3)) == 90
    assert expand_form_term_count(2, 3) == 90
    assert len(expand_form(1, 2)) == 2


def test_expansion_one_two_exact():
    entries = {
        tuple(tuple(b.indices) for b in blocks): sign
        for blocks, sign in expand_form(1, 2)
    }
    assert entries == {((1,), (2,)): 1, ((2,), (1,)): -1}


def test_expansion_agrees_with_eval():
    rng = random.Random(3)
    for r, m in [(1, 2), (2, 2), (2, 3)]:
        expansion = expand_form(r, m)
        for _ in range(10):
            p = random_tuple(r, m, F, rng)
            assert evaluate_expansion(expansion, p) == eval_form(p)


def test_expansion_json_shape():
    data = expand_form_json(1, 2)
    assert data == [[[[1], [2]], 1], [[[2], [1]], -1]]


# -- polars ---------------------------------------------------------------------


def test_polar_order_zero_and_top():
    rng = random.Random(5)
    p = random_tuple(2, 3, F, rng)
    t = [random_exterior(6, 2, F, rng) for _ in range(3)]
    assert polar(0, p, t) == eval_form(p)
    assert polar(3, p, t) == top_wedge_coefficient(t)


def test_polar_one_two_cancellation():
    w = PointTuple.of([basis(2, (1,), QQ), basis(2, (2,), QQ)])
    t = [basis(2, (2,), QQ), basis(2, (1,), QQ)]
    assert polar(1, w, t) == QQ.zero()


def test_taylor_identity_small():
    rng = random.Random(7)
    for r, m in [(1, 2), (2, 2), (2, 3)]:
        n = r * m
        p = random_tuple(r, m, F, rng)
        t = [random_exterior(n, r, F, rng) for _ in range(m)]
        coeffs = [polar(k, p, t) for k in range(m + 1)]
        xs = [F.from_int(i) for i in range(m + 1)]
        ys = [
            top_wedge_coefficient([p.slots[i] + t[i].scale(x) for i in range(m)])
            for x in xs
        ]
        assert poly_interpolate(xs, ys) == coeffs


def test_polar_validation():
    p = PointTuple.of([basis(4, (1, 2)), basis(4, (3, 4))])
    with pytest.raises(ValueError):
        polar(3, p, [basis(4, (1, 2))])
    with pytest.raises(ValueError):
        polar(1, p, [basis(4, (1,)), basis(4, (2,))])


# -- multiplicity ----------------------------------------------------------------


def test_multiplicity_generic_point_off_divisor():
    rng = random.Random(11)
    p = random_tuple(2, 3, F, rng)
    if eval_form(p):
        assert multiplicity_at(p) == 0


def test_multiplicity_mixed_example():
    p = PointTuple.of([basis(6, (1, 2)), basis(6, (1, 2)), basis(6, (3, 4))])
    assert multiplicity_at(p) == 1


def test_multiplicity_diagonal_decomposable():
    p = PointTuple.diagonal(basis(6, (1, 2)), 3)
    assert multiplicity_at(p) == 2


def test_multiplicity_bound_random():
    rng = random.Random(13)
    for r, m in [(2, 3), (3, 3)]:
        for _ in range(25):
            p = random_tuple(r, m, F, rng)
            assert 0 <= multiplicity_at(p) <= m - 1


def test_diagonal_multiplicity_consistency():
    rng = random.Random(17)
    for r, m in [(2, 3), (3, 3), (2, 2)]:
        w = random_exterior(r * m, r, F, rng)
        assert diagonal_multiplicity(w) == multiplicity_at(PointTuple.diagonal(w, m))


def test_diagonal_multiplicity_odd_degree_at_least_m_minus_one():
    rng = random.Random(19)
    w = random_exterior(9, 3, F, rng)
    assert diagonal_multiplicity(w) >= 2  # odd degree squares to zero


def test_diagonal_multiplicity_example_strictly_less():
    w = basis(6, (1, 2), QQ) + basis(6, (3, 4), QQ)
    assert diagonal_multiplicity(w) < 2


def test_diagonal_multiplicity_zero_vector():
    with pytest.raises(ValueError):
        diagonal_multiplicity(ExteriorVector.zero(6, 2, QQ))


# -- tangent systems --------------------------------------------------------------


def test_tangent_shapes():
    sys23 = build_tangent_system(PointTuple.diagonal(basis(6, (1, 2)), 3), 2)
    assert (sys23.matrix.rows, sys23.matrix.cols) == (45, 45)
    sys33 = build_tangent_system(PointTuple.diagonal(basis(9, (1, 2, 3)), 3), 2)
    assert (sys33.matrix.rows, sys33.matrix.cols) == (252, 252)
    assert sys33.matrix.rows == math.comb(3, 2) * math.comb(9, 6)


def test_tangent_empty_system_at_order_zero():
    p = PointTuple.diagonal(basis(6, (1, 2)), 3)
    sys0 = build_tangent_system(p, 0)
    assert sys0.matrix.rows == 0
    assert tangent_codim(p, 0) == 0


def test_tangent_precondition():
    rng = random.Random(23)
    p = random_tuple(2, 3, F, rng)
    assert eval_form(p)  # generic: multiplicity 0
    with pytest.raises(ValueError):
        build_tangent_system(p, 1)


def test_tangent_codim_values():
    assert tangent_codim(PointTuple.diagonal(basis(6, (1, 2)), 3), 2) == 18
    assert tangent_codim(PointTuple.diagonal(basis(9, (1, 2, 3)), 3), 2) == 40
    assert tangent_codim(PointTuple.diagonal(basis(4, (1, 2)), 2), 1) == 1


def test_tangent_kernel_contains_slot_scalings():
    # directions t = (c_1 w_1, ..., c_m w_m) always solve the tangent system
    from pluckerlab.scalars import mat_vec

    rng = random.Random(29)
    cases = [
        (PointTuple.diagonal(basis(6, (1, 2)), 3), 2),
        (PointTuple.of([basis(6, (1, 2)), basis(6, (1, 2)), basis(6, (3, 4))]), 1),
    ]
    for p, k in cases:
        M = build_tangent_system(p, k).matrix
        coeffs = [F.sample(rng) for _ in range(p.m)]
        vec = []
        for i in range(p.m):
            vec.extend(p.slots[i].scale(coeffs[i]).coefficient_vector())
        assert all(not x for x in mat_vec(M, vec))
        assert tangent_codim(p, k) <= M.cols - p.m
