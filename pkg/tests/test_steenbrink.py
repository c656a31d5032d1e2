import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limhodge import instances
from limhodge.errors import NotACocycle
from limhodge.exactlinalg import QI, ExactMatrix
from limhodge.steenbrink import (
    betti,
    d1,
    d1_squared_zero,
    e1_page,
    e1_term,
    graded_dims,
    graded_monodromy,
    graded_piece,
    gr3_hermitian,
    gr3_polarization_verdict,
    gr4_polarization_verdict,
    limit_model,
    n_iso,
    pairing_gr24_untwisted,
    pairing_gr33,
    pairing_gr33_untwisted,
    phi,
    psi,
    stratum_gram,
    validate_instance,
)


def test_toy_graded_dims(toy):
    assert validate_instance(toy) == []
    assert graded_dims(toy, 3) == {2: 1, 3: 2, 4: 1}
    assert betti(toy, 3) == 4


def test_toy_e1_terms(toy):
    t = e1_term(toy, 3, 1)
    assert [s.k for s in t.summands] == [2]
    assert t.dim == 2
    assert [row["dim"] for row in e1_page(toy, 3).table() if row["dim"]] == [2, 2, 2]


@pytest.mark.parametrize("m", range(7))
def test_d1_squares_to_zero(toy, m):
    assert d1_squared_zero(toy, m)


def test_phi_is_minus_adjoint_of_psi(toy):
    # G_1 phi + (G_2 psi)^T = 0: the Gysin map is minus the adjoint of restriction
    p, f = psi(toy, 1, 2), phi(toy, 1, 2)
    assert (stratum_gram(toy, 1, 2) @ f + (stratum_gram(toy, 2, 2) @ p).T).is_zero()


def test_cocycle_check(toy):
    g = graded_piece(toy, 3, 3)
    bad = ExactMatrix.column_vector([1] + [0] * (g.term.dim - 1))
    if not (d1(toy, 3, 0) @ bad).is_zero():
        with pytest.raises(NotACocycle):
            g.project(bad)


def test_monodromy_sign_conventions(conifold):
    minus = graded_monodromy(conifold, 3)[4]
    plus = graded_monodromy(conifold, 3, sign=+1)[4]
    assert plus == -minus
    assert n_iso(conifold, 3) == {1: True}


def test_conifold_graded_pieces(conifold):
    assert validate_instance(conifold) == []
    assert graded_dims(conifold, 3) == {2: 1, 3: 4, 4: 1}
    assert gr3_polarization_verdict(conifold)
    assert gr4_polarization_verdict(conifold)


def test_pairing_twist_relation(conifold):
    g = graded_piece(conifold, 3, 3)
    u = g.reps.select_columns([0])
    v = g.reps.select_columns([g.dim - 1])
    untw = pairing_gr33_untwisted(conifold, u, v)
    tw = pairing_gr33(conifold, u, v)
    assert tw.twist == 3 and tw.coeff == untw.coeff * QI(0, -1)


def test_gr3_form_is_hermitian(conifold):
    m, _ = gr3_hermitian(conifold)
    assert m.is_hermitian()


def test_broken_gram_is_reported(toy):
    p = toy.pieces[0]
    blk = p.cohomology[3]
    bad = dataclasses.replace(blk, gram=blk.gram.scale(QI(0, 1)))
    cohom = dict(p.cohomology)
    cohom[3] = bad
    inst = dataclasses.replace(toy, pieces=(dataclasses.replace(p, cohomology=cohom),) + toy.pieces[1:])
    assert validate_instance(inst)


def test_limit_model_isometry(conifold):
    lm = limit_model(conifold)
    n, g = lm.n_op, lm.gram
    assert (g @ n + n.T @ g).is_zero()
    assert g.T == -g


@given(st.integers(0, 10**6))
@settings(max_examples=15, deadline=None)
def test_pairings_vanish_on_boundaries(seed):
    inst = instances.random_snc_instance(random.Random(seed))
    assert validate_instance(inst) == []
    for w, dual, fn in ((3, 3, pairing_gr33_untwisted), (2, 4, pairing_gr24_untwisted)):
        g = graded_piece(inst, 3, w)
        other = graded_piece(inst, 3, dual)
        for j in range(g.boundaries.ncols):
            b = g.boundaries.select_columns([j])
            for k in range(other.dim):
                rep = other.reps.select_columns([k])
                val = fn(inst, b, rep, check=False) if w == 3 else fn(inst, rep, b, check=False)
                assert val.is_zero()
