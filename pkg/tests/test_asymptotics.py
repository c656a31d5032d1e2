import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limhodge.asymptotics import (
    AsymptoticHermitian,
    AsymptoticScalar,
    Sign,
    assemble,
    eventual_inertia,
    eventual_sign,
    eventually_positive_definite,
    leading_minors,
    schur_reduce,
    schur_verdict,
)
from limhodge.errors import GrowthError, NotDecidable, SingularLeadingBlock, TwistError
from limhodge.exactlinalg import QI, ExactScalar
from strategies import paper_shaped

y = AsymptoticScalar.y()
h = AsymptoticScalar.tail_only()


def test_z_times_zbar():
    z, zb = AsymptoticScalar.z(), AsymptoticScalar.zbar()
    assert (z - zb).poly == {(0, 1): QI(0, 2)}
    assert (z * zb).poly == {(2, 0): QI(1), (0, 2): QI(1)}
    assert z.conj().poly == zb.poly


def test_tail_absorbs_polynomials():
    assert (y * h).poly == {} and (y * h).tail
    assert (y + h).tail and (y + h).poly == y.poly


def test_eventual_signs():
    assert eventual_sign(y.scale(QI(2)) - AsymptoticScalar.const(100)) is Sign.POSITIVE
    assert eventual_sign(-y + h) is Sign.NEGATIVE
    assert eventual_sign(h) is Sign.INDETERMINATE
    assert eventual_sign(AsymptoticScalar.zero()) is Sign.ZERO
    assert eventual_sign(AsymptoticScalar.x() + y) is Sign.INDETERMINATE


def test_leading_needs_x_free():
    with pytest.raises(NotDecidable):
        (AsymptoticScalar.x() * y).leading()


def test_evaluate():
    s = AsymptoticScalar.z() * AsymptoticScalar.zbar()
    assert s.evaluate(1, 2) == ExactScalar(5)


def test_minors_of_block_matrix():
    m = AsymptoticHermitian([[y.scale(QI(2)) + h, 1], [1, 1]])
    minors = leading_minors(m)
    assert minors[0].poly == {(0, 1): QI(2)}
    assert minors[1].poly == {(0, 1): QI(2), (0, 0): QI(-1)}
    assert eventually_positive_definite(m)


def test_inertia_counts_negatives():
    m = AsymptoticHermitian([[-1, 0], [0, y]])
    assert eventual_inertia(m, 1)
    assert not eventually_positive_definite(m)


def test_not_hermitian_rejected():
    with pytest.raises(ValueError):
        AsymptoticHermitian([[1, QI(0, 1)], [QI(0, 1), 1]])


def test_mixed_twists_rejected():
    a = AsymptoticScalar({(0, 0): QI(1)}, twist=1)
    with pytest.raises(TwistError):
        leading_minors(AsymptoticHermitian([[a, 0], [0, AsymptoticScalar.const(1)]]))


def test_pure_tail_pivot_is_undecided():
    with pytest.raises(NotDecidable):
        eventually_positive_definite(AsymptoticHermitian([[h]]))


def test_schur_rejects_growth():
    with pytest.raises(GrowthError):
        schur_reduce([[1]], [[y]], [[y]], [[y]])
    with pytest.raises(SingularLeadingBlock):
        schur_reduce([[1]], [[0]], [[0]], [[AsymptoticScalar.const(1)]])


def test_schur_identity_blocks():
    assert schur_verdict([[1]], [[0]], [[0]], [[y.scale(QI(2))]])
    assert not schur_verdict([[-1]], [[0]], [[0]], [[y.scale(QI(2))]])


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_schur_agrees_with_minors(seed):
    a, b, c, d = paper_shaped(random.Random(seed))
    try:
        via_schur = schur_verdict(a, b, c, d)
        direct = eventually_positive_definite(assemble(a, b, c, d))
    except (NotDecidable, SingularLeadingBlock):
        return
    assert via_schur == direct
