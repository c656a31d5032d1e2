import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limhodge.exactlinalg import QI, ExactMatrix, decreasing, increasing, same_subspace
from limhodge.mhs import (
    MixedHodge,
    congruence_holds,
    deligne_splitting,
    is_morphism_of_type,
    mhs_from_splitting,
    random_mhs,
    splitting_reconstructs,
    validate_mhs,
)


def _hodge_tate_pair():
    # I^{1,1} = <e0>, I^{0,0} = <e1>, N e0 = e1 is a morphism of type (-1,-1)
    e = ExactMatrix.identity(2)
    pieces = {(1, 1): e.select_columns([0]), (0, 0): e.select_columns([1])}
    return mhs_from_splitting(pieces, e), pieces


def test_hodge_tate_example():
    m, pieces = _hodge_tate_pair()
    assert validate_mhs(m) == []
    s = deligne_splitting(m)
    assert s.dims() == {(1, 1): 1, (0, 0): 1}
    n = ExactMatrix.from_rows([[0, 0], [1, 0]])
    assert is_morphism_of_type(n, m, m, -1)
    assert not is_morphism_of_type(n, m, m, 0)


def test_complex_line_over_real_weight_is_valid_extension():
    # F^1 = <e0 + i e1> over W_0 = <e1>: a nontrivial extension, still an MHS
    e = ExactMatrix.identity(2)
    pieces = {(1, 1): ExactMatrix.column_vector([1, QI(0, 1)]), (0, 0): e.select_columns([1])}
    assert validate_mhs(mhs_from_splitting(pieces, e)) == []


def test_real_hodge_line_is_not_opposed():
    e = ExactMatrix.identity(2)
    m = MixedHodge(e, increasing(2, {1: e}), decreasing(2, {1: e.select_columns([0])}))
    assert validate_mhs(m)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_random_splitting_recovered(seed):
    m, s = random_mhs(random.Random(seed))
    assert validate_mhs(m) == []
    t = deligne_splitting(m)
    assert t.dims() == s.dims()
    for pq in s.dims():
        assert same_subspace(t.piece(*pq), s.piece(*pq))
    assert splitting_reconstructs(m, t)
    assert congruence_holds(m, t)


def test_json_roundtrip():
    m, _ = random_mhs(random.Random(3))
    back = MixedHodge.from_json(m.to_json())
    assert back.to_json() == m.to_json()
