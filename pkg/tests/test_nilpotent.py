import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limhodge.errors import NotUnipotent, ZeroVector
from limhodge.exactlinalg import ExactMatrix, same_subspace
from limhodge.nilpotent import (
    NilpotentOp,
    check_hypothesis_iso,
    distance_index,
    exp_nilpotent,
    jordan_oracle,
    log_of_unipotent,
    weight_filtration,
)


def partitions(n, largest=None):
    largest = largest or n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def test_partition_count():
    assert [len(list(partitions(n))) for n in range(1, 7)] == [1, 2, 3, 5, 7, 11]


def test_single_block_weights():
    j, w = jordan_oracle((3,), 3)
    res = weight_filtration(NilpotentOp(j, 3))
    assert res.jordan == (3,)
    assert res.filtration.jumps() == [1, 3, 5]
    assert check_hypothesis_iso(NilpotentOp(j, 3), res.filtration)


def test_wrong_center_fails_iso():
    j, w = jordan_oracle((2,), 3)
    assert not check_hypothesis_iso(NilpotentOp(j, 3), w, center=4)


@given(st.sampled_from([p for n in range(1, 6) for p in partitions(n)]), st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_weight_filtration_matches_oracle_after_conjugation(sizes, seed):
    r = random.Random(seed)
    n = sum(sizes)
    while True:
        p = ExactMatrix.from_rows([[r.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if not p.det().is_zero():
            break
    j, w = jordan_oracle(sizes, 3, basis=p)
    res = weight_filtration(NilpotentOp(j, 3))
    for k in range(-1, 8):
        assert same_subspace(res.filtration.at(k), w.at(k))


def test_exp_log_inverse():
    j, _ = jordan_oracle((3, 1), 0)
    t = exp_nilpotent(j)
    assert log_of_unipotent(t).matrix == j
    with pytest.raises(NotUnipotent):
        log_of_unipotent(ExactMatrix.from_rows([[2]]))


def test_distance_index():
    j, _ = jordan_oracle((3,), 0)
    assert distance_index(ExactMatrix.column_vector([0, 0, 1]), j) == 2
    assert distance_index(ExactMatrix.column_vector([1, 0, 0]), j) == 0
    with pytest.raises(ZeroVector):
        distance_index(ExactMatrix.column_vector([0, 0, 0]), j)


def test_jordan_sizes_and_order():
    j, _ = jordan_oracle((3, 2, 2), 0)
    op = NilpotentOp(j, 0)
    assert op.jordan_sizes() == (3, 2, 2)
    assert op.order() == 3
    with pytest.raises(ValueError):
        NilpotentOp(ExactMatrix.identity(2), 0)
