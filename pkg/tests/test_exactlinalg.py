from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from limhodge.errors import ContainmentError, ShapeError, TwistError
from limhodge.exactlinalg import (
    ONE,
    QI,
    ZERO,
    ExactMatrix,
    ExactScalar,
    as_qi,
    block_diag,
    contains,
    decreasing,
    hstack,
    increasing,
    intersect,
    kernel,
    leading_minors,
    positive_definite,
    quotient_map,
    same_subspace,
    solve,
    span,
    subspace_sum,
    vstack,
)
from strategies import gaussians, matrices, real_qi, square


def test_qi_arithmetic():
    a = QI(Fraction(1, 2), -3)
    b = QI(2, 1)
    assert a * b == QI(4, Fraction(-11, 2))
    assert (a / b) * b == a
    assert a.conj() == QI(Fraction(1, 2), 3)
    assert not ZERO and ONE


@given(gaussians, gaussians, gaussians)
def test_qi_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b).conj() == a.conj() * b.conj()
    if a:
        assert a * a.inv() == ONE


@pytest.mark.parametrize("text", ["3", "-1/2", "2*i", "1/2-3*i", "(1+i)*twist^2", "1/3+0*i*twist^-1"])
def test_scalar_string_roundtrip(text):
    s = ExactScalar.parse(text)
    assert ExactScalar.parse(str(s)) == s


def test_scalar_twist_rules():
    a = ExactScalar(QI(1), 1)
    with pytest.raises(TwistError):
        a + ExactScalar(QI(1), 0)
    assert (a * a).twist == 2
    assert ExactScalar(0, 5).twist == 0
    with pytest.raises(TwistError):
        as_qi(a)


def test_matrix_basics():
    m = ExactMatrix.from_rows([[1, 2], [3, 4]])
    assert m.det() == ExactScalar(-2)
    assert m @ m.inverse() == ExactMatrix.identity(2)
    assert m.T.entry(0, 1) == QI(3)
    assert m.rank() == 2
    assert ExactMatrix.from_rows([[1, 2], [2, 4]]).rank() == 1
    with pytest.raises(ShapeError):
        ExactMatrix.zeros(2, 3).det()


def test_matrix_twist_mismatch():
    a = ExactMatrix.from_rows([[1]], twist=1)
    with pytest.raises(TwistError):
        a + ExactMatrix.identity(1)
    assert (a @ a).twist == 2


def test_stacking():
    a = ExactMatrix.identity(2)
    b = ExactMatrix.from_rows([[1], [1]])
    assert hstack(a, b).shape == (2, 3)
    assert vstack(a, b.T).shape == (3, 2)
    assert block_diag(a, b).shape == (4, 3)


@given(square(max_dim=4))
def test_inverse_and_det(m):
    assume(not m.det().is_zero())
    assert m @ m.inverse() == ExactMatrix.identity(m.nrows)
    assert (m.inverse().det() * m.det()) == ExactScalar(1)


@given(square(max_dim=3), st.data())
def test_det_multiplicative(a, data):
    b = data.draw(matrices(rows=a.nrows, cols=a.nrows))
    assert (a @ b).det() == a.det() * b.det()


@given(matrices(max_dim=5))
def test_rank_nullity(m):
    k = kernel(m)
    assert (m @ k).is_zero() if k.ncols else True
    assert k.ncols + m.rank() == m.ncols


@given(st.data())
@settings(max_examples=50)
def test_dimension_formula(data):
    n = data.draw(st.integers(1, 5))
    u = span(data.draw(matrices(rows=n, entries=real_qi)))
    v = span(data.draw(matrices(rows=n, entries=real_qi)))
    s = subspace_sum(u, v)
    i = intersect(u, v)
    assert s.ncols + i.ncols == u.ncols + v.ncols
    assert contains(s, u) and contains(s, v)
    assert contains(u, i) and contains(v, i)


def test_solve_and_containment():
    a = ExactMatrix.from_rows([[1, 0], [0, 1], [0, 0]])
    x = solve(a, ExactMatrix.column_vector([2, 3, 0]))
    assert x == ExactMatrix.column_vector([2, 3])
    with pytest.raises(ContainmentError):
        solve(a, ExactMatrix.column_vector([0, 0, 1]))


def test_quotient_map():
    v = ExactMatrix.identity(3)
    u = ExactMatrix.column_vector([1, 1, 0])
    q = quotient_map(v, u)
    assert q.dim == 2
    assert q.project(u).is_zero()
    assert q.project(q.section) == ExactMatrix.identity(2)


def test_same_subspace_ignores_basis():
    u = ExactMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
    w = ExactMatrix.from_rows([[1, 1], [1, -1], [2, 0]])
    assert same_subspace(u, w)


def test_filtrations():
    e = ExactMatrix.identity(3)
    w = increasing(3, {0: e.select_columns([0]), 2: e})
    assert w.at(1).ncols == 1 and w.at(-1).ncols == 0 and w.at(5).ncols == 3
    assert w.jumps() == [0, 2]
    f = decreasing(3, {1: e.select_columns([0, 1]), 2: e.select_columns([0])})
    assert f.at(0).ncols == 3 and f.at(3).ncols == 0
    assert not f.validate()


def test_positivity():
    assert positive_definite(ExactMatrix.from_rows([[2, QI(0, 1)], [QI(0, -1), 2]]))
    assert not positive_definite(ExactMatrix.from_rows([[1, 2], [2, 1]]))
    assert [m.coeff for m in leading_minors(ExactMatrix.from_rows([[2, 1], [1, 2]]))] == [QI(2), QI(3)]
