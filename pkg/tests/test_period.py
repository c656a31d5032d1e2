import pytest

from limhodge.asymptotics import AsymptoticScalar
from limhodge.errors import GramDegenerate, ZeroVector
from limhodge.exactlinalg import QI, ExactMatrix, ExactScalar
from limhodge.nilpotent import NilpotentOp
from limhodge.period import (
    DistanceClass,
    PeriodGerm,
    classify_distance,
    jordan_germ,
    length_witness,
    metric_asymptote,
    potential_asymptote,
)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_jordan_germs(d):
    g = jordan_germ(d)
    pa = potential_asymptote(g)
    assert pa.degree == d
    assert pa.leading == pa.factor * pa.paper_leading
    assert eventual_positive(pa.as_scalar())
    metric = metric_asymptote(g)
    assert metric.poly == {(0, -2): QI(d)} and metric.tail
    assert classify_distance(g, True) is DistanceClass.INFINITE
    assert length_witness(g)["kind"] == "divergent-lower-bound"


def eventual_positive(s: AsymptoticScalar) -> bool:
    return s.leading().coeff.re > 0


def test_potential_coefficients_d1():
    # p(y) = Q~(a0, conj a0) + 2iy Q~(N a0, conj a0)
    pa = potential_asymptote(jordan_germ(1))
    assert pa.coefficients[0].is_zero()
    assert pa.coefficients[1] == ExactScalar(QI(2))


def _finite_germ():
    n = NilpotentOp(ExactMatrix.zeros(2, 2), 3)
    gram = ExactMatrix.from_rows([[0, QI(0, 1)], [QI(0, -1), 0]])
    a0 = ExactMatrix.column_vector([1, QI(0, 1)])
    return PeriodGerm(a0, n, gram)


def test_finite_distance_classes():
    g = _finite_germ()
    assert potential_asymptote(g).degree == 0
    assert classify_distance(g, True) is DistanceClass.FINITE
    assert classify_distance(g, None) is DistanceClass.FINITE_CONDITIONAL
    assert length_witness(g, DistanceClass.FINITE)["conditional"] is False
    assert metric_asymptote(g).poly == {}


def test_degenerate_germs():
    with pytest.raises(ZeroVector):
        PeriodGerm(ExactMatrix.zeros(2, 1), NilpotentOp(ExactMatrix.zeros(2, 2), 0), ExactMatrix.identity(2))
    g = PeriodGerm(
        ExactMatrix.column_vector([1, 0]), NilpotentOp(ExactMatrix.zeros(2, 2), 0), ExactMatrix.zeros(2, 2)
    )
    with pytest.raises(GramDegenerate):
        potential_asymptote(g)
