"""Distance of a degeneration in the period-map metric.

Along the section Omega_z = e^{zN} a(t) the potential Q~(Omega_z, conj Omega_z)
equals p(y) + h with

    p(y) = sum_k (2iy)^k / k! * Q~(N^k a0, conj a0),

a polynomial of degree d = min{k : N^{k+1} a0 = 0}.  The metric is
-d^2/dy^2 log p (the strip coordinate normalised so that the Laplacian is
d_x^2 + d_y^2) and has leading term d / y^2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .asymptotics import AsymptoticScalar, _padd, _pmul
from .errors import GramDegenerate, ShapeError, ZeroVector
from .exactlinalg import ONE, QI, ZERO, ExactMatrix, ExactScalar, as_qi
from .nilpotent import NilpotentOp, distance_index


class DistanceClass(enum.Enum):
    INFINITE = "infinite"
    FINITE = "finite"
    FINITE_CONDITIONAL = "finite-conditional"


@dataclass(frozen=True)
class PeriodGerm:
    """a0, N and the Gram of Q~ = i^n Q on the limit space.

    ``conjugation`` defaults to the entrywise one (a real coordinate basis).
    """

    a0: ExactMatrix
    n_op: NilpotentOp
    gram: ExactMatrix
    conjugation: ExactMatrix | None = None

    def __post_init__(self):
        n = self.n_op.dim
        if self.a0.shape != (n, 1) or self.gram.shape != (n, n):
            raise ShapeError("germ data of inconsistent size")
        if self.a0.is_zero():
            raise ZeroVector("a0 = 0")

    def conj(self, v: ExactMatrix) -> ExactMatrix:
        c = self.conjugation
        return v.conj() if c is None else c @ v.conj()

    def qt(self, u: ExactMatrix, v: ExactMatrix) -> ExactScalar:
        return (u.T @ self.gram @ v)[0, 0]


@dataclass(frozen=True)
class PotentialAsymptote:
    coefficients: tuple  # ExactScalar, coefficient of y^k
    tail: bool
    degree: int
    paper_leading: ExactScalar  # Q~(a0, N^d conj a0)
    factor: ExactScalar  # leading = factor * paper_leading

    @property
    def leading(self) -> ExactScalar:
        return self.coefficients[self.degree]

    def as_scalar(self) -> AsymptoticScalar:
        tw = {c.twist for c in self.coefficients if c}
        poly = {(0, k): c.coeff for k, c in enumerate(self.coefficients) if c}
        return AsymptoticScalar(poly, self.tail, tw.pop() if tw else 0)


def potential_asymptote(g: PeriodGerm) -> PotentialAsymptote:
    nm = g.n_op.matrix
    d = distance_index(g.a0, nm)
    abar = g.conj(g.a0)
    coeffs = []
    v = g.a0
    for k in range(d + 1):
        val = g.qt(v, abar)
        s = ONE
        for _ in range(k):
            s = s * QI(0, 2)
        s = s * QI(Fraction(1, factorial(k)))
        coeffs.append(ExactScalar(s, 0) * val)
        v = nm @ v
    nd_abar = abar
    for _ in range(d):
        nd_abar = nm @ nd_abar
    paper = g.qt(g.a0, nd_abar)
    factor = ExactScalar(QI((-1) ** d * Fraction(1, factorial(d))) * _ipow2(d))
    if coeffs[d].is_zero() or paper.is_zero():
        raise GramDegenerate("Q~(a0, N^d conj a0) vanishes")
    return PotentialAsymptote(tuple(coeffs), True, d, paper, factor)


def _ipow2(d: int) -> QI:
    out = ONE
    for _ in range(d):
        out = out * QI(0, 2)
    return out


def metric_asymptote(g: PeriodGerm) -> AsymptoticScalar:
    """-(log p)'' up to tail: the leading Laurent term of (p'^2 - p p'')/p^2."""
    pa = potential_asymptote(g)
    if pa.degree == 0:
        return AsymptoticScalar.tail_only()
    p = {(0, k): c.coeff for k, c in enumerate(pa.coefficients) if c}
    dp = {(0, k - 1): c * QI(k) for (_, k), c in p.items() if k}
    ddp = {(0, k - 1): c * QI(k) for (_, k), c in dp.items() if k}
    num = _padd(_pmul(dp, dp), _pmul(p, ddp), -ONE)
    den = _pmul(p, p)
    tn = max(k for _, k in num)
    td = max(k for _, k in den)
    lead = num[(0, tn)] / den[(0, td)]
    return AsymptoticScalar({(0, tn - td): lead}, True)


def classify_distance(g: PeriodGerm, polarization_ok: bool | None) -> DistanceClass:
    d = distance_index(g.a0, g.n_op.matrix)
    if d > 0:
        return DistanceClass.INFINITE
    if polarization_ok is True:
        return DistanceClass.FINITE
    return DistanceClass.FINITE_CONDITIONAL


def length_witness(g: PeriodGerm, classification: DistanceClass | None = None) -> dict:
    d = distance_index(g.a0, g.n_op.matrix)
    cls = classification or classify_distance(g, None)
    if d > 0:
        return {"kind": "divergent-lower-bound", "integral": "∫ √(d−ε)/y dy", "d": d, "conditional": False}
    return {
        "kind": "convergent-upper-bound",
        "integral": "∫ ε e^{−δy/2} dy",
        "d": 0,
        "conditional": cls is not DistanceClass.FINITE,
    }


def jordan_germ(d: int) -> PeriodGerm:
    """One Jordan block of size d+1 on a weight-d limit, a0 = top vector.

    Q(e_i, e_j) = (-1)^{d+i} when i + j = d makes N an infinitesimal isometry
    of a (-1)^d-symmetric form; Q~ = i^d Q.
    """
    n = d + 1
    cols = [dict() for _ in range(n)]
    for i in range(1, n):
        cols[i][i - 1] = ONE
    nm = ExactMatrix(n, n, cols)
    q = ExactMatrix.from_rows(
        [[(-1) ** (d + i) if i + j == d else 0 for j in range(n)] for i in range(n)]
    )
    ipow = ONE
    for _ in range(d):
        ipow = ipow * QI(0, 1)
    a0 = ExactMatrix.column_vector([1 if i == d else 0 for i in range(n)])
    return PeriodGerm(a0, NilpotentOp(nm, d), q.scale(ipow))
