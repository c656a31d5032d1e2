"""Nilpotent operators: logarithm of unipotent monodromy, the monodromy weight
filtration, the hard-Lefschetz-type isomorphism check, and the index d."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotUnipotent, ShapeError, ZeroVector
from .exactlinalg import (
    ExactMatrix,
    Filtration,
    QI,
    contains,
    full_space,
    image,
    increasing,
    intersect,
    kernel,
    quotient_map,
    subspace_sum,
    zero_space,
)


@dataclass(frozen=True)
class NilpotentOp:
    matrix: ExactMatrix
    center: int

    def __post_init__(self):
        m = self.matrix
        if m.nrows != m.ncols:
            raise ShapeError("nilpotent operator must be square")
        if not (m ** m.nrows).is_zero():
            raise ValueError("operator is not nilpotent")

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def order(self) -> int:
        """Smallest s with N^s = 0."""
        p = ExactMatrix.identity(self.dim)
        for s in range(self.dim + 1):
            if p.is_zero():
                return s
            p = p @ self.matrix
        return self.dim

    def jordan_sizes(self) -> tuple[int, ...]:
        n = self.dim
        ranks = [n]
        p = ExactMatrix.identity(n)
        for _ in range(n + 1):
            p = p @ self.matrix
            ranks.append(p.rank())
        sizes = []
        for s in range(1, n + 1):
            at_least = ranks[s - 1] - ranks[s]
            at_least_next = ranks[s] - ranks[s + 1] if s + 1 <= n + 1 else 0
            sizes += [s] * (at_least - at_least_next)
        return tuple(sorted(sizes, reverse=True))


@dataclass(frozen=True)
class WeightFiltrationResult:
    filtration: Filtration
    jordan: tuple[int, ...]


def exp_nilpotent(n: ExactMatrix) -> ExactMatrix:
    out = ExactMatrix.identity(n.nrows)
    term = ExactMatrix.identity(n.nrows)
    for k in range(1, n.nrows + 1):
        term = (term @ n).scale(QI(Fraction(1, k)))
        if term.is_zero():
            break
        out = out + term
    return out


def log_of_unipotent(t: ExactMatrix, center: int = 0) -> NilpotentOp:
    """N = log T = sum_{k>=1} (-1)^{k+1} (T-I)^k / k, a finite sum."""
    n = t.nrows
    if t.ncols != n:
        raise ShapeError("monodromy must be square")
    x = t - ExactMatrix.identity(n)
    if not (x ** n).is_zero():
        raise NotUnipotent("T - I is not nilpotent")
    out = ExactMatrix.zeros(n, n)
    p = ExactMatrix.identity(n)
    for k in range(1, n + 1):
        p = p @ x
        if p.is_zero():
            break
        sign = 1 if k % 2 else -1
        out = out + p.scale(QI(Fraction(sign, k)))
    return NilpotentOp(out, center)


def weight_filtration(op: NilpotentOp) -> WeightFiltrationResult:
    """W_{c+k} = sum_{j >= max(0,-k)} ker N^{k+j+1} n im N^j."""
    n = op.dim
    nu = op.order() - 1
    powers = [ExactMatrix.identity(n)]
    for _ in range(2 * nu + 2):
        powers.append(powers[-1] @ op.matrix)
    kers = [kernel(p) for p in powers]
    ims = [image(p) for p in powers]

    def ker(e):
        return kers[e] if e < len(kers) else full_space(n)

    steps = {}
    for k in range(-nu - 1, nu + 1):
        acc = zero_space(n)
        for j in range(max(0, -k), nu + 1):
            e = k + j + 1
            if e <= 0:
                continue
            acc = subspace_sum(acc, intersect(ker(e), ims[j]))
        steps[op.center + k] = acc
    steps[op.center + nu] = full_space(n)
    return WeightFiltrationResult(increasing(n, steps), op.jordan_sizes())


def _graded_map(f: ExactMatrix, w: Filtration, src: int, dst: int):
    """Matrix of f: Gr_src -> Gr_dst, or None if f(W_src) is not inside W_dst."""
    qs = quotient_map(w.at(src), w.at(src - 1))
    qd = quotient_map(w.at(dst), w.at(dst - 1))
    img = f @ qs.section
    if not contains(w.at(dst), img):
        return None
    if not contains(w.at(dst - 1), f @ w.at(src - 1)):
        return None
    return qd.project(img, check=False)


def check_hypothesis_iso(op: NilpotentOp, w: Filtration, center: int | None = None) -> bool:
    """Every N^k: Gr_{c+k} -> Gr_{c-k} is bijective."""
    if w.ambient != op.dim:
        raise ShapeError("filtration and operator live on different spaces")
    c = op.center if center is None else center
    lo, hi = w.span_range()
    reach = max(abs(lo - c), abs(hi - c)) + 1
    nk = ExactMatrix.identity(op.dim)
    for k in range(0, reach + 1):
        if k:
            nk = nk @ op.matrix
        m = _graded_map(nk, w, c + k, c - k)
        if m is None or m.nrows != m.ncols or m.rank() != m.nrows:
            return False
    return True


def distance_index(a0: ExactMatrix, op: NilpotentOp | ExactMatrix) -> int:
    """d = min{k : N^{k+1} a0 = 0}."""
    nm = op.matrix if isinstance(op, NilpotentOp) else op
    if a0.is_zero():
        raise ZeroVector("a0 = 0")
    v = a0
    d = 0
    while True:
        v = nm @ v
        if v.is_zero():
            return d
        d += 1
        if d > nm.nrows:
            raise ValueError("operator is not nilpotent")


def jordan_oracle(sizes, center: int, basis: ExactMatrix | None = None):
    """(N, W) for a Jordan matrix with the given block sizes.

    Chain vectors N^i v of a block of size s sit in weight center+s-1-2i.
    With ``basis`` (invertible P) everything is conjugated: N' = P J P^-1.
    Test oracle only.
    """
    n = sum(sizes)
    cols = [dict() for _ in range(n)]
    weights = []
    off = 0
    for s in sizes:
        # block basis e_off .. e_off+s-1 with N e_{off+i} = e_{off+i-1}
        for i in range(s):
            if i:
                cols[off + i][off + i - 1] = QI(1)
            weights.append(center - (s - 1) + 2 * i)
        off += s
    j = ExactMatrix(n, n, cols)
    steps = {}
    for k in range(min(weights) - 1, max(weights) + 1):
        idx = [i for i, wt in enumerate(weights) if wt <= k]
        steps[k] = ExactMatrix(n, len(idx), [{i: QI(1)} for i in idx]) if idx else zero_space(n)
    if basis is not None:
        inv = basis.inverse()
        j = basis @ j @ inv
        steps = {k: basis @ v if v.ncols else v for k, v in steps.items()}
    return j, increasing(n, steps)
