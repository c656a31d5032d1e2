"""Polynomials in (x, y) plus an exponentially small tail, and eventual-sign
decisions as y = Im z grows with x = Re z bounded.

The tail flag stands for "+ some function all of whose derivatives decay
exponentially".  Such functions absorb polynomial factors, so a product with
a pure tail has zero polynomial part.  Exponents of y may be negative
(the metric asymptote is d/y^2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import GrowthError, NotDecidable, SingularLeadingBlock, TwistError
from .exactlinalg import ONE, QI, ZERO, ExactMatrix, ExactScalar, as_qi, as_scalar, positive_definite

Mono = tuple  # (ex, ey)


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"
    INDETERMINATE = "indeterminate"


def _padd(a: dict, b: dict, s: QI = ONE) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m)
        v = s * c if v is None else v + s * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (ax, ay), ca in a.items():
        for (bx, by), cb in b.items():
            m = (ax + bx, ay + by)
            v = out.get(m)
            v = ca * cb if v is None else v + ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _lead(p: dict) -> Mono:
    # lex: y exponent first, then x
    return max(p, key=lambda m: (m[1], m[0]))


def _pdivexact(a: dict, b: dict) -> dict:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lb = _lead(b)
    cb_inv = b[lb].inv()
    q: dict = {}
    r = dict(a)
    guard = 0
    while r:
        lr = _lead(r)
        m = (lr[0] - lb[0], lr[1] - lb[1])
        if m[0] < 0:
            raise ArithmeticError("inexact polynomial division")
        c = r[lr] * cb_inv
        q[m] = q.get(m, ZERO) + c
        r = _padd(r, _pmul({m: c}, b), -ONE)
        guard += 1
        if guard > 10000:
            raise ArithmeticError("inexact polynomial division")
    return {k: v for k, v in q.items() if v}


class AsymptoticScalar:
    __slots__ = ("poly", "tail", "twist")

    def __init__(self, poly: dict | None = None, tail: bool = False, twist: int = 0):
        p = {}
        for m, c in (poly or {}).items():
            c = as_qi(c) if not isinstance(c, QI) else c
            if c:
                p[(int(m[0]), int(m[1]))] = c
        self.poly = p
        self.tail = bool(tail)
        self.twist = twist if p else 0

    # constructors
    @classmethod
    def const(cls, c, tail: bool = False) -> "AsymptoticScalar":
        s = as_scalar(c)
        return cls({(0, 0): s.coeff}, tail, s.twist)

    @classmethod
    def tail_only(cls) -> "AsymptoticScalar":
        return cls({}, True)

    @classmethod
    def x(cls) -> "AsymptoticScalar":
        return cls({(1, 0): ONE})

    @classmethod
    def y(cls, power: int = 1) -> "AsymptoticScalar":
        return cls({(0, power): ONE})

    @classmethod
    def z(cls) -> "AsymptoticScalar":
        return cls({(1, 0): ONE, (0, 1): QI(0, 1)})

    @classmethod
    def zbar(cls) -> "AsymptoticScalar":
        return cls({(1, 0): ONE, (0, 1): QI(0, -1)})

    @classmethod
    def zero(cls) -> "AsymptoticScalar":
        return cls()

    # arithmetic
    def _tw(self, o: "AsymptoticScalar") -> int:
        if not self.poly:
            return o.twist
        if not o.poly or self.twist == o.twist:
            return self.twist
        raise TwistError("adding asymptotic scalars of different twists")

    def __add__(self, o):
        o = as_asym(o)
        return AsymptoticScalar(_padd(self.poly, o.poly), self.tail or o.tail, self._tw(o))

    __radd__ = __add__

    def __neg__(self):
        return AsymptoticScalar({m: -c for m, c in self.poly.items()}, self.tail, self.twist)

    def __sub__(self, o):
        return self + (-as_asym(o))

    def __rsub__(self, o):
        return as_asym(o) - self

    def __mul__(self, o):
        o = as_asym(o)
        tail = (self.tail and (bool(o.poly) or o.tail)) or (o.tail and (bool(self.poly) or self.tail))
        return AsymptoticScalar(_pmul(self.poly, o.poly), tail, self.twist + o.twist)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = AsymptoticScalar.const(1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "AsymptoticScalar":
        return self * AsymptoticScalar.const(c)

    def divexact(self, o: "AsymptoticScalar") -> "AsymptoticScalar":
        return AsymptoticScalar(_pdivexact(self.poly, o.poly), self.tail or o.tail, self.twist - o.twist)

    def conj(self) -> "AsymptoticScalar":
        return AsymptoticScalar({m: c.conj() for m, c in self.poly.items()}, self.tail, self.twist)

    def __eq__(self, o):
        try:
            o = as_asym(o)
        except TypeError:
            return NotImplemented
        return self.poly == o.poly and self.tail == o.tail and (not self.poly or self.twist == o.twist)

    def __hash__(self):
        return hash((tuple(sorted(self.poly.items(), key=lambda t: t[0])), self.tail))

    def poly_equal(self, o: "AsymptoticScalar") -> bool:
        return self.poly == as_asym(o).poly

    # queries
    def is_zero_poly(self) -> bool:
        return not self.poly

    def depends_on_x(self) -> bool:
        return any(m[0] for m in self.poly)

    def y_degree(self) -> int | None:
        return max(m[1] for m in self.poly) if self.poly else None

    def coefficient(self, ex: int, ey: int) -> ExactScalar:
        return ExactScalar(self.poly.get((ex, ey), ZERO), self.twist)

    def leading(self) -> ExactScalar:
        """Coefficient of the top power of y; requires an x-free polynomial."""
        if self.depends_on_x():
            raise NotDecidable("x survives")
        return self.coefficient(0, self.y_degree())

    def poly_part(self) -> "AsymptoticScalar":
        return AsymptoticScalar(self.poly, False, self.twist)

    def with_tail(self, tail: bool = True) -> "AsymptoticScalar":
        return AsymptoticScalar(self.poly, tail, self.twist)

    def evaluate(self, x, y) -> ExactScalar:
        """Exact substitution of rationals for x and y; the tail is ignored."""
        xq, yq = Fraction(x), Fraction(y)
        acc = ZERO
        for (ex, ey), c in self.poly.items():
            acc = acc + c * QI(xq**ex * yq**ey)
        return ExactScalar(acc, self.twist)

    def __repr__(self):
        return f"AsymptoticScalar({self})"

    def __str__(self):
        if not self.poly:
            return "h" if self.tail else "0"
        terms = []
        for (ex, ey), c in sorted(self.poly.items(), key=lambda t: (-t[0][1], -t[0][0])):
            cs = str(c)
            if c.re and c.im:
                cs = f"({cs})"
            mono = "".join(
                [f"*x^{ex}" if ex > 1 else ("*x" if ex == 1 else ""), f"*y^{ey}" if ey not in (0, 1) else ("*y" if ey == 1 else "")]
            )
            terms.append(cs + mono)
        s = " + ".join(terms)
        if self.twist:
            s = f"({s})*twist^{self.twist}"
        return s + (" + h" if self.tail else "")


def as_asym(v) -> AsymptoticScalar:
    if isinstance(v, AsymptoticScalar):
        return v
    return AsymptoticScalar.const(v)


def eventual_sign(s: AsymptoticScalar) -> Sign:
    if not s.poly:
        return Sign.INDETERMINATE if s.tail else Sign.ZERO
    if s.depends_on_x():
        return Sign.INDETERMINATE
    c = s.leading().coeff
    if c.im:
        return Sign.INDETERMINATE
    return Sign.POSITIVE if c.re > 0 else Sign.NEGATIVE


# ---------------------------------------------------------------- matrices


class AsymptoticHermitian:
    """Square matrix of AsymptoticScalar, hermitian at the polynomial level."""

    def __init__(self, entries: Sequence[Sequence], check: bool = True):
        self.entries = [[as_asym(v) for v in row] for row in entries]
        n = len(self.entries)
        if any(len(r) != n for r in self.entries):
            raise ValueError("matrix is not square")
        if check and not self.is_hermitian():
            raise ValueError("matrix is not hermitian at the polynomial level")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_hermitian(self) -> bool:
        e = self.entries
        return all(e[i][j].poly == e[j][i].conj().poly for i in range(self.n) for j in range(i, self.n))

    def block(self, rows, cols) -> list[list[AsymptoticScalar]]:
        return [[self.entries[i][j] for j in cols] for i in rows]

    def permuted(self, order: Sequence[int]) -> "AsymptoticHermitian":
        return AsymptoticHermitian([[self.entries[i][j] for j in order] for i in order], check=False)

    def evaluate(self, x, y) -> ExactMatrix:
        return ExactMatrix.from_rows([[v.evaluate(x, y) for v in row] for row in self.entries], ncols=self.n)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(v) for v in row) + "]" for row in self.entries)


def _poly_det(m: list[list[dict]]) -> dict:
    """Bareiss with row pivoting over Q(i)[x, y^{+-1}]."""
    n = len(m)
    if n == 0:
        return {(0, 0): ONE}
    a = [list(r) for r in m]
    sign = 1
    prev = {(0, 0): ONE}
    for k in range(n - 1):
        if not a[k][k]:
            sw = next((i for i in range(k + 1, n) if a[i][k]), None)
            if sw is None:
                return {}
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _padd(_pmul(a[i][j], a[k][k]), _pmul(a[i][k], a[k][j]), -ONE)
                a[i][j] = _pdivexact(num, prev) if num else {}
            a[i][k] = {}
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else {mm: -c for mm, c in d.items()}


def _components(mat: list[list[AsymptoticScalar]]) -> list[list[int]]:
    n = len(mat)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if mat[i][j].poly or mat[j][i].poly:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [sorted(g) for g in sorted(groups.values(), key=min)]


def _uniform_twist(mat) -> int:
    ks = {v.twist for row in mat for v in row if v.poly}
    if len(ks) > 1:
        raise TwistError("matrix entries carry different twists")
    return ks.pop() if ks else 0


def leading_minors(m: AsymptoticHermitian) -> list[AsymptoticScalar]:
    """All leading principal minors, computed per connected block.

    The polynomial part of the leading k x k block is block diagonal after
    grouping indices by the graph of nonzero polynomial entries, so each
    minor is a product of prefix minors of those groups.  Tail flags are
    tracked on the whole leading block.
    """
    e = m.entries
    n = m.n
    tw = _uniform_twist(e)
    comps = _components(e)
    prefix: dict[int, list[dict]] = {}
    for ci, comp in enumerate(comps):
        polys = [[e[i][j].poly for j in comp] for i in comp]
        prefix[ci] = _prefix_minors(polys)
    where = {}
    for ci, comp in enumerate(comps):
        for pos, i in enumerate(comp):
            where[i] = (ci, pos)
    out = []
    count = [0] * len(comps)
    tail = False
    for k in range(n):
        ci, pos = where[k]
        count[ci] = pos + 1
        tail = tail or any(e[k][j].tail or e[j][k].tail for j in range(k + 1))
        acc = {(0, 0): ONE}
        for cj, c in enumerate(count):
            if c:
                acc = _pmul(acc, prefix[cj][c - 1])
        out.append(AsymptoticScalar(acc, tail, tw * (k + 1)))
    return out


def _prefix_minors(polys: list[list[dict]]) -> list[dict]:
    """Leading principal minors; fraction-free elimination, falling back to a
    pivoted determinant once a zero pivot appears."""
    s = len(polys)
    out = []
    a = [list(r) for r in polys]
    prev = {(0, 0): ONE}
    k = 0
    while k < s:
        if not a[k][k]:
            break
        out.append(a[k][k])
        for i in range(k + 1, s):
            for j in range(k + 1, s):
                num = _padd(_pmul(a[i][j], a[k][k]), _pmul(a[i][k], a[k][j]), -ONE)
                a[i][j] = _pdivexact(num, prev) if num else {}
        prev = a[k][k]
        k += 1
    for t in range(k, s):
        out.append(_poly_det([row[: t + 1] for row in polys[: t + 1]]))
    return out


def minor_signs(m: AsymptoticHermitian) -> list[Sign]:
    return [eventual_sign(d) for d in leading_minors(m)]


def eventually_positive_definite(m: AsymptoticHermitian) -> bool:
    return eventual_inertia(m, 0)


def eventual_inertia(m: AsymptoticHermitian, negatives: int) -> bool:
    """Leading minors eventually carry the signs (-1)^min(k, negatives).

    With negatives = 0 this is eventual positive definiteness.  In general it
    says the first ``negatives`` basis vectors span a negative definite block
    and the form is positive definite on the orthogonal complement.
    """
    signs = minor_signs(m)
    expect = [Sign.NEGATIVE if min(k, negatives) % 2 else Sign.POSITIVE for k in range(1, m.n + 1)]
    bad = False
    undecided = False
    for s, want in zip(signs, expect):
        if s is Sign.INDETERMINATE:
            undecided = True
        elif s is not want:
            bad = True
    if bad:
        return False
    if undecided:
        raise NotDecidable("a leading minor has indeterminate eventual sign")
    return True


# ---------------------------------------------------------------- Schur route


@dataclass(frozen=True)
class SchurResult:
    reduced: AsymptoticHermitian
    q: ExactMatrix
    correction: bool  # a nonzero o(1) correction was absorbed into tails


def schur_reduce(a, b, c, d) -> SchurResult:
    """A - C D^-1 B with D = 2y(Q + o(1)) and bounded B, C.

    D^-1 = (Q^-1 + o(1))/(2y), so the correction is O(1/y); its limit is 0
    and it is folded into the tail flags of A.
    """
    k = len(a)
    r = len(d)
    for blk in (b, c):
        for row in blk:
            for v in row:
                v = as_asym(v)
                if v.depends_on_x() or (v.poly and v.y_degree() > 0):
                    raise GrowthError("coupling block is not bounded")
    qrows = []
    for i in range(r):
        qrow = []
        for j in range(r):
            v = as_asym(d[i][j])
            if v.depends_on_x():
                raise GrowthError("D depends on x")
            if v.poly and v.y_degree() > 1:
                raise GrowthError("D grows faster than y")
            qrow.append(ExactScalar(v.poly.get((0, 1), ZERO) / QI(2), v.twist))
        qrows.append(qrow)
    q = ExactMatrix.from_rows(qrows, ncols=r) if r else ExactMatrix.zeros(0, 0)
    if r and q.det().is_zero():
        raise SingularLeadingBlock("leading block Q of D is singular")
    coupled = any(as_asym(v).poly or as_asym(v).tail for blk in (b, c) for row in blk for v in row)
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            v = as_asym(a[i][j])
            row.append(v.with_tail(True) if coupled else v)
        out.append(row)
    return SchurResult(AsymptoticHermitian(out), q, coupled)


def schur_verdict(a, b, c, d) -> bool:
    """PD verdict for [[A, B], [C, D]] through the Schur complement."""
    res = schur_reduce(a, b, c, d)
    if res.q.nrows and not res.q.is_hermitian():
        raise NotDecidable("leading block of D is not hermitian")
    reduced_pd = eventually_positive_definite(res.reduced) if res.reduced.n else True
    if not reduced_pd:
        return False
    return positive_definite(res.q) if res.q.nrows else True


def assemble(a, b, c, d) -> AsymptoticHermitian:
    top = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    bot = [list(rc) + list(rd) for rc, rd in zip(c, d)]
    return AsymptoticHermitian(top + bot)
