"""Exact scalars in Q(i)[(2*pi)^{+-1}] and the linear algebra built on them.

Every subspace is handed around as an ExactMatrix whose columns form its
canonical basis: the reduced column-echelon form, i.e. the transpose of the
reduced row-echelon form of the spanning vectors.  Internally vectors are
sparse ``{index: QI}`` dicts; the geometric instances are large but very
sparse, so elimination only ever touches nonzero entries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ContainmentError, NotDecidable, ShapeError, TwistError

# ---------------------------------------------------------------- scalars


def _rat(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _rat(Fraction(x.strip()))
    raise TypeError(f"not an exact rational: {x!r}")


def _div(a, b):
    q = Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


class QI:
    """Gaussian rational re + im*i."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _rat(re)
        self.im = _rat(im)

    @staticmethod
    def _mk(re, im):
        obj = object.__new__(QI)
        obj.re = re
        obj.im = im
        return obj

    def __add__(self, o):
        if not isinstance(o, QI):
            o = as_qi(o)
        return QI._mk(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, QI):
            o = as_qi(o)
        return QI._mk(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return as_qi(o) - self

    def __mul__(self, o):
        if not isinstance(o, QI):
            o = as_qi(o)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return QI._mk(a * c, 0)
        return QI._mk(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return QI._mk(-self.re, -self.im)

    def inv(self):
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("QI division by zero")
            return QI._mk(_div(1, a), 0)
        n = a * a + b * b
        return QI._mk(_div(a, n), _div(-b, n))

    def __truediv__(self, o):
        if not isinstance(o, QI):
            o = as_qi(o)
        return self * o.inv()

    def __rtruediv__(self, o):
        return as_qi(o) * self.inv()

    def conj(self):
        return QI._mk(self.re, -self.im) if self.im else self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if isinstance(o, QI):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return not self.im and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QI({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)}*i"


ZERO = QI._mk(0, 0)
ONE = QI._mk(1, 0)
I_UNIT = QI._mk(0, 1)


def as_qi(x) -> QI:
    if isinstance(x, QI):
        return x
    if isinstance(x, ExactScalar):
        if x.twist and x.coeff:
            raise TwistError(f"{x} carries a twist; expected a plain Gaussian rational")
        return x.coeff
    if isinstance(x, str):
        return ExactScalar.parse(x).plain()
    if isinstance(x, (int, Fraction, bool)):
        return QI._mk(_rat(x), 0)
    if isinstance(x, tuple) and len(x) == 2:
        return QI(x[0], x[1])
    raise TypeError(f"cannot read {x!r} as a Gaussian rational")


_TWIST_RE = re.compile(r"^(.*?)\*?twist\^\(?(-?\d+)\)?$")


def _parse_qi(text: str) -> QI:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    terms = re.findall(r"[+-]*[^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"malformed scalar {text!r}")
    re_part = Fraction(0)
    im_part = Fraction(0)
    for term in terms:
        body = term.lstrip("+-")
        sign = -1 if (len(term) - len(body)) and term[: len(term) - len(body)].count("-") % 2 else 1
        if body.endswith("i"):
            mag = body[:-1].rstrip("*")
            im_part += sign * (Fraction(mag) if mag else 1)
        else:
            re_part += sign * Fraction(body)
    return QI(re_part, im_part)


class ExactScalar:
    """q * (2*pi)^k with q Gaussian rational."""

    __slots__ = ("coeff", "twist")

    def __init__(self, coeff=0, twist: int = 0):
        c = as_qi(coeff) if not isinstance(coeff, QI) else coeff
        self.coeff = c
        self.twist = int(twist) if c else 0

    @classmethod
    def of(cls, re=0, im=0, twist: int = 0) -> "ExactScalar":
        return cls(QI(re, im), twist)

    @classmethod
    def parse(cls, text) -> "ExactScalar":
        if isinstance(text, ExactScalar):
            return text
        if not isinstance(text, str):
            return as_scalar(text)
        s = text.replace(" ", "")
        m = _TWIST_RE.match(s)
        twist = 0
        if m:
            s, twist = m.group(1), int(m.group(2))
            s = s.rstrip("*") or "1"
        return cls(_parse_qi(s), twist)

    def plain(self) -> QI:
        if self.twist and self.coeff:
            raise TwistError(f"{self} carries a twist")
        return self.coeff

    def __add__(self, o):
        o = as_scalar(o)
        if not o.coeff:
            return self
        if not self.coeff:
            return o
        if self.twist != o.twist:
            raise TwistError(f"cannot add twist {self.twist} and twist {o.twist}")
        return ExactScalar(self.coeff + o.coeff, self.twist)

    __radd__ = __add__

    def __sub__(self, o):
        return self + (-as_scalar(o))

    def __rsub__(self, o):
        return as_scalar(o) - self

    def __neg__(self):
        return ExactScalar(-self.coeff, self.twist)

    def __mul__(self, o):
        o = as_scalar(o)
        return ExactScalar(self.coeff * o.coeff, self.twist + o.twist)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = as_scalar(o)
        return ExactScalar(self.coeff / o.coeff, self.twist - o.twist)

    def __rtruediv__(self, o):
        return as_scalar(o) / self

    def __pow__(self, k: int):
        out = ExactScalar(ONE)
        base = self if k >= 0 else ExactScalar(ONE) / self
        for _ in range(abs(k)):
            out = out * base
        return out

    def conj(self) -> "ExactScalar":
        return ExactScalar(self.coeff.conj(), self.twist)

    def is_zero(self) -> bool:
        return not self.coeff

    def __bool__(self):
        return bool(self.coeff)

    def sign(self) -> int:
        if self.coeff.im:
            raise NotDecidable(f"sign of non-real scalar {self}")
        r = self.coeff.re
        return (r > 0) - (r < 0)

    def __eq__(self, o):
        try:
            o = as_scalar(o)
        except TypeError:
            return NotImplemented
        if not self.coeff and not o.coeff:
            return True
        return self.twist == o.twist and self.coeff == o.coeff

    def __hash__(self):
        return hash((self.coeff, self.twist)) if self.coeff else hash(ZERO)

    def __str__(self):
        c = self.coeff
        sign = "-" if c.im < 0 else "+"
        return f"{c.re}{sign}{abs(c.im)}*i*twist^{self.twist}"

    def __repr__(self):
        return f"ExactScalar({self})"


def as_scalar(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, str):
        return ExactScalar.parse(x)
    return ExactScalar(as_qi(x), 0)


TWO_PI_I = ExactScalar(I_UNIT, 1)


# ---------------------------------------------------------------- sparse vectors

Vec = dict  # {index: QI}, zero entries never stored


def _axpy(dst: dict, a: QI, src: dict) -> None:
    """dst += a*src in place."""
    for c, v in src.items():
        nv = dst.get(c)
        nv = a * v if nv is None else nv + a * v
        if nv:
            dst[c] = nv
        else:
            dst.pop(c, None)


def _scaled(v: dict, a: QI) -> dict:
    return {c: a * x for c, x in v.items()} if a != ONE else dict(v)


class _Echelon:
    """Incrementally maintained reduced row-echelon basis.

    With ``tags`` each stored row remembers which combination of the inserted
    vectors produced it; that is how coordinates and left inverses come out.
    """

    def __init__(self, tags: bool = False):
        self.tags = tags
        self.piv: dict[int, tuple[dict, dict | None]] = {}

    def reduce(self, v: dict, tag: dict | None = None):
        w = dict(v)
        t = dict(tag) if (self.tags and tag is not None) else ({} if self.tags else None)
        for c in [c for c in w if c in self.piv]:
            x = w.get(c)
            if x:
                row, rtag = self.piv[c]
                _axpy(w, -x, row)
                if t is not None:
                    _axpy(t, -x, rtag)
        return w, t

    def add(self, v: dict, tag: dict | None = None) -> bool:
        w, t = self.reduce(v, tag)
        if not w:
            return False
        lead = min(w)
        inv = w[lead].inv()
        w = _scaled(w, inv)
        if t is not None:
            t = _scaled(t, inv)
        for row, rtag in self.piv.values():
            x = row.get(lead)
            if x:
                _axpy(row, -x, w)
                if rtag is not None:
                    _axpy(rtag, -x, t)
        self.piv[lead] = (w, t)
        return True

    def rank(self) -> int:
        return len(self.piv)

    def rows(self) -> list[dict]:
        return [self.piv[c][0] for c in sorted(self.piv)]

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)[0]


# ---------------------------------------------------------------- matrices


class ExactMatrix:
    """Immutable matrix over Q(i) carrying one uniform twist (2*pi)^k.

    Entries are stored column-sparse.  A uniform twist is enough for every
    matrix the package builds; mixing twists inside one matrix is rejected.
    """

    __slots__ = ("nrows", "ncols", "_cols", "twist", "_rows")

    def __init__(self, nrows: int, ncols: int, cols: Sequence[dict], twist: int = 0):
        if len(cols) != ncols:
            raise ShapeError("column count mismatch")
        self.nrows = nrows
        self.ncols = ncols
        self._cols = tuple(cols)
        self.twist = twist if any(cols) else 0
        self._rows = None

    # construction
    @classmethod
    def from_rows(cls, rows, ncols: int | None = None, twist: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ShapeError("cannot infer column count of an empty matrix")
            ncols = len(rows[0])
        cols = [dict() for _ in range(ncols)]
        seen = set()
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ShapeError("ragged rows")
            for j, x in enumerate(r):
                s = as_scalar(x)
                if s.coeff:
                    cols[j][i] = s.coeff
                    seen.add(s.twist)
        if twist is not None:
            if seen - {0, twist}:
                raise TwistError("entries disagree with the declared twist")
            k = twist
        else:
            if len(seen) > 1:
                raise TwistError(f"mixed twists {sorted(seen)} in one matrix")
            k = seen.pop() if seen else 0
        return cls(len(rows), ncols, cols, k)

    @classmethod
    def from_columns(cls, nrows: int, cols: Iterable, twist: int = 0) -> "ExactMatrix":
        out = []
        for c in cols:
            if isinstance(c, dict):
                out.append({i: as_qi(v) for i, v in c.items() if v})
            else:
                c = list(c)
                if len(c) != nrows:
                    raise ShapeError("column length mismatch")
                out.append({i: as_qi(v) for i, v in enumerate(c) if as_qi(v)})
        return cls(nrows, len(out), out, twist)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls(nrows, ncols, [{} for _ in range(ncols)])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, [{i: ONE} for i in range(n)])

    @classmethod
    def diag(cls, entries) -> "ExactMatrix":
        es = [as_qi(e) for e in entries]
        n = len(es)
        return cls(n, n, [({i: e} if e else {}) for i, e in enumerate(es)])

    @classmethod
    def column_vector(cls, entries) -> "ExactMatrix":
        es = list(entries)
        return cls.from_columns(len(es), [es])

    @classmethod
    def from_json(cls, rows, ncols: int | None = None) -> "ExactMatrix":
        return cls.from_rows(rows, ncols=ncols)

    # access
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entry(self, i: int, j: int) -> QI:
        return self._cols[j].get(i, ZERO)

    def __getitem__(self, ij) -> ExactScalar:
        i, j = ij
        return ExactScalar(self.entry(i, j), self.twist)

    def col(self, j: int) -> dict:
        return self._cols[j]

    def cols(self) -> tuple:
        return self._cols

    def rows_sparse(self) -> list[dict]:
        if self._rows is None:
            rows = [dict() for _ in range(self.nrows)]
            for j, c in enumerate(self._cols):
                for i, v in c.items():
                    rows[i][j] = v
            self._rows = rows
        return self._rows

    def dense(self) -> list[list[QI]]:
        out = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for j, c in enumerate(self._cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def to_json(self) -> list[list[str]]:
        return [[str(ExactScalar(x, self.twist)) for x in row] for row in self.dense()]

    def is_zero(self) -> bool:
        return not any(self._cols)

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    # algebra
    def _check_twist_add(self, o: "ExactMatrix") -> int:
        if self.is_zero():
            return o.twist
        if o.is_zero() or self.twist == o.twist:
            return self.twist
        raise TwistError(f"matrix twists {self.twist} and {o.twist} differ")

    def __add__(self, o: "ExactMatrix") -> "ExactMatrix":
        if self.shape != o.shape:
            raise ShapeError(f"{self.shape} + {o.shape}")
        k = self._check_twist_add(o)
        cols = []
        for a, b in zip(self._cols, o._cols):
            c = dict(a)
            _axpy(c, ONE, b)
            cols.append(c)
        return ExactMatrix(self.nrows, self.ncols, cols, k)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.nrows, self.ncols, [_scaled(c, -ONE) for c in self._cols], self.twist)

    def __sub__(self, o: "ExactMatrix") -> "ExactMatrix":
        return self + (-o)

    def scale(self, s) -> "ExactMatrix":
        s = as_scalar(s)
        if not s.coeff:
            return ExactMatrix.zeros(self.nrows, self.ncols)
        return ExactMatrix(self.nrows, self.ncols, [_scaled(c, s.coeff) for c in self._cols], self.twist + s.twist)

    def __matmul__(self, o: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != o.nrows:
            raise ShapeError(f"{self.shape} @ {o.shape}")
        cols = []
        for bc in o._cols:
            acc: dict = {}
            for k, b in bc.items():
                _axpy(acc, b, self._cols[k])
            cols.append(acc)
        return ExactMatrix(self.nrows, o.ncols, cols, self.twist + o.twist)

    def __pow__(self, k: int) -> "ExactMatrix":
        if self.nrows != self.ncols:
            raise ShapeError("power of a non-square matrix")
        out = ExactMatrix.identity(self.nrows)
        for _ in range(k):
            out = out @ self
        return out

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.ncols, self.nrows, [dict(r) for r in self.rows_sparse()], self.twist)

    def conj(self) -> "ExactMatrix":
        return ExactMatrix(self.nrows, self.ncols, [{i: v.conj() for i, v in c.items()} for c in self._cols], self.twist)

    @property
    def H(self) -> "ExactMatrix":
        return self.conj().T

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        rmap = {r: i for i, r in enumerate(rows)}
        out = []
        for j in cols:
            c = self._cols[j]
            out.append({rmap[i]: v for i, v in c.items() if i in rmap})
        return ExactMatrix(len(rows), len(cols), out, self.twist)

    def select_columns(self, cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(self.nrows, len(cols), [self._cols[j] for j in cols], self.twist)

    def __eq__(self, o):
        if not isinstance(o, ExactMatrix):
            return NotImplemented
        if self.shape != o.shape:
            return False
        if self.is_zero() and o.is_zero():
            return True
        return self.twist == o.twist and self._cols == o._cols

    __hash__ = None

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols}, twist={self.twist}, {self.to_json() if self.nrows * self.ncols <= 36 else '...'})"

    # elimination
    def rank(self) -> int:
        ech = _Echelon()
        for c in self._cols:
            ech.add(c)
        return ech.rank()

    def det(self) -> ExactScalar:
        n = self.nrows
        if n != self.ncols:
            raise ShapeError("det of a non-square matrix")
        rows = [dict(r) for r in self.rows_sparse()]
        active = list(range(n))
        acc = ONE
        for c in range(n):
            pos = next((k for k, i in enumerate(active) if c in rows[i]), None)
            if pos is None:
                return ExactScalar(0)
            piv = active.pop(pos)
            if pos % 2:
                acc = -acc
            pv = rows[piv][c]
            acc = acc * pv
            pinv = pv.inv()
            for i in active:
                x = rows[i].get(c)
                if x:
                    _axpy(rows[i], -(x * pinv), rows[piv])
        return ExactScalar(acc, self.twist * n)

    def inverse(self) -> "ExactMatrix":
        n = self.nrows
        if n != self.ncols:
            raise ShapeError("inverse of a non-square matrix")
        ech = _Echelon(tags=True)
        for i, r in enumerate(self.rows_sparse()):
            ech.add(r, {i: ONE})
        if ech.rank() < n:
            raise ZeroDivisionError("singular matrix")
        inv_rows = [ech.piv[c][1] for c in range(n)]
        cols = [dict() for _ in range(n)]
        for c, t in enumerate(inv_rows):
            for i, v in t.items():
                cols[i][c] = v
        return ExactMatrix(n, n, cols, -self.twist)

    def is_hermitian(self) -> bool:
        return self.nrows == self.ncols and self == self.H


def hstack(*ms: ExactMatrix) -> ExactMatrix:
    ms = [m for m in ms]
    if not ms:
        raise ShapeError("nothing to stack")
    n = ms[0].nrows
    if any(m.nrows != n for m in ms):
        raise ShapeError("hstack row mismatch")
    ks = {m.twist for m in ms if not m.is_zero()}
    if len(ks) > 1:
        raise TwistError("hstack of different twists")
    cols = [c for m in ms for c in m.cols()]
    return ExactMatrix(n, len(cols), cols, ks.pop() if ks else 0)


def vstack(*ms: ExactMatrix) -> ExactMatrix:
    return hstack(*[m.T for m in ms]).T


def block_diag(*ms: ExactMatrix) -> ExactMatrix:
    ks = {m.twist for m in ms if not m.is_zero()}
    if len(ks) > 1:
        raise TwistError("block_diag of different twists")
    nrows = sum(m.nrows for m in ms)
    cols = []
    off = 0
    for m in ms:
        for c in m.cols():
            cols.append({i + off: v for i, v in c.items()})
        off += m.nrows
    return ExactMatrix(nrows, len(cols), cols, ks.pop() if ks else 0)


def matrix(rows, ncols: int | None = None) -> ExactMatrix:
    return ExactMatrix.from_rows(rows, ncols=ncols)


def vector(entries) -> ExactMatrix:
    return ExactMatrix.column_vector(entries)


# ---------------------------------------------------------------- subspaces


def _basis_from_echelon(n: int, ech: _Echelon) -> ExactMatrix:
    return ExactMatrix(n, ech.rank(), [dict(r) for r in ech.rows()])


def span(m: ExactMatrix | Sequence[dict], n: int | None = None) -> ExactMatrix:
    """Canonical basis of the column span."""
    if isinstance(m, ExactMatrix):
        n, vecs = m.nrows, m.cols()
    else:
        vecs = m
    ech = _Echelon()
    for v in vecs:
        ech.add(v)
    return _basis_from_echelon(n, ech)


image = span


def kernel(m: ExactMatrix) -> ExactMatrix:
    ech = _Echelon()
    for r in m.rows_sparse():
        ech.add(r)
    pivots = set(ech.piv)
    free = [j for j in range(m.ncols) if j not in pivots]
    # column f of the RREF, read off the pivot rows
    by_col: dict[int, dict] = {f: {} for f in free}
    for pc, (row, _) in ech.piv.items():
        for j, v in row.items():
            if j != pc:
                by_col[j][pc] = v
    vecs = []
    for f in free:
        v = {pc: -x for pc, x in by_col[f].items()}
        v[f] = ONE
        vecs.append(v)
    return span(vecs, m.ncols)


def dim(u: ExactMatrix) -> int:
    return u.ncols


def zero_space(n: int) -> ExactMatrix:
    return ExactMatrix.zeros(n, 0)


def full_space(n: int) -> ExactMatrix:
    return ExactMatrix.identity(n)


def subspace_sum(*us: ExactMatrix) -> ExactMatrix:
    n = us[0].nrows
    return span([c for u in us for c in u.cols()], n)


def intersect(u: ExactMatrix, v: ExactMatrix) -> ExactMatrix:
    """Zassenhaus: reduce (u|u),(v|0) and keep the rows with empty left half."""
    n = u.nrows
    if v.nrows != n:
        raise ShapeError("intersect: ambient mismatch")
    if u.ncols == 0 or v.ncols == 0:
        return zero_space(n)
    ech = _Echelon()
    for c in u.cols():
        w = dict(c)
        for i, x in c.items():
            w[i + n] = x
        ech.add(w)
    for c in v.cols():
        ech.add(c)
    out = [{i - n: x for i, x in row.items()} for p, (row, _) in ech.piv.items() if p >= n]
    return span(out, n)


def contains(v: ExactMatrix, u: ExactMatrix) -> bool:
    """True iff span(u) is inside span(v)."""
    ech = _Echelon()
    for c in v.cols():
        ech.add(c)
    return all(ech.contains(c) for c in u.cols())


def same_subspace(u: ExactMatrix, v: ExactMatrix) -> bool:
    return span(u) == span(v)


def conj_subspace(u: ExactMatrix, conjugation: ExactMatrix) -> ExactMatrix:
    """Span of C * conj(u); the conjugation of v is C * v-bar."""
    return span(conjugation @ u.conj())


def apply_conj(v: ExactMatrix, conjugation: ExactMatrix) -> ExactMatrix:
    return conjugation @ v.conj()


class Coordinates:
    """Coordinates with respect to the columns of a (possibly dependent) matrix."""

    def __init__(self, basis: ExactMatrix):
        self.basis = basis
        self._ech = _Echelon(tags=True)
        for j, c in enumerate(basis.cols()):
            self._ech.add(c, {j: ONE})

    def of(self, v: dict) -> dict:
        w, t = self._ech.reduce(v, {})
        if w:
            raise ContainmentError("vector not in the span")
        return {j: -x for j, x in t.items()}

    def matrix_of(self, vs: ExactMatrix) -> ExactMatrix:
        return ExactMatrix(self.basis.ncols, vs.ncols, [self.of(c) for c in vs.cols()], vs.twist - self.basis.twist)

    def left_inverse(self) -> ExactMatrix:
        """L with L @ basis = I (basis independent); zero off the pivot rows."""
        k = self.basis.ncols
        if self._ech.rank() != k:
            raise ShapeError("left inverse of dependent columns")
        cols = [dict() for _ in range(self.basis.nrows)]
        for c, (_, t) in self._ech.piv.items():
            for j, x in t.items():
                cols[c][j] = x
        return ExactMatrix(k, self.basis.nrows, cols)

    def contains(self, v: dict) -> bool:
        return self._ech.contains(v)


def solve(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """One solution x of a @ x = b; ContainmentError if inconsistent."""
    return Coordinates(a).matrix_of(b)


@dataclass(frozen=True)
class QuotientMap:
    """V/U presented by a section S (columns) and a projection matrix.

    ``projection`` is defined on the whole ambient space through a left
    inverse of [U | S]; on V its kernel is exactly U.
    """

    space: ExactMatrix
    sub: ExactMatrix
    section: ExactMatrix
    projection: ExactMatrix

    @property
    def dim(self) -> int:
        return self.section.ncols

    def project(self, vs: ExactMatrix, check: bool = True) -> ExactMatrix:
        if check and not contains(self.space, vs):
            raise ContainmentError("vector outside the space being quotiented")
        return self.projection @ vs

    @classmethod
    def with_section(cls, sub: ExactMatrix, section: ExactMatrix) -> "QuotientMap":
        both = hstack(sub, section) if sub.ncols or section.ncols else sub
        co = Coordinates(both)
        if co._ech.rank() != both.ncols:
            raise ContainmentError("section meets the subspace")
        left = co.left_inverse() if both.ncols else ExactMatrix.zeros(0, sub.nrows)
        proj = left.submatrix(list(range(sub.ncols, both.ncols)), list(range(sub.nrows)))
        return cls(span(both), sub, section, proj)


def quotient_map(v: ExactMatrix, u: ExactMatrix) -> QuotientMap:
    if not contains(v, u):
        raise ContainmentError("U is not contained in V")
    ech = _Echelon()
    for c in u.cols():
        ech.add(c)
    chosen = []
    vb = span(v)
    for c in vb.cols():
        if ech.add(c):
            chosen.append(c)
    section = ExactMatrix(v.nrows, len(chosen), chosen)
    q = QuotientMap.with_section(span(u), section)
    return QuotientMap(vb, q.sub, section, q.projection)


# ---------------------------------------------------------------- filtrations


@dataclass(frozen=True)
class Filtration:
    """Finite filtration by subspaces of C^ambient.

    ``steps`` lists the subspaces at some indices.  An unlisted index between
    two listed ones repeats the neighbouring step on the smaller side (the
    lower index for W, the higher one for F).  One step past the listed range
    the filtration is everything on the big end and 0 on the small end.
    """

    ambient: int
    direction: str
    steps: Mapping[int, ExactMatrix] = field(default_factory=dict)

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise ValueError(f"bad direction {self.direction!r}")
        canon = {int(k): span(v) for k, v in self.steps.items()}
        for v in canon.values():
            if v.nrows != self.ambient:
                raise ShapeError("filtration step in the wrong ambient space")
        object.__setattr__(self, "steps", dict(sorted(canon.items())))

    @property
    def indices(self) -> list[int]:
        return list(self.steps)

    def at(self, i: int) -> ExactMatrix:
        ks = self.indices
        if not ks:
            return full_space(self.ambient)
        if self.direction == "increasing":
            if i >= ks[-1] + 1:
                return full_space(self.ambient)
            below = [k for k in ks if k <= i]
            return self.steps[below[-1]] if below else zero_space(self.ambient)
        if i <= ks[0] - 1:
            return full_space(self.ambient)
        above = [k for k in ks if k >= i]
        return self.steps[above[0]] if above else zero_space(self.ambient)

    def __getitem__(self, i: int) -> ExactMatrix:
        return self.at(i)

    def jumps(self) -> list[int]:
        """Indices where the graded piece is nonzero."""
        if not self.steps:
            return []
        lo, hi = min(self.steps), max(self.steps)
        out = []
        for i in range(lo - 1, hi + 2):
            if self.direction == "increasing":
                if self.at(i).ncols > self.at(i - 1).ncols:
                    out.append(i)
            elif self.at(i).ncols > self.at(i + 1).ncols:
                out.append(i)
        return out

    def span_range(self) -> tuple[int, int]:
        ks = self.indices
        return (min(ks), max(ks)) if ks else (0, 0)

    def validate(self) -> list[str]:
        problems = []
        ks = self.indices
        for a, b in zip(ks, ks[1:]):
            small, big = (a, b) if self.direction == "increasing" else (b, a)
            if not contains(self.steps[big], self.steps[small]):
                problems.append(f"steps {a} and {b} are not nested")
        return problems

    def map(self, f) -> "Filtration":
        return Filtration(self.ambient, self.direction, {k: f(v) for k, v in self.steps.items()})


def increasing(ambient: int, steps: Mapping[int, ExactMatrix]) -> Filtration:
    return Filtration(ambient, "increasing", steps)


def decreasing(ambient: int, steps: Mapping[int, ExactMatrix]) -> Filtration:
    return Filtration(ambient, "decreasing", steps)


def check_opposed(f: Filtration, k: int, conjugation: ExactMatrix) -> bool:
    """F^p (+) conj(F^{k+1-p}) = H for every p."""
    n = f.ambient
    lo, hi = f.span_range()
    for p in range(min(lo, k + 1 - hi) - 1, max(hi, k + 1 - lo) + 2):
        a = f.at(p)
        b = conj_subspace(f.at(k + 1 - p), conjugation)
        if a.ncols + b.ncols != n or subspace_sum(a, b).ncols != n:
            return False
    return True


# ---------------------------------------------------------------- hermitian forms


@dataclass(frozen=True)
class HermitianForm:
    gram: ExactMatrix

    def __post_init__(self):
        if not self.gram.is_hermitian():
            raise ValueError("gram is not hermitian")

    def value(self, u: ExactMatrix, v: ExactMatrix) -> ExactScalar:
        return (u.H @ self.gram @ v)[0, 0]


def ldl(g: ExactMatrix) -> tuple[ExactMatrix, list[ExactScalar]]:
    """g = L D L* without pivoting; ZeroDivisionError on a zero pivot."""
    n = g.nrows
    rows = [dict(r) for r in g.rows_sparse()]
    lcols = [dict() for _ in range(n)]
    ds = []
    for k in range(n):
        d = rows[k].get(k)
        if not d:
            raise ZeroDivisionError(f"zero pivot at {k}")
        ds.append(ExactScalar(d, g.twist))
        dinv = d.inv()
        lcols[k][k] = ONE
        for i in [j for j in rows[k] if j > k]:
            x = rows[i].get(k)
            if x:
                f = x * dinv
                lcols[k][i] = f
                _axpy(rows[i], -f, rows[k])
    return ExactMatrix(n, n, lcols), ds


def leading_minors(g: ExactMatrix) -> list[ExactScalar]:
    """Leading principal minors by independent determinants."""
    return [g.submatrix(range(k), range(k)).det() for k in range(1, g.nrows + 1)]


def positive_definite(g: HermitianForm | ExactMatrix) -> bool:
    """All leading principal minors > 0.

    The minors are the running products of the LDL* pivots; stopping at the
    first non-positive pivot is exact because the earlier minors are
    positive.
    """
    gram = g.gram if isinstance(g, HermitianForm) else g
    if not gram.is_hermitian():
        raise ValueError("positive_definite needs a hermitian matrix")
    n = gram.nrows
    rows = [dict(r) for r in gram.rows_sparse()]
    for k in range(n):
        d = rows[k].get(k, ZERO)
        if d.im:
            raise NotDecidable(f"leading minor {k + 1} is not real")
        if d.re <= 0:
            return False
        dinv = d.inv()
        for i in [j for j in rows[k] if j > k]:
            x = rows[i].get(k)
            if x:
                _axpy(rows[i], -(x * dinv), rows[k])
    return True
