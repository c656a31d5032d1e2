"""Adapted real bases, canonical-extension frames and their asymptotics.

The limit space is written in a real basis Omega,

    Clemens shape:  alpha_1..alpha_m | beta_1..beta_{2h+2} | gamma_1..gamma_m
    HS shape:       eps_1..eps_4 | alpha_1..alpha_m | beta_1..beta_{2h} | gamma_1..gamma_m

with N gamma_k = alpha_k and (HS) N eps_3 = eps_1, N eps_4 = eps_2.  A frame
vector has AsymptoticScalar coordinates in Omega: its limit constants, the
explicit z-linear term added by untwisting, and a tail placeholder on every
coordinate (the frame is only known up to exponentially small corrections).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .asymptotics import AsymptoticHermitian, AsymptoticScalar, _pmul, _poly_det, eventual_inertia
from .errors import (
    ConsistencyError,
    HypothesisFailure,
    ShapeError,
    TwistError,
    UnsupportedDiamond,
    UnsupportedOrder,
)
from .exactlinalg import (
    ONE,
    QI,
    ZERO,
    ExactMatrix,
    apply_conj,
    hstack,
    positive_definite,
    solve,
)
from .mhs import DeligneSplitting

I = QI(0, 1)
HALF = QI(1, 0) / QI(2)


class Shape(enum.Enum):
    CLEMENS = "clemens"
    HS = "hs"


class WedgeVerdict(enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


CLEMENS_TYPES = {(3, 0), (2, 1), (1, 2), (0, 3), (2, 2), (1, 1)}
HS_TYPES = {(3, 1), (1, 3), (2, 0), (0, 2), (2, 2), (1, 1), (2, 1), (1, 2)}


# ---------------------------------------------------------------- the limit spec


@dataclass(frozen=True)
class LimitFrameSpec:
    """Limit constants of a frame of F^2 near the degenerate fibre.

    ``b`` holds the coordinates of u_1.. on beta (columns); the first ``f3``
    of them lie in F^3.  ``x`` gives delta_k = gamma_k - sum_l x_kl alpha_l
    (minus ``eta`` on eps_1, eps_2 in the HS shape).  ``w`` is the HS matrix
    with sigma_1 = w11 eps_3 + w12 eps_4 and sigma_2 = w21 eps_3 + w22 eps_4
    modulo eps_1, eps_2.  ``gram`` is the real antisymmetric Q on Omega.
    ``basis`` (optional) holds Omega in ambient coordinates.
    """

    shape: Shape
    h: int
    m: int
    b: ExactMatrix
    x: ExactMatrix
    gram: ExactMatrix
    w: ExactMatrix | None = None
    eta: ExactMatrix | None = None
    f3: int = 1
    basis: ExactMatrix | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.b.shape != (self.n_beta, self.n_u):
            raise ShapeError(f"b must be {self.n_beta}x{self.n_u}, got {self.b.shape}")
        if self.x.shape != (self.m, self.m):
            raise ShapeError("x must be m x m")
        if self.gram.shape != (self.dim, self.dim):
            raise ShapeError(f"gram must be {self.dim}x{self.dim}")
        if self.shape is Shape.HS and (self.w is None or self.w.shape != (2, 2)):
            raise ShapeError("the HS shape needs a 2x2 w")

    # layout
    @property
    def n_eps(self) -> int:
        return 4 if self.shape is Shape.HS else 0

    @property
    def n_beta(self) -> int:
        return 2 * self.h + (2 if self.shape is Shape.CLEMENS else 0)

    @property
    def n_u(self) -> int:
        return self.n_beta // 2

    @property
    def dim(self) -> int:
        return self.n_eps + 2 * self.m + self.n_beta

    def eps(self, i: int) -> int:
        return i - 1

    def alpha(self, k: int) -> int:
        return self.n_eps + k - 1

    def beta(self, j: int) -> int:
        return self.n_eps + self.m + j - 1

    def gamma(self, k: int) -> int:
        return self.n_eps + self.m + self.n_beta + k - 1

    def labels(self) -> list[str]:
        out = [f"eps{i}" for i in range(1, self.n_eps + 1)]
        out += [f"alpha{k}" for k in range(1, self.m + 1)]
        out += [f"beta{j}" for j in range(1, self.n_beta + 1)]
        out += [f"gamma{k}" for k in range(1, self.m + 1)]
        return out

    def n_omega(self) -> ExactMatrix:
        cols = [dict() for _ in range(self.dim)]
        for k in range(1, self.m + 1):
            cols[self.gamma(k)][self.alpha(k)] = ONE
        if self.shape is Shape.HS:
            cols[self.eps(3)][self.eps(1)] = ONE
            cols[self.eps(4)][self.eps(2)] = ONE
        return ExactMatrix(self.dim, self.dim, cols)

    # limit vectors as sparse coordinate dicts
    def delta(self, k: int) -> dict:
        v = {self.gamma(k): ONE}
        for l in range(1, self.m + 1):
            c = self.x.entry(k - 1, l - 1)
            if c:
                v[self.alpha(l)] = -c
        if self.eta is not None:
            for j in (1, 2):
                c = self.eta.entry(k - 1, j - 1)
                if c:
                    v[self.eps(j)] = -c
        return v

    def u(self, p: int) -> dict:
        return {self.beta(i + 1): c for i, c in self.b.col(p - 1).items()}

    def sigma1(self) -> dict:
        return _clean({self.eps(3): self.w.entry(0, 0), self.eps(4): self.w.entry(0, 1)})

    def xi1(self) -> dict:
        return _clean({self.eps(1): self.w.entry(0, 0), self.eps(2): self.w.entry(0, 1)})

    def q(self) -> ExactMatrix:
        """q_rs = Q(delta_r, alpha_s)."""
        rows = []
        for r in range(1, self.m + 1):
            d = self.delta(r)
            rows.append([_pair(self.gram, d, {self.alpha(s): ONE}) for s in range(1, self.m + 1)])
        return ExactMatrix.from_rows(rows, ncols=self.m)

    def a_infinity(self) -> ExactMatrix:
        """M(u_p, conj u_q) = i Q(u_p, conj u_q) on the u outside F^3."""
        ps = range(self.f3 + 1, self.n_u + 1)
        rows = [[I * _pair(self.gram, self.u(p), _conj(self.u(q))) for q in ps] for p in ps]
        return ExactMatrix.from_rows(rows, ncols=len(ps))

    def with_x(self, x: ExactMatrix) -> "LimitFrameSpec":
        return replace(self, x=x)

    def validate(self) -> list[str]:
        out = []
        g = self.gram
        if g.conj() != g:
            out.append("Q is not real")
        if g.T != -g:
            out.append("Q is not antisymmetric")
        n = self.n_omega()
        if (g @ n + n.T @ g).nnz():
            out.append("N is not an infinitesimal isometry of Q")
        al = [self.alpha(k) for k in range(1, self.m + 1)]
        be = [self.beta(j) for j in range(1, self.n_beta + 1)]
        if g.submatrix(al, al).nnz():
            out.append("Q(alpha, alpha) != 0")
        if g.submatrix(al, be).nnz():
            out.append("Q(alpha, beta) != 0")
        q = self.q()
        if q.T != q or q.conj() != q:
            out.append("q is not real symmetric")
        return out


def _clean(v: dict) -> dict:
    return {i: c for i, c in v.items() if c}


def _conj(v: dict) -> dict:
    return {i: c.conj() for i, c in v.items()}


def _pair(g: ExactMatrix, u: dict, v: dict) -> QI:
    acc = ZERO
    for j, vj in v.items():
        col = g.col(j)
        for i, ui in u.items():
            gij = col.get(i)
            if gij:
                acc = acc + ui * gij * vj
    return acc


def q_positive(spec: LimitFrameSpec) -> bool:
    return spec.m == 0 or positive_definite(spec.q())


def a_infinity_positive(spec: LimitFrameSpec) -> bool:
    a = spec.a_infinity()
    return a.nrows == 0 or positive_definite(a)


# ---------------------------------------------------------------- adapted bases


def real_basis(space: ExactMatrix, conjugation: ExactMatrix) -> ExactMatrix:
    """Conjugation-fixed basis of a conjugation-stable subspace.

    Candidates v + conj v and i(v - conj v) are taken in order, so a basis of
    conjugate pairs yields a basis of local real pairs.
    """
    k = space.ncols
    picked: list[dict] = []
    for j in range(k):
        v = space.select_columns([j])
        cv = apply_conj(v, conjugation)
        for cand in (v + cv, (v - cv).scale(I)):
            trial = picked + [cand.col(0)]
            if ExactMatrix(space.nrows, len(trial), trial).rank() == len(trial):
                picked = trial
        if len(picked) == k:
            break
    if len(picked) != k:
        raise HypothesisFailure("subspace is not stable under conjugation")
    return ExactMatrix(space.nrows, k, picked)


def detect_shape(splitting: DeligneSplitting) -> Shape:
    dims = splitting.dims()
    types = set(dims)
    if types <= CLEMENS_TYPES and dims.get((3, 0)) == 1 and dims.get((0, 3)) == 1:
        if dims.get((2, 1), 0) == dims.get((1, 2), 0) and dims.get((2, 2), 0) == dims.get((1, 1), 0):
            return Shape.CLEMENS
    if types <= HS_TYPES and all(dims.get(t) == 1 for t in ((3, 1), (1, 3), (2, 0), (0, 2))):
        if dims.get((2, 1), 0) == dims.get((1, 2), 0) and dims.get((2, 2), 0) == dims.get((1, 1), 0):
            return Shape.HS
    raise UnsupportedDiamond(f"no frame recipe for Hodge numbers {sorted(dims.items())}")


def adapted_basis(
    splitting: DeligneSplitting, n_op: ExactMatrix, conjugation: ExactMatrix, gram: ExactMatrix
) -> LimitFrameSpec:
    """Real basis Omega adapted to the splitting, and the constants x (w, eta).

    ``gram`` is the real form Q in ambient coordinates.
    """
    shape = detect_shape(splitting)
    n = splitting.dim
    p = splitting.piece
    m = p(2, 2).ncols
    h = p(2, 1).ncols
    # gamma_k = Re delta'_k over a basis delta' of I^{2,2}
    dprime = p(2, 2)
    gam = (dprime + apply_conj(dprime, conjugation)).scale(HALF) if m else ExactMatrix.zeros(n, 0)
    alph = n_op @ gam if m else ExactMatrix.zeros(n, 0)
    if m and alph.rank() != m:
        raise HypothesisFailure("N: I^{2,2} -> I^{1,1} is not an isomorphism")
    w3 = hstack(*[p(a, 3 - a) for a in (3, 2, 1, 0) if p(a, 3 - a).ncols]) if (h or shape is Shape.CLEMENS) else ExactMatrix.zeros(n, 0)
    beta = real_basis(w3, conjugation) if w3.ncols else ExactMatrix.zeros(n, 0)
    f3 = 0
    eps = ExactMatrix.zeros(n, 0)
    w = None
    if shape is Shape.HS:
        sigma1 = p(3, 1)
        xi1 = n_op @ sigma1
        if xi1.is_zero():
            raise HypothesisFailure("N: I^{3,1} -> I^{2,0} vanishes")
        xi2 = apply_conj(xi1, conjugation)
        sbar = apply_conj(sigma1, conjugation)
        eps = hstack(xi1 + xi2, (xi1 - xi2).scale(I), sigma1 + sbar, (sigma1 - sbar).scale(I))
        if eps.rank() != 4:
            raise HypothesisFailure("eps_1..eps_4 are dependent")
        s2 = p(1, 3)
        ns2 = n_op @ s2
        scale_ = solve(xi2, ns2)  # N sigma_2 = c xi_2
        if scale_.is_zero():
            raise HypothesisFailure("N: I^{1,3} -> I^{0,2} vanishes")
        s2 = s2.scale(scale_.entry(0, 0).inv())
        cs1 = solve(eps, sigma1)
        cs2 = solve(eps, s2)
        w = ExactMatrix.from_rows([[cs1.entry(2, 0), cs1.entry(3, 0)], [cs2.entry(2, 0), cs2.entry(3, 0)]])
        if cs1.entry(0, 0) or cs1.entry(1, 0):
            raise ConsistencyError("sigma_1 is not of the expected eps form")
        us = p(2, 1)
    else:
        f3 = 1
        us = hstack(p(3, 0), p(2, 1))
    omega = hstack(*[v for v in (eps, alph, beta, gam) if v.ncols])
    if omega.ncols != n or omega.rank() != n:
        raise HypothesisFailure("adapted vectors do not form a basis")
    if apply_conj(omega, conjugation) != omega:
        raise ConsistencyError("adapted basis is not real")
    b = solve(beta, us) if us.ncols else ExactMatrix.zeros(beta.ncols, 0)
    # delta'_k - gamma_k = -sum x_kl alpha_l - sum eta_kj eps_j
    low = hstack(*[v for v in (alph, eps.select_columns([0, 1]) if eps.ncols else eps) if v.ncols]) if m else None
    if m:
        coeff = solve(low, dprime - gam).scale(-ONE)
        x = coeff.submatrix(range(m), range(m)).T
        eta = coeff.submatrix(range(m, m + 2), range(m)).T if shape is Shape.HS else None
    else:
        x, eta = ExactMatrix.zeros(0, 0), None
    g_omega = omega.T @ gram @ omega
    spec = LimitFrameSpec(shape, h, m, b, x, g_omega, w, eta, f3, omega)
    if omega @ spec.n_omega() != n_op @ omega:
        raise HypothesisFailure("N does not act on the adapted basis as required")
    return spec


# ---------------------------------------------------------------- frames


@dataclass(frozen=True)
class FrameVector:
    name: str
    coords: Mapping[int, AsymptoticScalar]  # polynomial parts by Omega index
    tail: bool = True

    def coordinate(self, i: int) -> AsymptoticScalar:
        c = self.coords.get(i)
        base = c if c is not None else AsymptoticScalar.zero()
        return base.with_tail(self.tail)

    def conj(self) -> "FrameVector":
        return FrameVector(self.name + "~", {i: c.conj() for i, c in self.coords.items()}, self.tail)


@dataclass(frozen=True)
class AsymptoticFrame:
    spec: LimitFrameSpec
    vectors: tuple
    untwisted: bool
    f3: int  # leading vectors lying in F^3

    def names(self) -> list[str]:
        return [v.name for v in self.vectors]

    def vector(self, name: str) -> FrameVector:
        return next(v for v in self.vectors if v.name == name)

    def delta_coefficient(self, name: str, i: int) -> AsymptoticScalar:
        """Coefficient on delta_i when Omega's gamma's are traded for delta's."""
        return self.vector(name).coordinate(self.spec.gamma(i))


def _const_vec(name: str, v: dict) -> FrameVector:
    return FrameVector(name, {i: AsymptoticScalar.const(c) for i, c in v.items() if c}, True)


def canonical_frame(spec: LimitFrameSpec) -> AsymptoticFrame:
    """u_p -> b_p, v_q -> delta_q, (HS) f -> sigma_1, g -> xi_1; tails elsewhere."""
    vecs = []
    if spec.shape is Shape.HS:
        vecs.append(_const_vec("f", spec.sigma1()))
    vecs += [_const_vec(f"u{p}", spec.u(p)) for p in range(1, spec.n_u + 1)]
    vecs += [_const_vec(f"v{q}", spec.delta(q)) for q in range(1, spec.m + 1)]
    if spec.shape is Shape.HS:
        vecs.append(_const_vec("g", spec.xi1()))
    f3 = 1 if spec.shape is Shape.HS else spec.f3
    return AsymptoticFrame(spec, tuple(vecs), False, f3)


def _apply(nm: ExactMatrix, coords: Mapping[int, AsymptoticScalar]) -> dict:
    out: dict = {}
    for j, c in coords.items():
        for i, v in nm.col(j).items():
            t = c.scale(v)
            out[i] = out[i] + t if i in out else t
    return {i: c for i, c in out.items() if c.poly}


def untwist(frame: AsymptoticFrame) -> AsymptoticFrame:
    """v' = v + z N v, exact when N^2 v = 0."""
    if frame.untwisted:
        return frame
    nm = frame.spec.n_omega()
    z = AsymptoticScalar.z()
    out = []
    for v in frame.vectors:
        nv = _apply(nm, v.coords)
        if _apply(nm, nv):
            raise UnsupportedOrder(f"N^2 does not vanish on {v.name}")
        coords = dict(v.coords)
        for i, c in nv.items():
            t = c * z
            coords[i] = coords[i] + t if i in coords else t
        out.append(FrameVector(v.name, {i: c for i, c in coords.items() if c.poly}, v.tail))
    return AsymptoticFrame(frame.spec, tuple(out), True, frame.f3)


def frame_for(spec: LimitFrameSpec) -> AsymptoticFrame:
    return untwist(canonical_frame(spec))


# ---------------------------------------------------------------- the top wedge


def sparse_poly_det(columns: Sequence[Mapping[int, dict]], n: int) -> dict:
    """Determinant of an n x n matrix of polynomials given by sparse columns.

    Rows and columns are grouped into the connected pieces of the bipartite
    support graph; the determinant is the signed product over the pieces.
    """
    if len(columns) != n:
        raise ShapeError("determinant of a non-square matrix")
    parent = list(range(2 * n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for j, col in enumerate(columns):
        for i, p in col.items():
            if p:
                ra, rb = find(i), find(n + j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, tuple[list, list]] = {}
    for a in range(2 * n):
        rows, cols = groups.setdefault(find(a), ([], []))
        (rows if a < n else cols).append(a if a < n else a - n)
    row_order, col_order, blocks = [], [], []
    for key in sorted(groups):
        rows, cols = groups[key]
        if len(rows) != len(cols):
            return {}
        row_order += rows
        col_order += cols
        blocks.append((rows, cols))
    acc = {(0, 0): ONE}
    for rows, cols in blocks:
        sub = [[columns[c].get(r, {}) for c in cols] for r in rows]
        d = _poly_det(sub)
        if not d:
            return {}
        acc = _pmul(acc, d)
    if _parity(row_order) != _parity(col_order):
        acc = {k: -v for k, v in acc.items()}
    return acc


def _parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    p = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        p ^= (length - 1) & 1
    return p


def wedge_columns(frame: AsymptoticFrame) -> list[FrameVector]:
    """u1, conj u1, u2, ..., v1, conj v1, ..., (f, conj f, g, conj g)."""
    cols = []
    for v in frame.vectors:
        if v.name not in ("f", "g"):
            cols += [v, v.conj()]
    for name in ("f", "g"):
        if any(v.name == name for v in frame.vectors):
            v = frame.vector(name)
            cols += [v, v.conj()]
    return cols


def top_wedge(frame: AsymptoticFrame) -> AsymptoticScalar:
    """Coefficient of the wedge of all frame vectors and their conjugates on
    the volume element of Omega."""
    cols = wedge_columns(frame)
    n = frame.spec.dim
    if len(cols) != n:
        raise ShapeError(f"frame spans {len(cols)} of {n} dimensions with conjugates")
    polys = [{i: c.poly for i, c in v.coords.items()} for v in cols]
    tail = any(v.tail for v in cols)
    return AsymptoticScalar(sparse_poly_det(polys, n), tail)


def expected_wedge(spec: LimitFrameSpec) -> AsymptoticScalar:
    """c * prod_q 2i(y - Im x_qq) * sign, times Delta^2 in the HS shape.

    c is the beta-coefficient of u_1 ^ conj u_1 ^ ..., the sign
    (-1)^{m(m-1)/2} comes from sorting alpha_q ^ gamma_q pairs into Omega,
    and Delta = w11 conj(w12) - w12 conj(w11).
    """
    cols = []
    for p in range(spec.n_u):
        c = spec.b.select_columns([p])
        cols += [c.col(0), c.conj().col(0)]
    c = ExactMatrix(spec.n_beta, len(cols), cols).det().coeff if cols else ONE
    poly = {(0, 0): c * (ONE if (spec.m * (spec.m - 1) // 2) % 2 == 0 else -ONE)}
    for q in range(spec.m):
        im = (spec.x.entry(q, q) - spec.x.entry(q, q).conj()) * (-I) * HALF
        factor = {(0, 1): QI(0, 2)}
        if im:
            factor[(0, 0)] = QI(0, -2) * im
        poly = _pmul(poly, factor)
    if spec.shape is Shape.HS:
        w11, w12 = spec.w.entry(0, 0), spec.w.entry(0, 1)
        delta = w11 * w12.conj() - w12 * w11.conj()
        poly = _pmul(poly, {(0, 0): delta * delta})
    return AsymptoticScalar(poly, True)


def _x_diagonal(spec: LimitFrameSpec) -> bool:
    return all(not v for j, c in enumerate(spec.x.cols()) for i, v in c.items() if i != j)


@dataclass(frozen=True)
class WedgeResult:
    verdict: WedgeVerdict
    wedge: AsymptoticScalar
    expected: AsymptoticScalar

    @property
    def leading(self) -> str:
        if not self.wedge.poly:
            return "0"
        d = self.wedge.y_degree()
        return f"{self.wedge.coefficient(0, d).coeff}*y^{d}"


def ddbar_wedge_verdict(frame: AsymptoticFrame) -> WedgeResult:
    """Decide whether the top wedge of the untwisted frame is eventually
    nonzero, and cross-check its leading term against the product form."""
    frame = untwist(frame)
    wedge = top_wedge(frame)
    expected = expected_wedge(frame.spec)
    if wedge.depends_on_x():
        raise ConsistencyError("x survives in the top wedge")
    if not wedge.poly:
        return WedgeResult(WedgeVerdict.FAILS, wedge, expected)
    if not expected.poly:
        return WedgeResult(WedgeVerdict.INDETERMINATE, wedge, expected)
    if _x_diagonal(frame.spec):
        agree = wedge.poly == expected.poly
    else:
        agree = wedge.y_degree() == expected.y_degree() and wedge.leading() == expected.leading()
    if not agree:
        return WedgeResult(WedgeVerdict.INDETERMINATE, wedge, expected)
    return WedgeResult(WedgeVerdict.HOLDS, wedge, expected)


# ---------------------------------------------------------------- the period matrix


def _form(gram: ExactMatrix, a: FrameVector, b: FrameVector) -> AsymptoticScalar:
    """i * Q(a, conj b) over AsymptoticScalar."""
    acc = AsymptoticScalar.zero()
    for j, bj in b.coords.items():
        col = gram.col(j)
        bc = bj.conj()
        for i, ai in a.coords.items():
            g = col.get(i)
            if g:
                acc = acc + (ai * bc).scale(g * I)
    return acc.with_tail(a.tail or b.tail)


def period_matrix(frame: AsymptoticFrame, gram: ExactMatrix | None = None) -> AsymptoticHermitian:
    """M(a, b) = i Q(a', conj b') on the untwisted frame vectors, in frame order."""
    frame = untwist(frame)
    g = frame.spec.gram if gram is None else gram
    if g.twist:
        raise TwistError("the frame pairing must be untwisted")
    vs = frame.vectors
    rows = [[_form(g, a, b) for b in vs] for a in vs]
    for row in rows:
        for e in row:
            if e.depends_on_x():
                raise ConsistencyError("x survives in a period-matrix entry")
    return AsymptoticHermitian(rows)


def d_block(frame: AsymptoticFrame, matrix: AsymptoticHermitian | None = None) -> list[list[AsymptoticScalar]]:
    m = matrix or period_matrix(frame)
    idx = [i for i, v in enumerate(frame.vectors) if v.name.startswith("v")]
    return m.block(idx, idx)


def polarization_verdict(
    frame: AsymptoticFrame,
    gram: ExactMatrix | None = None,
    a_inf_pd: bool | None = None,
    q_pd: bool | None = None,
) -> bool:
    """Eventual signature of the period matrix: negative definite on the F^3
    frame vectors (listed first) and positive definite on the rest.

    With no F^3 vectors this is eventual positive definiteness.  Agreement
    with "a_inf PD and q PD imply polarized" is enforced.
    """
    frame = untwist(frame)
    verdict = eventual_inertia(period_matrix(frame, gram), frame.f3)
    if a_inf_pd is None:
        a_inf_pd = a_infinity_positive(frame.spec)
    if q_pd is None:
        q_pd = q_positive(frame.spec)
    if a_inf_pd and q_pd and not verdict and frame.spec.shape is Shape.CLEMENS:
        raise ConsistencyError("positive limit blocks but the period matrix is not eventually polarized")
    return verdict


# ---------------------------------------------------------------- instances


def instance_spec(inst, x_override: ExactMatrix | None = None) -> LimitFrameSpec:
    """Adapted limit spec of H^3 of the nearby fibre of an SNC instance.

    The instance's ``frame`` entry may carry {"x": rows} replacing the
    extension constants of the split limit.
    """
    from .steenbrink import limit_model

    lm = limit_model(inst)
    split = DeligneSplitting(lm.dim, lm.splitting_pieces())
    spec = adapted_basis(split, lm.n_op, lm.conjugation, lm.gram)
    x = x_override
    if x is None and inst.frame and "x" in inst.frame:
        x = ExactMatrix.from_rows(inst.frame["x"], ncols=spec.m)
    if x is not None:
        if x.shape != (spec.m, spec.m):
            raise ShapeError(f"frame x must be {spec.m}x{spec.m}")
        spec = spec.with_x(x)
    return spec


def instance_germ(inst):
    """(a0, N, Q~) of H^3 on the limit model of an SNC instance."""
    from .nilpotent import NilpotentOp
    from .period import PeriodGerm
    from .steenbrink import limit_model

    lm = limit_model(inst)
    return PeriodGerm(lm.a0(), NilpotentOp(lm.n_op, lm.m), lm.qtilde(), lm.conjugation)
