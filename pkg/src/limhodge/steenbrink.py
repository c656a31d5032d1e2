"""Semistable degenerations through their strata: alternating restriction and
Gysin maps, the E1 page of the weight spectral sequence, graded pieces of the
nearby cohomology, the monodromy between them, and the graded pairings.

Conventions
-----------
* Piece cohomology is given in a Hodge-adapted basis; the vector types are
  listed in basis order.
* ``gram`` of H^d of a piece of complex dimension D is the matrix of
  (u, v) -> int u v for u in H^d, v in H^{2D-d}.  Actual integrals carry the
  factor (2 pi i)^D; the Gram matrices themselves are rational.
* The restriction from a face J = I minus its j-th index (1-based, indices
  sorted) into E_I enters psi with sign (-1)^{|I|-j}.  For two components this
  is psi(u1, u2) = u1|S - u2|S.
* Gysin maps are never input: G_k(phi s, c) = -G_{k+1}(s, psi c).
* T_m(r) = sum_{p >= max(0,-r)} H^{m-r-2p}(E(r+2p+1)), with Hodge types
  shifted by (r+p, r+p); d1 = psi + phi: T_m(r) -> T_{m+1}(r-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .errors import HypothesisFailure, LiftError, MissingPairing, NotACocycle, SchemaError, ShapeError
from .exactlinalg import (
    ONE,
    QI,
    TWO_PI_I,
    ExactMatrix,
    ExactScalar,
    QuotientMap,
    block_diag,
    contains,
    hstack,
    kernel,
    positive_definite,
    quotient_map,
    solve,
    span,
    zero_space,
)
from .errors import ContainmentError


@dataclass(frozen=True)
class CohomologyBlock:
    rank: int
    types: tuple  # ((p, q), ...) per basis vector
    conjugation: ExactMatrix
    gram: ExactMatrix | None = None

    @property
    def hodge_counts(self) -> dict:
        out: dict = {}
        for t in self.types:
            out[t] = out.get(t, 0) + 1
        return out


def _empty_block() -> CohomologyBlock:
    return CohomologyBlock(0, (), ExactMatrix.zeros(0, 0), None)


EMPTY = _empty_block()


@dataclass(frozen=True)
class Piece:
    id: str
    depth: int
    components: tuple  # indices of the depth-1 pieces containing it
    cohomology: Mapping[int, CohomologyBlock]

    def block(self, d: int) -> CohomologyBlock:
        return self.cohomology.get(d, EMPTY)

    def rank(self, d: int) -> int:
        return self.block(d).rank


@dataclass(frozen=True)
class SncInstance:
    name: str
    fiber_dim: int
    pieces: tuple
    restrictions: Mapping  # (from_id, to_id, degree) -> ExactMatrix
    kahler: Mapping | None = None  # (piece_id, degree) -> Lefschetz matrix H^d -> H^{d+2}
    a0: Mapping | None = None
    frame: Mapping | None = None
    notes: tuple = ()

    # structure
    @cached_property
    def by_id(self) -> dict:
        return {p.id: p for p in self.pieces}

    def depth_pieces(self, k: int) -> list:
        return [p for p in self.pieces if p.depth == k]

    @cached_property
    def max_depth(self) -> int:
        return max((p.depth for p in self.pieces), default=0)

    def stratum_dim(self, k: int) -> int:
        return self.fiber_dim + 1 - k

    def top(self, k: int) -> int:
        return 2 * self.stratum_dim(k)

    def rank(self, k: int, d: int) -> int:
        return sum(p.rank(d) for p in self.depth_pieces(k))

    def offsets(self, k: int, d: int) -> dict:
        out = {}
        off = 0
        for p in self.depth_pieces(k):
            out[p.id] = off
            off += p.rank(d)
        return out

    def faces(self, piece: Piece) -> list:
        """(face piece, sign) pairs."""
        if piece.depth <= 1:
            return []
        comps = piece.components
        out = []
        for j, c in enumerate(comps, start=1):
            sub = tuple(x for x in comps if x != c)
            for q in self.depth_pieces(piece.depth - 1):
                if tuple(q.components) == sub:
                    out.append((q, (-1) ** (len(comps) - j)))
        return out

    def is_face(self, small: Piece, big: Piece) -> bool:
        return set(small.components) <= set(big.components)


# ---------------------------------------------------------------- stratum maps


def restriction(inst: SncInstance, src: Piece, tgt: Piece, d: int) -> ExactMatrix:
    rs, rt = src.rank(d), tgt.rank(d)
    if rs == 0 or rt == 0:
        return ExactMatrix.zeros(rt, rs)
    m = inst.restrictions.get((src.id, tgt.id, d))
    if m is None:
        raise SchemaError(f"missing restriction {src.id} -> {tgt.id} in degree {d}")
    if m.shape != (rt, rs):
        raise SchemaError(f"restriction {src.id} -> {tgt.id} in degree {d} has shape {m.shape}, expected {(rt, rs)}")
    return m


def psi(inst: SncInstance, k: int, d: int) -> ExactMatrix:
    """H^d(E(k)) -> H^d(E(k+1))."""
    src_off = inst.offsets(k, d)
    tgt_off = inst.offsets(k + 1, d)
    ns, nt = inst.rank(k, d), inst.rank(k + 1, d)
    cols = [dict() for _ in range(ns)]
    for big in inst.depth_pieces(k + 1):
        if not big.rank(d):
            continue
        for face, sign in inst.faces(big):
            if not face.rank(d):
                continue
            r = restriction(inst, face, big, d)
            s = QI(sign)
            for j, col in enumerate(r.cols()):
                tgt = cols[src_off[face.id] + j]
                for i, v in col.items():
                    ii = tgt_off[big.id] + i
                    nv = tgt.get(ii, QI(0)) + s * v
                    if nv:
                        tgt[ii] = nv
                    else:
                        tgt.pop(ii, None)
    return ExactMatrix(nt, ns, cols)


def stratum_gram(inst: SncInstance, k: int, d: int) -> ExactMatrix:
    """Block diagonal H^d(E(k)) x H^{top-d}(E(k)) Gram."""
    top = inst.top(k)
    blocks = []
    for p in inst.depth_pieces(k):
        rd, re_ = p.rank(d), p.rank(top - d)
        if rd == 0 and re_ == 0:
            continue
        g = p.block(d).gram if rd else None
        if rd and re_ == 0:
            raise MissingPairing(f"{p.id}: H^{d} has no dual degree {top - d}")
        if g is None:
            if rd == 0:
                g = ExactMatrix.zeros(0, re_)
            else:
                raise MissingPairing(f"{p.id}: no Gram in degree {d}")
        blocks.append(g)
    if not blocks:
        return ExactMatrix.zeros(inst.rank(k, d), inst.rank(k, top - d))
    return block_diag(*blocks)


def phi(inst: SncInstance, k: int, d: int) -> ExactMatrix:
    """Gysin H^d(E(k+1)) -> H^{d+2}(E(k)), the signed Gram adjoint of psi."""
    nt, ns = inst.rank(k, d + 2), inst.rank(k + 1, d)
    if nt == 0 or ns == 0:
        return ExactMatrix.zeros(nt, ns)
    e = inst.top(k) - d - 2
    g_small = stratum_gram(inst, k + 1, d)
    g_big = stratum_gram(inst, k, d + 2)
    try:
        g_big_inv = g_big.inverse()
    except (ZeroDivisionError, ShapeError) as exc:
        raise MissingPairing(f"Gram of E({k}) in degree {d + 2} is not invertible") from exc
    return -(g_small @ psi(inst, k, e) @ g_big_inv).T


def alternating_maps(inst: SncInstance, k: int, d: int) -> tuple:
    return psi(inst, k, d), phi(inst, k, d)


def conjugation(inst: SncInstance, k: int, d: int) -> ExactMatrix:
    blocks = [p.block(d).conjugation for p in inst.depth_pieces(k) if p.rank(d)]
    return block_diag(*blocks) if blocks else ExactMatrix.zeros(0, 0)


def lefschetz(inst: SncInstance, k: int, d: int) -> ExactMatrix:
    """Cup with the Kaehler restriction, H^d(E(k)) -> H^{d+2}(E(k))."""
    blocks = []
    for p in inst.depth_pieces(k):
        rs, rt = p.rank(d), p.rank(d + 2)
        if rs == 0 and rt == 0:
            continue
        m = (inst.kahler or {}).get((p.id, d))
        if m is None:
            if rs and rt:
                raise HypothesisFailure(f"no Kaehler data on {p.id} in degree {d}")
            m = ExactMatrix.zeros(rt, rs)
        blocks.append(m)
    return block_diag(*blocks) if blocks else ExactMatrix.zeros(inst.rank(k, d + 2), inst.rank(k, d))


# ---------------------------------------------------------------- E1 page


@dataclass(frozen=True)
class Summand:
    p: int
    k: int
    d: int
    offset: int
    rank: int
    shift: int


@dataclass(frozen=True)
class E1Term:
    m: int
    r: int
    summands: tuple
    types: tuple
    conjugation: ExactMatrix

    @property
    def dim(self) -> int:
        return len(self.types)

    def summand(self, k: int) -> Summand | None:
        return next((s for s in self.summands if s.k == k), None)

    def label(self) -> str:
        return " + ".join(f"H^{s.d}(E({s.k}))" for s in self.summands if s.rank) or "0"


def e1_term(inst: SncInstance, m: int, r: int) -> E1Term:
    summands = []
    types = []
    conjs = []
    off = 0
    p = max(0, -r)
    while True:
        k = r + 2 * p + 1
        d = m - r - 2 * p
        if d < 0 or k > inst.max_depth:
            break
        if k >= 1 and d <= inst.top(k):
            rank = inst.rank(k, d)
            summands.append(Summand(p, k, d, off, rank, r + p))
            for piece in inst.depth_pieces(k):
                for (a, b) in piece.block(d).types:
                    types.append((a + r + p, b + r + p))
            if rank:
                conjs.append(conjugation(inst, k, d))
            off += rank
        p += 1
    conj = block_diag(*conjs) if conjs else ExactMatrix.zeros(0, 0)
    return E1Term(m, r, tuple(summands), tuple(types), conj)


def d1(inst: SncInstance, m: int, r: int) -> ExactMatrix:
    """T_m(r) -> T_{m+1}(r-1)."""
    src = e1_term(inst, m, r)
    tgt = e1_term(inst, m + 1, r - 1)
    cols = [dict() for _ in range(src.dim)]

    def place(block: ExactMatrix, s: Summand, t: Summand):
        for j, col in enumerate(block.cols()):
            c = cols[s.offset + j]
            for i, v in col.items():
                ii = t.offset + i
                nv = c.get(ii, QI(0)) + v
                if nv:
                    c[ii] = nv
                else:
                    c.pop(ii, None)

    for s in src.summands:
        if not s.rank:
            continue
        for t in tgt.summands:
            if t.p == s.p + 1 and t.k == s.k + 1 and t.d == s.d and t.rank:
                place(psi(inst, s.k, s.d), s, t)
            if t.p == s.p and t.k == s.k - 1 and t.d == s.d + 2 and t.rank:
                place(phi(inst, s.k - 1, s.d), s, t)
    return ExactMatrix(tgt.dim, src.dim, cols)


@dataclass(frozen=True)
class E1Page:
    m: int
    terms: Mapping  # (degree, r) -> E1Term
    differentials: Mapping  # (degree, r) -> d1 matrix from that term

    def table(self) -> list:
        rows = []
        for (deg, r), t in sorted(self.terms.items()):
            if deg == self.m:
                rows.append({"r": r, "weight": self.m + r, "term": t.label(), "dim": t.dim})
        return rows


def e1_page(inst: SncInstance, m: int) -> E1Page:
    n = inst.fiber_dim
    terms = {}
    diffs = {}
    for deg in (m - 1, m, m + 1):
        for r in range(-n - 1, n + 2):
            terms[(deg, r)] = e1_term(inst, deg, r)
    for deg in (m - 1, m):
        for r in range(-n, n + 2):
            diffs[(deg, r)] = d1(inst, deg, r)
    for r in range(-n, n + 2):
        prod = diffs[(m, r - 1)] @ diffs[(m - 1, r)] if (m, r - 1) in diffs else None
        if prod is not None and not prod.is_zero():
            raise ShapeError(f"d1 o d1 != 0 at degree {m - 1}, r = {r}")
    return E1Page(m, terms, diffs)


def d1_squared_zero(inst: SncInstance, m: int) -> bool:
    n = inst.fiber_dim
    for r in range(-n, n + 2):
        if not (d1(inst, m + 1, r - 1) @ d1(inst, m, r)).is_zero():
            return False
    return True


# ---------------------------------------------------------------- graded pieces


def _restrict(m: ExactMatrix, rows, cols) -> ExactMatrix:
    return m.submatrix(rows, cols)


def _embed(v: ExactMatrix, idx, n: int) -> ExactMatrix:
    return ExactMatrix(n, v.ncols, [{idx[i]: x for i, x in c.items()} for c in v.cols()])


@dataclass(frozen=True)
class GradedPiece:
    weight: int
    m: int
    term: E1Term
    reps: ExactMatrix  # columns in T_m(r) coordinates
    types: tuple
    cocycles: ExactMatrix
    boundaries: ExactMatrix
    quotient: QuotientMap
    outgoing: ExactMatrix
    incoming: ExactMatrix

    @property
    def r(self) -> int:
        return self.weight - self.m

    @property
    def dim(self) -> int:
        return self.reps.ncols

    def hodge_counts(self) -> dict:
        out: dict = {}
        for t in self.types:
            out[t] = out.get(t, 0) + 1
        return out

    def project(self, vs: ExactMatrix) -> ExactMatrix:
        """Coordinates in the representative basis of cocycles vs."""
        if not (self.outgoing @ vs).is_zero():
            raise NotACocycle("not in the kernel of d1")
        return self.quotient.project(vs, check=False)

    @cached_property
    def conj_matrix(self) -> ExactMatrix:
        c = self.term.conjugation
        if not self.dim:
            return ExactMatrix.zeros(0, 0)
        return self.project(c @ self.reps.conj())


def graded_piece(inst: SncInstance, m: int, w: int) -> GradedPiece:
    r = w - m
    term = e1_term(inst, m, r)
    out = d1(inst, m, r)
    inc = d1(inst, m - 1, r + 1)
    n = term.dim
    tgt_types = e1_term(inst, m + 1, r - 1).types
    src_types = e1_term(inst, m - 1, r + 1).types
    by_type: dict = {}
    for i, t in enumerate(term.types):
        by_type.setdefault(t, []).append(i)
    reps, types, kers, ims = [], [], [], []
    for t in sorted(by_type, key=lambda t: (-t[0], t[1])):
        idx = by_type[t]
        rows_out = [i for i, tt in enumerate(tgt_types) if tt == t]
        cols_in = [i for i, tt in enumerate(src_types) if tt == t]
        k_local = kernel(_restrict(out, rows_out, idx))
        k_t = _embed(k_local, idx, n)
        im_t = span(inc.select_columns(cols_in)) if cols_in else zero_space(n)
        q = quotient_map(k_t, im_t)
        kers.append(k_t)
        ims.append(im_t)
        reps.append(q.section)
        types += [t] * q.section.ncols
    cocycles = span(hstack(*kers)) if kers else zero_space(n)
    boundaries = span(hstack(*ims)) if ims else zero_space(n)
    rep_m = hstack(*reps) if reps else zero_space(n)
    if not (out @ cocycles).is_zero():
        raise ShapeError("d1 mixes Hodge types")
    quo = QuotientMap.with_section(boundaries, rep_m)
    return GradedPiece(w, m, term, rep_m, tuple(types), cocycles, boundaries, quo, out, inc)


def graded_dims(inst: SncInstance, m: int) -> dict:
    n = inst.fiber_dim
    out = {}
    for r in range(-n, n + 1):
        g = graded_piece(inst, m, m + r)
        if g.dim:
            out[m + r] = g.dim
    return out


def betti(inst: SncInstance, m: int) -> int:
    return sum(graded_dims(inst, m).values())


def _shift_matrix(inst: SncInstance, m: int, r: int, sign: int) -> ExactMatrix:
    """sign * identity on shared summands, T_m(r) -> T_m(r-2)."""
    src = e1_term(inst, m, r)
    tgt = e1_term(inst, m, r - 2)
    cols = [dict() for _ in range(src.dim)]
    for s in src.summands:
        t = next((t for t in tgt.summands if t.k == s.k and t.d == s.d and t.p == s.p + 1), None)
        if t is None:
            continue
        for j in range(s.rank):
            cols[s.offset + j][t.offset + j] = QI(sign)
    return ExactMatrix(tgt.dim, src.dim, cols)


def graded_monodromy(inst: SncInstance, m: int, sign: int = -1) -> dict:
    """w -> matrix of N_gr: Gr_w -> Gr_{w-2} in representative coordinates.

    ``sign = -1`` is the normalisation (-1)*identity; ``sign = +1`` gives the
    identity-induced operator used for positivity.
    """
    n = inst.fiber_dim
    out = {}
    pieces = {m + r: graded_piece(inst, m, m + r) for r in range(-n - 2, n + 1)}
    for r in range(-n, n + 1):
        w = m + r
        src, tgt = pieces[w], pieces[w - 2]
        if not src.dim:
            out[w] = ExactMatrix.zeros(tgt.dim, 0)
            continue
        img = _shift_matrix(inst, m, r, sign) @ src.reps
        try:
            out[w] = tgt.project(img)
        except (NotACocycle, ContainmentError) as exc:
            raise LiftError(f"N does not lift on weight {w}") from exc
    return out


def n_iso(inst: SncInstance, m: int) -> dict:
    """For k >= 1: is N^k: Gr_{m+k} -> Gr_{m-k} bijective?"""
    ns = graded_monodromy(inst, m)
    out = {}
    for k in range(1, inst.fiber_dim + 1):
        acc = None
        for step in range(k):
            w = m + k - 2 * step
            mat = ns.get(w)
            if mat is None:
                acc = None
                break
            acc = mat if acc is None else mat @ acc
        if acc is None:
            continue
        if acc.nrows == 0 and acc.ncols == 0:
            continue
        out[k] = acc.nrows == acc.ncols and acc.rank() == acc.nrows
    return out


# ---------------------------------------------------------------- pairings


def _check_threefold(inst: SncInstance):
    if inst.fiber_dim != 3:
        raise ShapeError("graded pairings are defined here for threefold fibres only")


def _untwisted(inst: SncInstance, u: ExactMatrix, tu: E1Term, v: ExactMatrix, tv: E1Term) -> ExactScalar:
    return pairing_matrix(inst, u, tu, v, tv)[0, 0]


def _cocycle_check(inst, m, r, v):
    if not (d1(inst, m, r) @ v).is_zero():
        raise NotACocycle(f"representative is not closed in T_{m}({r})")


def pairing_gr33_untwisted(inst: SncInstance, u: ExactMatrix, v: ExactMatrix, check: bool = True) -> ExactScalar:
    """-(int_{E(1)} a c + int_{E(3)} b d) on Gram level."""
    _check_threefold(inst)
    t = e1_term(inst, 3, 0)
    if check:
        _cocycle_check(inst, 3, 0, u)
        _cocycle_check(inst, 3, 0, v)
    return _untwisted(inst, u, t, v, t)


def pairing_gr33(inst: SncInstance, u: ExactMatrix, v: ExactMatrix) -> ExactScalar:
    """(2 pi i)^3 ( (-1)^3/(2 pi i)^3 int_{E(1)} + (-1)^3/(2 pi i) int_{E(3)} ).

    With int_{E(k)} = Gram * (2 pi i)^{dim E(k)} both terms are untwisted,
    so the value is (2 pi i)^3 times the Gram-level number.
    """
    return TWO_PI_I ** 3 * pairing_gr33_untwisted(inst, u, v)


def pairing_gr24_untwisted(inst: SncInstance, u: ExactMatrix, v: ExactMatrix, check: bool = True) -> ExactScalar:
    _check_threefold(inst)
    tu = e1_term(inst, 3, 1)
    tv = e1_term(inst, 3, -1)
    if check:
        _cocycle_check(inst, 3, 1, u)
        _cocycle_check(inst, 3, -1, v)
    return _untwisted(inst, u, tu, v, tv)


def pairing_gr24(inst: SncInstance, u: ExactMatrix, v: ExactMatrix) -> ExactScalar:
    """(2 pi i)^3 ( (-1)^3/(2 pi i)^2 int_{E(2)} + (-1)^3 int_{E(4)} )."""
    return TWO_PI_I ** 3 * pairing_gr24_untwisted(inst, u, v)


RESIDUAL_TWIST = "(2πi)^3"


def weil(t) -> QI:
    """i^{p-q}."""
    e = (t[0] - t[1]) % 4
    return [QI(1), QI(0, 1), QI(-1), QI(0, -1)][e]


def pairing_matrix(inst: SncInstance, u: ExactMatrix, tu: E1Term, v: ExactMatrix, tv: E1Term) -> ExactMatrix:
    """Gram-level pairing of the columns of u (in tu) with those of v (in tv):
    minus the sum over shared strata of int u_k v_k."""
    acc = ExactMatrix.zeros(u.ncols, v.ncols)
    for su in tu.summands:
        sv = tv.summand(su.k)
        if sv is None or not su.rank or not sv.rank or su.d + sv.d != inst.top(su.k):
            continue
        g = stratum_gram(inst, su.k, su.d)
        uu = u.submatrix(range(su.offset, su.offset + su.rank), range(u.ncols))
        vv = v.submatrix(range(sv.offset, sv.offset + sv.rank), range(v.ncols))
        acc = acc + uu.T @ g @ vv
    return -acc


def _sparse_hermitian(inst, reps, conj_reps, types, tu, tv) -> ExactMatrix:
    """i^{p-q} Q(u_i, conj u_j) for all representative pairs."""
    if not types:
        return ExactMatrix.zeros(0, 0)
    w = ExactMatrix.diag([weil(t) for t in types])
    return w @ pairing_matrix(inst, reps, tu, conj_reps, tv)


def primitive_modify(inst: SncInstance, piece: GradedPiece, rep: ExactMatrix, rep_type=None) -> ExactMatrix:
    """Add a boundary so that the Lefschetz image of the main component vanishes.

    Gr_3: main component in H^3(E(1)); Gr_4: in H^2(E(2)).
    """
    _check_threefold(inst)
    k = {3: 1, 4: 2}.get(piece.weight)
    if k is None or piece.m != 3:
        raise ValueError("primitive_modify handles Gr_3 and Gr_4 of H^3")
    s = piece.term.summand(k)
    if s is None or not s.rank:
        return rep
    lef = lefschetz(inst, k, s.d)
    rows = list(range(s.offset, s.offset + s.rank))

    def main(v: ExactMatrix) -> ExactMatrix:
        return lef @ v.submatrix(rows, range(v.ncols))

    target = main(rep)
    if target.is_zero():
        return rep
    inc = piece.incoming
    if rep_type is not None:
        src_types = e1_term(inst, piece.m - 1, piece.r + 1).types
        cols = [i for i, t in enumerate(src_types) if t == rep_type]
        inc = inc.select_columns(cols)
    if inc.ncols == 0:
        raise HypothesisFailure("Lefschetz image of the boundaries does not reach the class")
    try:
        x = solve(main(inc), -target)
    except ContainmentError as exc:
        raise HypothesisFailure("Lefschetz image of the boundaries does not reach the class") from exc
    return rep + inc @ x


def gr3_hermitian(inst: SncInstance, modify: bool = True) -> tuple:
    """(h, piece) with h_ij = Q(C u_i, conj u_j) on Gr_3 H^3."""
    piece = graded_piece(inst, 3, 3)
    reps = piece.reps
    if modify and piece.dim:
        cols = [primitive_modify(inst, piece, reps.select_columns([j]), piece.types[j]) for j in range(piece.dim)]
        reps = hstack(*cols)
    conj_reps = piece.term.conjugation @ reps.conj()
    t = piece.term
    return _sparse_hermitian(inst, reps, conj_reps, piece.types, t, t), piece


def gr3_polarization_verdict(inst: SncInstance) -> bool:
    h, piece = gr3_hermitian(inst)
    if not piece.dim:
        return True
    return positive_definite(h)


def gr4_hermitian(inst: SncInstance, modify: bool = True) -> tuple:
    """h_ij = Q(C u_i, N conj u_j) on Gr_4 H^3, N the identity-induced map."""
    piece = graded_piece(inst, 3, 4)
    reps = piece.reps
    if modify and piece.dim:
        cols = [primitive_modify(inst, piece, reps.select_columns([j]), piece.types[j]) for j in range(piece.dim)]
        reps = hstack(*cols)
    conj_reps = piece.term.conjugation @ reps.conj()
    shifted = _shift_matrix(inst, 3, 1, +1) @ conj_reps
    return _sparse_hermitian(inst, reps, shifted, piece.types, piece.term, e1_term(inst, 3, -1)), piece


def gr4_polarization_verdict(inst: SncInstance) -> bool:
    h, piece = gr4_hermitian(inst)
    if not piece.dim:
        return True
    return positive_definite(h)


# ---------------------------------------------------------------- validation


def _type_compatible(m: ExactMatrix, src_types, tgt_types, shift=(0, 0)) -> bool:
    for j, col in enumerate(m.cols()):
        a, b = src_types[j]
        for i in col:
            if tgt_types[i] != (a + shift[0], b + shift[1]):
                return False
    return True


def validate_instance(inst: SncInstance, full: bool = True) -> list:
    problems = []
    ids = [p.id for p in inst.pieces]
    if len(set(ids)) != len(ids):
        problems.append("duplicate piece ids")
    for p in inst.pieces:
        dim = inst.stratum_dim(p.depth)
        top = 2 * dim
        for d, blk in p.cohomology.items():
            if blk.rank == 0:
                continue
            if d < 0 or d > top:
                problems.append(f"{p.id}: degree {d} outside 0..{top}")
                continue
            if len(blk.types) != blk.rank:
                problems.append(f"{p.id} H^{d}: Hodge counts do not add up to the rank")
            if any(a + b != d for a, b in blk.types):
                problems.append(f"{p.id} H^{d}: Hodge type of the wrong weight")
            c = blk.conjugation
            if c.shape != (blk.rank, blk.rank):
                problems.append(f"{p.id} H^{d}: conjugation shape")
                continue
            if c @ c.conj() != ExactMatrix.identity(blk.rank):
                problems.append(f"{p.id} H^{d}: conjugation is not an involution")
            if not _type_compatible(c, blk.types, [(b, a) for a, b in blk.types]):
                problems.append(f"{p.id} H^{d}: conjugation does not swap Hodge types")
            e = top - d
            other = p.block(e)
            g = blk.gram
            if g is None:
                problems.append(f"{p.id} H^{d}: missing Gram")
                continue
            if g.shape != (blk.rank, other.rank):
                problems.append(f"{p.id} H^{d}: Gram shape {g.shape}, expected {(blk.rank, other.rank)}")
                continue
            if g.nrows != g.ncols or g.det().is_zero():
                problems.append(f"{p.id} H^{d}: Gram is degenerate")
            if other.gram is not None and other.gram.shape == (other.rank, blk.rank):
                sign = (-1) ** (d * e)
                if g != other.gram.T.scale(sign):
                    problems.append(f"{p.id} H^{d}: Gram not graded symmetric")
            if other.conjugation.shape == (other.rank, other.rank):
                if c.T @ g @ other.conjugation != g.conj():
                    problems.append(f"{p.id} H^{d}: non-hermitian Gram (not compatible with conjugation)")
            for j, col in enumerate(g.cols()):
                for i in col:
                    a, b = blk.types[i]
                    if other.types[j] != (dim - a, dim - b):
                        problems.append(f"{p.id} H^{d}: Gram pairs incompatible Hodge types")
                        break
                else:
                    continue
                break
    for (src, tgt, d), m in inst.restrictions.items():
        if src not in inst.by_id or tgt not in inst.by_id:
            problems.append(f"restriction {src}->{tgt}: unknown piece")
            continue
        ps, pt = inst.by_id[src], inst.by_id[tgt]
        if pt.depth != ps.depth + 1 or not inst.is_face(ps, pt):
            problems.append(f"restriction {src}->{tgt}: not a face inclusion")
            continue
        bs, bt = ps.block(d), pt.block(d)
        if m.shape != (bt.rank, bs.rank):
            problems.append(f"restriction {src}->{tgt} H^{d}: shape {m.shape}")
            continue
        if bs.rank and bt.rank:
            if m @ bs.conjugation != bt.conjugation @ m.conj():
                problems.append(f"restriction {src}->{tgt} H^{d}: not real")
            if not _type_compatible(m, bs.types, bt.types):
                problems.append(f"restriction {src}->{tgt} H^{d}: mixes Hodge types")
    for p in inst.pieces:
        if p.depth >= 2 and len(inst.faces(p)) != p.depth:
            problems.append(f"{p.id}: expected {p.depth} faces, found {len(inst.faces(p))}")
    if problems or not full:
        return problems
    # composites of restrictions are path independent
    for big in inst.pieces:
        if big.depth < 3:
            continue
        for d in big.cohomology:
            seen = {}
            for mid, _ in inst.faces(big):
                for small, _ in inst.faces(mid):
                    try:
                        comp = restriction(inst, mid, big, d) @ restriction(inst, small, mid, d)
                    except SchemaError as exc:
                        problems.append(str(exc))
                        continue
                    if small.id in seen and seen[small.id] != comp:
                        problems.append(f"restrictions {small.id}->{big.id} in degree {d} depend on the path")
                    seen[small.id] = comp
    if problems:
        return problems
    try:
        for m in range(0, 2 * inst.fiber_dim + 1):
            if not d1_squared_zero(inst, m):
                problems.append(f"d1 o d1 != 0 in degree {m} (triple-point condition fails)")
    except (SchemaError, MissingPairing) as exc:
        problems.append(str(exc))
    if inst.kahler:
        for (pid, d), m in inst.kahler.items():
            p = inst.by_id.get(pid)
            if p is None:
                problems.append(f"Kaehler data for unknown piece {pid}")
            elif m.shape != (p.rank(d + 2), p.rank(d)):
                problems.append(f"Kaehler data {pid} degree {d}: shape {m.shape}")
    return problems


# ---------------------------------------------------------------- the limit model


@dataclass(frozen=True)
class LimitModel:
    """H^m of the nearby fibre presented as the direct sum of its graded
    pieces, each in a Hodge-adapted representative basis.

    ``n_op`` is the identity-induced monodromy logarithm (the (-1)*identity
    normalisation of graded_monodromy differs by a sign); ``gram`` is the
    untwisted pairing S, so Q~ = i^m S.
    """

    inst: SncInstance
    m: int
    pieces: Mapping  # weight -> GradedPiece
    offsets: Mapping  # weight -> first coordinate
    types: tuple
    conjugation: ExactMatrix
    n_op: ExactMatrix
    gram: ExactMatrix

    @property
    def dim(self) -> int:
        return len(self.types)

    def weight_of(self, i: int) -> int:
        return sum(self.types[i])

    def embed(self, w: int, coords: ExactMatrix) -> ExactMatrix:
        off = self.offsets[w]
        return ExactMatrix(self.dim, coords.ncols, [{off + i: v for i, v in c.items()} for c in coords.cols()])

    def qtilde(self) -> ExactMatrix:
        return self.gram.scale(weil((self.m, 0)))

    def a0(self) -> ExactMatrix:
        data = self.inst.a0
        if not data:
            raise ShapeError("instance carries no a0")
        if data["degree"] != self.m:
            raise ShapeError("a0 lives in another degree")
        w = self.m + data["r"]
        piece = self.pieces[w]
        vec = ExactMatrix.column_vector(data["vector"])
        if vec.nrows != piece.term.dim:
            raise ShapeError(f"a0 has {vec.nrows} coordinates, T_{self.m}({data['r']}) has {piece.term.dim}")
        return self.embed(w, piece.project(vec))

    def splitting_pieces(self) -> dict:
        out: dict = {}
        for i, t in enumerate(self.types):
            out.setdefault(t, []).append(i)
        return {t: ExactMatrix(self.dim, len(ix), [{i: QI(1)} for i in ix]) for t, ix in out.items()}


def limit_model(inst: SncInstance, m: int = 3) -> LimitModel:
    _check_threefold(inst)
    if m != 3:
        raise ShapeError("the limit model is assembled for the middle degree")
    n = inst.fiber_dim
    pieces = {}
    for r in range(-n, n + 1):
        g = graded_piece(inst, m, m + r)
        if g.dim:
            pieces[m + r] = g
    if set(pieces) - {2, 3, 4}:
        raise ShapeError(f"graded pieces in weights {sorted(pieces)}; only 2, 3, 4 are modelled")
    offsets = {}
    types = []
    conjs = []
    for w in sorted(pieces):
        offsets[w] = len(types)
        types += pieces[w].types
        conjs.append(pieces[w].conj_matrix)
    dim = len(types)
    conj = block_diag(*conjs) if conjs else ExactMatrix.zeros(0, 0)
    cols = [dict() for _ in range(dim)]
    if 4 in pieces and 2 in pieces:
        nmat = graded_monodromy(inst, m, sign=+1)[4]
        o4, o2 = offsets[4], offsets[2]
        for j, c in enumerate(nmat.cols()):
            for i, v in c.items():
                cols[o4 + j][o2 + i] = v
    n_op = ExactMatrix(dim, dim, cols)
    gcols = [dict() for _ in range(dim)]

    def put(mat: ExactMatrix, ro: int, co: int):
        for j, c in enumerate(mat.cols()):
            for i, v in c.items():
                gcols[co + j][ro + i] = v

    if 3 in pieces:
        p3 = pieces[3]
        put(pairing_matrix(inst, p3.reps, p3.term, p3.reps, p3.term), offsets[3], offsets[3])
    if 4 in pieces and 2 in pieces:
        p4, p2 = pieces[4], pieces[2]
        s42 = pairing_matrix(inst, p4.reps, p4.term, p2.reps, p2.term)
        put(s42, offsets[4], offsets[2])
        put(-s42.T, offsets[2], offsets[4])
    gram = ExactMatrix(dim, dim, gcols)
    return LimitModel(inst, m, pieces, offsets, tuple(types), conj, n_op, gram)
