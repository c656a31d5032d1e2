"""Mixed Hodge structures over Q(i) and their Deligne splitting."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .errors import ShapeError, ValidationError
from .exactlinalg import (
    ExactMatrix,
    Filtration,
    QI,
    conj_subspace,
    contains,
    decreasing,
    full_space,
    hstack,
    increasing,
    intersect,
    same_subspace,
    span,
    subspace_sum,
    zero_space,
)


@dataclass(frozen=True)
class MixedHodge:
    """(H, W, F) with conj(v) = conjugation @ v-bar."""

    conjugation: ExactMatrix
    weight: Filtration
    hodge: Filtration

    @property
    def dim(self) -> int:
        return self.conjugation.nrows

    def conj_space(self, u: ExactMatrix) -> ExactMatrix:
        return conj_subspace(u, self.conjugation)

    def weights(self) -> list[int]:
        """Weights l with Gr_l^W nonzero."""
        return self.weight.jumps()

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "conjugation": self.conjugation.to_json(),
            "W": {str(k): v.to_json() for k, v in self.weight.steps.items()},
            "F": {str(k): v.to_json() for k, v in self.hodge.steps.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MixedHodge":
        n = int(data["dim"])
        conj = ExactMatrix.from_rows(data["conjugation"], ncols=n)
        w = {int(k): ExactMatrix.from_rows(v, ncols=None if v and v[0] else 0) if v else zero_space(n) for k, v in data["W"].items()}
        f = {int(k): ExactMatrix.from_rows(v, ncols=None if v and v[0] else 0) if v else zero_space(n) for k, v in data["F"].items()}
        return cls(conj, increasing(n, w), decreasing(n, f))


def pure(conjugation: ExactMatrix, hodge: Filtration, weight: int) -> MixedHodge:
    n = conjugation.nrows
    return MixedHodge(conjugation, increasing(n, {weight - 1: zero_space(n), weight: full_space(n)}), hodge)


def _graded_opposed(m: MixedHodge, l: int) -> bool:
    """Opposedness of F on Gr_l^W, tested upstairs in W_l."""
    wl, wl1 = m.weight.at(l), m.weight.at(l - 1)
    if wl.ncols == wl1.ncols:
        return True
    lo, hi = m.hodge.span_range()
    for p in range(min(lo, l + 1 - hi) - 1, max(hi, l + 1 - lo) + 2):
        a = subspace_sum(intersect(m.hodge.at(p), wl), wl1)
        b = subspace_sum(intersect(m.conj_space(m.hodge.at(l + 1 - p)), wl), wl1)
        if subspace_sum(a, b).ncols != wl.ncols:
            return False
        if intersect(a, b).ncols != wl1.ncols:
            return False
    return True


def validate_mhs(m: MixedHodge) -> list[str]:
    """Failed axioms as strings; empty means valid."""
    out: list[str] = []
    c = m.conjugation
    n = m.dim
    if c.shape != (n, n):
        return ["conjugation not square"]
    if c @ c.conj() != ExactMatrix.identity(n):
        out.append("conjugation not an involution")
        return out
    if m.weight.ambient != n or m.hodge.ambient != n:
        return out + ["filtration ambient mismatch"]
    out += [f"W: {p}" for p in m.weight.validate()]
    out += [f"F: {p}" for p in m.hodge.validate()]
    for k in m.weight.indices:
        if not same_subspace(m.weight.at(k), m.conj_space(m.weight.at(k))):
            out.append("W not real")
            break
    if out:
        return out
    lo, hi = m.weight.span_range()
    for l in range(lo, hi + 2):
        if not _graded_opposed(m, l):
            out.append(f"Gr_{l}^W: F not {l}-opposed")
    return out


@dataclass(frozen=True)
class DeligneSplitting:
    dim: int
    pieces: Mapping[tuple[int, int], ExactMatrix]

    def piece(self, p: int, q: int) -> ExactMatrix:
        return self.pieces.get((p, q), zero_space(self.dim))

    def dims(self) -> dict[tuple[int, int], int]:
        return {k: v.ncols for k, v in self.pieces.items() if v.ncols}

    def weight_step(self, k: int) -> ExactMatrix:
        return span_of([v for (p, q), v in self.pieces.items() if p + q <= k], self.dim)

    def hodge_step(self, p0: int) -> ExactMatrix:
        return span_of([v for (p, q), v in self.pieces.items() if p >= p0], self.dim)

    def lower(self, p0: int, q0: int) -> ExactMatrix:
        """Sum of I^{r,s} with r < p0 and s < q0."""
        return span_of([v for (p, q), v in self.pieces.items() if p < p0 and q < q0], self.dim)


def span_of(mats, n: int) -> ExactMatrix:
    mats = [m for m in mats if m.ncols]
    return span(hstack(*mats)) if mats else zero_space(n)


def deligne_splitting(m: MixedHodge) -> DeligneSplitting:
    """I^{p,q} = F^p n W_{p+q} n (Fbar^q n W_{p+q} + sum_{j>=2} Fbar^{q-j+1} n W_{p+q-j})."""
    problems = validate_mhs(m)
    if problems:
        raise ValidationError("; ".join(problems))
    n = m.dim
    wlo, whi = m.weight.span_range()
    flo, fhi = m.hodge.span_range()
    fbar: dict[int, ExactMatrix] = {}

    def fb(q: int) -> ExactMatrix:
        if q not in fbar:
            fbar[q] = m.conj_space(m.hodge.at(q))
        return fbar[q]

    pieces: dict[tuple[int, int], ExactMatrix] = {}
    for p in range(flo - 1, fhi + 1):
        for q in range(flo - 1, fhi + 1):
            k = p + q
            if k < wlo or k > whi + 1:
                continue
            wk = m.weight.at(k)
            left = intersect(m.hodge.at(p), wk)
            if not left.ncols:
                continue
            acc = intersect(fb(q), wk)
            j = 2
            while k - j >= wlo - 1:
                acc = subspace_sum(acc, intersect(fb(q - j + 1), m.weight.at(k - j)))
                j += 1
            piece = intersect(left, acc)
            if piece.ncols:
                pieces[(p, q)] = piece
    total = sum(v.ncols for v in pieces.values())
    if total != n:
        raise ValidationError(f"splitting pieces have total dimension {total}, expected {n}")
    return DeligneSplitting(n, dict(sorted(pieces.items())))


def splitting_reconstructs(m: MixedHodge, s: DeligneSplitting) -> bool:
    wlo, whi = m.weight.span_range()
    flo, fhi = m.hodge.span_range()
    if span_of(list(s.pieces.values()), s.dim).ncols != s.dim:
        return False
    for k in range(wlo - 1, whi + 2):
        if not same_subspace(s.weight_step(k), m.weight.at(k)):
            return False
    for p in range(flo - 1, fhi + 2):
        if not same_subspace(s.hodge_step(p), m.hodge.at(p)):
            return False
    return True


def congruence_holds(m: MixedHodge, s: DeligneSplitting) -> bool:
    """I^{p,q} = conj(I^{q,p}) modulo the sum of I^{r,s}, r<p, s<q."""
    for (p, q), v in s.pieces.items():
        low = s.lower(p, q)
        a = subspace_sum(v, low)
        b = subspace_sum(m.conj_space(s.piece(q, p)), low)
        if not same_subspace(a, b):
            return False
    for (p, q) in s.pieces:
        if (q, p) not in s.pieces:
            return False
    return True


def is_morphism_of_type(f: ExactMatrix, source: MixedHodge, target: MixedHodge, r: int) -> bool:
    """f(W_k) in W_{k+2r} and f(F^p) in F^{p+r}."""
    if f.shape != (target.dim, source.dim):
        raise ShapeError("map does not fit the structures")
    lo, hi = source.weight.span_range()
    for k in range(lo - 1, hi + 2):
        if not contains(target.weight.at(k + 2 * r), f @ source.weight.at(k)):
            return False
    lo, hi = source.hodge.span_range()
    for p in range(lo - 1, hi + 2):
        if not contains(target.hodge.at(p + r), f @ source.hodge.at(p)):
            return False
    return True


def mhs_from_splitting(pieces: Mapping[tuple[int, int], ExactMatrix], conjugation: ExactMatrix) -> MixedHodge:
    n = conjugation.nrows
    s = DeligneSplitting(n, dict(pieces))
    ws = sorted({p + q for p, q in pieces})
    ps = sorted({p for p, _ in pieces} | {q for _, q in pieces})
    w = {k: s.weight_step(k) for k in range(ws[0], ws[-1] + 1)} if ws else {}
    f = {p: s.hodge_step(p) for p in range(ps[0], ps[-1] + 1)} if ps else {}
    return MixedHodge(conjugation, increasing(n, w), decreasing(n, f))


# ---------------------------------------------------------------- random structures


def _rand_q(rng: random.Random, complex_: bool = True) -> QI:
    re = rng.randint(-3, 3)
    im = rng.randint(-3, 3) if complex_ else 0
    if rng.random() < 0.2:
        from fractions import Fraction

        re = Fraction(re, rng.randint(1, 3))
    return QI(re, im)


def random_mhs(rng: random.Random, max_dim: int = 6, max_index: int = 3):
    """A valid MHS together with the splitting it was built from.

    Pieces are drawn as conjugate pairs I^{p,q}, I^{q,p} (real for p = q),
    each perturbed by vectors of the pieces strictly below it in both
    indices; by uniqueness that is the Deligne splitting of the result.
    Conjugation is entrywise (standard real structure).
    """
    while True:
        n = rng.randint(1, max_dim)
        shape: dict[tuple[int, int], int] = {}
        left = n
        while left:
            p = rng.randint(0, max_index)
            q = rng.randint(0, max_index)
            size = 1 if p == q else 2
            if size > left:
                p, q, size = p, p, 1
            shape[(p, q)] = shape.get((p, q), 0) + 1
            if p != q:
                shape[(q, p)] = shape.get((q, p), 0) + 1
            left -= size
        conj = ExactMatrix.identity(n)
        order = sorted({(min(p, q), max(p, q)) for p, q in shape}, key=lambda t: (t[0] + t[1], t))
        built: dict[tuple[int, int], ExactMatrix] = {}
        for p, q in order:
            k = shape[(p, q)]
            base = [[_rand_q(rng, complex_=p != q) for _ in range(n)] for _ in range(k)]
            low_pq = [v for (r, s), v in built.items() if r < p and s < q]
            low_qp = [v for (r, s), v in built.items() if r < q and s < p]

            def perturb(vecs, lows):
                out = []
                for vec in vecs:
                    v = list(vec)
                    for lowm in lows:
                        for col in lowm.cols():
                            c = _rand_q(rng)
                            for i, x in col.items():
                                v[i] = v[i] + c * x
                    out.append(v)
                return out

            if p == q:
                built[(p, p)] = ExactMatrix.from_columns(n, perturb(base, low_pq))
            else:
                conj_base = [[x.conj() for x in vec] for vec in base]
                built[(p, q)] = ExactMatrix.from_columns(n, perturb(base, low_pq))
                built[(q, p)] = ExactMatrix.from_columns(n, perturb(conj_base, low_qp))
        total = hstack(*built.values())
        if total.rank() != n:
            continue
        pieces = {k: span(v) for k, v in built.items()}
        return mhs_from_splitting(pieces, conj), DeligneSplitting(n, pieces)
