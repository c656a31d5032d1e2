"""Instance files, the two built-in geometries and random SNC generators.

Matrices in JSON are either dense row lists of strings ("a+b*i") or sparse
objects ``{"shape": [r, c], "entries": [[i, j, "v"], ...]}``.
"""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Mapping
from urllib.parse import parse_qs, urlparse

from .errors import FriedmanConditionFailure, ParseError, SchemaError
from .exactlinalg import QI, ExactMatrix, as_qi, block_diag, kernel
from .steenbrink import CohomologyBlock, Piece, SncInstance, validate_instance

SCHEMA_VERSION = 1

# ---------------------------------------------------------------- matrix io


def matrix_to_json(m: ExactMatrix):
    if m.nrows * m.ncols and m.nnz() * 4 < m.nrows * m.ncols:
        entries = []
        for j, col in enumerate(m.cols()):
            for i, v in col.items():
                entries.append([i, j, str(v)])
        entries.sort()
        return {"shape": [m.nrows, m.ncols], "entries": entries}
    return {"shape": [m.nrows, m.ncols], "rows": [[str(x) for x in row] for row in m.dense()]}


def matrix_from_json(data) -> ExactMatrix:
    try:
        if isinstance(data, list):
            return ExactMatrix.from_rows(data) if data else ExactMatrix.zeros(0, 0)
        r, c = (int(x) for x in data["shape"])
        if "rows" in data:
            rows = data["rows"]
            if len(rows) != r:
                raise SchemaError(f"matrix declares {r} rows, has {len(rows)}")
            return ExactMatrix.from_rows(rows, ncols=c) if r else ExactMatrix.zeros(0, c)
        cols = [dict() for _ in range(c)]
        for i, j, v in data["entries"]:
            if not (0 <= i < r and 0 <= j < c):
                raise SchemaError(f"entry ({i},{j}) outside shape {(r, c)}")
            q = as_qi(v)
            if q:
                cols[j][i] = q
        return ExactMatrix(r, c, cols)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"bad matrix: {exc}") from exc


# ---------------------------------------------------------------- instance io


def _types_from_hodge(hodge: Mapping) -> tuple:
    items = []
    for key, count in hodge.items():
        p, q = (int(x) for x in key.split(","))
        items.append(((p, q), int(count)))
    items.sort(key=lambda t: (-t[0][0], t[0][1]))
    return tuple(t for t, c in items for _ in range(c))


def instance_to_json(inst: SncInstance) -> dict:
    strata = []
    for k in range(1, inst.max_depth + 1):
        pieces = []
        for p in inst.depth_pieces(k):
            coh = {}
            for d in sorted(p.cohomology):
                b = p.cohomology[d]
                if not b.rank:
                    continue
                entry = {
                    "rank": b.rank,
                    "hodge": {f"{a},{c}": n for (a, c), n in b.hodge_counts.items()},
                    "types": [list(t) for t in b.types],
                    "conjugation": matrix_to_json(b.conjugation),
                }
                if b.gram is not None:
                    entry["gram_into_top"] = matrix_to_json(b.gram)
                coh[str(d)] = entry
            item = {"id": p.id, "cohomology": coh}
            if k > 1:
                item["components"] = list(p.components)
            pieces.append(item)
        strata.append({"depth": k, "pieces": pieces})
    out = {
        "schema": SCHEMA_VERSION,
        "name": inst.name,
        "fiber_dim": inst.fiber_dim,
        "strata": strata,
        "restrictions": [
            {"from": s, "to": t, "degree": d, "matrix": matrix_to_json(m)}
            for (s, t, d), m in sorted(inst.restrictions.items())
        ],
    }
    if inst.kahler:
        out["kahler"] = {
            "lefschetz": [
                {"piece": pid, "degree": d, "matrix": matrix_to_json(m)} for (pid, d), m in sorted(inst.kahler.items())
            ]
        }
    if inst.a0:
        out["a0"] = {"degree": inst.a0["degree"], "r": inst.a0["r"], "vector": [str(x) for x in inst.a0["vector"]]}
    if inst.frame:
        out["frame"] = {k: matrix_to_json(v) if isinstance(v, ExactMatrix) else v for k, v in inst.frame.items()}
    return out


def instance_from_json(data: Mapping, validate: bool = True) -> SncInstance:
    if not isinstance(data, Mapping):
        raise SchemaError("instance must be a JSON object")
    problems = []
    if data.get("schema") != SCHEMA_VERSION:
        problems.append(f"unsupported schema version {data.get('schema')!r}")
    for key in ("name", "fiber_dim", "strata"):
        if key not in data:
            problems.append(f"missing field {key!r}")
    if problems:
        raise SchemaError(problems)
    try:
        pieces = []
        depth1_index: dict = {}
        for stratum in data["strata"]:
            k = int(stratum["depth"])
            for pd in stratum["pieces"]:
                blocks = {}
                for dkey, bd in pd.get("cohomology", {}).items():
                    rank = int(bd["rank"])
                    if "types" in bd:
                        types = tuple(tuple(int(x) for x in t) for t in bd["types"])
                        if "hodge" in bd and sorted(types) != sorted(_types_from_hodge(bd["hodge"])):
                            problems.append(f"{pd['id']} H^{dkey}: types disagree with hodge counts")
                    else:
                        types = _types_from_hodge(bd.get("hodge", {}))
                    conj = matrix_from_json(bd["conjugation"]) if "conjugation" in bd else ExactMatrix.identity(rank)
                    gram = matrix_from_json(bd["gram_into_top"]) if "gram_into_top" in bd else None
                    if len(types) != rank:
                        problems.append(f"{pd['id']} H^{dkey}: Hodge counts sum to {len(types)}, rank is {rank}")
                    blocks[int(dkey)] = CohomologyBlock(rank, types, conj, gram)
                if k == 1:
                    comps = (len(depth1_index),)
                    depth1_index[pd["id"]] = comps[0]
                else:
                    raw = pd.get("components")
                    if raw is None:
                        problems.append(f"{pd['id']}: depth {k} piece needs 'components'")
                        raw = []
                    comps = tuple(sorted(depth1_index[c] if isinstance(c, str) else int(c) for c in raw))
                pieces.append(Piece(str(pd["id"]), k, comps, blocks))
        restrictions = {}
        for rd in data.get("restrictions", []):
            restrictions[(rd["from"], rd["to"], int(rd["degree"]))] = matrix_from_json(rd["matrix"])
        kahler = None
        if "kahler" in data:
            kahler = {}
            for ld in data["kahler"].get("lefschetz", []):
                kahler[(ld["piece"], int(ld["degree"]))] = matrix_from_json(ld["matrix"])
        a0 = None
        if "a0" in data:
            a = data["a0"]
            a0 = {"degree": int(a["degree"]), "r": int(a["r"]), "vector": [as_qi(x) for x in a["vector"]]}
        frame = None
        if "frame" in data:
            frame = {k: matrix_from_json(v) if isinstance(v, (dict, list)) else v for k, v in data["frame"].items()}
        inst = SncInstance(
            str(data["name"]), int(data["fiber_dim"]), tuple(pieces), restrictions, kahler, a0, frame
        )
    except SchemaError as exc:
        raise SchemaError(problems + exc.problems) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(problems + [f"malformed instance: {exc!r}"]) from exc
    if problems:
        raise SchemaError(problems)
    if validate:
        problems = validate_instance(inst)
        if problems:
            raise SchemaError(problems)
    return inst


def load_instance(path, validate: bool = True) -> SncInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return instance_from_json(data, validate=validate)


def save_instance(inst: SncInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst), sort_keys=True, indent=1) + "\n")


# ---------------------------------------------------------------- building blocks


def _blk(types, conj: ExactMatrix | None = None, gram: ExactMatrix | None = None) -> CohomologyBlock:
    types = tuple(types)
    n = len(types)
    return CohomologyBlock(n, types, conj if conj is not None else ExactMatrix.identity(n), gram)


def _point_class(d: int) -> CohomologyBlock:
    """H^0 or H^top of a connected manifold: one real class, Gram [[1]]."""
    return _blk([(d // 2, d // 2)], gram=ExactMatrix.identity(1))


def _algebraic(n: int, p: int, gram: ExactMatrix) -> CohomologyBlock:
    return _blk([(p, p)] * n, gram=gram)


def _swap_conj(pairs: int, reals: int) -> ExactMatrix:
    """Conjugation on basis (w_1..w_k, r_1..r_m, wbar_1..wbar_k)."""
    n = 2 * pairs + reals
    cols = []
    for j in range(n):
        if j < pairs:
            cols.append({j + pairs + reals: QI(1)})
        elif j < pairs + reals:
            cols.append({j: QI(1)})
        else:
            cols.append({j - pairs - reals: QI(1)})
    return ExactMatrix(n, n, cols)


def _odd_block(types_hi, types_lo, gram_values) -> CohomologyBlock:
    """Odd degree: basis (w_j of types_hi, then conjugates), G(w_j, wbar_j) = value_j."""
    k = len(types_hi)
    n = 2 * k
    cols = [dict() for _ in range(n)]
    for j, v in enumerate(gram_values):
        v = as_qi(v)
        cols[k + j][j] = v
        cols[j][k + j] = -v
    return _blk(list(types_hi) + list(types_lo), _swap_conj(k, 0), ExactMatrix(n, n, cols))


# ---------------------------------------------------------------- K3 of type (2,2,2)

NS_GRAM = ((0, 2, 2), (2, 0, 2), (2, 2, 0))


def triple_intersection(i: int, j: int, k: int) -> int:
    """int_{(P^1)^3} h_i h_j h_k."""
    return 1 if len({i, j, k}) == 3 else 0


def cup_map_matrix(coeffs=(2, 2, 2)) -> ExactMatrix:
    """b -> b * (sum c_k h_k) on H^2((P^1)^3), in the basis h and its dual basis of H^4."""
    rows = [[sum(c * triple_intersection(i, j, k) for k, c in enumerate(coeffs)) for j in range(3)] for i in range(3)]
    return ExactMatrix.from_rows(rows)


def ns_gram_from_triple_products() -> ExactMatrix:
    """h_i . h_j on S = int h_i h_j [S], [S] = 2h1 + 2h2 + 2h3."""
    return cup_map_matrix((2, 2, 2))


class K3Model222:
    """H^*(S) of a (2,2,2) divisor in (P^1)^3.

    H^2 basis: omega (2,0), h1, h2, h3, t1..t17 (1,1), omegabar (0,2).  The
    transcendental part carries Gram [[0,1],[1,0]] on (omega, omegabar) and
    -1 on the t's, signature (2,17).
    """

    EXTRA = 17

    @staticmethod
    def h2_gram() -> ExactMatrix:
        n = 22
        g = [[0] * n for _ in range(n)]
        for i in range(3):
            for j in range(3):
                g[1 + i][1 + j] = NS_GRAM[i][j]
        g[0][21] = g[21][0] = 1
        for j in range(4, 21):
            g[j][j] = -1
        return ExactMatrix.from_rows(g)

    @classmethod
    def h2_block(cls) -> CohomologyBlock:
        types = [(2, 0)] + [(1, 1)] * 20 + [(0, 2)]
        return _blk(types, _swap_conj(1, 20), cls.h2_gram())

    @classmethod
    def piece(cls, pid: str, comps) -> Piece:
        return Piece(pid, 2, tuple(comps), {0: _point_class(0), 2: cls.h2_block(), 4: _point_class(4)})

    @staticmethod
    def ns_embedding() -> ExactMatrix:
        """ns coordinates -> H^2(S) coordinates."""
        return ExactMatrix(22, 3, [{1 + i: QI(1)} for i in range(3)])


# ---------------------------------------------------------------- Hashimoto-Sano family


def displayed_iota_matrix(a: int) -> ExactMatrix:
    """The iota_a matrix as printed in the source of the construction."""
    return ExactMatrix.from_rows([[1, 4 * a * a - 2 * a, 2 * a * a + 2 * a], [0, 1 - 2 * a, -2 * a], [0, 2 * a, 1 + 2 * a]])


def iota_matrix(a: int) -> ExactMatrix:
    """iota_a^* on Pic(S) (columns are images of h_j).

    The top-right entry is 4a^2 + 2a: it is the value forced by the
    isometry condition and by d-semistability of X1 and X2 along S.
    """
    return ExactMatrix.from_rows([[1, 4 * a * a - 2 * a, 4 * a * a + 2 * a], [0, 1 - 2 * a, -2 * a], [0, 2 * a, 1 + 2 * a]])


def hs_curve_class(a: int) -> tuple:
    return (16 * a * a - a + 4, 4 - 8 * a, 4 + 8 * a)


def hs_genus(a: int) -> int:
    c = hs_curve_class(a)
    sq = sum(c[i] * NS_GRAM[i][j] * c[j] for i in range(3) for j in range(3))
    return 1 + sq // 2


def _blowup_threefold(pid: str, n2: int, curve_genera, index: int) -> Piece:
    """Cohomology of a threefold with b1 = 0, H^2 of rank n2 (type (1,1)),
    H^4 in the dual basis and H^3 spanned by the Gysin images of the H^1 of
    the blown-up curves."""
    eye = ExactMatrix.identity(n2)
    h3_pairs = sum(curve_genera)
    coh = {0: _point_class(0), 2: _algebraic(n2, 1, eye), 4: _algebraic(n2, 2, eye), 6: _point_class(6)}
    if h3_pairs:
        coh[3] = _odd_block([(2, 1)] * h3_pairs, [(1, 2)] * h3_pairs, [QI(0, 1)] * h3_pairs)
    return Piece(pid, 1, (index,), coh)


def hashimoto_sano_instance(a: int = 1) -> SncInstance:
    """X1 = (P^1)^3 blown up along C_1..C_a (class h1) and C, glued to
    X2 = (P^1)^3 along S through iota_a."""
    if a < 1:
        raise ValueError("a >= 1")
    g = hs_genus(a)
    n1 = a + 4
    x1 = _blowup_threefold("X1", n1, [1] * a + [g], 0)
    x2 = Piece("X2", 1, (1,), {
        0: _point_class(0),
        2: _algebraic(3, 1, ExactMatrix.identity(3)),
        4: _algebraic(3, 2, ExactMatrix.identity(3)),
        6: _point_class(6),
    })
    s = K3Model222.piece("S", (0, 1))
    minv = iota_matrix(a).inverse()
    emb = K3Model222.ns_embedding()
    # X1 classes on S1 in the h-basis of S1, then transported to S
    c = hs_curve_class(a)
    on_s1 = ExactMatrix.from_columns(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)] + [(1, 0, 0)] * a + [c])
    r12 = emb @ minv @ on_s1
    r22 = emb
    s_class_x1 = [2, 2, 2] + [-1] * (a + 1)
    restrictions = {
        ("X1", "S", 0): ExactMatrix.identity(1),
        ("X2", "S", 0): ExactMatrix.identity(1),
        ("X1", "S", 2): r12,
        ("X2", "S", 2): r22,
        ("X1", "S", 4): ExactMatrix.from_rows([s_class_x1]),
        ("X2", "S", 4): ExactMatrix.from_rows([[2, 2, 2]]),
    }
    kappa = ExactMatrix.column_vector([0, 1, 1, 1] + [0] * 18)
    kahler = {("S", 2): (kappa.T @ K3Model222.h2_gram())}
    a0 = {"degree": 3, "r": 1, "vector": [QI(1)] + [QI(0)] * 21}
    return SncInstance(
        f"hashimoto-sano(a={a})", 3, (x1, x2, s), restrictions, kahler, a0, None,
        notes=(f"genus of C = {g}", "iota_a top-right entry 4a^2+2a"),
    )


# ---------------------------------------------------------------- conifold family


def _cy_h3(h21: int) -> CohomologyBlock:
    """H^3 of a Calabi-Yau threefold: omega, zeta_1..zeta_h, zetabar, omegabar."""
    n = 2 * h21 + 2
    types = [(3, 0)] + [(2, 1)] * h21 + [(1, 2)] * h21 + [(0, 3)]
    conj = [dict() for _ in range(n)]
    for j in range(n):
        conj[j][n - 1 - j] = QI(1)
    g = [[0] * n for _ in range(n)]
    g[0][n - 1] = QI(0, -1)
    g[n - 1][0] = QI(0, 1)
    for j in range(h21):
        g[1 + j][1 + h21 + (h21 - 1 - j)] = QI(0, 1)
        g[1 + h21 + (h21 - 1 - j)][1 + j] = QI(0, -1)
    return _blk(types, ExactMatrix(n, n, conj), ExactMatrix.from_rows(g))


def conifold_instance(r: int = 2, relations=((1, -1),), curve_classes=((1,), (1,)), h21: int = 1) -> SncInstance:
    """Y~ (Y blown up along r disjoint rational curves) glued to quadric
    threefolds Q_i along the exceptional quadric surfaces E_i.

    ``curve_classes[i]`` are the coordinates of [C_i] in H_2(Y); a quadric
    threefold has b2 = b4 = 1 with H.l = 1, and E_i = P^1 x P^1 has classes
    a (fibre over C_i) and b with a.b = 1.
    """
    curves = [tuple(as_qi(x) for x in c) for c in curve_classes]
    if len(curves) != r:
        raise ValueError("one curve class per curve")
    rho = len(curves[0]) if curves else 0
    if any(len(c) != rho for c in curves):
        raise ValueError("curve classes of different lengths")
    if any(not any(c) for c in curves):
        raise FriedmanConditionFailure("a blown-up curve has zero class")
    valid = False
    for rel in relations:
        m = [as_qi(x) for x in rel]
        if len(m) != r:
            raise ValueError("relation length must equal the curve count")
        tot = [sum((m[i] * curves[i][k] for i in range(r)), QI(0)) for k in range(rho)]
        if any(tot):
            raise FriedmanConditionFailure(f"{rel} is not a relation among the curve classes")
        if all(m):
            valid = True
    if not valid:
        raise FriedmanConditionFailure("no relation with all m_i nonzero")
    n2 = rho + r
    gram24 = [[0] * n2 for _ in range(n2)]
    for k in range(rho):
        gram24[k][k] = 1
    for i in range(r):
        gram24[rho + i][rho + i] = -1
    g24 = ExactMatrix.from_rows(gram24)
    yt = Piece("Yt", 1, (0,), {
        0: _point_class(0),
        2: _algebraic(n2, 1, g24),
        3: _cy_h3(h21),
        4: _algebraic(n2, 2, g24.T),
        6: _point_class(6),
    })
    pieces = [yt]
    restrictions = {}
    kahler = {}
    for i in range(r):
        q = Piece(f"Q{i + 1}", 1, (i + 1,), {
            0: _point_class(0), 2: _algebraic(1, 1, ExactMatrix.identity(1)),
            4: _algebraic(1, 2, ExactMatrix.identity(1)), 6: _point_class(6),
        })
        e = Piece(f"E{i + 1}", 2, (0, i + 1), {
            0: _point_class(0), 2: _algebraic(2, 1, ExactMatrix.from_rows([[0, 1], [1, 0]])), 4: _point_class(4),
        })
        pieces.append(q)
        pieces.append(e)
        # H^2(Y~) -> H^2(E_i): L -> (L.C_i) a, E_i -> -a-b
        cols = [{0: curves[i][k]} if curves[i][k] else {} for k in range(rho)]
        cols += [{0: QI(-1), 1: QI(-1)} if j == i else {} for j in range(r)]
        restrictions[("Yt", e.id, 0)] = ExactMatrix.identity(1)
        restrictions[("Yt", e.id, 2)] = ExactMatrix(2, n2, cols)
        restrictions[("Yt", e.id, 4)] = ExactMatrix.from_rows([[0] * rho + [-1 if j == i else 0 for j in range(r)]])
        restrictions[(q.id, e.id, 0)] = ExactMatrix.identity(1)
        restrictions[(q.id, e.id, 2)] = ExactMatrix.from_rows([[1], [1]])
        restrictions[(q.id, e.id, 4)] = ExactMatrix.identity(1)
        kahler[(e.id, 2)] = ExactMatrix.from_rows([[1, 1]])
    order = [pieces[0]] + [p for p in pieces if p.depth == 1 and p.id != "Yt"] + [p for p in pieces if p.depth == 2]
    a0 = {"degree": 3, "r": 0, "vector": [QI(1)] + [QI(0)] * (2 * h21 + 1)}
    return SncInstance(f"conifold(r={r})", 3, tuple(order), restrictions, kahler, a0, None)


# ---------------------------------------------------------------- products and random instances


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def product_cohomology(x: Mapping, dx: int, y: Mapping, dy: int) -> dict:
    """Kuenneth for smooth X (dim dx) and Y (dim dy).

    Basis of H^d(X x Y): pairs (i, a, b) sorted by i, a in H^i(X), b in H^{d-i}(Y).
    int (a x b)(a' x b') = (-1)^{|b||a'|} int a a' int b b'.
    """
    out = {}
    top = 2 * (dx + dy)
    for d in range(top + 1):
        layout = _product_layout(x, y, d)
        if not layout:
            continue
        types = []
        conj_blocks = []
        for i, ra, rb in layout:
            bx, by = x[i], y[d - i]
            for ta in bx.types:
                for tb in by.types:
                    types.append((ta[0] + tb[0], ta[1] + tb[1]))
            conj_blocks.append(_kron(bx.conjugation, by.conjugation))
        out[d] = [types, block_diag(*conj_blocks), layout]
    blocks = {}
    for d, (types, conj, layout) in out.items():
        e = top - d
        other = out.get(e)
        gram = None
        if other is not None:
            olayout = other[2]
            gram = _product_gram(x, y, layout, olayout, d, e, dx, dy, len(types), len(other[0]))
        blocks[d] = CohomologyBlock(len(types), tuple(types), conj, gram)
    return blocks


def _product_layout(x, y, d):
    out = []
    for i in sorted(x):
        j = d - i
        if j in y and x[i].rank and y[j].rank:
            out.append((i, x[i].rank, y[j].rank))
    return out


def _kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    cols = []
    for ja, ca in enumerate(a.cols()):
        for jb, cb in enumerate(b.cols()):
            col = {}
            for ia, va in ca.items():
                for ib, vb in cb.items():
                    col[ia * b.nrows + ib] = va * vb
            cols.append(col)
    return ExactMatrix(a.nrows * b.nrows, a.ncols * b.ncols, cols)


def _product_gram(x, y, layout, olayout, d, e, dx, dy, n, m):
    rows = [dict() for _ in range(m)]  # columns of the result
    roff = 0
    for i, ra, rb in layout:
        coff = 0
        for i2, ra2, rb2 in olayout:
            if i + i2 == 2 * dx and (d - i) + (e - i2) == 2 * dy:
                gx = x[i].gram
                gy = y[d - i].gram
                sign = _sign((d - i) * i2)
                k = _kron(gx, gy)
                for jj, col in enumerate(k.cols()):
                    for ii, v in col.items():
                        rows[coff + jj][roff + ii] = v * QI(sign)
            coff += ra2 * rb2
        roff += ra * rb
    return ExactMatrix(n, m, rows)


def _product_map(x: Mapping, y_src: Mapping, y_tgt: Mapping, d: int, ymaps: Mapping) -> ExactMatrix:
    """id_X (x) f on H^d, f given per degree of Y by ``ymaps``."""
    src = _product_layout(x, y_src, d)
    tgt = _product_layout(x, y_tgt, d)
    n_src = sum(a * b for _, a, b in src)
    n_tgt = sum(a * b for _, a, b in tgt)
    cols = [dict() for _ in range(n_src)]
    toff = {}
    off = 0
    for i, a, b in tgt:
        toff[i] = off
        off += a * b
    off = 0
    for i, a, b in src:
        f = ymaps.get(d - i)
        if f is not None and i in toff:
            k = _kron(ExactMatrix.identity(a), f)
            for jj, col in enumerate(k.cols()):
                for ii, v in col.items():
                    cols[off + jj][toff[i] + ii] = v
        off += a * b
    return ExactMatrix(n_tgt, n_src, cols)


def product_instance(base: Mapping, base_dim: int, inst: SncInstance, name: str | None = None) -> SncInstance:
    """B x (degeneration): strata B x E_I, restrictions id x r."""
    pieces = []
    for p in inst.pieces:
        pieces.append(Piece(p.id, p.depth, p.components, product_cohomology(base, base_dim, p.cohomology, inst.stratum_dim(p.depth))))
    restrictions = {}
    degrees = {(s, t) for (s, t, _) in inst.restrictions}
    for s, t in sorted(degrees):
        ps, pt = inst.by_id[s], inst.by_id[t]
        ymaps = {d: m for (s2, t2, d), m in inst.restrictions.items() if (s2, t2) == (s, t)}
        top = 2 * (base_dim + inst.stratum_dim(ps.depth))
        for d in range(top + 1):
            m = _product_map(base, ps.cohomology, pt.cohomology, d, ymaps)
            if m.nrows and m.ncols:
                restrictions[(s, t, d)] = m
    return SncInstance(name or f"product({inst.name})", inst.fiber_dim + base_dim, tuple(pieces), restrictions)


def random_curve(rng: random.Random, genus: int) -> dict:
    coh = {0: _point_class(0), 2: _point_class(2)}
    if genus:
        coh[1] = _odd_block([(1, 0)] * genus, [(0, 1)] * genus, [QI(0, rng.randint(1, 3)) for _ in range(genus)])
    return coh


def random_surface(rng: random.Random) -> dict:
    """Cohomology of a product of two random curves."""
    return product_cohomology(random_curve(rng, rng.randint(0, 1)), 1, random_curve(rng, rng.randint(0, 1)), 1)


def curve_chain(rng: random.Random, length: int | None = None) -> SncInstance:
    """Fibre of a degenerating curve family: components in a chain or cycle."""
    s = length or rng.randint(2, 3)
    pieces = []
    for i in range(s):
        pieces.append(Piece(f"C{i}", 1, (i,), random_curve(rng, rng.randint(0, 1))))
    edges = [(i, i + 1) for i in range(s - 1)]
    if s >= 3 and rng.random() < 0.5:
        edges.append((0, s - 1))
    restrictions = {}
    for i, j in edges:
        npts = rng.randint(1, 2)
        pid = f"P{i}{j}"
        pieces.append(Piece(pid, 2, (i, j), {0: _algebraic(npts, 0, ExactMatrix.identity(npts))}))
        ones = ExactMatrix.from_rows([[1]] * npts)
        restrictions[(f"C{i}", pid, 0)] = ones
        restrictions[(f"C{j}", pid, 0)] = ones
    return SncInstance("curve-chain", 1, tuple(pieces), restrictions)


def surface_triangle(rng: random.Random) -> SncInstance:
    """Three surfaces V_0, V_1, V_2 meeting pairwise in rational curves and in
    one triple point.  In V_i the two double curves span a block
    [[a_i, 1], [1, b_i]] with D^2 in V_i + D^2 in V_j = -1."""
    # self-intersections: D_{01} in V0 and V1, D_{12} in V1 and V2, D_{02} in V0 and V2
    edges = ((0, 1), (0, 2), (1, 2))
    while True:
        selfint = {}
        for e in edges:
            x = rng.choice([v for v in range(-3, 3) if v not in (0, -1)])
            selfint[(e, e[0])] = x
            selfint[(e, e[1])] = -1 - x
        # the block [[a, 1], [1, b]] must be nondegenerate in every V_i
        if all(selfint[(e1, i)] * selfint[(e2, i)] != 1 for i in range(3) for e1, e2 in [[e for e in edges if i in e]]):
            break
    pieces = []
    restrictions = {}
    curves = {e: f"D{e[0]}{e[1]}" for e in edges}
    for i in range(3):
        mine = [e for e in edges if i in e]
        a, b = selfint[(mine[0], i)], selfint[(mine[1], i)]
        extra = [rng.choice([-2, -1, 1, 2]) for _ in range(rng.randint(0, 2))]
        pairs = rng.randint(0, 1)
        n = 2 * pairs + 2 + len(extra)
        # basis: omega (if any), D_first, D_second, extras, omegabar
        g = [[0] * n for _ in range(n)]
        o = pairs
        g[o][o], g[o][o + 1], g[o + 1][o], g[o + 1][o + 1] = a, 1, 1, b
        for k, v in enumerate(extra):
            g[o + 2 + k][o + 2 + k] = v
        if pairs:
            c = rng.randint(1, 3)
            g[0][n - 1] = g[n - 1][0] = c
        types = [(2, 0)] * pairs + [(1, 1)] * (2 + len(extra)) + [(0, 2)] * pairs
        gm = ExactMatrix.from_rows(g)
        v = Piece(f"V{i}", 1, (i,), {0: _point_class(0), 2: _blk(types, _swap_conj(pairs, 2 + len(extra)), gm), 4: _point_class(4)})
        pieces.append(v)
        for slot, e in enumerate(mine):
            cls = [0] * n
            cls[o + slot] = 1
            row = (ExactMatrix.from_rows([cls]) @ gm)
            restrictions[(v.id, curves[e], 0)] = ExactMatrix.identity(1)
            restrictions[(v.id, curves[e], 2)] = row
    for e, cid in sorted(curves.items(), key=lambda t: t[1]):
        pieces.append(Piece(cid, 2, e, {0: _point_class(0), 2: _point_class(2)}))
        restrictions[(cid, "T", 0)] = ExactMatrix.identity(1)
    pieces.append(Piece("T", 3, (0, 1, 2), {0: _point_class(0)}))
    return SncInstance("surface-triangle", 2, tuple(pieces), restrictions)


def random_snc_instance(rng: random.Random) -> SncInstance:
    """A threefold SNC fibre built as a product, valid by construction."""
    if rng.random() < 0.5:
        base = random_surface(rng)
        return product_instance(base, 2, curve_chain(rng), name="surface x curve-chain")
    base = random_curve(rng, rng.randint(1, 2))
    return product_instance(base, 1, surface_triangle(rng), name="curve x surface-triangle")


def toy_instance() -> SncInstance:
    """Two threefolds glued along a surface, the documented hand-written fixture."""
    return instance_from_json(json.loads(TOY_JSON))


TOY_JSON = """
{
 "schema": 1, "name": "toy", "fiber_dim": 3,
 "strata": [
  {"depth": 1, "pieces": [
   {"id": "A", "cohomology": {
     "0": {"rank": 1, "hodge": {"0,0": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "2": {"rank": 1, "hodge": {"1,1": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "3": {"rank": 2, "hodge": {"2,1": 1, "1,2": 1}, "conjugation": [["0","1"],["1","0"]],
           "gram_into_top": [["0","i"],["-i","0"]]},
     "4": {"rank": 1, "hodge": {"2,2": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "6": {"rank": 1, "hodge": {"3,3": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]}}},
   {"id": "B", "cohomology": {
     "0": {"rank": 1, "hodge": {"0,0": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "2": {"rank": 1, "hodge": {"1,1": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "4": {"rank": 1, "hodge": {"2,2": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "6": {"rank": 1, "hodge": {"3,3": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]}}}]},
  {"depth": 2, "pieces": [
   {"id": "D", "components": ["A", "B"], "cohomology": {
     "0": {"rank": 1, "hodge": {"0,0": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]},
     "2": {"rank": 2, "hodge": {"1,1": 2}, "conjugation": [["1","0"],["0","1"]],
           "gram_into_top": [["0","1"],["1","0"]]},
     "4": {"rank": 1, "hodge": {"2,2": 1}, "conjugation": [["1"]], "gram_into_top": [["1"]]}}}]}
 ],
 "restrictions": [
  {"from": "A", "to": "D", "degree": 0, "matrix": [["1"]]},
  {"from": "B", "to": "D", "degree": 0, "matrix": [["1"]]},
  {"from": "A", "to": "D", "degree": 2, "matrix": [["1"],["1"]]},
  {"from": "B", "to": "D", "degree": 2, "matrix": [["1"],["1"]]},
  {"from": "A", "to": "D", "degree": 4, "matrix": [["1"]]},
  {"from": "B", "to": "D", "degree": 4, "matrix": [["-1"]]}
 ],
 "kahler": {"lefschetz": [{"piece": "D", "degree": 2, "matrix": [["1","1"]]}]},
 "a0": {"degree": 3, "r": 0, "vector": ["1", "0"]}
}
"""


# ---------------------------------------------------------------- builtin URIs


def builtin(uri: str) -> SncInstance | object:
    """``builtin:hashimoto-sano?a=1``, ``builtin:conifold``, ``builtin:jordan-block?d=1``, ``builtin:toy``.

    The jordan-block URI yields a PeriodGerm rather than an SNC instance.
    """
    from .period import jordan_germ

    if not uri.startswith("builtin:"):
        raise ParseError(f"not a builtin URI: {uri}")
    parsed = urlparse(uri[len("builtin:"):])
    name = parsed.path
    q = {k: v[-1] for k, v in parse_qs(parsed.query).items()}
    try:
        if name == "hashimoto-sano":
            return hashimoto_sano_instance(int(q.get("a", 1)))
        if name == "conifold":
            return conifold_instance(h21=int(q.get("h21", 1)))
        if name == "jordan-block":
            return jordan_germ(int(q.get("d", 1)))
        if name == "toy":
            return toy_instance()
    except ValueError as exc:
        raise ParseError(f"{uri}: {exc}") from exc
    raise ParseError(f"unknown builtin instance {name!r}")


def resolve(ref: str):
    if ref.startswith("builtin:"):
        return builtin(ref)
    return load_instance(ref)


def relation_rank(curve_classes) -> int:
    """Dimension of the space of relations sum m_i [C_i] = 0."""
    m = ExactMatrix.from_columns(len(curve_classes[0]), curve_classes)
    return kernel(m).ncols

