"""Hypothesis strategies shared by the property tests."""

from fractions import Fraction

from hypothesis import strategies as st

from limhodge.exactlinalg import QI, ExactMatrix

small = st.integers(-4, 4)
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
gaussians = st.builds(QI, rationals, rationals)
real_qi = st.builds(QI, rationals)


@st.composite
def matrices(draw, rows=None, cols=None, entries=gaussians, max_dim=4):
    r = rows if rows is not None else draw(st.integers(1, max_dim))
    c = cols if cols is not None else draw(st.integers(1, max_dim))
    data = draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r))
    return ExactMatrix.from_rows(data, ncols=c)


@st.composite
def square(draw, max_dim=4, entries=gaussians):
    n = draw(st.integers(1, max_dim))
    return draw(matrices(rows=n, cols=n, entries=entries))


def paper_shaped(rng):
    """Blocks A, B, C, D with A = a_inf + h, B = C^H bounded, D = 2y q + P + h."""
    from limhodge.asymptotics import AsymptoticScalar

    def herm(n, diag_lo=-2):
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = QI(rng.randint(diag_lo, 4))
            for j in range(i + 1, n):
                v = QI(rng.randint(-2, 2), rng.randint(-2, 2))
                rows[i][j], rows[j][i] = v, v.conj()
        return rows

    k, r = rng.randint(1, 3), rng.randint(1, 3)
    a = [[AsymptoticScalar.const(v, tail=True) for v in row] for row in herm(k)]
    q = herm(r, diag_lo=-1)
    p = herm(r)
    d = [
        [AsymptoticScalar({(0, 1): 2 * q[i][j], (0, 0): p[i][j]}, tail=True) for j in range(r)]
        for i in range(r)
    ]
    b_const = [[QI(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(r)] for _ in range(k)]
    b = [[AsymptoticScalar.const(v, tail=True) for v in row] for row in b_const]
    c = [[AsymptoticScalar.const(b_const[j][i].conj(), tail=True) for j in range(k)] for i in range(r)]
    return a, b, c, d
