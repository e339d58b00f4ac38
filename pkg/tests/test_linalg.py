from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from eqalg.linalg import (DimensionError, Echelon, QMatrix, Subspace, fmt_q, kernel, q, quotient, rref, solve,
                          sparse_kernel)

small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return QMatrix([[draw(small) for _ in range(c)] for _ in range(r)])


def to_sympy(m: QMatrix) -> sympy.Matrix:
    return sympy.Matrix(m.nrows, m.ncols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))


def test_q_coercion():
    assert q("3/4") == Fraction(3, 4)
    assert q(2) == 2
    with pytest.raises(TypeError):
        q(0.5)
    assert fmt_q(Fraction(-6, 4)) == "-3/2"
    assert fmt_q(Fraction(5)) == "5"


def test_ragged_rows_rejected():
    with pytest.raises(DimensionError):
        QMatrix([[1, 2], [3]])


def test_inverse_and_product():
    a = QMatrix([[2, 1], [1, 1]])
    assert a @ a.inverse() == QMatrix.identity(2)
    assert a.inverse() == QMatrix([[1, -1], [-1, 2]])


@given(matrices())
def test_rank_matches_sympy(m):
    assert m.rank() == to_sympy(m).rank()


@given(matrices())
def test_rref_matches_sympy(m):
    r, piv = rref(m)
    sr, spiv = to_sympy(m).rref()
    assert list(piv) == list(spiv)
    assert to_sympy(r) == sr


@given(matrices())
def test_kernel_is_kernel(m):
    k = kernel(m)
    assert k.dim == m.ncols - m.rank()
    for v in k.vectors():
        assert not any(m.apply(v))


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve(m, x):
    x = x[:m.ncols]
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None and m.apply(sol) == b


def test_solve_inconsistent():
    assert solve(QMatrix([[1, 1], [1, 1]]), [1, 2]) is None


@given(matrices(max_cols=4))
def test_sparse_kernel_matches_dense(m):
    cols = [{i: c for i, c in enumerate(col) if c} for col in m.columns()]
    ker = sparse_kernel(cols, key=lambda i: i)
    assert len(ker) == m.ncols - m.rank()
    for v in ker:
        dense = [v.get(j, 0) for j in range(m.ncols)]
        assert not any(m.apply(dense))


def test_echelon_express_and_reduce():
    e = Echelon(key=lambda i: i, track=True)
    assert e.add({0: 1, 1: 1}, "a") is None
    assert e.add({1: 2}, "b") is None
    dep = e.add({0: 2, 1: 4}, "c")
    # c = 2a + b
    assert dep == {"c": 1, "a": -2, "b": -1}
    assert e.express({0: 3, 1: 5}) == {"a": 3, "b": 1}
    assert e.express({2: 1}) is None
    assert e.reduce({0: 1, 1: 1, 2: 7}) == {2: 7}


def test_echelon_exact_division():
    # integer inputs must not fall back to floating point
    e = Echelon(key=lambda i: i)
    e.add({0: 3})
    e.add({0: 1, 1: 3})
    assert e.reduce({0: 1, 1: 1}) == {}
    assert all(isinstance(v, Fraction) or hasattr(v, "denominator") for v in e.rows[1][0].values())
    assert e.rows[0][0][0] == 1


@given(matrices(max_rows=4, max_cols=4), matrices(max_rows=4, max_cols=4))
def test_quotient_dimension(a, b):
    n = max(a.ncols, b.ncols)
    va = [list(r) + [0] * (n - a.ncols) for r in a.rows]
    vb = [list(r) + [0] * (n - b.ncols) for r in b.rows]
    w = Subspace.span(va, n)
    v = Subspace.span(va + vb, n)
    quo = quotient(v, w)
    assert quo.dim == v.dim - w.dim
    for x in w.vectors():
        assert not any(quo.projection.apply(x))
    if quo.dim:
        assert quo.projection @ quo.section == QMatrix.identity(quo.dim)
