from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dsred import linalg
from dsred.rational import Q

entries = st.integers(-3, 3).map(Q)


def matrices(max_rows=4, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)))


def gauss_jordan_rank(rows):
    """Plain elimination over Fraction, kept separate from the package routine."""
    m = [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_and_nullspace(rows):
    ncols = len(rows[0])
    r = linalg.rank(rows)
    assert r == gauss_jordan_rank(rows)
    ker = linalg.nullspace(rows, ncols)
    assert len(ker) == ncols - r
    for v in ker:
        assert all(x == 0 for x in linalg.matvec(rows, v))
    if ker:
        assert linalg.rank(ker) == len(ker)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_inverse(rows):
    n = len(rows)
    if linalg.rank(rows) < n:
        with pytest.raises(ValueError):
            linalg.inverse(rows)
        return
    inv = linalg.inverse(rows)
    assert linalg.matmul(rows, inv) == linalg.identity(n)


def test_solve_and_coordinates():
    M = [[Q(1), Q(2)], [Q(3), Q(4)]]
    x = linalg.solve(M, [Q(5), Q(6)])
    assert linalg.matvec(M, x) == [Q(5), Q(6)]
    assert linalg.solve([[Q(1), Q(1)], [Q(1), Q(1)]], [Q(0), Q(1)]) is None
    basis = [[Q(1), Q(0), Q(1)], [Q(0), Q(1), Q(1)]]
    assert linalg.coordinates(basis, [Q(2), Q(3), Q(5)]) == [Q(2), Q(3)]
    assert linalg.coordinates(basis, [Q(0), Q(0), Q(1)]) is None
