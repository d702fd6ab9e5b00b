"""Exact linear algebra over Q.

Matrices are lists of rows.  Elimination is fraction-free (Bareiss) on an
integer rescaling of the input, pivoting on the first nonzero entry in basis
order, so every derived basis (null spaces, column spaces) is reproducible.
"""

from __future__ import annotations

from math import lcm

from .rational import Q, ZERO, ONE


def _integer_rows(rows):
    out = []
    for row in rows:
        den = 1
        for x in row:
            den = lcm(den, int(Q(x).denominator))
        out.append([int(Q(x) * den) for x in row])
    return out


def rref(rows):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` holds the nonzero rows of the reduced
    form (entries in Q) and ``pivots`` the pivot column of each row.
    """
    if not rows:
        return [], []
    ncols = len(rows[0])
    m = _integer_rows(rows)
    nrows = len(m)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            a = m[i][c]
            row_i = m[i]
            row_r = m[r]
            for j in range(c, ncols):
                row_i[j] = (p * row_i[j] - a * row_r[j]) // prev
            for j in range(c):
                row_i[j] = 0
        prev = p
        pivots.append(c)
        r += 1
    # Back substitution on the (integer) echelon form.
    red = [[Q(x) for x in m[i]] for i in range(r)]
    for k in range(r - 1, -1, -1):
        c = pivots[k]
        inv = ONE / red[k][c]
        red[k] = [x * inv for x in red[k]]
        for i in range(k):
            a = red[i][c]
            if a:
                red[i] = [x - a * y for x, y in zip(red[i], red[k])]
    return red, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols=None):
    """Basis of ``{v : M v = 0}``; one vector per free column, free entry 1."""
    if not rows:
        n = ncols if ncols is not None else 0
        return [[ONE if j == i else ZERO for j in range(n)] for i in range(n)]
    n = len(rows[0])
    red, pivots = rref(rows)
    pset = set(pivots)
    basis = []
    for free in range(n):
        if free in pset:
            continue
        v = [ZERO] * n
        v[free] = ONE
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def column_space(rows):
    """Basis of the column space: the pivot columns of the original matrix."""
    if not rows or not rows[0]:
        return []
    _, pivots = rref(rows)
    cols = transpose(rows)
    return [list(cols[c]) for c in pivots]


def row_space(vectors):
    """Reduced basis of the span of ``vectors``."""
    if not vectors:
        return []
    return rref(vectors)[0]


def solve(rows, b):
    """One solution of ``M x = b`` (free variables set to zero), or None."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == n:
        return None
    x = [ZERO] * n
    for row, pc in zip(red, pivots):
        x[pc] = row[n]
    return x


def inverse(rows):
    """Inverse of a square matrix; raises ValueError when singular."""
    n = len(rows)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in red[:n]]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), ZERO) for row in a]


def identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def in_span(basis, v) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(v)]) == rank(basis)


def coordinates(basis, v):
    """Coefficients of ``v`` in the (independent) list ``basis``, or None."""
    if not basis:
        return [] if not any(v) else None
    return solve(transpose(basis), list(v))


def complement_from_standard(basis, dim):
    """Standard basis vectors extending ``basis`` to a basis of Q^dim, in order."""
    current = [list(v) for v in basis]
    r = rank(current) if current else 0
    chosen = []
    for i in range(dim):
        e = [ONE if j == i else ZERO for j in range(dim)]
        if rank(current + [e]) > r:
            current.append(e)
            chosen.append(e)
            r += 1
    return chosen


def lincomb(coeffs, items, zero):
    """``sum(c * x)`` for scalar ``coeffs`` and ring elements ``items``."""
    acc = zero
    for c, x in zip(coeffs, items):
        if c:
            acc = acc + x * c
    return acc
