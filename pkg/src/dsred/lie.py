"""Finite-dimensional Lie algebras with an invariant form, sl2-triples and
the subspaces entering the Drinfeld-Sokolov reduction.

Vectors are coordinate lists over Q in the algebra's basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import linalg
from .rational import Q, ZERO, ONE, to_q


class SetupError(ValueError):
    """Raised when the reduction data violate a hypothesis."""


class LieAlgebraData:
    """Structure constants, invariant form and optional matrix realization.

    ``structure[i][j]`` is a dict ``{k: c_ij^k}``; ``kappa`` is a dense
    symmetric matrix; ``matrices[i]`` (optional) realizes basis vector ``i``.
    ``names`` are plain-text labels (used as variable names), ``latex`` their
    LaTeX forms.
    """

    def __init__(self, names, structure, kappa, matrices=None, latex=None, kind="custom"):
        self.names = list(names)
        self.dim = len(self.names)
        self.latex = list(latex) if latex is not None else list(self.names)
        self.structure = [[dict(structure[i][j]) for j in range(self.dim)] for i in range(self.dim)]
        self.kappa_matrix = [[to_q(x) for x in row] for row in kappa]
        self.matrices = matrices
        self.kind = kind

    # ------------------------------------------------------------------ vectors
    def basis(self, i: int) -> list:
        v = [ZERO] * self.dim
        v[i] = ONE
        return v

    def zero(self) -> list:
        return [ZERO] * self.dim

    def bracket(self, u: Sequence, v: Sequence) -> list:
        out = [ZERO] * self.dim
        nu = [(i, a) for i, a in enumerate(u) if a]
        nv = [(j, b) for j, b in enumerate(v) if b]
        for i, a in nu:
            row = self.structure[i]
            for j, b in nv:
                ab = a * b
                for k, c in row[j].items():
                    out[k] += ab * c
        return out

    def kappa(self, u: Sequence, v: Sequence):
        acc = ZERO
        for i, a in enumerate(u):
            if a:
                row = self.kappa_matrix[i]
                for j, b in enumerate(v):
                    if b and row[j]:
                        acc += a * b * row[j]
        return acc

    def ad_matrix(self, v: Sequence) -> list:
        """Matrix of ``ad v`` (columns are images of basis vectors)."""
        cols = [self.bracket(v, self.basis(j)) for j in range(self.dim)]
        return linalg.transpose(cols)

    def dual_basis(self) -> list:
        """Vectors ``u^i`` with ``κ(u^i|u_j) = δ_ij``."""
        inv = linalg.inverse(self.kappa_matrix)
        return [list(row) for row in inv]

    # ------------------------------------------------------------------ matrices
    def to_matrix(self, v: Sequence):
        if self.matrices is None:
            raise SetupError("no matrix realization attached")
        n = len(self.matrices[0])
        out = [[ZERO] * n for _ in range(n)]
        for i, a in enumerate(v):
            if a:
                m = self.matrices[i]
                for r in range(n):
                    for c in range(n):
                        if m[r][c]:
                            out[r][c] += a * m[r][c]
        return out

    def from_matrix(self, mat) -> list:
        """Coordinates of a matrix in the realized basis; error if outside the span."""
        if self.matrices is None:
            raise SetupError("no matrix realization attached")
        flat_basis = [[x for row in m for x in row] for m in self.matrices]
        target = [to_q(x) for row in mat for x in row]
        coords = linalg.coordinates(flat_basis, target)
        if coords is None:
            raise SetupError("matrix does not lie in the algebra")
        return coords

    # ------------------------------------------------------------------ checks
    def check_antisymmetry(self) -> bool:
        for i in range(self.dim):
            for j in range(self.dim):
                a = self.structure[i][j]
                b = self.structure[j][i]
                keys = set(a) | set(b)
                if any(a.get(k, ZERO) + b.get(k, ZERO) for k in keys):
                    return False
        return True

    def check_jacobi(self) -> bool:
        for i in range(self.dim):
            ei = self.basis(i)
            for j in range(i + 1, self.dim):
                ej = self.basis(j)
                eij = self.bracket(ei, ej)
                for k in range(j + 1, self.dim):
                    ek = self.basis(k)
                    t = [
                        x + y + z
                        for x, y, z in zip(
                            self.bracket(eij, ek),
                            self.bracket(self.bracket(ej, ek), ei),
                            self.bracket(self.bracket(ek, ei), ej),
                        )
                    ]
                    if any(t):
                        return False
        return True

    def check_invariance(self) -> bool:
        for a in range(self.dim):
            ea = self.basis(a)
            for b in range(self.dim):
                eb = self.basis(b)
                ab = self.bracket(ea, eb)
                for c in range(self.dim):
                    ec = self.basis(c)
                    if self.kappa(ab, ec) + self.kappa(eb, self.bracket(ea, ec)):
                        return False
        return True

    def check_form(self) -> bool:
        k = self.kappa_matrix
        sym = all(k[i][j] == k[j][i] for i in range(self.dim) for j in range(self.dim))
        return sym and linalg.rank(k) == self.dim

    def change_basis(self, vectors: Sequence, names=None, latex=None) -> "LieAlgebraData":
        """The same algebra written in a new basis (given in old coordinates)."""
        vectors = [list(v) for v in vectors]
        if len(vectors) != self.dim or linalg.rank(vectors) != self.dim:
            raise SetupError("new basis must have full rank")
        inv_t = linalg.inverse(linalg.transpose(vectors))  # old coords -> new coords
        structure = [[{} for _ in range(self.dim)] for _ in range(self.dim)]
        for i in range(self.dim):
            for j in range(self.dim):
                new = linalg.matvec(inv_t, self.bracket(vectors[i], vectors[j]))
                structure[i][j] = {k: c for k, c in enumerate(new) if c}
        kappa = [[self.kappa(vectors[i], vectors[j]) for j in range(self.dim)] for i in range(self.dim)]
        mats = None
        if self.matrices is not None:
            mats = [self.to_matrix(v) for v in vectors]
        names = names or [f"b{i + 1}" for i in range(self.dim)]
        return LieAlgebraData(names, structure, kappa, mats, latex or names, kind=self.kind)

    def relabel(self, names, latex=None) -> "LieAlgebraData":
        alg = LieAlgebraData(self.names, self.structure, self.kappa_matrix, self.matrices, self.latex, self.kind)
        alg.names = list(names)
        alg.latex = list(latex) if latex is not None else list(names)
        return alg


def _matrix_unit(n, i, j):
    m = [[ZERO] * n for _ in range(n)]
    m[i][j] = ONE
    return m


def _algebra_from_matrices(mats, names, latex, kind):
    n = len(mats[0])
    dim = len(mats)
    flat = [[x for row in m for x in row] for m in mats]
    # coordinates of a matrix are read off from a set of independent entries
    entries = linalg.rref(flat)[1]
    if len(entries) != dim:
        raise SetupError("matrices are linearly dependent")
    sub_inv = linalg.inverse([[flat[b][r] for b in range(dim)] for r in entries])

    def coords(m):
        fl = [x for row in m for x in row]
        return linalg.matvec(sub_inv, [fl[r] for r in entries])

    structure = [[{} for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            ab = linalg.matmul(mats[i], mats[j])
            ba = linalg.matmul(mats[j], mats[i])
            c = coords([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(ab, ba)])
            structure[i][j] = {k: v for k, v in enumerate(c) if v}
    kappa = []
    for i in range(dim):
        row = []
        for j in range(dim):
            prod = linalg.matmul(mats[i], mats[j])
            row.append(sum((prod[t][t] for t in range(n)), ZERO))
        kappa.append(row)
    return LieAlgebraData(names, structure, kappa, mats, latex, kind=kind)


def _eij_names(n, i, j):
    if n <= 9:
        return f"E{i + 1}{j + 1}", f"E_{{{i + 1}{j + 1}}}"
    return f"E{i + 1}_{j + 1}", f"E_{{{i + 1},{j + 1}}}"


def build_gl(n: int) -> LieAlgebraData:
    """gl_n with basis E_ij (row-major) and trace form."""
    if not isinstance(n, int) or n < 2:
        raise SetupError("gl_n requires n >= 2")
    mats, names, latex = [], [], []
    for i in range(n):
        for j in range(n):
            mats.append(_matrix_unit(n, i, j))
            a, b = _eij_names(n, i, j)
            names.append(a)
            latex.append(b)
    return _algebra_from_matrices(mats, names, latex, "gl")


def build_sl(n: int) -> LieAlgebraData:
    """sl_n with basis: E_ij (i<j), then h_k = E_kk - E_{k+1,k+1}, then E_ij (i>j)."""
    if not isinstance(n, int) or n < 2:
        raise SetupError("sl_n requires n >= 2")
    mats, names, latex = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(_matrix_unit(n, i, j))
            a, b = _eij_names(n, i, j)
            names.append(a)
            latex.append(b)
    for k in range(n - 1):
        m = _matrix_unit(n, k, k)
        m[k + 1][k + 1] = -ONE
        mats.append(m)
        names.append(f"h{k + 1}")
        latex.append(f"h_{{{k + 1}}}")
    for i in range(n):
        for j in range(i):
            mats.append(_matrix_unit(n, i, j))
            a, b = _eij_names(n, i, j)
            names.append(a)
            latex.append(b)
    return _algebra_from_matrices(mats, names, latex, "sl")


def build_sl2() -> LieAlgebraData:
    """sl_2 labelled e, h, f (the basis of :func:`build_sl` with n=2)."""
    return build_sl(2).relabel(["e", "h", "f"], ["e", "h", "f"])


def build_custom(names, structure, kappa, latex=None) -> LieAlgebraData:
    alg = LieAlgebraData(names, structure, kappa, None, latex, kind="custom")
    if not alg.check_antisymmetry():
        raise SetupError("structure constants are not antisymmetric")
    if not alg.check_jacobi():
        raise SetupError("structure constants violate the Jacobi identity")
    if not alg.check_form():
        raise SetupError("bilinear form is not symmetric non-degenerate")
    if not alg.check_invariance():
        raise SetupError("bilinear form is not invariant")
    return alg


# ---------------------------------------------------------------------- sl2-triples

@dataclass
class Sl2Triple:
    f: list
    x: list
    e: list

    def check(self, alg: LieAlgebraData) -> bool:
        xe = alg.bracket(self.x, self.e)
        xf = alg.bracket(self.x, self.f)
        ef = alg.bracket(self.e, self.f)
        return (
            xe == list(self.e)
            and [-a for a in xf] == list(self.f)
            and ef == [2 * a for a in self.x]
        )


@dataclass
class PartitionLayout:
    """Where each Jordan block sits: ``positions[b][k]`` is the global index
    of the k-th basis vector of block ``b`` (0-based)."""

    parts: list
    positions: list
    x_diag: list


def partition_layout(n: int, parts: Sequence[int]) -> PartitionLayout:
    parts = list(parts)
    if not parts or any((not isinstance(r, int)) or r < 1 for r in parts):
        raise SetupError("a partition is a list of positive integers")
    if sum(parts) != n:
        raise SetupError(f"partition {parts} does not sum to {n}")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise SetupError("partition must be weakly decreasing")
    # x-eigenvalues (doubled) of every block vector; sort decreasing, ties by block
    items = []
    for b, r in enumerate(parts):
        for k in range(r):
            items.append((-(r - 1 - 2 * k), b, k))
    items.sort()
    positions = [[None] * r for r in parts]
    x_diag = [ZERO] * n
    for g, (neg2, b, k) in enumerate(items):
        positions[b][k] = g
        x_diag[g] = Q(-neg2, 2)
    return PartitionLayout(parts, positions, x_diag)


def nilpotent_matrices(n: int, parts: Sequence[int]):
    """Matrices ``(f, x, e)`` of the standard triple for a partition of n.

    Each Jordan block of size r has ``f: v_k -> v_{k+1}``, x-eigenvalues
    ``(r-1)/2, (r-3)/2, ...`` and ``e: v_{k+1} -> k(r-k) v_k``.  Basis
    vectors are ordered by decreasing x-eigenvalue, so f is strictly lower
    triangular and g_{>0} is upper triangular.
    """
    lay = partition_layout(n, parts)
    f = [[ZERO] * n for _ in range(n)]
    e = [[ZERO] * n for _ in range(n)]
    x = [[ZERO] * n for _ in range(n)]
    for b, r in enumerate(lay.parts):
        pos = lay.positions[b]
        for k in range(r - 1):
            f[pos[k + 1]][pos[k]] = ONE
            e[pos[k]][pos[k + 1]] = Q((k + 1) * (r - k - 1))
    for i in range(n):
        x[i][i] = lay.x_diag[i]
    return f, x, e, lay


def nilpotent_from_partition(alg: LieAlgebraData, parts: Sequence[int]) -> Sl2Triple:
    """sl2-triple of the nilpotent with Jordan type ``parts`` in gl_n or sl_n."""
    if alg.matrices is None:
        raise SetupError("partition triples need a matrix realization")
    n = len(alg.matrices[0])
    f, x, e, _ = nilpotent_matrices(n, parts)
    trip = Sl2Triple(alg.from_matrix(f), alg.from_matrix(x), alg.from_matrix(e))
    assert trip.check(alg)
    return trip


# ---------------------------------------------------------------------- grading

@dataclass
class Grading:
    """Doubled ad x eigenvalues on an eigenbasis.

    ``basis`` lists eigenvectors in the algebra's current coordinates;
    ``standard`` is True when they are exactly the basis vectors.
    """

    deg2: list
    basis: list
    standard: bool

    def max_deg2(self) -> int:
        return max(self.deg2)


def adx_grading(alg: LieAlgebraData, triple: Sl2Triple) -> Grading:
    ad = alg.ad_matrix(triple.x)
    diag = all(ad[i][j] == 0 for i in range(alg.dim) for j in range(alg.dim) if i != j)
    if diag:
        deg2 = []
        for i in range(alg.dim):
            t = 2 * ad[i][i]
            if t.denominator != 1:
                raise SetupError("ad x eigenvalue is not in (1/2)Z")
            deg2.append(int(t))
        return Grading(deg2, [alg.basis(i) for i in range(alg.dim)], True)
    basis, deg2 = [], []
    bound = 2 * alg.dim
    for t2 in range(-bound, bound + 1):
        shifted = [[ad[i][j] - (Q(t2, 2) if i == j else ZERO) for j in range(alg.dim)] for i in range(alg.dim)]
        for v in linalg.nullspace(shifted):
            basis.append(v)
            deg2.append(t2)
    if len(basis) != alg.dim:
        raise SetupError("ad x is not diagonalizable over Q with eigenvalues in (1/2)Z")
    return Grading(deg2, basis, False)


def centralizer(alg: LieAlgebraData, v: Sequence) -> list:
    """Basis of Ker(ad v)."""
    return linalg.nullspace(alg.ad_matrix(v))


def homogeneous_kernel(alg: LieAlgebraData, deg2: Sequence[int], maps: Sequence) -> dict:
    """Per doubled degree, a basis of the common kernel of ``ad m`` (m in maps)
    on the graded piece.  Requires the basis to be an eigenbasis."""
    out = {}
    for d in sorted(set(deg2)):
        idx = [i for i in range(alg.dim) if deg2[i] == d]
        rows = []
        for m in maps:
            cols = [alg.bracket(m, alg.basis(i)) for i in idx]
            rows.extend(linalg.transpose(cols) if cols else [])
        if rows:
            ker = linalg.nullspace(rows, len(idx))
        else:
            ker = linalg.identity(len(idx))
        vecs = []
        for k in ker:
            v = alg.zero()
            for c, i in zip(k, idx):
                v[i] = c
            vecs.append(v)
        if vecs:
            out[d] = vecs
    return out


# ---------------------------------------------------------------------- the reduction setup

@dataclass
class DSSetup:
    alg: LieAlgebraData
    triple: Sl2Triple
    grading: Grading
    l: list
    l_perp: list
    m: list
    n: list
    p: list
    p_names: list
    p_latex: list
    m_perp: list          # q^i, κ-dual to p in m^⊥
    v_up: list            # v^r
    v_down: list          # v_r, ω(v_r, v^q) = δ
    V: list
    s: list
    s_deg2: int | None
    p_compatible: bool
    pi_p_matrix: list = field(repr=False, default=None)   # [a][i] = κ(q^i | e_a)
    kappa_pq: list = field(repr=False, default=None)       # [a][i] = κ(e_a | q_i)

    @property
    def deg2(self):
        return self.grading.deg2

    def omega(self, a, b):
        return self.alg.kappa(self.triple.f, self.alg.bracket(a, b))

    def pi_p_coeffs(self, a: Sequence) -> list:
        """Coefficients of π_p(a) in the basis q_i."""
        return [self.alg.kappa(qi, a) for qi in self.m_perp]

    def pi_p(self, a: Sequence) -> list:
        c = self.pi_p_coeffs(a)
        out = self.alg.zero()
        for ci, qi in zip(c, self.p):
            if ci:
                out = [x + ci * y for x, y in zip(out, qi)]
        return out

    def pi_mperp_coeffs(self, a: Sequence) -> list:
        """Coefficients of π_{m^⊥}(a) in the basis q^i."""
        return [self.alg.kappa(a, qi) for qi in self.p]

    def pi_mperp(self, a: Sequence) -> list:
        c = self.pi_mperp_coeffs(a)
        out = self.alg.zero()
        for ci, qi in zip(c, self.m_perp):
            if ci:
                out = [x + ci * y for x, y in zip(out, qi)]
        return out

    def vector_deg2(self, v: Sequence):
        """Doubled degree of a homogeneous vector, None if inhomogeneous or zero."""
        ds = {self.deg2[i] for i, a in enumerate(v) if a}
        return ds.pop() if len(ds) == 1 else None

    def in_n(self, a: Sequence) -> bool:
        return linalg.in_span(self.n, a)

    def describe(self) -> dict:
        alg = self.alg
        fmt = lambda vs: [vector_label(alg, v) for v in vs]
        return {
            "algebra": alg.kind,
            "dim": alg.dim,
            "f": vector_label(alg, self.triple.f),
            "x": vector_label(alg, self.triple.x),
            "e": vector_label(alg, self.triple.e),
            "l": fmt(self.l),
            "m": fmt(self.m),
            "n": fmt(self.n),
            "p": list(self.p_names),
            "V": fmt(self.V),
            "s": vector_label(alg, self.s),
        }


def vector_label(alg: LieAlgebraData, v: Sequence, latex=False) -> str:
    names = alg.latex if latex else alg.names
    from .rational import q_short
    parts = []
    for c, nm in zip(v, names):
        if not c:
            continue
        if c == 1:
            parts.append(nm)
        elif c == -1:
            parts.append("-" + nm)
        else:
            parts.append(f"{q_short(c)} {nm}" if not latex else f"{_lq(c)} {nm}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def _lq(c):
    from .poly import _latex_q
    return _latex_q(c)


def _omega_dual_bases(setup_omega, vectors):
    """Bases v^r (the given vectors) and v_r of their span with ω(v_r, v^q) = δ_qr.

    This is the normalization under which π_p(a) = Σ_r ω(a, v^r) v_r for a ∈ n.
    """
    ups = [list(v) for v in vectors]
    if not ups:
        return [], []
    gram = [[setup_omega(a, b) for b in ups] for a in ups]
    try:
        inv = linalg.inverse(gram)
    except ValueError:
        raise SetupError("ω is degenerate on n ∩ p") from None
    dim = len(ups[0])
    downs = []
    for r in range(len(ups)):
        v = [ZERO] * dim
        for t, u in enumerate(ups):
            c = -inv[t][r]
            if c:
                v = [x + c * y for x, y in zip(v, u)]
        downs.append(v)
    return ups, downs


def build_ds_setup(
    alg: LieAlgebraData,
    triple: Sl2Triple,
    l: Sequence = (),
    s: Sequence | None = None,
    p: Sequence | None = None,
    p_names: Sequence[str] | None = None,
    p_latex: Sequence[str] | None = None,
    V: Sequence | None = None,
) -> DSSetup:
    """Assemble and validate all reduction data.

    ``l`` spans an isotropic subspace of g_{1/2}; ``s`` must be an ad x
    eigenvector commuting with n.  ``p`` defaults to the complement of l in
    g_{1/2} (standard vectors, in basis order) followed by g_{≤0}; ``V``
    defaults to Ker(ad e), computed degree by degree.
    """
    if not triple.check(alg):
        raise SetupError("the triple does not satisfy the sl2 relations")
    grading = adx_grading(alg, triple)
    if not grading.standard:
        # Rewrite everything in an ad x eigenbasis.
        P = grading.basis
        inv_t = linalg.inverse(linalg.transpose(P))
        conv = lambda v: linalg.matvec(inv_t, [to_q(a) for a in v])
        new_alg = alg.change_basis(P)
        triple = Sl2Triple(conv(triple.f), conv(triple.x), conv(triple.e))
        l = [conv(v) for v in l]
        s = conv(s) if s is not None else None
        p = [conv(v) for v in p] if p is not None else None
        V = [conv(v) for v in V] if V is not None else None
        alg = new_alg
        grading = adx_grading(alg, triple)
    deg2 = grading.deg2
    dim = alg.dim
    f = triple.f

    def omega(a, b):
        return alg.kappa(f, alg.bracket(a, b))

    half = [i for i in range(dim) if deg2[i] == 1]

    # ad f : g_{1/2} -> g_{-1/2} bijective
    minus_half = [i for i in range(dim) if deg2[i] == -1]
    if len(half) != len(minus_half):
        raise SetupError("g_{1/2} and g_{-1/2} differ in dimension")
    if half:
        imgs = [alg.bracket(f, alg.basis(i)) for i in half]
        if linalg.rank(imgs) != len(half):
            raise SetupError("ad f is not injective on g_{1/2}")

    l = [[to_q(a) for a in v] for v in l]
    for v in l:
        if len(v) != dim:
            raise SetupError("an l vector has the wrong length")
        if any(v[i] for i in range(dim) if deg2[i] != 1):
            raise SetupError("l must lie in g_{1/2}")
    if l and linalg.rank(l) != len(l):
        raise SetupError("l basis vectors are linearly dependent")
    for a in l:
        for b in l:
            if omega(a, b):
                raise SetupError("l is not isotropic for ω(a,b) = κ(f|[a,b])")

    # l^{⊥ω} inside g_{1/2}
    if half:
        rows = [[omega(lv, alg.basis(i)) for i in half] for lv in l]
        ker = linalg.nullspace(rows, len(half)) if rows else linalg.identity(len(half))
        l_perp = []
        for k in ker:
            v = alg.zero()
            for c, i in zip(k, half):
                v[i] = c
            l_perp.append(v)
    else:
        l_perp = []
    high = [alg.basis(i) for i in range(dim) if deg2[i] >= 2]
    m = [list(v) for v in l] + high
    n = [list(v) for v in l_perp] + high

    # p and its names
    if p is None:
        comp = linalg.complement_from_standard(l, dim) if half else []
        comp = [v for v in comp if any(v[i] for i in half)]
        low = [alg.basis(i) for i in range(dim) if deg2[i] <= 0]
        p = comp + low
        auto_names = []
        for v in p:
            auto_names.append(vector_label(alg, v))
        p_names = p_names or auto_names
        p_latex = p_latex or [vector_label(alg, v, latex=True) for v in p]
    else:
        p = [[to_q(a) for a in v] for v in p]
        if p_names is None:
            p_names = [vector_label(alg, v) for v in p]
        if p_latex is None:
            p_latex = [vector_label(alg, v, latex=True) for v in p]
    if len(p) + len(m) != dim or linalg.rank(m + p) != dim:
        raise SetupError("p is not complementary to m")
    for v in p:
        if any(v[i] for i in range(dim) if deg2[i] >= 2):
            raise SetupError("p must lie in g_{≤1/2}")
    compatible = all(len({deg2[i] for i, a in enumerate(v) if a}) == 1 for v in p)

    # q^i in m^⊥ with κ(q^i|q_j) = δ
    rows = [[alg.kappa(alg.basis(a), qj) for a in range(dim)] for qj in p]
    rows += [[alg.kappa(alg.basis(a), mk) for a in range(dim)] for mk in m]
    inv = linalg.inverse(rows)
    m_perp = [[inv[a][j] for a in range(dim)] for j in range(len(p))]

    setup = DSSetup(
        alg=alg, triple=triple, grading=grading, l=l, l_perp=l_perp, m=m, n=n,
        p=p, p_names=list(p_names), p_latex=list(p_latex), m_perp=m_perp,
        v_up=[], v_down=[], V=[], s=None, s_deg2=None, p_compatible=compatible,
    )

    # n ∩ p = π_p(n) and its symplectic pairs
    proj = [setup.pi_p(v) for v in n]
    np_basis = linalg.row_space([v for v in proj if any(v)]) if any(any(v) for v in proj) else []
    for v in np_basis:
        if any(v[i] for i in range(dim) if deg2[i] != 1):
            raise SetupError("π_p(n) is not contained in g_{1/2}")
    setup.v_up, setup.v_down = _omega_dual_bases(omega, np_basis)

    # V
    if V is None:
        ker = homogeneous_kernel(alg, deg2, [triple.e])
        V = [v for d in sorted(ker, reverse=True) for v in ker[d]]
    else:
        V = [[to_q(a) for a in v] for v in V]
    fn = [alg.bracket(f, v) for v in n]
    mperp_dim = dim - len(m)
    for v in V:
        if any(alg.kappa(v, mk) for mk in m):
            raise SetupError("V must lie in m^⊥")
        if setup.vector_deg2(v) is None:
            raise SetupError("V basis vectors must be ad x eigenvectors")
    if len(V) + linalg.rank(fn) != mperp_dim or linalg.rank(V + fn) != mperp_dim:
        raise SetupError("V is not complementary to [f, n] in m^⊥")
    setup.V = V

    # s
    if s is None:
        s = alg.zero()
    s = [to_q(a) for a in s]
    if len(s) != dim:
        raise SetupError("s has the wrong length")
    if any(s):
        d = setup.vector_deg2(s)
        if d is None:
            raise SetupError("s is not an ad x eigenvector")
        for v in n:
            if any(alg.bracket(s, v)):
                raise SetupError("[s, n] ≠ 0")
        setup.s_deg2 = d
    setup.s = s
    return setup


def lambda_ds_blocks(r: int, variant: str):
    """The block ``f + z s`` for partitions of type (a) or (b).

    Returns ``(size, f_entries, s_entries)`` where entries are lists of
    0-based ``(row, col)`` positions of ones.  Variant a has size r, variant
    b has size 2r-1 (a block of size r followed by one of size r-1).
    """
    if variant not in ("a", "b"):
        raise SetupError("variant must be 'a' or 'b'")
    if not isinstance(r, int) or r < 2:
        raise SetupError("r must be an integer >= 2")
    if variant == "a":
        f = [(k + 1, k) for k in range(r - 1)]
        s = [(0, r - 1)]
        return r, f, s
    size = 2 * r - 1
    f = [(k + 1, k) for k in range(r - 1)] + [(r + k + 1, r + k) for k in range(r - 2)]
    s = [(0, size - 1), (r, r - 1)]
    return size, f, s
