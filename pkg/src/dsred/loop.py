"""The loop algebra g((z⁻¹)) with the grading making f + z s homogeneous.

Elements are finite sums ``Σ coeff · b z^k`` with DiffPoly coefficients,
stored as ``{(k, b): DiffPoly}``.  The doubled degree of ``b z^k`` is
``2δ_x(b) − k(2m + 2)`` where ``m = δ_x(s)``.  Multiplication by z shifts
degree by the period ``2m + 2`` and commutes with ``ad(f + z s)``, so the
kernel/image data are periodic in the degree; checking one full period
decides the decomposition for every degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

from . import linalg
from .poly import DiffPoly
from .rational import Q, ZERO, ONE, to_q


class LoopError(ValueError):
    pass


class LoopElement:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # ------------------------------------------------------------------ construction
    @classmethod
    def zero(cls) -> "LoopElement":
        return cls()

    @classmethod
    def from_vector(cls, vec: Sequence, k: int = 0, coeff: DiffPoly | None = None) -> "LoopElement":
        """``(Σ vec_b b) z^k ⊗ coeff``."""
        coeff = DiffPoly.one() if coeff is None else coeff
        return cls({(k, b): coeff * to_q(c) for b, c in enumerate(vec) if c})

    @classmethod
    def from_laurent(cls, parts: dict) -> "LoopElement":
        """From ``{k: vector}``."""
        out = cls()
        for k, v in parts.items():
            out = out + cls.from_vector(v, k)
        return out

    # ------------------------------------------------------------------ basics
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, LoopElement):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def items(self):
        return self.terms.items()

    def __add__(self, other: "LoopElement") -> "LoopElement":
        res = dict(self.terms)
        for k, v in other.terms.items():
            res[k] = res[k] + v if k in res else v
        return LoopElement(res)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        res = dict(self.terms)
        for k, v in other.terms.items():
            res[k] = res[k] - v if k in res else -v
        return LoopElement(res)

    def __neg__(self):
        return LoopElement({k: -v for k, v in self.terms.items()})

    def scale(self, c) -> "LoopElement":
        """Multiply coefficients by a scalar or a DiffPoly."""
        return LoopElement({k: v * c for k, v in self.terms.items()})

    def map(self, fn) -> "LoopElement":
        return LoopElement({k: fn(v) for k, v in self.terms.items()})

    def deriv(self) -> "LoopElement":
        return LoopElement({k: v.deriv() for k, v in self.terms.items()})

    def shift_z(self, j: int) -> "LoopElement":
        return LoopElement({(k + j, b): v for (k, b), v in self.terms.items()})

    def z_powers(self) -> list:
        return sorted({k for k, _ in self.terms})

    def z_coefficient(self, k: int, dim: int) -> list:
        """Coefficient of z^k as a list of DiffPoly over the basis."""
        out = [DiffPoly.zero()] * dim
        for (kk, b), v in self.terms.items():
            if kk == k:
                out[b] = v
        return out

    def scalar_vector(self, k: int, dim: int) -> list:
        """Coefficient of z^k when all coefficients are constants."""
        out = [ZERO] * dim
        for (kk, b), v in self.terms.items():
            if kk == k:
                if not v.is_constant():
                    raise LoopError("coefficient is not a scalar")
                out[b] = v.constant_term()
        return out

    def bracket(self, alg, other: "LoopElement") -> "LoopElement":
        res = {}
        st = alg.structure
        for (k1, b1), p in self.terms.items():
            row = st[b1]
            for (k2, b2), r in other.terms.items():
                consts = row[b2]
                if not consts:
                    continue
                pr = p * r
                if not pr:
                    continue
                k = k1 + k2
                for c, sc in consts.items():
                    key = (k, c)
                    val = pr * sc
                    res[key] = res[key] + val if key in res else val
        return LoopElement(res)

    def to_json(self) -> list:
        return [
            {"z": k, "basis": b, "coeff": v.to_json()}
            for (k, b), v in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, data) -> "LoopElement":
        terms = {}
        for t in data:
            key = (int(t["z"]), int(t["basis"]))
            c = DiffPoly.from_json(t["coeff"])
            terms[key] = terms[key] + c if key in terms else c
        return cls(terms)

    def format(self, alg, names=None) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for (k, b), v in sorted(self.terms.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
            zpart = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            body = v.format(names)
            if len(v) > 1:
                body = f"({body})"
            pieces.append(" ".join(x for x in (zpart, alg.names[b], "⊗", body) if x))
        return " + ".join(pieces)

    def __repr__(self):
        return f"LoopElement({len(self.terms)} terms)"


def kappa_z(alg, x: LoopElement, y: LoopElement) -> dict:
    """κ extended linearly in z: ``{k: DiffPoly}``."""
    out = {}
    km = alg.kappa_matrix
    for (k1, b1), p in x.items():
        row = km[b1]
        for (k2, b2), r in y.items():
            c = row[b2]
            if c:
                k = k1 + k2
                val = p * r * c
                out[k] = out[k] + val if k in out else val
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------- grading

@dataclass
class ZGrading:
    """Doubled degrees ``deg2[b] − k·period`` of ``b z^k``; period = 2m + 2."""

    deg2: list
    m2: int

    @property
    def period(self) -> int:
        return self.m2 + 2

    def degree(self, k: int, b: int) -> int:
        return self.deg2[b] - k * self.period

    def piece(self, d: int) -> list:
        """The pairs (k, b) of doubled degree d, in basis order."""
        out = []
        for b, e in enumerate(self.deg2):
            q, r = divmod(e - d, self.period)
            if r == 0:
                out.append((q, b))
        return out

    def element_degrees(self, x: LoopElement) -> set:
        return {self.degree(k, b) for (k, b) in x.terms}

    def split(self, x: LoopElement) -> dict:
        out = {}
        for (k, b), v in x.items():
            out.setdefault(self.degree(k, b), {})[(k, b)] = v
        return {d: LoopElement(t) for d, t in out.items()}

    def degree_of(self, x: LoopElement):
        """The degree of a homogeneous element, None otherwise (or if zero)."""
        ds = self.element_degrees(x)
        return ds.pop() if len(ds) == 1 else None


def graded_component(grading: ZGrading, x: LoopElement, d: int) -> LoopElement:
    return LoopElement({kb: v for kb, v in x.items() if grading.degree(*kb) == d})


# ---------------------------------------------------------------------- ker/im of ad Λ

class DecompositionError(LoopError):
    def __init__(self, degree, message):
        super().__init__(f"degree {Q(degree, 2)}: {message}")
        self.degree = degree


@dataclass
class _DegreeData:
    piece: list
    index: dict
    ker: list          # kernel basis (coordinate vectors over piece)
    im: list           # image basis
    ok: bool
    coord: list | None = None    # inverse of [ker | im]


class KerImData:
    """Graded kernel/image decomposition of ``ad Λ`` with ``Λ = f + z s``.

    Per doubled degree d: h_d = Ker(ad Λ: piece_d → piece_{d−2}) and
    h⊥_d = ad Λ(piece_{d+2}).  Data are computed lazily and cached.
    """

    def __init__(self, alg, grading: ZGrading, f: Sequence, s: Sequence):
        self.alg = alg
        self.grading = grading
        self.f = [to_q(a) for a in f]
        self.s = [to_q(a) for a in s]
        self.Lambda = LoopElement.from_vector(self.f, 0) + LoopElement.from_vector(self.s, 1)
        self._ad_f = [alg.bracket(self.f, alg.basis(b)) for b in range(alg.dim)]
        self._ad_s = [alg.bracket(self.s, alg.basis(b)) for b in range(alg.dim)]
        self._data = {}
        self._inv = {}

    # matrix of ad Λ : piece_d -> piece_{d-2}
    def _matrix(self, d: int):
        src = self.grading.piece(d)
        tgt = self.grading.piece(d - 2)
        tindex = {kb: i for i, kb in enumerate(tgt)}
        rows = [[ZERO] * len(src) for _ in tgt]
        for col, (k, b) in enumerate(src):
            for c, v in enumerate(self._ad_f[b]):
                if v:
                    rows[tindex[(k, c)]][col] += v
            for c, v in enumerate(self._ad_s[b]):
                if v:
                    rows[tindex[(k + 1, c)]][col] += v
        return rows, src, tgt

    def data(self, d: int) -> _DegreeData:
        if d in self._data:
            return self._data[d]
        rows, src, _ = self._matrix(d)
        piece = src
        if rows and piece:
            ker = linalg.nullspace(rows, len(piece))
        else:
            ker = linalg.identity(len(piece))
        up_rows, up_src, _ = self._matrix(d + 2)
        im = linalg.column_space(up_rows) if up_rows and up_src else []
        n = len(piece)
        ok = len(ker) + len(im) == n
        coord = None
        if ok and n:
            basis = ker + im
            try:
                coord = linalg.inverse(linalg.transpose(basis))
            except ValueError:
                ok = False
        dd = _DegreeData(piece, {kb: i for i, kb in enumerate(piece)}, ker, im, ok, coord)
        self._data[d] = dd
        return dd

    def is_decomposable(self, d: int) -> bool:
        return self.data(d).ok

    def dims(self, d: int) -> tuple:
        dd = self.data(d)
        return len(dd.piece), len(dd.ker), len(dd.im)

    def kernel_basis(self, d: int) -> list:
        dd = self.data(d)
        return [LoopElement({kb: DiffPoly.const(c) for kb, c in zip(dd.piece, v) if c}) for v in dd.ker]

    def image_basis(self, d: int) -> list:
        dd = self.data(d)
        return [LoopElement({kb: DiffPoly.const(c) for kb, c in zip(dd.piece, v) if c}) for v in dd.im]

    def _require(self, d):
        dd = self.data(d)
        if not dd.ok:
            raise DecompositionError(d, "Ker ad(f+zs) and Im ad(f+zs) are not complementary")
        return dd

    def _inverse_matrix(self, d: int):
        """Matrices sending coordinates over piece_d to (h_d coordinates over
        piece_d, preimage in h⊥_{d+2} over piece_{d+2})."""
        if d in self._inv:
            return self._inv[d]
        dd = self._require(d)
        up = self._require(d + 2)
        n = len(dd.piece)
        nk = len(dd.ker)
        if n == 0:
            self._inv[d] = ([], [], dd, up)
            return self._inv[d]
        coord = dd.coord  # row r gives coordinate r (ker first, then im)
        # kernel projection: K_basis^T · coord[:nk]
        proj = [[sum((dd.ker[t][i] * coord[t][j] for t in range(nk)), ZERO) for j in range(n)] for i in range(n)]
        # preimages: image basis vector t is ad Λ applied to the standard vector
        # of the t-th pivot column of the degree d+2 matrix; project that onto h⊥_{d+2}.
        up_rows, up_src, _ = self._matrix(d + 2)
        _, pivots = linalg.rref(up_rows)
        m = len(up.piece)
        nku = len(up.ker)
        pre = [[ZERO] * n for _ in range(m)]
        for t, pc in enumerate(pivots):
            # standard vector at pc, minus its kernel part in degree d + 2
            std = [ZERO] * m
            std[pc] = ONE
            if up.coord is not None:
                kc = [up.coord[r][pc] for r in range(nku)]
                for r in range(nku):
                    if kc[r]:
                        for i in range(m):
                            std[i] -= kc[r] * up.ker[r][i]
            row_t = coord[nk + t]
            for i in range(m):
                if std[i]:
                    for j in range(n):
                        if row_t[j]:
                            pre[i][j] += std[i] * row_t[j]
        self._inv[d] = (proj, pre, dd, up)
        return self._inv[d]

    def decompose(self, y: LoopElement, d: int):
        """For y of degree d return ``(h, x)`` with h ∈ h_d, x ∈ h⊥_{d+2} and
        ``y = h + [Λ, x]``."""
        proj, pre, dd, up = self._inverse_matrix(d)
        vec = [DiffPoly.zero()] * len(dd.piece)
        for kb, v in y.items():
            if kb not in dd.index:
                raise LoopError("element is not homogeneous of the stated degree")
            vec[dd.index[kb]] = v
        h = {}
        for i, row in enumerate(proj):
            acc = DiffPoly.zero()
            for c, v in zip(row, vec):
                if c and v:
                    acc = acc + v * c
            if acc:
                h[dd.piece[i]] = acc
        x = {}
        for i, row in enumerate(pre):
            acc = DiffPoly.zero()
            for c, v in zip(row, vec):
                if c and v:
                    acc = acc + v * c
            if acc:
                x[up.piece[i]] = acc
        return LoopElement(h), LoopElement(x)

    def apply(self, x: LoopElement) -> LoopElement:
        return self.Lambda.bracket(self.alg, x)

    def project_kernel(self, y: LoopElement) -> LoopElement:
        out = LoopElement()
        for d, part in self.grading.split(y).items():
            out = out + self.decompose(part, d)[0]
        return out

    def project_image(self, y: LoopElement) -> LoopElement:
        return y - self.project_kernel(y)


def kerim_decompose(alg, grading: ZGrading, f, s, window: Sequence[int]) -> KerImData:
    """Build the decomposition data and force computation on ``window``."""
    data = KerImData(alg, grading, f, s)
    for d in window:
        data.data(d)
    return data


@dataclass
class SemisimplicityReport:
    ok: bool
    bound: int
    failing_degree: int | None
    period: int
    certified_globally: bool
    dims: dict

    def describe(self) -> str:
        if self.ok:
            tail = " (a full period, hence every degree)" if self.certified_globally else ""
            return f"ad(f+zs) decomposes on doubled degrees |d| <= {self.bound}{tail}"
        return f"decomposition fails at degree {Q(self.failing_degree, 2)}"


def check_semisimple(kerim: KerImData, bound: int | None = None) -> SemisimplicityReport:
    """Ker ⊕ Im at every doubled degree |d| ≤ bound (default: one period)."""
    period = kerim.grading.period
    if bound is None:
        bound = period
    dims = {}
    for d in range(-bound, bound + 1):
        dims[d] = kerim.dims(d)
        if not kerim.is_decomposable(d):
            return SemisimplicityReport(False, bound, d, period, False, dims)
    return SemisimplicityReport(True, bound, None, period, 2 * bound + 1 >= period, dims)


def ad_fzs_inverse(kerim: KerImData, y: LoopElement) -> LoopElement:
    """The unique x ∈ h⊥ with [f + zs, x] = y, for y ∈ h⊥."""
    out = LoopElement()
    for d, part in kerim.grading.split(y).items():
        h, x = kerim.decompose(part, d)
        if h:
            raise LoopError(f"component of degree {Q(d, 2)} is not in the image of ad(f+zs)")
        out = out + x
    return out


@dataclass
class CenterReport:
    commutes: bool
    central_in_g: bool
    failing_degree: int | None = None

    @property
    def usable(self) -> bool:
        return self.commutes and not self.central_in_g


def verify_center(a: LoopElement, kerim: KerImData, bound: int | None = None) -> CenterReport:
    """Whether a commutes with h_d for |d| ≤ bound and whether it is central in g."""
    alg = kerim.alg
    period = kerim.grading.period
    if bound is None:
        bound = period
    for d in range(-bound, bound + 1):
        for b in kerim.kernel_basis(d):
            if a.bracket(alg, b):
                return CenterReport(False, _is_central(alg, a), d)
    return CenterReport(True, _is_central(alg, a))


def _is_central(alg, a: LoopElement) -> bool:
    for b in range(alg.dim):
        if a.bracket(alg, LoopElement.from_vector(alg.basis(b))):
            return False
    return True


# ---------------------------------------------------------------------- matrices

def loop_from_matrices(alg, mats: dict) -> LoopElement:
    """Project a matrix Laurent polynomial ``{k: matrix}`` to the algebra."""
    return LoopElement.from_laurent({k: alg.from_matrix(m) for k, m in mats.items() if any(any(r) for r in m)})


def loop_to_matrices(alg, x: LoopElement) -> dict:
    out = {}
    for k in x.z_powers():
        out[k] = alg.to_matrix(x.scalar_vector(k, alg.dim))
    return out


def loop_power(alg, x: LoopElement, n: int) -> LoopElement:
    """x^n computed with the matrix realization (associative product)."""
    if n < 1:
        raise LoopError("power must be positive")
    mats = loop_to_matrices(alg, x)
    size = len(alg.matrices[0])
    acc = {0: linalg.identity(size)}
    for _ in range(n):
        new = {}
        for k1, m1 in acc.items():
            for k2, m2 in mats.items():
                prod = linalg.matmul(m1, m2)
                if k1 + k2 in new:
                    new[k1 + k2] = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(new[k1 + k2], prod)]
                else:
                    new[k1 + k2] = prod
        acc = new
    return loop_from_matrices(alg, acc)


def lambda_ds_matrix(r: int, variant: str, alg=None):
    """The loop element ``f + z s`` for the blocks of type a (partition [r])
    or b (partition [r, r−1]) inside gl_n, in the basis ordering of
    :func:`dsred.lie.nilpotent_matrices`.

    Returns ``(alg, f, s, f + z s)``.
    """
    from .lie import build_gl, lambda_ds_blocks, partition_layout

    size, f_ent, s_ent = lambda_ds_blocks(r, variant)
    parts = [r] if variant == "a" else [r, r - 1]
    lay = partition_layout(size, parts)

    def glob(t):
        return lay.positions[0][t] if t < r else lay.positions[1][t - r]

    if alg is None:
        alg = build_gl(size)
    F = [[ZERO] * size for _ in range(size)]
    S = [[ZERO] * size for _ in range(size)]
    for i, j in f_ent:
        F[glob(i)][glob(j)] = ONE
    for i, j in s_ent:
        S[glob(i)][glob(j)] = ONE
    f = alg.from_matrix(F)
    s = alg.from_matrix(S)
    return alg, f, s, LoopElement.from_vector(f, 0) + LoopElement.from_vector(s, 1)


# ---------------------------------------------------------------------- graded conjugation

def graded_dressing(alg, r_parts: dict, Lambda: LoopElement, solve, d_start: int, d_end: int):
    """Solve e^{ad G}(∂ + r + Λ) = ∂ + Λ + kept degree by degree.

    ``r_parts`` maps doubled degrees to the components of r, Λ has degree
    −2 and G has components of degree ≥ 1.  At degree d the known part B_d
    of e^{ad G}(∂ + r + Λ) satisfies ``B_d = kept_d + [Λ, G_{d+2}]``;
    ``solve(B_d, d)`` must return ``(kept_d, G_{d+2})``.

    Components of (ad G)^k(∂ + r + Λ) are memoized per degree, so every
    bracket is computed once.  Returns ``(G, kept)`` as dicts over degrees.
    """
    G: dict = {}
    kept: dict = {}
    Qk: dict = {}
    for d in range(d_start, d_end + 1):
        q1 = LoopElement()
        for j, Gj in G.items():
            rj = r_parts.get(d - j)
            if rj:
                q1 = q1 + Gj.bracket(alg, rj)
        if d in G:
            q1 = q1 - G[d].deriv()
        Qk[(1, d)] = q1
        B = r_parts.get(d, LoopElement()) + q1
        k = 2
        while True:
            acc = LoopElement()
            found = False
            for j, Gj in G.items():
                prev = Qk.get((k - 1, d - j))
                if prev is not None:
                    found = True
                    if prev:
                        acc = acc + Gj.bracket(alg, prev)
            if not found:
                break
            Qk[(k, d)] = acc
            if acc:
                B = B + acc.scale(Q(1, factorial(k)))
            k += 1
        kd, Gn = solve(B, d)
        if kd:
            kept[d] = kd
        if Gn:
            G[d + 2] = Gn
            # the solved term [G_{d+2}, Λ] belongs to (ad G) L at degree d
            Qk[(1, d)] = Qk[(1, d)] - Lambda.bracket(alg, Gn)
    return G, kept


def graded_exp_action(alg, G: dict, x: dict, d_max: int, sign: int = 1) -> dict:
    """Components of e^{sign · ad G}(x) of degree ≤ d_max (G of positive degrees)."""
    out = {d: v for d, v in x.items() if d <= d_max}
    prev = dict(out)
    k = 1
    while prev:
        cur = {}
        for j, Gj in G.items():
            for d, v in prev.items():
                e = d + j
                if e > d_max:
                    continue
                br = Gj.bracket(alg, v)
                if br:
                    cur[e] = cur[e] + br if e in cur else br
        cur = {d: v for d, v in cur.items() if v}
        c = Q(sign ** k, factorial(k))
        for d, v in cur.items():
            term = v.scale(c)
            out[d] = out[d] + term if d in out else term
        prev = cur
        k += 1
    return {d: v for d, v in out.items() if v}
