"""λ-brackets on differential polynomial algebras.

A :class:`BracketTable` holds the brackets ``{u_i λ u_j}`` of the
generators; :func:`master_bracket` extends it to arbitrary differential
polynomials.  Affine brackets depending on a formal parameter z are carried
as a :class:`ZPair` ``(H, K)`` with ``{·λ·}_z = H − z K``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .poly import DiffPoly, LambdaPoly, LocalFunctional, key_gen, key_order
from .rational import Q, ZERO, ONE


class BracketTable:
    """Square table with ``entries[i][j] = {u_i λ u_j}`` (one-variable LambdaPoly)."""

    def __init__(self, entries, names: Sequence[str] | None = None, latex: Sequence[str] | None = None):
        self.size = len(entries)
        self.entries = [[LambdaPoly(dict(e.items()), 1) for e in row] for row in entries]
        if any(len(row) != self.size for row in self.entries):
            raise ValueError("bracket table must be square")
        self.names = list(names) if names is not None else [f"u{i + 1}" for i in range(self.size)]
        self.latex_names = list(latex) if latex is not None else list(self.names)
        # transposed coefficient lists: _h[i][j] = [(k, c_k)] of {u_i λ u_j}
        self._h = [[sorted((k[0], c) for k, c in e.items()) for e in row] for row in self.entries]

    def entry(self, i: int, j: int) -> LambdaPoly:
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, BracketTable) and self.entries == other.entries

    def __add__(self, other: "BracketTable") -> "BracketTable":
        return BracketTable(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            self.names, self.latex_names,
        )

    def scaled(self, c) -> "BracketTable":
        return BracketTable([[e * c for e in row] for row in self.entries], self.names, self.latex_names)

    def is_zero(self) -> bool:
        return not any(e for row in self.entries for e in row)

    def to_json(self) -> dict:
        return {
            "generators": list(self.names),
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "BracketTable":
        if not isinstance(data, dict) or "entries" not in data:
            raise ValueError("bracket table JSON needs an 'entries' matrix")
        entries = [[LambdaPoly.from_json(e) for e in row] for row in data["entries"]]
        return cls(entries, data.get("generators"))


@dataclass
class ZPair:
    """The pencil ``H − z K`` of brackets."""

    H: BracketTable
    K: BracketTable

    def at(self, z) -> BracketTable:
        return self.H + self.K.scaled(-Q(z))

    def to_json(self) -> dict:
        return {"H": self.H.to_json(), "K": self.K.to_json()}


# ---------------------------------------------------------------------- Master Formula

def _shift(p: LambdaPoly) -> LambdaPoly:
    """Apply (λ+∂) to a one-variable λ-polynomial."""
    return p.shift((1,)) + p.deriv()


def master_bracket(table: BracketTable, f: DiffPoly, g: DiffPoly) -> LambdaPoly:
    """``{f λ g}`` by the Master Formula

    Σ ∂g/∂u_j^(n) (λ+∂)^n {u_i λ+∂ u_j} (−λ−∂)^m ∂f/∂u_i^(m).
    """
    fp = f.partials()
    gp = g.partials()
    if not fp or not gp:
        return LambdaPoly.zero(1)
    for (gen, _n) in list(fp) + list(gp):
        if gen >= table.size:
            raise IndexError(f"generator {gen} outside the bracket table")
    f_by_gen: dict = {}
    for (i, m), c in fp.items():
        f_by_gen.setdefault(i, {})[m] = c
    g_by_gen: dict = {}
    for (j, n), c in gp.items():
        g_by_gen.setdefault(j, {})[n] = c

    # X_i = Σ_m (−λ−∂)^m ∂f/∂u_i^(m), by Horner in (λ+∂)
    X = {}
    for i, parts in f_by_gen.items():
        top = max(parts)
        acc = LambdaPoly.zero(1)
        for m in range(top, -1, -1):
            acc = _shift(acc) if acc else acc
            c = parts.get(m)
            if c:
                acc = acc + LambdaPoly.constant(c if m % 2 == 0 else -c)
        # the Horner loop computed Σ (λ+∂)^m (−1)^m c_m
        X[i] = acc

    result = LambdaPoly.zero(1)
    for j, gparts in g_by_gen.items():
        # Y_j = Σ_i Σ_k h_k (λ+∂)^k X_i with h_k the coefficients of {u_i λ u_j}
        Y = LambdaPoly.zero(1)
        for i, Xi in X.items():
            coeffs = table._h[i][j]
            if not coeffs:
                continue
            power = Xi
            k_prev = 0
            for k, h in coeffs:
                while k_prev < k:
                    power = _shift(power)
                    k_prev += 1
                Y = Y + power * h
        if not Y:
            continue
        top = max(gparts)
        power = Y
        for n in range(top + 1):
            if n:
                power = _shift(power)
            c = gparts.get(n)
            if c:
                result = result + power * c
    return result


def bracket_of_lambda(table: BracketTable, f: DiffPoly, G: LambdaPoly) -> LambdaPoly:
    """``{f λ G}`` for G a polynomial in a second indeterminate μ.

    Returns a two-variable polynomial with keys ``(λ-exp, μ-exp)``.
    """
    out = {}
    for (b,), c in G.items():
        for (a,), d in master_bracket(table, f, c).items():
            key = (a, b)
            out[key] = out[key] + d if key in out else d
    return LambdaPoly(out, 2)


def jacobi_residual(table: BracketTable, a: DiffPoly, b: DiffPoly, c: DiffPoly) -> LambdaPoly:
    """{a λ {b μ c}} − {b μ {a λ c}} − {{a λ b}_{λ+μ} c} as a polynomial in (λ, μ)."""
    res = {}

    def add(key, val):
        if val:
            res[key] = res[key] + val if key in res else val

    for (t,), bc in master_bracket(table, b, c).items():
        for (s,), d in master_bracket(table, a, bc).items():
            add((s, t), d)
    for (s,), ac in master_bracket(table, a, c).items():
        for (t,), d in master_bracket(table, b, ac).items():
            add((s, t), -d)
    for (k,), ab in master_bracket(table, a, b).items():
        for (t,), d in master_bracket(table, ab, c).items():
            # λ^k (λ+μ)^t
            for r in range(t + 1):
                add((k + r, t - r), -d * comb(t, r))
    return LambdaPoly(res, 2)


def skew_partner(p: LambdaPoly) -> LambdaPoly:
    """Σ_k (−λ−∂)^k c_k for ``p = Σ c_k λ^k`` (∂ acting on the coefficients)."""
    out = LambdaPoly.zero(1)
    for (k,), c in p.items():
        sign = -1 if k % 2 else 1
        for t in range(k + 1):
            out = out + LambdaPoly.monomial((k - t,), c.deriv(t) * (sign * comb(k, t)))
    return out


def skew_residual(table: BracketTable, f: DiffPoly, g: DiffPoly) -> LambdaPoly:
    """{f λ g} + {g −λ−∂ f}."""
    return master_bracket(table, f, g) + skew_partner(master_bracket(table, g, f))


@dataclass
class AxiomResult:
    ok: bool
    witness: tuple | None = None
    residual: LambdaPoly | None = None

    def __bool__(self):
        return self.ok


def check_skew(table: BracketTable) -> AxiomResult:
    for i in range(table.size):
        for j in range(i, table.size):
            r = table.entries[i][j] + skew_partner(table.entries[j][i])
            if r:
                return AxiomResult(False, (i, j), r)
    return AxiomResult(True)


def check_jacobi(table: BracketTable) -> AxiomResult:
    gens = [DiffPoly.gen(i) for i in range(table.size)]
    for i in range(table.size):
        for j in range(table.size):
            for k in range(table.size):
                r = jacobi_residual(table, gens[i], gens[j], gens[k])
                if r:
                    return AxiomResult(False, (i, j, k), r)
    return AxiomResult(True)


def check_pair(pair: ZPair) -> dict:
    """Skew and Jacobi for H, K and H + K (so every member of the pencil is a PVA)."""
    out = {}
    for label, t in (("H", pair.H), ("K", pair.K), ("H+K", pair.H + pair.K)):
        out[label] = (check_skew(t), check_jacobi(t))
    return out


# ---------------------------------------------------------------------- affine brackets

def affine_table(alg, s=None) -> ZPair:
    """Affine PVA on the basis of ``alg``: H = [a,b] + κ(a|b)λ, K = −κ(s|[a,b])."""
    dim = alg.dim
    H = [[None] * dim for _ in range(dim)]
    K = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            br = alg.structure[i][j]
            c0 = DiffPoly.from_terms([(c, [(k, 0, 1)]) for k, c in br.items()]) if br else DiffPoly.zero()
            terms = {(0,): c0}
            kij = alg.kappa_matrix[i][j]
            if kij:
                terms[(1,)] = DiffPoly.const(kij)
            H[i][j] = LambdaPoly(terms, 1)
            ks = ZERO
            if s is not None and br:
                for k, c in br.items():
                    ks += c * alg.kappa(s, alg.basis(k))
            K[i][j] = LambdaPoly({(0,): DiffPoly.const(-ks)}, 1) if ks else LambdaPoly.zero(1)
    names = alg.names
    return ZPair(BracketTable(H, names, alg.latex), BracketTable(K, names, alg.latex))


# ---------------------------------------------------------------------- functionals and flows

def functional_bracket(table: BracketTable, f, g) -> LocalFunctional:
    """{∫f, ∫g} = Σ ∫ δg/δu_j {u_i ∂ u_j}→ δf/δu_i."""
    f = f.rep if isinstance(f, LocalFunctional) else f
    g = g.rep if isinstance(g, LocalFunctional) else g
    df = [f.variational(i) for i in range(table.size)]
    dg = [g.variational(j) for j in range(table.size)]
    acc = DiffPoly.zero()
    for i in range(table.size):
        if not df[i]:
            continue
        for j in range(table.size):
            if dg[j] and table.entries[i][j]:
                acc = acc + dg[j] * table.entries[i][j].apply_at_d(df[i])
    return LocalFunctional(acc)


def hamiltonian_flow(table: BracketTable, h) -> list:
    """du_i/dt = {h λ u_i}|_{λ=0} = Σ_j {u_j ∂ u_i}→ δh/δu_j."""
    h = h.rep if isinstance(h, LocalFunctional) else h
    dh = [h.variational(j) for j in range(table.size)]
    out = []
    for i in range(table.size):
        acc = DiffPoly.zero()
        for j in range(table.size):
            if dh[j] and table.entries[j][i]:
                acc = acc + table.entries[j][i].apply_at_d(dh[j])
        out.append(acc)
    return out


def conformal_weight(p: DiffPoly, weights: Sequence):
    """Weight of ``p`` when generator i has weight ``weights[i]`` and ∂ adds 1.

    Returns None if ``p`` is zero or its monomials have different weights.
    """
    found = None
    for mono, _c in p.items():
        w = ZERO
        for key, e in mono:
            gen, order = key_gen(key), key_order(key)
            w += e * (Q(weights[gen]) + order)
        if found is None:
            found = w
        elif found != w:
            return None
    return found


@dataclass
class VirasoroResult:
    ok: bool
    c: object = None
    alpha_H: object = None
    alpha_z: object = None
    residual_H: LambdaPoly | None = None
    residual_K: LambdaPoly | None = None

    def __bool__(self):
        return self.ok


def _virasoro_constants(rem: LambdaPoly):
    """Split a remainder into c λ³ + α λ; None if it has any other shape."""
    c = ZERO
    alpha = ZERO
    for (k,), v in rem.items():
        if not v.is_constant():
            return None
        if k == 3:
            c = v.constant_term()
        elif k == 1:
            alpha = v.constant_term()
        else:
            return None
    return c, alpha


def check_virasoro(bracket, L: DiffPoly) -> VirasoroResult:
    """Match {L λ L} against (∂+2λ)L + cλ³ + αλ (and the K-part against a
    multiple of λ when a ZPair is given)."""
    if isinstance(bracket, ZPair):
        H, K = bracket.H, bracket.K
    else:
        H, K = bracket, None
    rem = master_bracket(H, L, L) - LambdaPoly({(0,): L.deriv(), (1,): L * 2}, 1)
    consts = _virasoro_constants(rem)
    if consts is None:
        return VirasoroResult(False, residual_H=rem)
    c, alpha = consts
    alpha_z = ZERO
    if K is not None:
        kb = master_bracket(K, L, L)
        kc = _virasoro_constants(kb)
        if kc is None or kc[0]:
            return VirasoroResult(False, c, alpha, residual_K=kb)
        alpha_z = -kc[1]
    return VirasoroResult(True, c, alpha, alpha_z)
