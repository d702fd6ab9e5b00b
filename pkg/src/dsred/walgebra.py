"""Drinfeld-Sokolov reduction: the ρ-map, the conformal action of n,
gauge transformations and the classical W-algebra in generator coordinates.

Differential polynomials over V(p) use generator index i for the basis
vector q_i of p; over V(g) generator b is the basis vector b of g.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

from . import linalg
from .lie import DSSetup, SetupError, vector_label
from .loop import LoopElement, ZGrading, graded_dressing
from .poly import DiffPoly, LambdaPoly, key_gen, key_order
from .pva import BracketTable, ZPair, master_bracket, conformal_weight
from .rational import Q, ZERO, ONE


class WAlgebraError(ValueError):
    pass


def _linear(coeffs: Sequence) -> DiffPoly:
    return DiffPoly.from_terms([(c, [(i, 0, 1)]) for i, c in enumerate(coeffs) if c])


# ---------------------------------------------------------------------- ρ and the n-action

def rho_images(setup: DSSetup) -> list:
    """ρ(u_b) = π_p(b) + κ(f|b) for every basis vector b of g."""
    alg = setup.alg
    out = []
    for b in range(alg.dim):
        eb = alg.basis(b)
        img = _linear(setup.pi_p_coeffs(eb))
        c = alg.kappa(setup.triple.f, eb)
        out.append(img + c if c else img)
    return out


def rho(setup: DSSetup, p: DiffPoly) -> DiffPoly:
    """The differential-algebra map V(g) → V(p), u_b^(k) ↦ ∂^k ρ(u_b)."""
    return p.subs(rho_images(setup))


def rho_vector(setup: DSSetup, a: Sequence) -> DiffPoly:
    """ρ(a) for a vector a ∈ g."""
    img = _linear(setup.pi_p_coeffs(a))
    c = setup.alg.kappa(setup.triple.f, a)
    return img + c if c else img


def q_element(setup: DSSetup) -> LoopElement:
    """q = Σ_i q^i ⊗ q_i ∈ m^⊥ ⊗ V(p)."""
    out = LoopElement()
    for i, qi in enumerate(setup.m_perp):
        out = out + LoopElement.from_vector(qi, 0, DiffPoly.gen(i))
    return out


def components(setup: DSSetup, r: LoopElement) -> list:
    """r_i = κ(r|q_i) for r = Σ_i q^i ⊗ r_i ∈ m^⊥ ⊗ V (z-free part)."""
    alg = setup.alg
    out = []
    for qi in setup.p:
        acc = DiffPoly.zero()
        for (k, b), v in r.items():
            if k != 0:
                continue
            c = sum((alg.kappa_matrix[b][j] * qi[j] for j in range(alg.dim) if qi[j]), ZERO)
            if c:
                acc = acc + v * c
        out.append(acc)
    return out


def _n_action_images(setup: DSSetup, a: Sequence) -> list:
    """ρ{a λ q_j} = ρ([a, q_j]) + κ(a|q_j) λ for every j."""
    alg = setup.alg
    out = []
    for qj in setup.p:
        c0 = rho_vector(setup, alg.bracket(a, qj))
        terms = {(0,): c0}
        k = alg.kappa(a, qj)
        if k:
            terms[(1,)] = DiffPoly.const(k)
        out.append(LambdaPoly(terms, 1))
    return out


def apply_lambda_derivation(g: DiffPoly, images: Sequence[LambdaPoly]) -> LambdaPoly:
    """Σ_{j,n} ∂g/∂q_j^(n) (λ+∂)^n images[j]."""
    result = LambdaPoly.zero(1)
    by_gen: dict = {}
    for (j, n), c in g.partials().items():
        by_gen.setdefault(j, {})[n] = c
    for j, parts in by_gen.items():
        base = images[j]
        if not base:
            continue
        power = base
        for n in range(max(parts) + 1):
            if n:
                power = power.shift((1,)) + power.deriv()
            c = parts.get(n)
            if c:
                result = result + power * c
    return result


def conformal_action(setup: DSSetup, a: Sequence, g: DiffPoly) -> LambdaPoly:
    """a ρ_λ g = ρ{a λ g}_z for a ∈ n (no z-dependence since [s, n] = 0)."""
    if not setup.in_n(a):
        raise SetupError("the acting element must lie in n")
    return apply_lambda_derivation(g, _n_action_images(setup, a))


def in_W(setup: DSSetup, g: DiffPoly) -> bool:
    """Whether g is annihilated by the conformal action of every basis vector of n."""
    for a in setup.n:
        if conformal_action(setup, a, g):
            return False
    return True


# ---------------------------------------------------------------------- gauge transformations

def gauge_transform(setup: DSSetup, A: LoopElement) -> LoopElement:
    """q^A with e^{ad A}(∂ + q + f) = ∂ + q^A + f, for A ∈ n ⊗ V(p).

    The exponential is a finite sum because ad A raises the ad x-degree.
    """
    alg = setup.alg
    for (k, b), _v in A.items():
        if k != 0:
            raise SetupError("gauge elements carry no z")
    by_mono: dict = {}
    for (_k, b), v in A.items():
        for mono, c in v.items():
            by_mono.setdefault(mono, alg.zero())[b] = c
    if any(not setup.in_n(vec) for vec in by_mono.values()):
        raise SetupError("gauge element must lie in n ⊗ V(p)")
    q = q_element(setup)
    f = LoopElement.from_vector(setup.triple.f)
    term = A.bracket(alg, q + f) - A.deriv()
    out = q
    bound = 2 * max(setup.deg2) + 2
    n = 1
    while term:
        if n > bound:
            raise WAlgebraError("gauge series did not terminate")
        out = out + term.scale(Q(1, factorial(n)))
        n += 1
        term = A.bracket(alg, term)
    return out


def substitute_r(setup: DSSetup, g: DiffPoly, r: LoopElement) -> DiffPoly:
    """g(r): replace q_i^(m) by ∂^m κ(r|q_i)."""
    return g.subs(components(setup, r))


# ---------------------------------------------------------------------- generators

@dataclass
class _Split:
    """Left inverse for B = Σ α_j v_j + [f, Σ β_k n_k] at one degree."""

    idx: list
    v_count: int
    n_vectors: list
    rows: list
    left: list
    matrix: list


def _split_data(setup: DSSetup, d: int) -> _Split:
    alg = setup.alg
    idx = [b for b in range(alg.dim) if setup.deg2[b] == d]
    vs = [v for v in setup.V if setup.vector_deg2(v) == d]
    ns = [v for v in setup.n if setup.vector_deg2(v) == d + 2]
    cols = [[v[b] for b in idx] for v in vs]
    fn = [alg.bracket(setup.triple.f, v) for v in ns]
    cols += [[v[b] for b in idx] for v in fn]
    if not cols:
        return _Split(idx, 0, [], [], [], [])
    M = linalg.transpose(cols)  # rows: coordinates, columns: unknowns
    _, piv = linalg.rref(cols)  # independent coordinate rows
    if len(piv) != len(cols):
        raise WAlgebraError(f"degree {Q(d, 2)}: V and [f, n] are not independent")
    sub = [M[r] for r in piv]
    return _Split(idx, len(vs), ns, piv, linalg.inverse(sub), M)


@dataclass
class WAlgebra:
    setup: DSSetup
    X: LoopElement
    w: LoopElement
    generators: list          # w_j as DiffPoly over V(p)
    V: list                   # v^j
    weights: list             # Δ_j
    names: list
    latex: list
    _tables: ZPair | None = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def q_weights(self) -> list:
        return [1 - Q(self.setup.vector_deg2(v) or 0, 2) for v in self.setup.p]

    def generator_images(self) -> list:
        """q_i ↦ Σ_j κ(v^j|q_i) W_j (the slice w in abstract generators)."""
        alg = self.setup.alg
        return [_linear([alg.kappa(v, qi) for v in self.V]) for qi in self.setup.p]

    def slice_element(self) -> LoopElement:
        """w = Σ_j v^j ⊗ W_j with abstract generators W_j."""
        out = LoopElement()
        for j, v in enumerate(self.V):
            out = out + LoopElement.from_vector(v, 0, DiffPoly.gen(j))
        return out


def _dot(row, vals) -> DiffPoly:
    acc = DiffPoly.zero()
    for c, v in zip(row, vals):
        if c and v:
            acc = acc + v * c
    return acc


def compute_generators(setup: DSSetup, names=None, latex=None) -> WAlgebra:
    """Solve e^{ad X}(∂ + q + f) = ∂ + w + f with X ∈ n ⊗ V(p), w ∈ V ⊗ V(p).

    The equation is solved degree by degree: at doubled degree d the known
    part B_d splits uniquely as w_d + [f, X_{d+2}].
    """
    alg = setup.alg
    f = LoopElement.from_vector(setup.triple.f)
    r = ZGrading(setup.deg2, 0).split(q_element(setup))
    alphas: dict = {}

    def solve(B, d):
        sp = _split_data(setup, d)
        vec = [DiffPoly.zero()] * len(sp.idx)
        pos = {b: i for i, b in enumerate(sp.idx)}
        for (kk, b), v in B.items():
            if kk != 0 or b not in pos:
                raise WAlgebraError(f"degree {Q(d, 2)}: unexpected component")
            vec[pos[b]] = v
        if not sp.left:
            if any(vec):
                raise WAlgebraError(f"degree {Q(d, 2)}: nonzero component outside m^⊥")
            return LoopElement(), LoopElement()
        sel = [vec[i] for i in sp.rows]
        coeffs = [_dot(row, sel) for row in sp.left]
        # residual check on all coordinates
        for i in range(len(sp.idx)):
            if _dot(sp.matrix[i], coeffs) != vec[i]:
                raise WAlgebraError(f"degree {Q(d, 2)}: split V ⊕ [f, n] failed")
        alphas[d] = coeffs[: sp.v_count]
        Gd = LoopElement()
        for c, nv in zip(coeffs[sp.v_count:], sp.n_vectors):
            if c:
                Gd = Gd + LoopElement.from_vector(nv, 0, c)
        return LoopElement(), Gd

    G, _ = graded_dressing(alg, r, f, solve, -1, max(setup.deg2))
    X = LoopElement()
    for Gd in G.values():
        X = X + Gd
    # generators in the order of setup.V
    gens = []
    for v in setup.V:
        d = setup.vector_deg2(v)
        degree_vs = [u for u in setup.V if setup.vector_deg2(u) == d]
        gens.append(alphas[d][degree_vs.index(v)])
    w = LoopElement()
    for v, g in zip(setup.V, gens):
        w = w + LoopElement.from_vector(v, 0, g)
    weights = [1 + Q(setup.vector_deg2(v), 2) for v in setup.V]
    rnk = len(gens)
    names = list(names) if names else [f"w{j + 1}" for j in range(rnk)]
    latex = list(latex) if latex else [f"w_{{{j + 1}}}" for j in range(rnk)]
    return WAlgebra(setup, X, w, gens, list(setup.V), weights, names, latex)


def verify_gauge_fixing(walg: WAlgebra) -> bool:
    """q^X computed by the plain exponential series equals w."""
    return gauge_transform(walg.setup, walg.X) == walg.w


def linear_parts(walg: WAlgebra) -> list:
    """The underived linear part of each generator, as coefficient vectors over p."""
    out = []
    for g in walg.generators:
        vec = [ZERO] * len(walg.setup.p)
        for mono, c in g.items():
            if len(mono) == 1 and mono[0][1] == 1:
                key = mono[0][0]
                gen, order = key_gen(key), key_order(key)
                if order == 0:
                    vec[gen] = c
        out.append(vec)
    return out


def generators_independent(walg: WAlgebra) -> bool:
    lp = linear_parts(walg)
    return bool(lp) and linalg.rank(lp) == len(lp)


# ---------------------------------------------------------------------- W elements

@dataclass
class WElement:
    abstract: DiffPoly     # in the generators W_j
    expansion: DiffPoly    # in the q_i

    def format(self, walg: WAlgebra) -> str:
        return self.abstract.format(walg.names)


def express_in_generators(walg: WAlgebra, g: DiffPoly) -> WElement:
    """Rewrite g ∈ W as a differential polynomial in the generators.

    Uses g = g(w): replace q_i^(m) by ∂^m κ(w|q_i) with abstract W_j, then
    confirm that substituting W_j ↦ w_j gives g back.
    """
    abstract = g.subs(walg.generator_images())
    back = abstract.subs(walg.generators) if abstract else DiffPoly.zero()
    if back != g:
        raise WAlgebraError("element is not in the W-algebra")
    return WElement(abstract, g)


def expand(walg: WAlgebra, p: DiffPoly) -> DiffPoly:
    """Substitute W_j ↦ w_j."""
    return p.subs(walg.generators)


# ---------------------------------------------------------------------- brackets

def ds_bracket_tables(setup: DSSetup) -> ZPair:
    """ρ{q_i λ q_j}_z on V(p): H = ρ([q_i,q_j]) + κ(q_i|q_j)λ, K = −κ(s|[q_i,q_j])."""
    alg = setup.alg
    n = len(setup.p)
    H = [[None] * n for _ in range(n)]
    K = [[None] * n for _ in range(n)]
    for i, qi in enumerate(setup.p):
        for j, qj in enumerate(setup.p):
            br = alg.bracket(qi, qj)
            terms = {(0,): rho_vector(setup, br)}
            k = alg.kappa(qi, qj)
            if k:
                terms[(1,)] = DiffPoly.const(k)
            H[i][j] = LambdaPoly(terms, 1)
            ks = alg.kappa(setup.s, br)
            K[i][j] = LambdaPoly({(0,): DiffPoly.const(-ks)}, 1) if ks else LambdaPoly.zero(1)
    return ZPair(BracketTable(H, setup.p_names, setup.p_latex), BracketTable(K, setup.p_names, setup.p_latex))


def _rewrite_lambda(walg: WAlgebra, p: LambdaPoly, check_closure: bool = True) -> LambdaPoly:
    out = {}
    for key, c in p.items():
        if check_closure and not in_W(walg.setup, c):
            raise WAlgebraError("λ-bracket coefficient is not in W")
        out[key] = express_in_generators(walg, c).abstract
    return LambdaPoly(out, p.nvars)


def w_bracket_table(walg: WAlgebra, check_closure: bool = True) -> ZPair:
    """Brackets {w_i λ w_j}_{H,ρ} and {w_i λ w_j}_{K,ρ} in the generators."""
    if walg._tables is not None:
        return walg._tables
    pair = ds_bracket_tables(walg.setup)
    r = walg.rank
    H = [[None] * r for _ in range(r)]
    K = [[None] * r for _ in range(r)]
    for i, gi in enumerate(walg.generators):
        for j, gj in enumerate(walg.generators):
            H[i][j] = _rewrite_lambda(walg, master_bracket(pair.H, gi, gj), check_closure)
            K[i][j] = _rewrite_lambda(walg, master_bracket(pair.K, gi, gj), check_closure)
    walg._tables = ZPair(BracketTable(H, walg.names, walg.latex), BracketTable(K, walg.names, walg.latex))
    return walg._tables


def virasoro_element(walg: WAlgebra) -> WElement:
    """L = ρ((1/2)Σ u^i u_i + x′ + (1/2)Σ v^r ∂v_r), in the generators."""
    setup = walg.setup
    alg = setup.alg
    dual = alg.dual_basis()
    casimir = DiffPoly.zero()
    for b in range(alg.dim):
        casimir = casimir + _linear(dual[b]) * DiffPoly.gen(b)
    L = casimir * Q(1, 2) + _linear(setup.triple.x).deriv()
    for up, down in zip(setup.v_up, setup.v_down):
        L = L + _linear(up) * _linear(down).deriv() * Q(1, 2)
    Lp = rho(setup, L)
    if not in_W(setup, Lp):
        raise WAlgebraError("the Virasoro element is not in W")
    return express_in_generators(walg, Lp)


def q_conformal_weight(walg: WAlgebra, g: DiffPoly):
    return conformal_weight(g, walg.q_weights())


def generator_weight(walg: WAlgebra, g: DiffPoly):
    """Conformal weight of an expression in the abstract generators."""
    return conformal_weight(g, walg.weights)
