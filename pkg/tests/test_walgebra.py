"""W-algebra generators and λ-brackets against independently known closed forms."""

from functools import lru_cache
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from dsred.poly import DiffPoly, LambdaPoly
from dsred.presets import build_preset
from dsred.pva import check_pair, check_virasoro, master_bracket
from dsred.rational import Q
from dsred.walgebra import (
    LoopElement, WAlgebraError, compute_generators, conformal_action, ds_bracket_tables, expand,
    express_in_generators, gauge_transform, generator_weight, generators_independent, in_W,
    substitute_r, verify_gauge_fixing, virasoro_element, w_bracket_table,
)

from helpers import diffpolys, small_q

PRESETS = ("sl2-kdv", "sl3-boussinesq", "sl3-minimal", "sl3-minimal-l0")


@lru_cache(maxsize=None)
def walgebra(name):
    pre = build_preset(name)
    return compute_generators(pre.setup, pre.names, pre.latex)


def variables(names):
    return [DiffPoly.gen(i) for i in range(len(names))]


def lp(*coeffs):
    """λ-polynomial Σ coeffs[k] λ^k."""
    return LambdaPoly({(k,): DiffPoly.const(c) if not isinstance(c, DiffPoly) else c
                       for k, c in enumerate(coeffs) if c}, 1)


def op(X, *factors):
    """Π (a λ + b ∂) applied to X, for factors given as (a, b)."""
    p = LambdaPoly({(0,): X}, 1)
    for a, b in factors:
        p = p.shift((1,)) * a + p.deriv() * b
    return p


LAM = (1, 0)


def brackets(name, A, B):
    """(H, K) parts of {A λ B} for expressions in the abstract generators."""
    pair = w_bracket_table(walgebra(name))
    return master_bracket(pair.H, A, B), master_bracket(pair.K, A, B)


# ---------------------------------------------------------------------- generators

def test_sl2_generator():
    h, f = variables(["h", "f"])
    w = walgebra("sl2-kdv")
    assert w.generators == [h * h * Q(1, 4) + h.deriv() * Q(1, 2) + f]


def test_sl3_principal_generators():
    h1, h2, E21, E31, E32 = variables(range(5))
    w = walgebra("sl3-boussinesq")
    w1 = (E21 + E32) * Q(1, 2) + (h1 * h1 + h1 * h2 + h2 * h2) * Q(1, 6) + (h1.deriv() + h2.deriv()) * Q(1, 2)
    w2 = (E31 + h1 * (E21 - E32 * 2) * Q(1, 3) + h2 * (E21 * 2 - E32) * Q(1, 3)
          + (h1 ** 3 - h2 ** 3) * Q(2, 27) + h1 * h2 * (h1 - h2) * Q(1, 9)
          + (E21.deriv() - E32.deriv()) * Q(1, 2) + h1 * (h1.deriv() * 2 - h2.deriv()) * Q(1, 6)
          + h2 * (h1.deriv() - h2.deriv() * 2) * Q(1, 6) + (h1.deriv(2) - h2.deriv(2)) * Q(1, 6))
    assert w.generators == [w1, w2]


def test_sl3_minimal_generators():
    g, h1, h2, E21, E31, E32 = variables(range(6))
    w = walgebra("sl3-minimal")
    w1 = (E31 - g ** 4 * Q(3, 64) + g * (E21 - E32) * Q(1, 2) + g * g * (h1 - h2) * Q(1, 8)
          + (h1 + h2) ** 2 * Q(1, 4) + (h1.deriv() + h2.deriv()) * Q(1, 2))
    w2 = E21 - g ** 3 * Q(1, 8) + g * h1 * Q(1, 2) + g.deriv() * Q(1, 2)
    w3 = E32 + g ** 3 * Q(1, 8) + g * h2 * Q(1, 2) + g.deriv() * Q(1, 2)
    w4 = -g * g * Q(1, 8) + (h1 - h2) * Q(1, 6)
    assert w.generators == [w1, w2, w3, w4]


def test_sl3_minimal_l0_generators():
    E12, E23, h1, h2, E21, E31, E32 = variables(range(7))
    w = walgebra("sl3-minimal-l0")
    # the quartic term is E12^2 E23^2 (weight 2); a misprint with E32 would break the weight
    w1 = (E31 + E12 * E21 + E23 * E32 - E12 ** 2 * E23 ** 2 * Q(3, 4) + (h1 + h2) ** 2 * Q(1, 4)
          - E12 * E23 * (h1 - h2) * Q(1, 2) + E23 * E12.deriv() * Q(1, 2) - E12 * E23.deriv() * Q(1, 2)
          + (h1.deriv() + h2.deriv()) * Q(1, 2))
    w2 = E21 - E12 * E23 ** 2 - E23 * h1 - E23.deriv()
    w3 = E32 - E12 ** 2 * E23 + E12 * h2 + E12.deriv()
    w4 = E12 * E23 * Q(1, 2) + (h1 - h2) * Q(1, 6)
    assert w.generators == [w1, w2, w3, w4]


@pytest.mark.parametrize("name", PRESETS)
def test_gauge_fixing_and_independence(name):
    w = walgebra(name)
    assert verify_gauge_fixing(w)
    assert generators_independent(w)
    for g in w.generators:
        assert in_W(w.setup, g)


@pytest.mark.parametrize("name,weights", [
    ("sl2-kdv", [2]), ("sl3-boussinesq", [2, 3]),
    ("sl3-minimal", [2, Q(3, 2), Q(3, 2), 1]), ("sl3-minimal-l0", [2, Q(3, 2), Q(3, 2), 1]),
])
def test_conformal_weights(name, weights):
    w = walgebra(name)
    assert w.weights == [Q(x) for x in weights]
    for g, d in zip(w.generators, w.weights):
        assert generator_weight(w, express_in_generators(w, g).abstract) == d


def test_non_invariant_rejected():
    w = walgebra("sl2-kdv")
    h, f = variables(["h", "f"])
    assert not in_W(w.setup, h)
    with pytest.raises(WAlgebraError):
        express_in_generators(w, h)


# ---------------------------------------------------------------------- brackets

def test_sl2_bracket():
    (W,) = variables(["w"])
    H, K = brackets("sl2-kdv", W, W)
    assert H == op(W, (2, 1)) + lp(0, 0, 0, Q(-1, 2))
    assert K == lp(0, -2)


def test_sl3_principal_brackets():
    W1, W2 = variables(range(2))
    L = W1 * 2
    assert brackets("sl3-boussinesq", L, L) == (op(L, (2, 1)) + lp(0, 0, 0, -2), LambdaPoly.zero(1))
    assert brackets("sl3-boussinesq", L, W2) == (op(W2, (3, 1)), lp(0, -3))
    assert brackets("sl3-boussinesq", W2, L)[1] == lp(0, -3)
    H, K = brackets("sl3-boussinesq", W2, W2)
    want = (op(L * L, (2, 1)) * Q(1, 3) - op(L, (1, 1), (1, 1), (1, 1)) * Q(1, 6)
            - op(L, LAM, LAM, LAM) * Q(1, 6) - op(L, LAM, (1, 1), (2, 1)) * Q(1, 4)
            + lp(0, 0, 0, 0, 0, Q(1, 6)))
    assert H == want
    assert not K


def _minimal_L(W1, W4):
    return W1 + W4 * W4 * 3


def test_sl3_minimal_brackets():
    W1, W2, W3, W4 = variables(range(4))
    L = _minimal_L(W1, W4)
    b = lambda A, B: brackets("sl3-minimal", A, B)
    zero = LambdaPoly.zero(1)
    assert b(L, L) == (op(L, (2, 1)) + lp(0, 0, 0, Q(-1, 2)), zero)
    assert b(L, W2) == (op(W2, (Q(3, 2), 1)), lp(0, Q(-3, 2)))
    assert b(L, W3) == (op(W3, (Q(3, 2), 1)), lp(0, Q(-3, 2)))
    assert b(L, W4) == (op(W4, (1, 1)), zero)
    assert b(W2, W2) == (zero, zero)
    assert b(W3, W3) == (zero, zero)
    assert b(W2, W3) == (lp(-L + W4 * W4 * 12) - op(W4, (2, 1)) * 3 + lp(0, 0, 1), zero)
    assert b(W2, W4) == (lp(W2 * Q(1, 2)), lp(Q(-1, 2)))
    assert b(W3, W4) == (lp(W3 * Q(-1, 2)), lp(Q(1, 2)))
    assert b(W4, W4) == (lp(0, Q(1, 6)), zero)


def test_sl3_minimal_l0_brackets():
    W1, W2, W3, W4 = variables(range(4))
    L = _minimal_L(W1, W4)
    b = lambda A, B: brackets("sl3-minimal-l0", A, B)
    zero = LambdaPoly.zero(1)
    assert b(L, L) == (op(L, (2, 1)) + lp(0, 0, 0, Q(-1, 2)), lp(0, -2))
    assert b(L, W2) == (op(W2, (Q(3, 2), 1)), zero)
    assert b(L, W3) == (op(W3, (Q(3, 2), 1)), zero)
    assert b(L, W4) == (op(W4, (1, 1)), zero)
    assert b(W2, W2) == (zero, zero)
    assert b(W3, W3) == (zero, zero)
    assert b(W2, W3) == (lp(-L + W4 * W4 * 12) - op(W4, (2, 1)) * 3 + lp(0, 0, 1), lp(1))
    assert b(W2, W4) == (lp(W2 * Q(1, 2)), zero)
    assert b(W3, W4) == (lp(W3 * Q(-1, 2)), zero)
    assert b(W4, W4) == (lp(0, Q(1, 6)), zero)


def test_minimal_tables_agree_at_z0():
    assert w_bracket_table(walgebra("sl3-minimal")).H == w_bracket_table(walgebra("sl3-minimal-l0")).H


@pytest.mark.parametrize("name", PRESETS)
def test_w_tables_are_pencils(name):
    for label, (sk, jc) in check_pair(w_bracket_table(walgebra(name))).items():
        assert sk.ok and jc.ok, label


@pytest.mark.parametrize("name,c,alpha_z", [
    ("sl2-kdv", Q(-1, 2), 2), ("sl3-boussinesq", -2, 0),
    ("sl3-minimal", Q(-1, 2), 0), ("sl3-minimal-l0", Q(-1, 2), 2),
])
def test_virasoro(name, c, alpha_z):
    w = walgebra(name)
    L = virasoro_element(w)
    vr = check_virasoro(w_bracket_table(w), L.abstract)
    alg, x = w.setup.alg, w.setup.triple.x
    assert vr.ok and vr.c == c == -alg.kappa(x, x)
    assert vr.alpha_H == 0
    assert vr.alpha_z == alpha_z == 2 * alg.kappa(w.setup.triple.f, w.setup.s)


def test_virasoro_element_matches_display():
    W1, W2, W3, W4 = variables(range(4))
    assert virasoro_element(walgebra("sl2-kdv")).abstract == W1
    assert virasoro_element(walgebra("sl3-boussinesq")).abstract == W1 * 2
    assert virasoro_element(walgebra("sl3-minimal")).abstract == _minimal_L(W1, W4)
    assert virasoro_element(walgebra("sl3-minimal-l0")).abstract == _minimal_L(W1, W4)


# ---------------------------------------------------------------------- gauge invariance

@st.composite
def gauge_case(draw, max_terms=2):
    name = draw(st.sampled_from(PRESETS))
    w = walgebra(name)
    setup = w.setup
    A = LoopElement()
    for a in setup.n:
        coeff = draw(diffpolys(len(setup.p), 1, max_terms, 2))
        if coeff:
            A = A + LoopElement.from_vector(a, 0, coeff)
    return name, A


@settings(max_examples=200, deadline=None)
@given(gauge_case())
def test_gauge_invariance(case):
    name, A = case
    w = walgebra(name)
    qA = gauge_transform(w.setup, A)
    for g in w.generators:
        assert substitute_r(w.setup, g, qA) == g


def nested_action(setup, a, g, cap=64):
    """Terms [T_0, T_1, ...] with T_n = a ρ_{λ1} ... a ρ_{λn} g as {exponents: coeff}."""
    terms = [{(): g}]
    while terms[-1]:
        if len(terms) > cap:
            raise AssertionError("conformal action did not terminate")
        nxt = {}
        for key, c in terms[-1].items():
            for (e,), d in conformal_action(setup, a, c).items():
                k = (e,) + key
                nxt[k] = nxt[k] + d if k in nxt else d
        terms.append({k: v for k, v in nxt.items() if v})
    return terms


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_exponentiated_conformal_action(data):
    name = data.draw(st.sampled_from(PRESETS))
    setup = walgebra(name).setup
    npv = len(setup.p)
    a = data.draw(st.sampled_from(setup.n))
    scale = data.draw(small_q.filter(bool))
    h = data.draw(diffpolys(npv, 1, 2, 2)) + scale
    g = data.draw(diffpolys(npv, 1, 2, 2))
    lhs = substitute_r(setup, g, gauge_transform(setup, LoopElement.from_vector(a, 0, h)))
    rhs = DiffPoly.zero()
    for n, T in enumerate(nested_action(setup, a, g)):
        for key, c in T.items():
            prod = c
            for e in key:
                prod = prod * h.deriv(e)
            rhs = rhs + prod * Q((-1) ** n, factorial(n))
    assert lhs == rhs


# ---------------------------------------------------------------------- closure

@st.composite
def w_pair(draw):
    name = draw(st.sampled_from(PRESETS))
    r = walgebra(name).rank
    # one quadratic and one linear argument keeps the expansions in q small
    factor = st.tuples(st.integers(0, r - 1), st.integers(0, 1))
    pairs = draw(st.lists(st.tuples(small_q, factor, factor), min_size=1, max_size=2))
    P = DiffPoly.from_terms([(c, [(i, m, 1), (j, n, 1)]) for c, (i, m), (j, n) in pairs])
    R = draw(diffpolys(r, 2, 2, 1))
    if draw(st.booleans()):
        P, R = R, P
    return name, P, R


@settings(max_examples=200, deadline=None)
@given(w_pair(), st.integers(-2, 2))
def test_bracket_closes_on_W(case, z):
    name, P, R = case
    w = walgebra(name)
    ds = ds_bracket_tables(w.setup).at(Q(z))
    wt = w_bracket_table(w).at(Q(z))
    got = master_bracket(ds, expand(w, P), expand(w, R))
    want = master_bracket(wt, P, R)
    for key, c in got.items():
        assert in_W(w.setup, c)
    assert got == LambdaPoly({k: expand(w, v) for k, v in want.items()}, 1)
