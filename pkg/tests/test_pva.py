"""λ-bracket axioms for affine brackets and the Master Formula."""

from hypothesis import given, settings, strategies as st

from dsred.lie import build_gl, build_sl, build_sl2
from dsred.poly import DiffPoly, LambdaPoly, LocalFunctional
from dsred.pva import (
    BracketTable, affine_table, check_jacobi, check_pair, check_skew, check_virasoro,
    functional_bracket, hamiltonian_flow, jacobi_residual, master_bracket, skew_residual,
)
from dsred.rational import Q

from helpers import diffpolys, lambda_times_plus_d, small_q

GL2 = affine_table(build_gl(2))
SL2 = affine_table(build_sl2(), build_sl2().basis(0))
SL3 = affine_table(build_sl(3), build_sl(3).basis(1))
TABLES = {"gl2": GL2.H, "sl2": SL2.at(Q(2)), "sl3": SL3.at(Q(-1, 2))}
table_names = st.sampled_from(sorted(TABLES))


def lam(*coeffs):
    return LambdaPoly({(k,): c for k, c in enumerate(coeffs) if c}, 1)


def gen(i, n=0):
    return DiffPoly.gen(i, n)


@st.composite
def table_and_polys(draw, count, max_order=2, max_terms=3, max_vars=2):
    name = draw(table_names)
    t = TABLES[name]
    polys = [draw(diffpolys(t.size, max_order, max_terms, max_vars)) for _ in range(count)]
    return t, polys


def test_affine_sl2_generators():
    e, h, f = (gen(i) for i in range(3))
    H = SL2.H
    assert master_bracket(H, e, f) == lam(h, DiffPoly.const(1))
    assert master_bracket(H, h, e) == lam(e * 2)
    assert master_bracket(H, h, h) == lam(0, DiffPoly.const(2))
    # K = -κ(s|[a,b]) with s = e
    assert master_bracket(SL2.K, h, f) == lam(DiffPoly.const(2))


def test_master_formula_example():
    e, h, f = (gen(i) for i in range(3))
    H = SL2.H
    # {h λ ef} = 2ef - 2ef = 0
    assert master_bracket(H, h, e * f) == LambdaPoly.zero(1)
    # {e λ h^2} = 2 h {e λ h} with {e λ h} = -2e
    assert master_bracket(H, e, h * h) == lam(e * h * -4)
    # {h^2 λ e} = (λ + ∂ acting on h) 2 {h λ+∂ e}: 4 h e
    assert master_bracket(H, h * h, e) == lam(h * e * 4)
    # {e' λ f f} = -λ (2 f (h + λ))
    assert master_bracket(H, e.deriv(), f * f) == lam(0, f * h * -2, f * -2)


def test_sesquilinearity_on_generators():
    e, h, f = (gen(i) for i in range(3))
    H = SL2.H
    assert master_bracket(H, e.deriv(), f) == master_bracket(H, e, f).shift((1,)) * -1
    p = master_bracket(H, e, f)
    assert master_bracket(H, e, f.deriv()) == p.shift((1,)) + p.deriv()


@settings(max_examples=250, deadline=None)
@given(table_and_polys(2))
def test_sesquilinearity(data):
    t, (f, g) = data
    p = master_bracket(t, f, g)
    assert master_bracket(t, f.deriv(), g) == p.shift((1,)) * -1
    assert master_bracket(t, f, g.deriv()) == p.shift((1,)) + p.deriv()


@settings(max_examples=250, deadline=None)
@given(table_and_polys(3))
def test_left_leibniz(data):
    t, (f, g, h) = data
    lhs = master_bracket(t, f, g * h)
    rhs = master_bracket(t, f, g) * h + master_bracket(t, f, h) * g
    assert lhs == rhs


@settings(max_examples=250, deadline=None)
@given(table_and_polys(3))
def test_right_leibniz(data):
    t, (f, g, h) = data
    # {f g λ h} = {f λ+∂ h}→ g + {g λ+∂ h}→ f
    lhs = master_bracket(t, f * g, h)
    rhs = lambda_times_plus_d(master_bracket(t, f, h), g) + lambda_times_plus_d(master_bracket(t, g, h), f)
    assert lhs == rhs


@settings(max_examples=250, deadline=None)
@given(table_and_polys(2))
def test_skew_symmetry_random(data):
    t, (f, g) = data
    assert not skew_residual(t, f, g)


@settings(max_examples=200, deadline=None)
@given(table_and_polys(3, max_order=1, max_terms=2, max_vars=2))
def test_jacobi_random(data):
    t, (a, b, c) = data
    assert not jacobi_residual(t, a, b, c)


def test_affine_pairs_are_pencils():
    for pair in (GL2, SL2, SL3):
        for label, (sk, jc) in check_pair(pair).items():
            assert sk.ok and jc.ok, label


def test_corrupted_table_is_caught():
    e, h, f = (gen(i) for i in range(3))
    entries = [row[:] for row in SL2.H.entries]
    entries[1][0] = lam(e * 3)
    entries[0][1] = lam(e * -3)
    bad = BracketTable(entries, SL2.H.names)
    assert check_skew(bad).ok
    jc = check_jacobi(bad)
    assert not jc.ok and jc.residual
    entries[0][1] = lam(e * -2)
    sk = check_skew(BracketTable(entries, SL2.H.names))
    assert not sk.ok and sk.witness == (0, 1)


def test_table_json_round_trip():
    t = SL3.at(Q(3))
    assert BracketTable.from_json(t.to_json()) == t


def test_functional_bracket_and_flow():
    # a single field with {u λ u} = (2λ + ∂)u + cλ^3 (Virasoro-Magri)
    u = gen(0)
    c = Q(-1, 2)
    t = BracketTable([[LambdaPoly({(0,): u.deriv(), (1,): u * 2, (3,): DiffPoly.const(c)}, 1)]], ["u"])
    flow = hamiltonian_flow(t, u * u * Q(1, 2))
    # u_t = (u∂ + ∂u + c∂^3) u  =  3 u u' + c u'''
    assert flow[0] == u * u.deriv() * 3 + u.deriv(3) * c
    assert functional_bracket(t, u, u).is_zero()
    # {∫u^2/2, ∫u^3/3} = ∫ u^2 (3uu' + cu''') = c ∫ u'^3 mod ∂
    assert functional_bracket(t, u * u * Q(1, 2), u ** 3 * Q(1, 3)) == LocalFunctional(u.deriv() ** 3 * c)
    assert functional_bracket(t, u.deriv(), u ** 3).is_zero()
    vr = check_virasoro(t, u)
    assert vr.ok and vr.c == c and vr.alpha_H == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2), diffpolys(3, 2, 3, 2), diffpolys(3, 2, 3, 2))
def test_functional_bracket_skew(z, f, g):
    t = SL2.at(Q(z))
    assert functional_bracket(t, f, g) == LocalFunctional(DiffPoly.zero()) - functional_bracket(t, g, f)


def test_virasoro_sugawara_sl2():
    # Sugawara: L = (ef + fe + h^2/2)/(2k) with level k = 1 gives c = 0 classically
    e, h, f = (gen(i) for i in range(3))
    L = (e * f + h * h * Q(1, 4))
    vr = check_virasoro(SL2.H, L)
    assert vr.ok and vr.c == 0
    # e is primary of weight 1 for this L
    assert master_bracket(SL2.H, L, e) == lam(e.deriv(), e)
