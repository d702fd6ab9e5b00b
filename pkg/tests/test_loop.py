from hypothesis import given, settings, strategies as st

from dsred.lie import build_gl, build_ds_setup, build_sl, build_sl2, nilpotent_from_partition
from dsred.loop import (
    KerImData, LoopElement, ZGrading, ad_fzs_inverse, check_semisimple, graded_exp_action, kappa_z,
    loop_power, verify_center,
)
from dsred.poly import DiffPoly
from dsred.presets import s_candidates
from dsred.rational import Q

from helpers import diffpolys, small_q


def vec(alg, **c):
    v = alg.zero()
    for k, x in c.items():
        v[alg.names.index(k)] = Q(x)
    return v


def sl2_data():
    g = build_sl2()
    st_ = build_ds_setup(g, nilpotent_from_partition(g, [2]), s=vec(g, e=1))
    kerim = KerImData(g, ZGrading(list(st_.deg2), st_.s_deg2), st_.triple.f, st_.s)
    return g, st_, kerim


def sl3_principal_data():
    g = build_sl(3)
    st_ = build_ds_setup(g, nilpotent_from_partition(g, [3]), s=vec(g, E13=1))
    kerim = KerImData(g, ZGrading(list(st_.deg2), st_.s_deg2), st_.triple.f, st_.s)
    return g, st_, kerim


def test_grading_period_and_degrees():
    g, st_, kerim = sl2_data()
    gr = kerim.grading
    assert gr.period == 4
    assert gr.degree_of(kerim.Lambda) == -2
    e = g.names.index("e")
    assert gr.degree(1, e) == -2 and gr.degree(0, e) == 2


def test_loop_bracket_and_kappa():
    g, _, kerim = sl2_data()
    e, f, h = (LoopElement.from_vector(vec(g, **{n: 1})) for n in "efh")
    assert e.bracket(g, f) == h
    ze = e.shift_z(1)
    assert kappa_z(g, ze, f) == {1: DiffPoly.one()}
    assert kerim.Lambda.bracket(g, kerim.Lambda) == LoopElement()


def test_semisimplicity():
    _, _, kerim = sl2_data()
    rep = check_semisimple(kerim)
    assert rep.ok and rep.certified_globally
    _, _, kerim3 = sl3_principal_data()
    assert check_semisimple(kerim3).ok


def test_partition_42_fails_for_every_candidate():
    g = build_gl(6)
    tr = nilpotent_from_partition(g, [4, 2])
    base = build_ds_setup(g, tr)
    cands = s_candidates(base)
    assert cands
    for d, s in cands:
        st_ = build_ds_setup(g, tr, s=s)
        kerim = KerImData(g, ZGrading(list(st_.deg2), st_.s_deg2), tr.f, s)
        rep = check_semisimple(kerim)
        assert not rep.ok
        assert rep.failing_degree is not None


def test_center():
    g, _, kerim = sl2_data()
    rep = verify_center(kerim.Lambda, kerim)
    assert rep.commutes and not rep.central_in_g
    ident = build_gl(2)
    one = LoopElement.from_vector(vec(ident, E11=1, E22=1))
    tr = nilpotent_from_partition(ident, [2])
    st_ = build_ds_setup(ident, tr, s=vec(ident, E12=1))
    k2 = KerImData(ident, ZGrading(list(st_.deg2), st_.s_deg2), tr.f, st_.s)
    assert verify_center(one, k2).central_in_g


def test_loop_power_matches_matrix_square():
    g, st_, kerim = sl3_principal_data()
    sq = loop_power(g, kerim.Lambda, 2)
    # (f + z E13)^2 = E31 + z (E12 + E23) in sl_3
    expected = LoopElement.from_vector(vec(g, E31=1)) + LoopElement.from_vector(vec(g, E12=1, E23=1), 1)
    assert sq == expected


def random_loop(alg, grading, d, coeffs):
    out = LoopElement()
    for (k, b), c in zip(grading.piece(d), coeffs):
        if c:
            out = out + LoopElement.from_vector(alg.basis(b), k, c)
    return out


@settings(max_examples=200, deadline=None)
@given(st.integers(-6, 6), st.lists(diffpolys(2, 1, 2, 2), min_size=8, max_size=8))
def test_ker_im_decomposition(d, coeffs):
    g, st_, kerim = sl3_principal_data()
    y = random_loop(g, kerim.grading, d, coeffs)
    h, x = kerim.decompose(y, d)
    assert h + kerim.apply(x) == y
    assert kerim.apply(h) == LoopElement()
    assert kerim.decompose(x, d + 2)[0] == LoopElement()
    if y and not h:
        assert kerim.apply(ad_fzs_inverse(kerim, y)) == y


@settings(max_examples=200, deadline=None)
@given(st.lists(small_q, min_size=3, max_size=3), st.lists(small_q, min_size=3, max_size=3))
def test_graded_exp_action_matches_plain_series(gc, xc):
    g, st_, kerim = sl2_data()
    gr = kerim.grading
    G = {2: random_loop(g, gr, 2, [DiffPoly.const(c) for c in gc[:1]]),
         4: random_loop(g, gr, 4, [DiffPoly.const(c) for c in gc[1:2]])}
    x = {-2: random_loop(g, gr, -2, [DiffPoly.const(c) for c in xc[:2]]),
         0: random_loop(g, gr, 0, [DiffPoly.const(c) for c in xc[2:]])}
    top = 6
    got = graded_exp_action(g, G, x, top)
    # plain series with brute-force truncation
    Gt = G[2] + G[4]
    term = x[-2] + x[0]
    total = term
    k = 1
    while term and k < 8:
        term = Gt.bracket(g, term).scale(Q(1, k))
        total = total + term
        k += 1
    expect = {d: v for d, v in gr.split(total).items() if d <= top}
    assert {d: v for d, v in got.items()} == {d: v for d, v in expect.items() if v}
