"""Acceptance criteria 1-8, one PASS/FAIL line each.

Each criterion runs a list of named sub-checks; a sub-check passes when it
returns without raising.  Run under pytest or directly as a script.
"""

import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import test_hierarchy as TH  # noqa: E402
import test_loop as TL  # noqa: E402
import test_poly as TP  # noqa: E402
import test_pva as TV  # noqa: E402
import test_walgebra as TW  # noqa: E402

from dsred import linalg  # noqa: E402
from dsred.hierarchy import lenard_verify  # noqa: E402
from dsred.loop import KerImData, ZGrading, check_semisimple  # noqa: E402
from dsred.poly import LambdaPoly  # noqa: E402
from dsred.presets import build_preset  # noqa: E402
from dsred.pva import master_bracket  # noqa: E402
from dsred.walgebra import virasoro_element, w_bracket_table  # noqa: E402


def _check_all(checks):
    def go():
        for name, res in checks.items():
            assert res, name
    return go


# ---------------------------------------------------------------------- criterion bodies

def c1():
    return [("generator", TW.test_sl2_generator), ("bracket", TW.test_sl2_bracket),
            ("densities and KdV flow", TH.test_kdv)]


def c2():
    return [("generators", TW.test_sl3_principal_generators),
            ("bracket table", TW.test_sl3_principal_brackets),
            ("system and Boussinesq elimination", TH.test_boussinesq)]


def c3():
    def virasoro_L():
        W1, _, _, W4 = TW.variables(range(4))
        for name in ("sl3-minimal", "sl3-minimal-l0"):
            assert virasoro_element(TW.walgebra(name)).abstract == W1 + W4 * W4 * 3
    return [("generators, l maximal isotropic", TW.test_sl3_minimal_generators),
            ("generators, l = 0", TW.test_sl3_minimal_l0_generators),
            ("bracket table, l maximal isotropic", TW.test_sl3_minimal_brackets),
            ("bracket table, l = 0", TW.test_sl3_minimal_l0_brackets),
            ("L = w1 + 3 w4^2", virasoro_L),
            ("fractional KdV, l maximal isotropic", TH.test_fractional_kdv_minimal),
            ("fractional KdV, l = 0", TH.test_fractional_kdv_l0),
            ("z = 0 tables agree", TW.test_minimal_tables_agree_at_z0)]


def c4():
    return [("h_0, T_1, h_1, T_2, h_2", TH.test_nwave_matrix_coefficients),
            ("densities f_0, f_1, f_2", TH.test_nwave_densities),
            ("flows t_0 and N-wave equation", TH.test_nwave_flows),
            ("pipeline checks", TH.test_nwave_checks)]


def c5():
    half = TW.Q(-1, 2)
    cases = [("sl2-kdv", half, 2), ("sl3-boussinesq", -2, 0), ("sl3-minimal", half, 0),
             ("sl3-minimal-l0", half, 2)]
    out = [(f"Virasoro {n}", (lambda n=n, c=c, z=z: TW.test_virasoro(n, c, z))) for n, c, z in cases]
    weights = [("sl2-kdv", [2]), ("sl3-boussinesq", [2, 3]), ("sl3-minimal", [2, TW.Q(3, 2), TW.Q(3, 2), 1]),
               ("sl3-minimal-l0", [2, TW.Q(3, 2), TW.Q(3, 2), 1])]
    out += [(f"weights {n}", (lambda n=n, w=w: TW.test_conformal_weights(n, w))) for n, w in weights]

    def primaries():
        for name in ("sl3-minimal", "sl3-minimal-l0"):
            walg = TW.walgebra(name)
            L = virasoro_element(walg).abstract
            H = w_bracket_table(walg).H
            for j, d in enumerate(walg.weights):
                if d in (1, TW.Q(3, 2)):
                    w = TW.DiffPoly.gen(j)
                    assert master_bracket(H, L, w) == LambdaPoly({(0,): w.deriv(), (1,): w * d}, 1), (name, j)
    out.append(("Δ ∈ {1, 3/2} primary at z = 0", primaries))
    return out


def c6():
    return [("[∂/∂u^(n), ∂] = ∂/∂u^(n-1)", TP.test_commutation_relation),
            ("δ/δu ∘ ∂ = 0", TP.test_variational_derivative_kills_total_derivatives),
            ("sesquilinearity", TV.test_sesquilinearity),
            ("left Leibniz", TV.test_left_leibniz),
            ("right Leibniz", TV.test_right_leibniz),
            ("skew-symmetry gl2/sl2/sl3", TV.test_skew_symmetry_random),
            ("Jacobi gl2/sl2/sl3", TV.test_jacobi_random),
            ("affine tables are PVAs", TV.test_affine_pairs_are_pencils),
            ("gauge invariance", TW.test_gauge_invariance),
            ("exponential vs conformal action", TW.test_exponentiated_conformal_action),
            ("closure of W-brackets", TW.test_bracket_closes_on_W)]


def c7():
    def ds(name):
        def go():
            pre, walg, res = TH.ds_run(name)
            assert all(res.checks.values()), [k for k, v in res.checks.items() if not v]
            assert len(res.densities) >= 3
            rep = res.details["lenard"]
            assert not any(key[0] == -1 for key in rep.residuals), "K(F_0) = 0"
            assert res.details["independence"].rank == len(res.densities)
        return go

    def nwave():
        _, res = TH.nwave()
        assert all(res.checks.values()), [k for k, v in res.checks.items() if not v]
        assert res.details["lenard"].ok and res.details["independence"].rank == 3

    return [(n, ds(n)) for n in ("sl2-kdv", "sl3-boussinesq", "sl3-minimal")] + [
        ("gln-nwave", nwave),
        ("Lenard recursion on W", lambda: [TH.test_lenard_recursion(n) for n in TH.DS]),
        ("involution on W", lambda: [TH.test_involution(n) for n in TH.DS])]


def c8():
    def scan():
        pre = build_preset("gln-partition", parts=[4, 2])
        assert pre.candidates
        for label, s, st in pre.candidates:
            kerim = KerImData(st.alg, ZGrading(list(st.deg2), st.s_deg2), list(st.triple.f), list(s))
            rep = check_semisimple(kerim)
            assert not rep.ok and rep.failing_degree is not None, label

    def kernel_spanned():
        # Ker(ad n) computed on all of g; its homogeneous components lie in the span of the candidates
        pre = build_preset("gln-partition", parts=[4, 2])
        base, alg = pre.setup, pre.alg
        rows = []
        for a in base.n:
            cols = [alg.bracket(a, alg.basis(b)) for b in range(alg.dim)]
            rows += linalg.transpose(cols)
        ker = linalg.nullspace(rows, alg.dim)
        by_deg = {}
        for _, s, st in pre.candidates:
            by_deg.setdefault(st.s_deg2, []).append(list(s))
        for v in ker:
            for d in set(base.deg2):
                comp = [c if base.deg2[b] == d else 0 for b, c in enumerate(v)]
                if any(comp) and d >= 0:
                    span = by_deg.get(d, [])
                    assert span and linalg.rank(span + [comp]) == len(span), d
    return [("every candidate fails", scan), ("candidates span Ker(ad n)", kernel_spanned),
            ("all partition candidates fail", TL.test_partition_42_fails_for_every_candidate)]


CRITERIA = [
    (1, "sl2: generator, bracket, KdV densities and flow", c1),
    (2, "sl3 principal: generators, bracket table, Boussinesq", c2),
    (3, "sl3 minimal, both l: generators, tables, L, fractional KdV", c3),
    (4, "gl3 N-wave: matrix dressing, densities, flows", c4),
    (5, "Virasoro element, central charge, weights, primaries", c5),
    (6, "randomized property suites", c6),
    (7, "Lenard-Magri suite at depth 3", c7),
    (8, "gl6 [4,2]: no semisimple f + z s", c8),
]


def evaluate(body):
    failures = []
    for name, fn in body():
        try:
            fn()
        except Exception as exc:  # report every failing sub-check
            failures.append(f"{name}: {type(exc).__name__}: {exc}")
    return failures


def _line(num, title, failures, seconds):
    status = "PASS" if not failures else "FAIL"
    return f"criterion {num}: {status}  {title}  ({seconds:.1f} s)"


@pytest.mark.parametrize("num,title,body", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(num, title, body, capsys):
    t = time.time()
    failures = evaluate(body)
    with capsys.disabled():
        print("\n" + _line(num, title, failures, time.time() - t))
        for f in failures:
            print("    " + f)
    assert not failures


if __name__ == "__main__":
    bad = 0
    for num, title, body in CRITERIA:
        t = time.time()
        failures = evaluate(body)
        print(_line(num, title, failures, time.time() - t))
        for f in failures:
            print("    " + f)
        bad += bool(failures)
    sys.exit(1 if bad else 0)
