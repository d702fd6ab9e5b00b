"""Pipeline orchestration and the text / LaTeX / JSON emitters.

A report is a plain dict with a fixed key order; every number is an exact
rational rendered canonically, so equal inputs give byte-identical output.
"""

from __future__ import annotations

import json

from .hierarchy import (
    DecompositionError, HierarchyError, iterate_time_derivative, run_ds, run_homogeneous,
    table_flows, time_derivative,
)
from .lie import vector_label
from .loop import KerImData, ZGrading, check_semisimple
from .poly import DiffPoly, LocalFunctional
from .pva import check_pair, check_virasoro, master_bracket
from .presets import Preset, fzs
from .rational import Q, q_short
from .walgebra import (
    compute_generators, generators_independent, generator_weight, q_conformal_weight,
    verify_gauge_fixing, virasoro_element, w_bracket_table,
)


def _poly(p: DiffPoly, names, latex_names) -> dict:
    return {"text": p.format(names), "latex": p.latex(latex_names)}


def _lam(p, names, latex_names) -> dict:
    return {"text": p.format(names), "latex": p.latex(latex_names)}


def loop_label(alg, a) -> str:
    """z-graded label of a loop element with constant coefficients."""
    ks = sorted({k for k, _ in a.terms}, reverse=True)
    pieces = []
    for k in ks:
        body = vector_label(alg, a.scalar_vector(k, alg.dim))
        if k == 0:
            pieces.append(body)
        else:
            zp = "z" if k == 1 else f"z^{k}"
            pieces.append(f"{zp} ({body})" if " " in body or body.startswith("-") else f"{zp} {body}")
    return " + ".join(pieces) or "0"


def _functional(g: LocalFunctional, names, latex_names) -> dict:
    rep = g.normalized()
    return {"text": "∫ " + rep.format(names), "latex": "\\int " + rep.latex(latex_names),
            "json": rep.to_json()}


# ---------------------------------------------------------------------- W-algebra part

def walgebra_section(pre: Preset, checks: dict, jacobi: bool = True):
    st = pre.setup
    walg = compute_generators(st, pre.names, pre.latex)
    names, lnames = walg.names, walg.latex
    pn, pl = st.p_names, st.p_latex
    gens = []
    for j, g in enumerate(walg.generators):
        gens.append({
            "name": names[j],
            "weight": q_short(walg.weights[j]),
            "v": vector_label(st.alg, walg.V[j]),
            "q": _poly(g, pn, pl),
            "q_json": g.to_json(),
        })
    checks["gauge fixing (exponential series)"] = verify_gauge_fixing(walg)
    checks["generators independent"] = generators_independent(walg)
    checks["conformal weights Δ_j = 1 + δ_x(v^j)"] = all(
        q_conformal_weight(walg, g) == walg.weights[j] for j, g in enumerate(walg.generators))
    pair = w_bracket_table(walg)
    checks["bracket coefficients in W"] = True     # w_bracket_table raises otherwise
    brackets = []
    for i in range(walg.rank):
        for j in range(i, walg.rank):
            brackets.append({"i": names[i], "j": names[j],
                             "H": _lam(pair.H.entries[i][j], names, lnames),
                             "K": _lam(pair.K.entries[i][j], names, lnames)})
    if jacobi:
        for label, (sk, jc) in check_pair(pair).items():
            checks[f"skew-symmetry ({label})"] = sk.ok
            checks[f"Jacobi identity ({label})"] = jc.ok
    sec = {"generators": gens, "brackets": brackets, "table": pair.to_json()}
    if any(st.s):
        L = virasoro_element(walg)
        vr = check_virasoro(pair, L.abstract)
        alg = st.alg
        c_expect = -alg.kappa(st.triple.x, st.triple.x)
        az_expect = 2 * alg.kappa(st.triple.f, st.s)
        checks["Virasoro element"] = vr.ok
        checks["central charge c = -κ(x|x)"] = vr.ok and vr.c == c_expect
        checks["z-coefficient 2κ(f|s)"] = vr.ok and vr.alpha_z == az_expect
        prim = []
        for j, g in enumerate(walg.generators):
            if walg.weights[j] in (Q(1), Q(3, 2)):
                wj = DiffPoly.gen(j)
                br = master_bracket(pair.H, L.abstract, wj)
                expect = {(0,): wj.deriv(), (1,): wj * walg.weights[j]}
                ok = dict(br.items()) == {k: v for k, v in expect.items() if v}
                prim.append({"name": names[j], "weight": q_short(walg.weights[j]), "ok": ok})
                checks[f"{names[j]} primary"] = ok
        sec["virasoro"] = {
            "L": _poly(L.abstract, names, lnames),
            "c": q_short(vr.c) if vr.ok else None,
            "alpha_z": q_short(vr.alpha_z) if vr.ok else None,
            "primary": prim,
        }
    return walg, pair, sec


# ---------------------------------------------------------------------- hierarchy part

def _ds_derived(pre: Preset, walg, res, names) -> list:
    """Preset-specific rewritings of the first flow in an L-coordinate."""
    out = []
    if pre.name == "sl3-boussinesq":
        fl = res.flows.flows[0]
        L = DiffPoly.gen(0) * 2
        lhs = iterate_time_derivative(L, fl, 2)
        rhs = L.deriv(4) * Q(-1, 3) + (L * L.deriv()).deriv() * Q(4, 3)
        out.append(_rewritten(pre, walg, res, 0, {0: DiffPoly.gen(2) * Q(1, 2)}, L, "L"))
        out.append({"label": "L_tt = -1/3 L'''' + 4/3 (L L')'", "ok": lhs == rhs})
    if pre.name.startswith("sl3-minimal"):
        L = DiffPoly.gen(0) + DiffPoly.gen(3) ** 2 * 3
        w1 = DiffPoly.gen(4) - DiffPoly.gen(3) ** 2 * 3
        if pre.name == "sl3-minimal":
            out.append(_rewritten(pre, walg, res, 0, {0: w1}, L, "L"))
            fl = res.flows.flows[0]
        else:
            # the z = 0 tables of both choices of l agree, so the H-flow of
            # ∫(w2 + w3) is the same system
            fl = table_flows(w_bracket_table(walg).H, [DiffPoly.gen(1) + DiffPoly.gen(2)]).flows[0]
            out.append(_rewritten_flow(names, fl, {0: w1}, L, "L", "H-flow of ∫(w2 + w3)"))
        w4 = DiffPoly.gen(3)
        lhs = w4.deriv(2)
        rhs = iterate_time_derivative(w4, fl, 4) * Q(-1, 3) - time_derivative(w4 * time_derivative(w4, fl), fl) * 8
        out.append({"label": "w4'' = -1/3 (w4)_tttt - 8 (w4 (w4)_t)_t", "ok": lhs == rhs})
    return out


def _rewritten(pre, walg, res, n, images, L, Lname):
    return _rewritten_flow(walg.names, res.flows.flows[n], images, L, Lname, f"flow t_{n}")


def _rewritten_flow(names, fl, images, L, Lname, label):
    """Replace w1 by an expression in a new variable L (index len(names))."""
    k = len(names)
    full = [DiffPoly.gen(i) for i in range(k + 1)]
    for i, im in images.items():
        full[i] = im
    sub_names = list(names) + [Lname]
    eqs = []
    Lt = time_derivative(L, fl)
    eqs.append(f"{Lname}_t = {Lt.subs(full).format(sub_names)}")
    for j, rhs in enumerate(fl):
        if j in images:
            continue
        eqs.append(f"{names[j]}_t = {rhs.subs(full).format(sub_names)}")
    return {"label": label, "equations": eqs}


def hierarchy_ds_section(pre: Preset, walg, depth: int, checks: dict, q_checks: bool = True):
    res = run_ds(walg, pre.a, depth, q_checks=q_checks)
    names, lnames = walg.names, walg.latex
    for k, v in res.checks.items():
        checks[k] = v
    dens = []
    for n, g in enumerate(res.densities):
        d = _functional(g, names, lnames)
        d["n"] = n
        d["q"] = _functional(LocalFunctional(res.welements[n].expansion), walg.setup.p_names,
                             walg.setup.p_latex)["text"]
        dens.append(d)
    flows = [{"n": n, "equations": res.flows.format(n)} for n in range(len(res.flows.flows))]
    ind = res.details["independence"]
    sec = {
        "a": loop_label(pre.alg, pre.a),
        "semisimplicity": res.semisimple.describe(),
        "slots": {"first_degree": q_short(Q(res.window.first, 2)),
                  "step": q_short(Q(res.window.period, 2))},
        "densities": dens,
        "flows": flows,
        "independence": {"rank": ind.rank, "count": ind.count,
                         "witness": names[ind.witness] if ind.witness is not None else None},
    }
    derived = _ds_derived(pre, walg, res, names)
    for item in derived:
        if "ok" in item:
            checks[item["label"]] = item["ok"]
    if derived:
        sec["derived"] = derived
    return sec


def _matrix_text(M, names) -> list:
    return [[c.format(names) for c in row] for row in M]


def hierarchy_homogeneous_section(pre: Preset, depth: int, checks: dict):
    alg = pre.alg
    a_vec = pre.a.scalar_vector(0, alg.dim)
    res = run_homogeneous(alg, pre.s, a_vec, depth)
    for k, v in res.checks.items():
        checks[k] = v
    names = alg.names
    dens = []
    for n, g in enumerate(res.densities):
        d = _functional(g, names, alg.latex)
        d["n"] = n
        dens.append(d)
    flows = [{"n": n, "equations": res.flows.format(n)} for n in range(len(res.flows.flows))]
    sec = {
        "s": vector_label(alg, pre.s),
        "a": vector_label(alg, a_vec),
        "densities": dens,
        "flows": flows,
    }
    if res.matrix:
        m = res.matrix["solution"]
        sec["matrix"] = {
            "T": [{"n": n, "entries": _matrix_text(T, names)} for n, T in enumerate(m.T)],
            "h": [{"n": n, "diagonal": [h[k][k].format(names) for k in range(len(h))]}
                  for n, h in enumerate(m.hmat)],
        }
    return sec


def scan_section(pre: Preset, checks: dict):
    rows = []
    usable = []
    for label, s, st in pre.candidates:
        grading = ZGrading(list(st.deg2), st.s_deg2)
        kerim = KerImData(st.alg, grading, list(st.triple.f), list(s))
        rep = check_semisimple(kerim)
        rows.append({"s": label, "degree": q_short(Q(st.s_deg2, 2)), "semisimple": rep.ok,
                     "failing_degree": None if rep.ok else q_short(Q(rep.failing_degree, 2)),
                     "detail": rep.describe()})
        if rep.ok:
            usable.append(label)
    checks["scan completed"] = True
    return {"partition": pre.parts, "candidates": rows, "semisimple_choices": usable,
            "conclusion": ("f + z s is semisimple for: " + ", ".join(usable)) if usable else
                          "no homogeneous s in Ker(ad n) makes f + z s semisimple"}


# ---------------------------------------------------------------------- full run

def run_preset_report(pre: Preset, depth: int = 2, mode: str = "hierarchy",
                      q_checks: bool = True, jacobi: bool = True) -> dict:
    checks: dict = {}
    rep = {"preset": pre.name, "description": pre.description, "depth": depth}
    if pre.mode == "ds":
        rep["setup"] = pre.setup.describe()
        walg, pair, wsec = walgebra_section(pre, checks, jacobi=jacobi)
        rep["walgebra"] = wsec
        if mode == "hierarchy" and depth > 0 and pre.a is not None:
            try:
                rep["hierarchy"] = hierarchy_ds_section(pre, walg, depth, checks, q_checks)
            except (DecompositionError, HierarchyError) as exc:
                rep["hierarchy"] = {"error": str(exc)}
                checks["hierarchy available"] = False
    elif pre.mode == "homogeneous":
        rep["hierarchy"] = hierarchy_homogeneous_section(pre, depth, checks)
    else:
        rep["setup"] = pre.setup.describe()
        rep["scan"] = scan_section(pre, checks)
    rep["checks"] = [{"name": k, "ok": bool(v)} for k, v in checks.items()]
    rep["ok"] = all(v for v in checks.values())
    return rep


# ---------------------------------------------------------------------- emitters

def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if fmt == "latex":
        return render_latex(report)
    return render_text(report)


def render_text(rep: dict) -> str:
    out = []
    add = out.append
    if rep.get("kind") == "verify":
        add(f"verify: {rep.get('source', '')}")
        for r in rep["results"]:
            add(f"  [{'PASS' if r['ok'] else 'FAIL'}] {r['name']}")
            for line in r.get("detail", []):
                add(f"         {line}")
        add(f"result: {'PASS' if rep['ok'] else 'FAIL'}")
        return "\n".join(out) + "\n"
    add(f"preset: {rep['preset']}")
    add(f"  {rep['description']}")
    if "setup" in rep:
        st = rep["setup"]
        add("setup:")
        for key in ("f", "x", "e", "s"):
            add(f"  {key} = {st[key]}")
        add(f"  l = span({', '.join(st['l'])})" if st["l"] else "  l = 0")
        add(f"  p = {', '.join(st['p'])}")
        add(f"  V = {', '.join(st['V'])}")
    w = rep.get("walgebra")
    if w:
        add("W-algebra generators:")
        for g in w["generators"]:
            add(f"  {g['name']} (Δ = {g['weight']}, v^j = {g['v']}) = {g['q']['text']}")
        add("λ-brackets {w_i λ w_j}_z = H − z K:")
        for b in w["brackets"]:
            add(f"  {{{b['i']} λ {b['j']}}}: H = {b['H']['text']};  K = {b['K']['text']}")
        if "virasoro" in w:
            v = w["virasoro"]
            add(f"Virasoro element L = {v['L']['text']}  (c = {v['c']}, z-term {_ztext(v['alpha_z'])})")
            for p in v["primary"]:
                add(f"  {p['name']} primary of weight {p['weight']}: {'yes' if p['ok'] else 'no'}")
    h = rep.get("hierarchy")
    if h:
        if "error" in h:
            add(f"hierarchy: {h['error']}")
        else:
            add("hierarchy:")
            if "a" in h:
                add(f"  a = {h['a']}")
            if "s" in h:
                add(f"  s = {h['s']}")
            if "semisimplicity" in h:
                add(f"  {h['semisimplicity']}")
            if "matrix" in h:
                for T in h["matrix"]["T"][1:]:
                    for i, row in enumerate(T["entries"]):
                        for j, c in enumerate(row):
                            if c != "0":
                                add(f"  T_{T['n']}[{i + 1},{j + 1}] = {c}")
                for hh in h["matrix"]["h"]:
                    add(f"  h_{hh['n']} = diag({', '.join(hh['diagonal'])})")
            for d in h["densities"]:
                add(f"  ∫g_{d['n']} = {d['text'][2:]}")
            for f in h["flows"]:
                add(f"  flow t_{f['n']}:")
                for e in f["equations"]:
                    add(f"    {e}")
            for item in h.get("derived", []):
                if "equations" in item:
                    add(f"  {item['label']}:")
                    for e in item["equations"]:
                        add(f"    {e}")
    sc = rep.get("scan")
    if sc:
        add(f"semisimplicity scan for partition {sc['partition']}:")
        for c in sc["candidates"]:
            status = "semisimple" if c["semisimple"] else f"fails at degree {c['failing_degree']}"
            add(f"  s = {c['s']} (degree {c['degree']}): {status}")
        add(f"  {sc['conclusion']}")
    add("checks:")
    for c in rep["checks"]:
        add(f"  [{'PASS' if c['ok'] else 'FAIL'}] {c['name']}")
    add(f"result: {'PASS' if rep['ok'] else 'FAIL'}")
    return "\n".join(out) + "\n"


def _ztext(alpha) -> str:
    if alpha in ("0", None):
        return "0"
    return "z λ" if alpha == "1" else f"{alpha} z λ"


def _tex_escape(s: str) -> str:
    return s.replace("_", "\\_").replace("λ", "$\\lambda$").replace("∫", "$\\int$")


def render_latex(rep: dict) -> str:
    out = []
    add = out.append
    if rep.get("kind") == "verify":
        add("\\begin{itemize}")
        for r in rep["results"]:
            add(f"\\item {'PASS' if r['ok'] else 'FAIL'}: {_tex_escape(r['name'])}")
        add("\\end{itemize}")
        return "\n".join(out) + "\n"
    add(f"% preset {rep['preset']}")
    w = rep.get("walgebra")
    if w:
        add("\\begin{align*}")
        lines = [f"{g['name'].replace('w', 'w_{', 1) + '}' if g['name'].startswith('w') else g['name']}"
                 f" &= {g['q']['latex']}" for g in w["generators"]]
        add(" \\\\\n".join(lines))
        add("\\end{align*}")
        add("\\begin{align*}")
        lines = []
        for b in w["brackets"]:
            lines.append(f"\\{{{_tex_name(b['i'])}\\,{{}}_\\lambda\\,{_tex_name(b['j'])}\\}}_{{H}} "
                         f"&= {b['H']['latex']}, & "
                         f"\\{{{_tex_name(b['i'])}\\,{{}}_\\lambda\\,{_tex_name(b['j'])}\\}}_{{K}} "
                         f"&= {b['K']['latex']}")
        add(" \\\\\n".join(lines))
        add("\\end{align*}")
        if "virasoro" in w:
            add(f"$L = {w['virasoro']['L']['latex']}$, $c = {w['virasoro']['c']}$.")
    h = rep.get("hierarchy")
    if h and "densities" in h:
        add("\\begin{align*}")
        add(" \\\\\n".join(f"\\int g_{{{d['n']}}} &= {d['latex'][5:]}" for d in h["densities"]))
        add("\\end{align*}")
    add("\\begin{itemize}")
    for c in rep["checks"]:
        add(f"\\item {'PASS' if c['ok'] else 'FAIL'}: {_tex_escape(c['name'])}")
    add("\\end{itemize}")
    return "\n".join(out) + "\n"


def _tex_name(n: str) -> str:
    if n.startswith("w") and n[1:].isdigit():
        return f"w_{{{n[1:]}}}"
    return n
