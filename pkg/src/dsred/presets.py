"""Named setups for the standard examples and the setup-config reader.

A preset bundles the Lie algebra, the reduction data and the element a(z)
generating the conserved densities.  Configs are JSON objects describing
the same data with rationals written as ``"num/den"`` strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .lie import (
    LieAlgebraData, SetupError, Sl2Triple, build_custom, build_ds_setup, build_gl,
    adx_grading, build_sl, build_sl2, homogeneous_kernel, nilpotent_from_partition, vector_label,
)
from . import linalg
from .loop import LoopElement, lambda_ds_matrix, loop_power
from .rational import Q, to_q

PRESETS = ("sl2-kdv", "sl3-boussinesq", "sl3-minimal", "sl3-minimal-l0", "gln-nwave", "gln-partition")


class ConfigError(ValueError):
    """Invalid setup config; carries line/column when known."""

    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)


@dataclass
class Preset:
    name: str
    mode: str                     # "ds", "homogeneous" or "scan"
    alg: LieAlgebraData
    setup: object = None          # DSSetup for ds mode
    names: list | None = None     # generator names (ds)
    latex: list | None = None
    a: LoopElement | None = None  # generating element; ds mode: a(z), homogeneous: a ⊗ 1
    s: list | None = None         # homogeneous mode: the semisimple element
    parts: list | None = None
    candidates: list = field(default_factory=list)   # scan mode: (label, s, setup)
    description: str = ""


# ---------------------------------------------------------------------- helpers

def _vec(alg, **coeffs) -> list:
    v = alg.zero()
    for k, c in coeffs.items():
        v[alg.names.index(k)] = to_q(c)
    return v


def fzs(setup) -> LoopElement:
    return LoopElement.from_vector(setup.triple.f, 0) + LoopElement.from_vector(setup.s, 1)


def parse_loop(text: str, dim: int) -> LoopElement:
    """``"c1,...,cn@k; ..."``: a sum of z^k-multiples of coordinate vectors."""
    out = LoopElement()
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        body, _, k = chunk.partition("@")
        vec = parse_rationals(body, dim)
        out = out + LoopElement.from_vector(vec, int(k) if k.strip() else 0)
    return out


def parse_rationals(text: str, dim: int | None = None) -> list:
    try:
        vals = [to_q(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad rational vector {text!r}") from exc
    if dim is not None and len(vals) != dim:
        raise ConfigError(f"expected {dim} entries, got {len(vals)} in {text!r}")
    return vals


def _resolve_a(setup, spec, alg) -> LoopElement:
    """``spec`` is a LoopElement, None (a = f+zs) or ``{"power": n, "shift": k}``."""
    if isinstance(spec, LoopElement):
        return spec
    base = fzs(setup)
    if spec is None:
        return base
    n = int(spec.get("power", 1))
    try:
        x = loop_power(alg, base, n)
    except SetupError as exc:
        raise SetupError(f"(f + z s)^{n} is not in the algebra for this s; give a(z) explicitly") from exc
    return x.shift_z(int(spec.get("shift", 0)))


# ---------------------------------------------------------------------- ds presets

def sl2_kdv(s=None, a=None) -> Preset:
    alg = build_sl2()
    tr = nilpotent_from_partition(alg, [2])
    s = _vec(alg, e=1) if s is None else s
    st = build_ds_setup(alg, tr, s=s)
    return Preset("sl2-kdv", "ds", alg, st, ["w"], ["w"], _resolve_a(st, a, alg),
                  description="sl_2, principal nilpotent, s = e, a(z) = f + z e")


def sl3_boussinesq(s=None, a=None) -> Preset:
    alg = build_sl(3)
    tr = nilpotent_from_partition(alg, [3])
    s = _vec(alg, E13=1) if s is None else s
    V = [_vec(alg, E12=1, E23=1), _vec(alg, E13=1)]
    st = build_ds_setup(alg, tr, s=s, V=V)
    a = {"power": 2} if a is None else a
    return Preset("sl3-boussinesq", "ds", alg, st, ["w1", "w2"], ["w_{1}", "w_{2}"],
                  _resolve_a(st, a, alg),
                  description="sl_3, principal nilpotent, s = E13, a(z) = (f + z s)^2")


def _minimal_V(alg):
    return [_vec(alg, E13=1), _vec(alg, E12=1), _vec(alg, E23=1), _vec(alg, h1=1, h2=-1)]


_MIN_NAMES = ["w1", "w2", "w3", "w4"]
_MIN_LATEX = ["w_{1}", "w_{2}", "w_{3}", "w_{4}"]


def sl3_minimal(l=None, s=None, a=None) -> Preset:
    """Minimal nilpotent with l = F(E12 + E23) (maximal isotropic)."""
    alg = build_sl(3)
    tr = nilpotent_from_partition(alg, [2, 1])
    s_default = s is None
    s = _vec(alg, E12=1, E23=1) if s_default else s
    if l is None:
        p = [_vec(alg, E12=1, E23=-1)] + [alg.basis(i) for i in range(3, 8)]
        st = build_ds_setup(alg, tr, l=[_vec(alg, E12=1, E23=1)], s=s, p=p,
                            p_names=["g", "h1", "h2", "E21", "E31", "E32"],
                            p_latex=["g", "h_1", "h_2", "E_{21}", "E_{31}", "E_{32}"],
                            V=_minimal_V(alg))
    else:
        # a user-supplied l gets the default complement p
        st = build_ds_setup(alg, tr, l=l, s=s, V=_minimal_V(alg))
    if a is None and s_default:
        a = {"power": 2, "shift": -1}
    return Preset("sl3-minimal", "ds", alg, st, list(_MIN_NAMES), list(_MIN_LATEX),
                  _resolve_a(st, a, alg),
                  description="sl_3, minimal nilpotent, l = F(E12+E23), s = E12+E23, "
                              "a(z) = z^-1 (f + z s)^2")


def sl3_minimal_l0(s=None, a=None) -> Preset:
    """Minimal nilpotent with l = 0."""
    alg = build_sl(3)
    tr = nilpotent_from_partition(alg, [2, 1])
    s = _vec(alg, E13=1) if s is None else s
    st = build_ds_setup(alg, tr, s=s, V=_minimal_V(alg))
    return Preset("sl3-minimal-l0", "ds", alg, st, list(_MIN_NAMES), list(_MIN_LATEX),
                  _resolve_a(st, a, alg),
                  description="sl_3, minimal nilpotent, l = 0, s = E13, a(z) = f + z s")


# ---------------------------------------------------------------------- gl_n presets

def gln_nwave(n=3, a=None, s=None) -> Preset:
    """gl_n with u = Σ E_ij ⊗ E_ji and diagonal a, s."""
    alg = build_gl(n)
    if a is None:
        a = [Q(1), Q(2), Q(5)] if n == 3 else [Q(i + 1) for i in range(n)]
    if s is None:
        s = [Q(0), Q(1), Q(3)] if n == 3 else [Q(i * i) for i in range(n)]
    a_diag, s_diag = [to_q(c) for c in a], [to_q(c) for c in s]
    if len(a_diag) != n or len(s_diag) != n:
        raise SetupError(f"a and s need {n} diagonal entries")
    if len(set(s_diag)) != n:
        raise SetupError("s must have distinct eigenvalues")
    if len(set(a_diag)) == 1:
        raise SetupError("a is central in gl_n: the hierarchy is trivial")
    sv = alg.from_matrix([[s_diag[i] if i == j else Q(0) for j in range(n)] for i in range(n)])
    av = alg.from_matrix([[a_diag[i] if i == j else Q(0) for j in range(n)] for i in range(n)])
    return Preset("gln-nwave", "homogeneous", alg, None, a=LoopElement.from_vector(av, 0), s=sv,
                  description=f"gl_{n}, s = diag({', '.join(map(str, s_diag))}), "
                              f"a = diag({', '.join(map(str, a_diag))})")


def s_candidates(setup) -> list:
    """Basis vectors of the homogeneous pieces of Ker(ad n) of degree ≥ 0."""
    ker = homogeneous_kernel(setup.alg, setup.deg2, setup.n)
    return [(d, v) for d in sorted(ker) if d >= 0 for v in ker[d]]


def gln_partition(parts=None, variant=None, n=None, l=None, s=None, a=None) -> Preset:
    """gl_n with the nilpotent of a given partition.

    With ``variant`` (a: partition [n], b: partition [n, n−1]) s comes from
    the standard block form of f + z s; otherwise every basis vector of the
    homogeneous pieces of Ker(ad n) is tried as s.
    """
    if variant is not None:
        r = int(n) if n is not None else 3
        alg, f, s_blk, _ = lambda_ds_matrix(r, variant)
        parts = [r] if variant == "a" else [r, r - 1]
        tr = nilpotent_from_partition(alg, parts)
        if list(tr.f) != list(f):
            raise SetupError("block form does not match the partition nilpotent")
        s = s if s is not None else s_blk
        if l is None and variant == "b":
            l = coisotropic_l(alg, tr, s)
        st = build_ds_setup(alg, tr, l=l or (), s=s)
        return Preset("gln-partition", "ds", alg, st, None, None, _resolve_a(st, a, alg), parts=parts,
                      description=f"gl_{alg_size(alg)}, partition {parts}, block type {variant}")
    parts = list(parts) if parts else [4, 2]
    if any(int(p) <= 0 for p in parts):
        raise SetupError(f"partition parts must be positive, got {parts}")
    size = sum(parts)
    alg = build_gl(size)
    tr = nilpotent_from_partition(alg, list(parts))
    base = build_ds_setup(alg, tr, l=l or ())
    cands = []
    if s is not None:
        pool = [(base.vector_deg2(s), s)]
    else:
        pool = s_candidates(base)
    for d, v in pool:
        st = build_ds_setup(alg, tr, l=l or (), s=v)
        cands.append((vector_label(alg, v), v, st))
    return Preset("gln-partition", "scan", alg, base, parts=list(parts), candidates=cands,
                  description=f"gl_{size}, partition {list(parts)}: scan of s in Ker(ad n)")


def coisotropic_l(alg, tr, s) -> list:
    """l = C^⊥ω for C = Ker(ad s) ∩ g_{1/2}, so that l^⊥ω = C commutes with s.

    Requires C^⊥ω ⊂ C, i.e. the returned l is isotropic.
    """
    deg2 = adx_grading(alg, tr).deg2
    half = [i for i in range(alg.dim) if deg2[i] == 1]
    if not half:
        return []
    cols = [alg.bracket(s, alg.basis(i)) for i in half]
    C = [[c[j] for j in range(len(half))] for c in linalg.nullspace(linalg.transpose(cols), len(half))]
    if not C:
        raise SetupError("Ker(ad s) ∩ g_{1/2} = 0: no isotropic l makes s commute with n")
    emb = lambda c: [sum((c[t] for t, i in enumerate(half) if i == b), Q(0)) for b in range(alg.dim)]
    omega = [[alg.kappa(tr.f, alg.bracket(emb(c), alg.basis(i))) for i in half] for c in C]
    l = [emb(v) for v in linalg.nullspace(omega, len(half))]
    if l and linalg.rank([emb(c) for c in C] + l) != len(C):
        raise SetupError("Ker(ad s) ∩ g_{1/2} is not coisotropic")
    return l


def alg_size(alg) -> int:
    return len(alg.matrices[0]) if alg.matrices else alg.dim


def build_preset(name: str, **opts) -> Preset:
    clean = {k: v for k, v in opts.items() if v is not None}
    pre = _build_preset(name, clean)
    changed = [k for k in ("l", "s", "a") if k in clean]
    if changed and name.startswith("sl"):
        pre.description += f" (defaults; overridden: {', '.join(changed)})"
    return pre


def _build_preset(name: str, clean: dict) -> Preset:
    if name == "sl2-kdv":
        return sl2_kdv(**_pick(clean, "s", "a"))
    if name == "sl3-boussinesq":
        return sl3_boussinesq(**_pick(clean, "s", "a"))
    if name == "sl3-minimal":
        return sl3_minimal(**_pick(clean, "l", "s", "a"))
    if name == "sl3-minimal-l0":
        return sl3_minimal_l0(**_pick(clean, "s", "a"))
    if name == "gln-nwave":
        return gln_nwave(**_pick(clean, "n", "a", "s"))
    if name == "gln-partition":
        return gln_partition(**_pick(clean, "parts", "variant", "n", "l", "s", "a"))
    raise SetupError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def _pick(d, *keys):
    return {k: d[k] for k in keys if k in d}


# ---------------------------------------------------------------------- configs

def _q(x, what):
    try:
        return to_q(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what}: {x!r} is not a rational") from exc


def _qvec(x, dim, what):
    if isinstance(x, str):
        return parse_rationals(x, dim)
    if not isinstance(x, list) or len(x) != dim:
        raise ConfigError(f"{what}: expected a list of {dim} rationals")
    return [_q(c, what) for c in x]


def load_config(path: str) -> dict:
    """Read a JSON config, reporting syntax errors with line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config_text(text)


def parse_config_text(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON syntax error: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", 1, 1)
    return data


def algebra_from_config(spec: dict) -> LieAlgebraData:
    kind = spec.get("kind")
    if kind == "gl":
        return build_gl(int(spec["n"]))
    if kind == "sl":
        n = int(spec["n"])
        return build_sl2() if n == 2 and spec.get("sl2_names", True) else build_sl(n)
    if kind == "custom":
        names = spec.get("names")
        if not isinstance(names, list):
            raise ConfigError("custom algebra needs a list of basis names")
        dim = len(names)
        structure = []
        raw = spec.get("structure")
        if not isinstance(raw, list) or len(raw) != dim:
            raise ConfigError("structure must be a dim x dim table")
        for i, row in enumerate(raw):
            if not isinstance(row, list) or len(row) != dim:
                raise ConfigError(f"structure row {i} has the wrong length")
            structure.append([{int(k): _q(c, "structure constant") for k, c in (cell or {}).items()}
                              for cell in row])
        kappa = [_qvec(row, dim, "kappa") for row in spec.get("kappa", [])]
        if len(kappa) != dim:
            raise ConfigError("kappa must be a dim x dim matrix")
        return build_custom(names, structure, kappa, latex=spec.get("latex"))
    raise ConfigError(f"unknown algebra kind {kind!r} (gl, sl or custom)")


def preset_from_config(cfg: dict) -> Preset:
    """A config names a preset (with optional overrides) or describes a setup."""
    if "preset" in cfg:
        opts = {}
        for key in ("n", "variant", "parts"):
            if key in cfg:
                opts[key] = cfg[key]
        pre = build_preset(cfg["preset"], **opts)
        alg_dim = pre.alg.dim
        over = {}
        if "s" in cfg:
            over["s"] = _qvec(cfg["s"], alg_dim, "s")
        if "l" in cfg:
            over["l"] = [_qvec(v, alg_dim, "l") for v in cfg["l"]]
        if "a" in cfg:
            over["a"] = _a_from_config(cfg["a"], alg_dim)
        if over:
            opts.update(over)
            pre = build_preset(cfg["preset"], **opts)
        return pre
    if "algebra" not in cfg:
        raise ConfigError("config needs either 'preset' or 'algebra'")
    alg = algebra_from_config(cfg["algebra"])
    dim = alg.dim
    if "triple" in cfg:
        t = cfg["triple"]
        tr = Sl2Triple(_qvec(t["f"], dim, "f"), _qvec(t["x"], dim, "x"), _qvec(t["e"], dim, "e"))
    elif "partition" in cfg:
        tr = nilpotent_from_partition(alg, [int(k) for k in cfg["partition"]])
    else:
        raise ConfigError("config needs 'partition' or 'triple'")
    l = [_qvec(v, dim, "l") for v in cfg.get("l", [])]
    s = _qvec(cfg["s"], dim, "s") if "s" in cfg else None
    p = [_qvec(v, dim, "p") for v in cfg["p"]] if "p" in cfg else None
    V = [_qvec(v, dim, "V") for v in cfg["V"]] if "V" in cfg else None
    st = build_ds_setup(alg, tr, l=l, s=s, p=p, p_names=cfg.get("p_names"), V=V)
    a = _a_from_config(cfg.get("a"), dim) if "a" in cfg else None
    names = cfg.get("names")
    return Preset(cfg.get("name", "config"), "ds", alg, st, names, cfg.get("latex"),
                  _resolve_a(st, a, alg) if any(st.s) else None,
                  description=cfg.get("description", "setup from config"))


def _a_from_config(spec, dim):
    if spec is None or isinstance(spec, LoopElement):
        return spec
    if isinstance(spec, str):
        return parse_loop(spec, dim)
    if isinstance(spec, dict):
        return {"power": int(spec.get("power", 1)), "shift": int(spec.get("shift", 0))}
    if isinstance(spec, list):
        out = LoopElement()
        for term in spec:
            out = out + LoopElement.from_vector(_qvec(term["vector"], dim, "a"), int(term.get("z", 0)))
        return out
    raise ConfigError("a must be a string, a list of {z, vector} terms or {power, shift}")
