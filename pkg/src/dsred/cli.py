"""Command-line front end: ``dsred run <preset>`` and ``dsred verify <config>``."""

from __future__ import annotations

import argparse
import difflib
import os
import sys

from .hierarchy import DecompositionError, HierarchyError
from .lie import SetupError
from .loop import LoopError
from .presets import (
    PRESETS, ConfigError, build_preset, load_config, parse_loop, parse_rationals, preset_from_config,
)
from .pva import BracketTable, affine_table, check_jacobi, check_pair, check_skew
from .report import render, run_preset_report
from .walgebra import WAlgebraError, compute_generators, w_bracket_table

USER_ERRORS = (SetupError, ConfigError, DecompositionError, HierarchyError, LoopError, WAlgebraError)


# ---------------------------------------------------------------------- option parsing

def _vectors(text: str) -> list:
    """``"v1;v2"`` with each v a comma-separated rational vector; ``""`` or ``"0"`` is empty."""
    text = text.strip()
    if text in ("", "0"):
        return []
    return [parse_rationals(chunk) for chunk in text.split(";") if chunk.strip()]


def _a_option(text: str, dim: int):
    """``pow:N[,shift:K]`` for z^K (f+zs)^N, else ``"vec@k; vec@k"``."""
    t = text.strip()
    if t.startswith("pow:"):
        spec = {"power": 1, "shift": 0}
        for item in t.split(","):
            key, _, val = item.partition(":")
            key = {"pow": "power"}.get(key.strip(), key.strip())
            if key not in spec:
                raise ConfigError(f"--a: unknown key {key!r}")
            try:
                spec[key] = int(val)
            except ValueError as exc:
                raise ConfigError(f"--a: {val!r} is not an integer") from exc
        return spec
    return parse_loop(t, dim)


def preset_from_args(args) -> object:
    name = args.preset
    if name not in PRESETS:
        raise SetupError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    opts = {}
    if args.parts:
        opts["parts"] = [int(p) for p in args.parts.split(",") if p.strip()]
    if args.variant:
        opts["variant"] = args.variant
    if args.n is not None:
        opts["n"] = args.n
    if name == "gln-nwave":
        if args.s:
            opts["s"] = parse_rationals(args.s)
        if args.a:
            opts["a"] = parse_rationals(args.a)
        return build_preset(name, **opts)
    if args.s or args.a or args.l_basis is not None:
        dim = build_preset(name, **opts).alg.dim
        if args.s:
            opts["s"] = parse_rationals(args.s, dim)
        if args.a:
            opts["a"] = _a_option(args.a, dim)
        if args.l_basis is not None:
            opts["l"] = [v if len(v) == dim else _bad_length("--l-basis", dim) for v in _vectors(args.l_basis)]
    return build_preset(name, **opts)


def _bad_length(flag, dim):
    raise ConfigError(f"{flag}: every vector needs {dim} entries")


# ---------------------------------------------------------------------- verify

def _axiom_lines(res, names) -> list:
    if res.ok:
        return []
    lines = ["witness: " + ", ".join(names[i] for i in res.witness)]
    if res.residual is not None:
        lines.append("residual: " + res.residual.format(names))
    return lines


def verify_table(table: BracketTable, label: str) -> list:
    names = table.names
    out = []
    sk = check_skew(table)
    out.append({"name": f"skew-symmetry ({label})", "ok": sk.ok, "detail": _axiom_lines(sk, names)})
    jc = check_jacobi(table)
    out.append({"name": f"Jacobi identity ({label})", "ok": jc.ok, "detail": _axiom_lines(jc, names)})
    return out


def _load_table(cfg: dict, base: str) -> BracketTable:
    data = cfg.get("table")
    if data is None and "file" in cfg:
        path = cfg["file"] if os.path.isabs(cfg["file"]) else os.path.join(base, cfg["file"])
        data = load_config(path)
    if data is None:
        raise ConfigError("table config needs 'table' or 'file'")
    try:
        return BracketTable.from_json(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad bracket table: {exc}") from exc


def _z0_table(cfg: dict) -> BracketTable:
    pre = preset_from_config(cfg)
    return w_bracket_table(compute_generators(pre.setup, pre.names, pre.latex)).H


def verify_config(path: str, depth_override: int | None = None) -> dict:
    cfg = load_config(path)
    base = os.path.dirname(os.path.abspath(path))
    kind = cfg.get("kind", "setup")
    results = []
    if kind == "table":
        table = _load_table(cfg, base)
        results += verify_table(table, cfg.get("label", "table"))
    elif kind == "compare":
        setups = cfg.get("setups")
        if not isinstance(setups, list) or len(setups) != 2:
            raise ConfigError("compare config needs two entries in 'setups'")
        A, B = (_z0_table(s) for s in setups)
        detail = []
        if A.size != B.size:
            detail.append(f"sizes differ: {A.size} vs {B.size}")
        else:
            for i in range(A.size):
                for j in range(A.size):
                    if A.entries[i][j] != B.entries[i][j]:
                        detail.append(f"{{{A.names[i]} λ {A.names[j]}}}: "
                                      f"{A.entries[i][j].format(A.names)}  vs  {B.entries[i][j].format(B.names)}")
        results.append({"name": "z = 0 tables agree entrywise", "ok": not detail, "detail": detail})
    elif kind == "setup":
        pre = preset_from_config(cfg)
        alg = pre.alg
        results.append({"name": "structure constants (antisymmetry, Jacobi)",
                         "ok": alg.check_antisymmetry() and alg.check_jacobi()})
        results.append({"name": "invariant non-degenerate form", "ok": alg.check_form()})
        s = pre.setup.s if pre.setup is not None else pre.s
        pair = affine_table(alg, s)
        for label, (sk, jc) in check_pair(pair).items():
            results.append({"name": f"affine skew-symmetry ({label})", "ok": sk.ok,
                            "detail": _axiom_lines(sk, pair.H.names)})
            results.append({"name": f"affine Jacobi identity ({label})", "ok": jc.ok,
                            "detail": _axiom_lines(jc, pair.H.names)})
        depth = depth_override if depth_override is not None else int(cfg.get("depth", 0))
        rep = run_preset_report(pre, depth=depth, mode="hierarchy" if depth else "walgebra")
        results += [{"name": c["name"], "ok": c["ok"]} for c in rep["checks"]]
    else:
        raise ConfigError(f"unknown verify kind {kind!r} (setup, table or compare)")
    for r in results:
        r.setdefault("detail", [])
    return {"kind": "verify", "source": os.path.basename(path), "results": results,
            "ok": all(r["ok"] for r in results)}


# ---------------------------------------------------------------------- main

def _emit(text: str, args) -> int:
    if args.golden:
        try:
            with open(args.golden, encoding="utf-8") as fh:
                expected = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read golden file {args.golden}: {exc.strerror}") from exc
        if expected != text:
            diff = difflib.unified_diff(expected.splitlines(True), text.splitlines(True),
                                        "golden", "output")
            sys.stdout.writelines(diff)
            return 1
        print(f"matches {args.golden}")
        return 0
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dsred", description="Classical W-algebras and integrable "
                                 "hierarchies by Drinfeld-Sokolov reduction, in exact arithmetic.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "latex", "json"), default="text")
        p.add_argument("--out", help="write the report to this file")
        p.add_argument("--golden", help="compare the report with this file; exit 1 on mismatch")

    run = sub.add_parser("run", help="run a preset")
    run.add_argument("preset", help="one of: " + ", ".join(PRESETS))
    run.add_argument("--depth", type=int, default=2, help="number of densities (default 2)")
    run.add_argument("--mode", choices=("walgebra", "hierarchy"), default="hierarchy")
    run.add_argument("--l-basis", dest="l_basis",
                     help="basis of l: vectors separated by ';', entries by ','; '0' for l = 0")
    run.add_argument("--s", help="s as a coordinate vector (gln-nwave: its diagonal)")
    run.add_argument("--a", help="a(z) as 'vec@k; vec@k' or 'pow:N,shift:K' for z^K (f+zs)^N "
                                 "(gln-nwave: the diagonal of a)")
    run.add_argument("--parts", help="partition, e.g. 4,2")
    run.add_argument("--variant", choices=("a", "b"), help="block form of f + z s")
    run.add_argument("--n", type=int, help="matrix size (gln-nwave) or block size r (variants)")
    run.add_argument("--no-jacobi", action="store_true", help="skip the W-table Jacobi checks")
    common(run)

    ver = sub.add_parser("verify", help="check a setup, a bracket table or a pair of setups")
    ver.add_argument("config", help="JSON config file")
    ver.add_argument("--depth", type=int, help="also run the hierarchy to this depth")
    common(ver)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if args.depth < 0:
                raise ConfigError("--depth must be non-negative")
            pre = preset_from_args(args)
            rep = run_preset_report(pre, depth=args.depth, mode=args.mode, jacobi=not args.no_jacobi)
        else:
            rep = verify_config(args.config, args.depth)
        code = _emit(render(rep, args.format), args)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if code:
        return code
    return 0 if rep["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
