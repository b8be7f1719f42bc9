"""Command-line front end.

Exit status: 0 pass, 1 verified failure (with a witness), 2 undecided
because of truncation, 3 malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import __version__
from .bialgebra import (
    Indeterminate,
    NotClosedUnderBracket,
    Overflow,
    PresentedBialgebra,
    check_bialgebra,
    check_pgc,
    gp_lie,
    is_gpg,
)
from .dyer_lashof import CapExceeded, DLConfig, DLError, DyerLashof, format_word, parse_word
from .enveloping import InvalidLieAlgebra, NonTorsionInput, assoc_graded, build_W, build_Z, sym_power_kG
from .linalg import KindMismatch
from .milnor_moore import PreconditionFailed, verify_mm_left_sided, verify_mm_torsion_free
from .monoid import MonoidError
from .suspensive import SchemaError, SuspensiveLieAlgebra, WindowTooSmall, check_suspensive, torsion_flags
from .bialgebra import decidable_torsion_window

EXIT_PASS, EXIT_FAIL, EXIT_UNDECIDED, EXIT_SCHEMA = 0, 1, 2, 3


class _Failure(Exception):
    def __init__(self, report: dict) -> None:
        super().__init__(report.get("error", "failure"))
        self.report = report


def _threads() -> int:
    raw = os.environ.get("SUSPLA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise SchemaError(f"SUSPLA_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise SchemaError(f"SUSPLA_THREADS must be a positive integer, got {raw!r}")
    return n


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from exc


def _window_arg(L, n):
    return None if n is None else L.monoid.enumerate_window(n)


# -- subcommands ------------------------------------------------------------------


def cmd_check(args) -> dict:
    doc = _load(args.input)
    if "comult" in doc:
        A, rigid = PresentedBialgebra.from_json(doc)
        rep = check_bialgebra(A)
        out = {"object": "bialgebra", "dim": A.dim, "axioms": rep.to_json()}
        ok = rep.passed
        if rigid is not None:
            rrep = rigid.check(A)
            out["rigid"] = rrep.to_json()
            ok = ok and rrep.passed
        out["verdict"] = "pass" if ok else "fail"
        return out
    L = SuspensiveLieAlgebra.from_json(doc)
    win = _window_arg(L, args.window) or L.default_window()
    rep = check_suspensive(L, win)
    out = {"object": "lie_algebra", "dim": L.dim, "axioms": rep.to_json(), "window": win.to_json()}
    if rep.passed:
        out["torsion"] = torsion_flags(L, decidable_torsion_window(L, win)).to_json()
    out["verdict"] = "pass" if rep.passed else "fail"
    return out


def cmd_gp(args) -> dict:
    A, rigid = PresentedBialgebra.from_json(_load(args.input))
    if rigid is None:
        raise SchemaError("generalized primitives need a 'rigid' section")
    win = rigid.window if args.window is None else rigid.monoid.enumerate_window(args.window)
    try:
        P = gp_lie(A, rigid, win)
    except NotClosedUnderBracket as exc:
        raise _Failure({"verdict": "fail", "error": str(exc)}) from None
    m = rigid.monoid
    out = {
        "window": win.to_json(),
        "per_degree_dims": {m.name(q): P.dim_in_degree(q) for q in win},
        "basis": [
            {"name": P.names[k], "degree": m.name(P.degrees[k]), "vector": A.format_vector(P.vectors[k])}
            for k in range(P.dim)
        ],
        "bracket": {f"{P.names[a]}|{P.names[b]}": P.format_vector(v) for (a, b), v in sorted(P.bracket_table.items())},
        "pgc": check_pgc(A, rigid, win).to_json(),
        "gpg": is_gpg(A, rigid, win).to_json(),
    }
    out["verdict"] = "pass"
    return out


def _load_lie(path: str) -> SuspensiveLieAlgebra:
    return SuspensiveLieAlgebra.from_json(_load(path))


def cmd_envelope(args) -> dict:
    L = _load_lie(args.input)
    win = _window_arg(L, args.window)
    E = build_W(L, win, args.lie_cap) if args.kind == "w" else build_Z(L, win, args.lie_cap)
    doc = E.to_json()
    doc["per_degree_dims"] = E.dims_by_degree()
    doc["verdict"] = "pass"
    return doc


def cmd_graded(args) -> dict:
    L = _load_lie(args.input)
    W = build_W(L, _window_arg(L, args.window), args.lie_cap)
    G = assoc_graded(W)
    m = L.monoid
    graded: dict = {}
    for i in range(G.dim):
        key = (G.degrees[i], W.levels[i])
        graded[key] = graded.get(key, 0) + 1
    rows = []
    ok = True
    for n in range(W.lie_cap + 1):
        sym = sym_power_kG(L, n, W.window)
        for d in W.window:
            a, b = graded.get((d, n), 0), sym.get(d, 0)
            ok = ok and a == b
            rows.append({"degree": m.name(d), "level": n, "assoc_graded": a, "sym_power": b})
    return {"window": W.window.to_json(), "lie_cap": W.lie_cap, "bidegrees": rows, "verdict": "pass" if ok else "fail"}


def cmd_mm(args) -> dict:
    L = _load_lie(args.input)
    win = _window_arg(L, args.window)
    fn = verify_mm_torsion_free if args.mode == "tf" else verify_mm_left_sided
    try:
        rep = fn(L, win, args.lie_cap, seed=args.seed)
    except (PreconditionFailed, NonTorsionInput) as exc:
        raise _Failure({
            "verdict": "fail",
            "error": str(exc),
            "witnesses": [str(exc)],
            "window": (win or L.default_window()).to_json(),
            "seed": args.seed,
        }) from None
    return rep.to_json()


def _dl_engine(args) -> DyerLashof:
    return DyerLashof(DLConfig(p=args.p, e=args.e, cap=args.cap))


def cmd_dl(args) -> dict:
    eng = _dl_engine(args)
    p = args.p
    if args.op == "normalize":
        x = eng.normalize({parse_word(w, p): 1 for w in args.words} if len(args.words) > 1 else args.words[0])
        return {"terms": x.to_json(), "text": x.format(), "verdict": "pass"}
    if args.op == "basis":
        if args.degree is None:
            raise SchemaError("dl basis needs --degree")
        words = eng.basis_in_degree(args.degree)
        return {"degree": args.degree, "basis": [format_word(w) for w in words], "dim": len(words), "verdict": "pass"}
    if args.op == "coproduct":
        if len(args.words) != 1:
            raise SchemaError("dl coproduct takes one monomial")
        t = eng.coproduct(args.words[0])
        return {"terms": [[format_word(a), format_word(b), c] for (a, b), c in t.items()], "verdict": "pass"}
    if args.op == "e0":
        if len(args.words) != 2:
            raise SchemaError("dl e0 takes two monomials")
        prod = eng.e0_multiply(args.words[0], args.words[1])
        return {
            "terms": prod.element.to_json(),
            "text": prod.element.format(),
            "filtration": prod.filtration,
            "degree": prod.degree,
            "verdict": "pass",
        }
    raise SchemaError(f"unknown dl operation {args.op!r}")


# -- plumbing ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are malformed input, not an undecided verdict."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_SCHEMA)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="suspla", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"suspla {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="recorded in the report (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check axioms of a Lie algebra or bialgebra document")
    p.add_argument("input")
    p.add_argument("--window", type=int)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gp", parents=[common], help="generalized primitives of a rigid bialgebra")
    p.add_argument("input")
    p.add_argument("--window", type=int)
    p.set_defaults(func=cmd_gp)

    p = sub.add_parser("envelope", parents=[common], help="build W(L) or Z(L)")
    p.add_argument("kind", choices=["w", "z"])
    p.add_argument("input")
    p.add_argument("--window", type=int)
    p.add_argument("--lie-cap", type=int, dest="lie_cap")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("graded", parents=[common], help="compare the associated graded of W(L) with symmetric powers")
    p.add_argument("input")
    p.add_argument("--window", type=int)
    p.add_argument("--lie-cap", type=int, dest="lie_cap")
    p.set_defaults(func=cmd_graded)

    p = sub.add_parser("mm", parents=[common], help="verify the Lie/bialgebra equivalences on a truncation")
    p.add_argument("mode", choices=["tf", "ls"])
    p.add_argument("input")
    p.add_argument("--window", type=int)
    p.add_argument("--lie-cap", type=int, dest="lie_cap")
    p.set_defaults(func=cmd_mm)

    p = sub.add_parser("dl", parents=[common], help="Dyer-Lashof rewriting")
    p.add_argument("op", choices=["normalize", "basis", "coproduct", "e0"])
    p.add_argument("words", nargs="*")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--e", type=int, default=0)
    p.add_argument("--cap", type=int, default=24)
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_dl)
    return parser


def _render_text(report: dict) -> str:
    lines = []
    for key in sorted(report):
        val = report[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    elif args.command == "dl" and "text" in report:
        meta = report["meta"]
        text = f"{report['text']}\n# {meta['tool']} {meta['version']} seed {meta['seed']}\n"
    else:
        text = _render_text(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra:
        if args.command != "dl" or any(e.startswith("--") for e in extra):
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        args.words = list(args.words) + extra
    meta = {"tool": "suspla", "version": __version__, "seed": args.seed}
    status = EXIT_PASS
    try:
        meta["threads"] = _threads()
        report = args.func(args)
        if report.get("verdict") == "fail":
            status = EXIT_FAIL
    except _Failure as exc:
        report, status = exc.report, EXIT_FAIL
    except InvalidLieAlgebra as exc:
        report = {"verdict": "fail", "error": "not a suspensive Lie algebra", "axioms": exc.report.to_json()}
        status = EXIT_FAIL
    except (Overflow, Indeterminate, WindowTooSmall, CapExceeded) as exc:
        report = {"verdict": "indeterminate", "error": str(exc)}
        status = EXIT_UNDECIDED
    except (SchemaError, MonoidError, KindMismatch, DLError, ValueError) as exc:
        report = {"verdict": "error", "error": str(exc)}
        status = EXIT_SCHEMA
    report["meta"] = meta
    _emit(report, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
