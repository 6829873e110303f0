"""Command-line interface.

Exit codes: 0 the property holds (or the command succeeded), 1 it fails
(witness in the report), 2 input error, 3 inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import config
from .descriptors import Region
from .dot import emit_dot
from .dsl import Workspace, parse, parse_descriptor, parse_space_expr
from .engine import as_region, cross_level, is_upset, resolve_window, validate_presentation
from .errors import PkitError
from .esakia import (find_forbidden_configuration, find_p_configuration, is_biheyting_space,
                     is_coheyting_space, is_esakia, is_p_space, verify_forbidden_configuration)
from .lattices import RepresentedLattice, arrow_exists, ideal_descriptor_Iab, represented_lattice
from .oracle import sweep_birkhoff, sweep_ifp_duality, sweep_truncation_stability
from .presentation import truncate
from .spaces import atom, builtin_suite, down_up_sum

SCHEMA = "pkit.report/1"
PROPERTIES = ("priestley", "esakia", "p-space", "co-heyting", "bi-heyting")


class InputError(PkitError):
    pass


def load_workspace(files) -> Workspace:
    ws = Workspace()
    for f in files or ():
        text = Path(f).read_text(encoding="utf-8")
        ws_f = parse(text)
        for kind, name in ws_f.order:
            if name in ws.names():
                raise InputError(f"{f}: duplicate definition of {name!r}")
        for attr in ("posets", "lattices", "spaces", "lets", "sets"):
            getattr(ws, attr).update(getattr(ws_f, attr))
        ws.order += ws_f.order
    return ws


def resolve_space(text: str, ws: Workspace):
    return ws.compile(parse_space_expr(text, ws))


def resolve_set(S, text: str, ws: Workspace) -> Region:
    return as_region(S, parse_descriptor(text, ws))


def check_env_window(S):
    env = config.env_window()
    if env is not None and env < S.window_bound:
        raise InputError(f"PKIT_WINDOW={env} is below the window bound {S.window_bound} of {S.name}")


class Run:
    """Collects the report of one command."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.report = {"schema": SCHEMA, "command": " ".join(argv), "verdict": None, "witness": None}
        self.t0 = time.perf_counter()
        self.window = None

    def engine(self, S, window=None):
        w = resolve_window(S, window if window is not None else self.args.window)
        self.window = w
        return w

    def finish(self, code, lines):
        cc = self.args.cross_check
        self.report["engine"] = {"window": self.window, "cross_check": cc,
                                 "cross_level": cross_level(self.window) if (cc and self.window is not None) else None}
        self.report["timing"] = {"seconds": round(time.perf_counter() - self.t0, 4)}
        self.report["exit_code"] = code
        if self.args.json:
            print(json.dumps(self.report, indent=2, ensure_ascii=False))
        else:
            for line in lines:
                print(line)
        return code


# commands ----------------------------------------------------------------------


def cmd_check(run: Run, ws):
    a = run.args
    S = resolve_space(a.expr, ws)
    check_env_window(S)
    w = run.engine(S)
    cc = a.cross_check
    run.report["property"] = a.property
    if a.property == "priestley":
        rep = validate_presentation(S, w, cc)
        run.report["verdict"] = "holds"
        run.report["result"] = rep.to_json()
        return 0, [f"{S.name}: priestley holds (levels {rep.checked_levels})"]
    fn = {"esakia": is_esakia, "p-space": is_p_space, "co-heyting": is_coheyting_space,
          "bi-heyting": is_biheyting_space}[a.property]
    v = fn(S, w, cc)
    run.report["verdict"] = "holds" if v.holds else "fails"
    run.report["result"] = v.to_json()
    if v.holds:
        return 0, [f"{S.name}: {a.property} holds"]
    run.report["witness"] = {"C": v.witness.describe(), "closure": v.closure.describe()}
    lines = [f"{S.name}: {a.property} fails", f"  clopen C = {v.witness.describe()}",
             f"  closure = {v.closure.describe()} (not clopen)"]
    if v.configuration is not None:
        run.report["witness"]["configuration"] = v.configuration.to_json()
        c = v.configuration
        lines.append(f"  configuration: pattern {c.pattern}, x={c.embedding.x}, y={c.embedding.y}")
    return 1, lines


def cmd_find_config(run: Run, ws):
    a = run.args
    S = resolve_space(a.expr, ws)
    check_env_window(S)
    w = run.engine(S)
    wit = find_p_configuration(S, w) if a.p else find_forbidden_configuration(S, w)
    if wit is None:
        run.report["verdict"] = "none"
        return 0, [f"{S.name}: no {'p-' if a.p else 'forbidden '}configuration"]
    diag = verify_forbidden_configuration(S, wit, w)
    if not diag.ok:
        run.report["verdict"] = "inconclusive"
        run.report["problems"] = diag.problems
        return 3, [f"{S.name}: witness failed verification: {'; '.join(diag.problems)}"]
    run.report["verdict"] = "found"
    run.report["witness"] = dict(wit.to_json(), verified=True)
    e = wit.embedding
    return 1, [f"{S.name}: pattern {wit.pattern}", f"  x = {e.x}", f"  y = {e.y}",
               f"  z_n = {e.z.point(0)}, {e.z.point(1)}, ... (coordinate {e.z.vary} = {e.z.offset}+n)",
               f"  U = {run.report['witness']['U']}", "  verified"]


def cmd_dual(run: Run, ws):
    a = run.args
    S = resolve_space(a.expr, ws)
    check_env_window(S)
    run.engine(S, None)
    W = a.catalog_window
    R = represented_lattice(S, W, config.CATALOG_LIMIT)
    run.report["verdict"] = "ok"
    run.report["result"] = R.to_json()
    lines = [f"{S.name}: {len(R.elements)} clopen upsets definable at window {W}"]
    lines += [f"  {i}: {e.describe()}" for i, e in enumerate(R.elements)]
    return 0, lines


def cmd_implies(run: Run, ws):
    a = run.args
    S = resolve_space(a.expr, ws)
    check_env_window(S)
    w = run.engine(S)
    A, B = resolve_set(S, a.a, ws), resolve_set(S, a.b, ws)
    for name, r in (("a", A), ("b", B)):
        if not (r.is_clopen() and is_upset(S, r, w)):
            raise InputError(f"{name} = {r.describe()} is not a clopen upset")
    R = RepresentedLattice(S, w, [])
    ideal = ideal_descriptor_Iab(R, A, B, w, a.cross_check).region
    arrow = arrow_exists(R, A, B, w, a.cross_check)
    run.report["result"] = {"a": A.describe(), "b": B.describe(), "ideal": ideal.describe(),
                            "exists": arrow is not None,
                            "arrow": arrow.describe() if arrow is not None else None}
    if arrow is None:
        run.report["verdict"] = "not-exists"
        run.report["witness"] = {"ideal": ideal.describe(), "reason": "open upset is not closed"}
        return 1, [f"{S.name}: a -> b does not exist; ideal = {ideal.describe()} is not clopen"]
    run.report["verdict"] = "exists"
    return 0, [f"{S.name}: a -> b = {arrow.describe()}"]


def cmd_dsum_check(run: Run, ws):
    a = run.args
    A = resolve_space(a.expr, ws)
    check_env_window(A)
    D = resolve_set(A, a.d, ws)
    B = resolve_space(a.right, ws)
    U = resolve_set(B, a.u, ws)
    X = down_up_sum(A, D, B, U)
    w = run.engine(X)
    v = is_esakia(X, w, a.cross_check)
    clopen = D.is_clopen()
    run.report["result"] = {"sum": X.name, "D": D.describe(), "D_clopen": clopen, "esakia": v.holds,
                            "agree": clopen == v.holds, "verdict": v.to_json()}
    if B.parts == atom("point").parts and U.is_total() and clopen != v.holds:
        run.report["verdict"] = "inconclusive"
        return 3, [f"{X.name}: Esakia verdict {v.holds} differs from D clopen {clopen}"]
    run.report["verdict"] = "holds" if v.holds else "fails"
    if not v.holds:
        run.report["witness"] = {"C": v.witness.describe(), "closure": v.closure.describe()}
    return (0 if v.holds else 1), [f"{X.name}: Esakia {'holds' if v.holds else 'fails'}; "
                                   f"D is {'clopen' if clopen else 'not clopen'}"]


def cmd_oracle(run: Run, ws):
    a = run.args
    reps = []
    if a.sweep == "birkhoff":
        reps = [sweep_birkhoff(n) for n in range(1, min(a.max_size, 5) + 1)]
    elif a.sweep == "ifp":
        reps = [sweep_ifp_duality(min(a.max_size, 3))]
    else:
        spaces = [resolve_space(a.expr, ws)] if a.expr else builtin_suite()
        for S in spaces:
            check_env_window(S)
        reps = [sweep_truncation_stability(S, None, a.window) for S in spaces]
    ok = all(r.ok for r in reps)
    run.report["verdict"] = "pass" if ok else "fail"
    run.report["result"] = [r.to_json(timing=False) for r in reps]
    lines = []
    for r in reps:
        tag = r.notes.get("space", r.size)
        tallies = ", ".join(f"{k} {p}/{p + f}" for k, (p, f) in r.tallies.items())
        lines.append(f"{r.name} {tag}: {'pass' if r.ok else 'FAIL'} (count {r.count}; {tallies})")
    return (0 if ok else 1), lines


def cmd_render(run: Run, ws):
    a = run.args
    if a.expr in ws.posets:
        P = ws.posets[a.expr]
        if a.kind == "lattice":
            from .birkhoff import upset_lattice
            text = emit_dot(upset_lattice(P), name=f"upsets of {a.expr}")
        else:
            text = emit_dot(P, name=a.expr)
    elif a.expr in ws.lattices:
        text = emit_dot(ws.lattices[a.expr], name=a.expr)
    else:
        S = resolve_space(a.expr, ws)
        depth = a.depth if a.depth is not None else 2
        if a.kind == "truncation":
            text = emit_dot(S, depth)
        elif a.kind == "lattice":
            from .birkhoff import upset_lattice
            text = emit_dot(upset_lattice(truncate(S, depth).poset), name=f"upsets of {S.name}@{depth}")
        else:
            text = emit_dot(represented_lattice(S, depth), name=f"catalog of {S.name}@{depth}")
    run.report["verdict"] = "ok"
    run.report["result"] = {"dot": text}
    return 0, [text.rstrip("\n")]


# argument parsing ------------------------------------------------------------


def _common(sub=False):
    p = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS if sub else None
    p.add_argument("--json", action="store_true", default=d if sub else False, help="JSON report")
    p.add_argument("--cross-check", dest="cross_check", action=argparse.BooleanOptionalAction,
                   default=d if sub else True, help="repeat window decisions at 2w+4 (default on)")
    return p


def build_parser():
    common = _common(False)
    parser = argparse.ArgumentParser(prog="pkit", parents=[common],
                                     description="Finite distributive lattices and presented Priestley spaces.")
    parser.add_argument("--window", type=int, default=None, help="engine window (default: bound B)")
    sub = parser.add_subparsers(dest="command", required=True)
    sc = _common(True)

    def add(name, helptext, expr=True):
        p = sub.add_parser(name, parents=[sc], help=helptext)
        if expr:
            p.add_argument("expr", help="space expression or a name from the input files")
        p.add_argument("files", nargs="*", help="DSL files with definitions")
        p.add_argument("--window", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return p

    p = add("check", "decide a property of a space")
    p.add_argument("--property", choices=PROPERTIES, default="esakia")
    p.set_defaults(func=cmd_check)

    p = add("find-config", "find a forbidden configuration")
    p.add_argument("--p", action="store_true", help="require U to be an upset (p-configuration)")
    p.set_defaults(func=cmd_find_config)

    p = sub.add_parser("dual", parents=[sc], help="catalog of definable clopen upsets")
    p.add_argument("expr")
    p.add_argument("files", nargs="*")
    p.add_argument("--window", dest="catalog_window", type=int, default=2,
                   help="largest constant in the catalog descriptors (default 2)")
    p.set_defaults(func=cmd_dual)

    p = add("implies", "relative pseudo-complement of two clopen upsets")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.set_defaults(func=cmd_implies)

    p = add("dsum-check", "Esakia verdict of X +_D Y against clopenness of D")
    p.add_argument("-d", required=True, help="closed downset of X")
    p.add_argument("--right", default="point", help="right summand (default point)")
    p.add_argument("-u", default="all", help="closed upset of the right summand (default all)")
    p.set_defaults(func=cmd_dsum_check)

    p = sub.add_parser("oracle", parents=[sc], help="brute-force sweeps")
    p.add_argument("files", nargs="*")
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--sweep", choices=("birkhoff", "ifp", "stability"), default="birkhoff")
    p.add_argument("--expr", default=None, help="single space for the stability sweep")
    p.add_argument("--window", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle)

    p = add("render", "DOT output")
    p.add_argument("--depth", type=int, default=None, help="truncation level or catalog window")
    p.add_argument("--kind", choices=("truncation", "lattice", "catalog"), default="truncation")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        # files may follow options (`dsum-check X -d D defs.pk`); collect stray positionals
        args, extra = parser.parse_known_args(argv)
        flags = [x for x in extra if x.startswith("-")]
        if flags or (extra and not hasattr(args, "files")):
            parser.error("unrecognized arguments: " + " ".join(flags or extra))
        if extra:
            args.files = list(args.files) + extra
    except SystemExit as e:
        return 2 if e.code else 0
    run = Run(args, argv)
    try:
        ws = load_workspace(args.files)
        code, lines = args.func(run, ws)
    except PkitError as e:
        run.report["verdict"] = "error" if e.exit_code == 2 else "inconclusive"
        run.report["error"] = e.payload()
        return run.finish(e.exit_code, [f"error: {e}"])
    except (OSError, ValueError) as e:
        run.report["verdict"] = "error"
        run.report["error"] = {"error": type(e).__name__, "message": str(e)}
        return run.finish(2, [f"error: {e}"])
    return run.finish(code, lines)


if __name__ == "__main__":
    sys.exit(main())
