"""Command-line front end.

Exit codes: 0 all checks pass, 1 a property legitimately fails (for example
a rejected candidate), 2 internal inconsistency, 64 usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .errors import CevianError, InconsistencyError, ParseError, ValidationError

EXIT_OK, EXIT_FAIL, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _pool(text: str) -> list:
    from .ratcore import parse_ext

    if not text.strip():
        return []
    return [parse_ext(p) for p in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    # options accepted before or after the subcommand; defaults are filled in by main()
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--report", choices=("json", "text"), help="report format (default text)")
    common.add_argument("--threads", type=int, help="worker processes for searches (default 1)")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("-o", "--output", help="write the report to this file instead of stdout")

    p = _Parser(prog="cevian", description="Exact checks for Ceva configurations, Cevian lattices and cone lattices.",
                parents=[common])
    p.add_argument("--version", action="version", version=f"cevian {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ceva = sub.add_parser("ceva", help="Ceva configurations").add_subparsers(dest="action", required=True,
                                                                             parser_class=_Parser)
    c = ceva.add_parser("check", parents=[common], help="check a ceva scenario")
    c.add_argument("file")
    c = ceva.add_parser("search", parents=[common], help="exhaustive search over an endpoint pool")
    c.add_argument("--pool", default="1/3,1/2,1,2,3,inf")
    c.add_argument("--budget", type=int, default=None)
    c = ceva.add_parser("converse", parents=[common], help="check that ([0,x),[0,y),[0,xy)) satisfies the hypotheses")
    c.add_argument("x")
    c.add_argument("y")

    lem = sub.add_parser("lemma43", help="Cevian families in A_123").add_subparsers(dest="action", required=True,
                                                                                   parser_class=_Parser)
    c = lem.add_parser("check", parents=[common], help="check a candidate family")
    c.add_argument("file")
    c = lem.add_parser("scan", parents=[common], help="scan the term pool")
    c.add_argument("--pool-depth", type=int, default=1)

    lat = sub.add_parser("lattice", help="finite distributive lattices").add_subparsers(dest="action", required=True,
                                                                                       parser_class=_Parser)
    c = lat.add_parser("normal", parents=[common], help="complete normality")
    c.add_argument("file")
    c = lat.add_parser("cevian", parents=[common], help="search for a Cevian operation")
    c.add_argument("file")
    c = lat.add_parser("enum", parents=[common], help="all lattices up to isomorphism")
    c.add_argument("--max-ji", type=int, default=5)

    dg = sub.add_parser("diagram", help="P[3]-indexed diagrams").add_subparsers(dest="action", required=True,
                                                                               parser_class=_Parser)
    c = dg.add_parser("verify", parents=[common], help="verify diagram A, D or the transformation eta")
    c.add_argument("which", choices=("A", "D", "eta"))
    c.add_argument("--depth", type=int, default=3)

    c = sub.add_parser("condensate", parents=[common], help="finite condensate of a lattice diagram")
    c.add_argument("file")

    cone = sub.add_parser("cone", help="strict open polyhedral cones").add_subparsers(dest="action", required=True,
                                                                                    parser_class=_Parser)
    for name in ("empty", "subset", "meet", "join"):
        c = cone.add_parser(name, parents=[common])
        c.add_argument("file")

    pl = sub.add_parser("plot", help="figures").add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = pl.add_parser("ceva", parents=[common], help="draw a ceva scenario on the 2-simplex")
    c.add_argument("file")
    c.add_argument("--out", required=True, help="figure path (.svg or .png)")
    return p


# ---------------------------------------------------------------- commands


def _ceva_input(sc):
    from .ceva import CevaInput
    from .ratcore import parse_ratioset

    return CevaInput(*(sc.parse_with(k, parse_ratioset) for k in ("U12", "U23", "U13")))


def cmd_ceva(args) -> tuple:
    from .ceva import CevaInput, ceva_check, ceva_converse_check, ceva_search
    from .ratcore import RatioSet, as_rat, parse_rat
    from .textfmt import read_scenario

    if args.action == "check":
        inp = _ceva_input(read_scenario(args.file, "ceva"))
        v = ceva_check(inp)
        rep = {"input": {k: str(u) for k, u in inp.sets().items()}, "verdict": v.as_dict()}
        return rep, EXIT_OK if v.hypotheses_hold else EXIT_FAIL
    if args.action == "search":
        rep = ceva_search(_pool(args.pool), args.budget, threads=max(1, args.threads))
        if rep["inconsistencies"]:
            return rep, EXIT_INCONSISTENT
        return rep, EXIT_OK
    x, y = parse_rat(args.x), parse_rat(args.y)
    ok = ceva_converse_check(x, y)
    v = ceva_check(CevaInput(RatioSet.initial(x), RatioSet.initial(y), RatioSet.initial(as_rat(x) * y)))
    rep = {"x": x, "y": y, "xy": x * y, "hypotheses_hold": ok, "verdict": v.as_dict()}
    return rep, EXIT_OK if ok else EXIT_FAIL


def cmd_lemma43(args) -> tuple:
    from .diagrams import CevianFamilyCandidate, lemma43_check, lemma43_refute_pipeline, lemma43_scan
    from .lterm import format_lterm, parse_lterm
    from .textfmt import read_scenario

    if args.action == "scan":
        rep = lemma43_scan(args.pool_depth)
        return rep, EXIT_OK
    sc = read_scenario(args.file, "lemma43")
    terms = {}
    for key in ("c12", "c21", "c23", "c32", "c13", "c31"):
        terms[(int(key[1]), int(key[2]))] = sc.parse_with(key, parse_lterm)
    cand = CevianFamilyCandidate(terms)
    v = lemma43_check(cand)
    rep = {"candidate": {f"c{i}{j}": format_lterm(t) for (i, j), t in cand.terms.items()},
           "verdict": v.as_dict()}
    if not v.condition.startswith(("(ii)", "(iii)")):
        rep["refutation"] = lemma43_refute_pipeline(cand)
    return rep, EXIT_FAIL


def _read_lattice(path):
    from .finlat import FinDistLattice
    from .posets import FinitePoset
    from .textfmt import read_scenario

    sc = read_scenario(path, "lattice")
    names = [n.strip() for n in sc.get("elements").split(",") if n.strip()]
    if len(set(names)) != len(names):
        raise ParseError("duplicate join-irreducible", *sc.where["elements"])
    pairs = []
    if sc.get("covers"):
        line, col = sc.where["covers"]
        for part in sc.get("covers").split(","):
            bits = [b.strip() for b in part.split("<")]
            if len(bits) != 2 or not all(bits):
                raise ParseError(f"expected 'a < b', found {part.strip()!r}", line=line, col=col)
            for b in bits:
                if b not in names:
                    raise ParseError(f"unknown join-irreducible {b!r}", line=line, col=col)
            pairs.append(tuple(bits))
    try:
        poset = FinitePoset.from_relation(names, pairs)
    except ValidationError as exc:
        raise ParseError(str(exc), *sc.where["covers"]) from None
    return FinDistLattice(poset, sc.get("name", os.path.basename(path)))


def _table_text(D, T) -> dict:
    return {f"{D.element_name(a)} \\ {D.element_name(b)}": D.element_name(v) for (a, b), v in sorted(T.items())}


def cmd_lattice(args) -> tuple:
    from .finlat import (
        cevian_axiom_check,
        cevian_solve,
        completely_normal,
        completely_normal_bruteforce,
        enumerate_lattices,
    )

    if args.action == "enum":
        lats = enumerate_lattices(args.max_ji)
        n_cn = n_solved = 0
        mismatches = []
        for D in lats:
            cn, _ = completely_normal(D)
            T = cevian_solve(D)
            if T is not None:
                if not cevian_axiom_check(D, T).ok:
                    raise InconsistencyError("solver returned a table failing the axioms", {"lattice": repr(D)})
                n_solved += 1
            n_cn += cn
            if cn != (T is not None):
                mismatches.append(repr(D))
        rep = {"max_ji": args.max_ji, "lattices": len(lats), "completely_normal": n_cn, "cevian": n_solved,
               "mismatches": mismatches, "note": "finite-scale result only"}
        if mismatches:
            raise InconsistencyError("Cevian solvability differs from complete normality", rep)
        return rep, EXIT_OK
    D = _read_lattice(args.file)
    cn, pair = completely_normal(D)
    if cn != completely_normal_bruteforce(D)[0]:
        raise InconsistencyError("normality criterion disagrees with the definition", {"lattice": repr(D)})
    rep = {"lattice": D.name, "elements": len(D), "completely_normal": cn}
    if pair is not None:
        rep["counterexample"] = [D.element_name(pair[0]), D.element_name(pair[1])]
    if args.action == "normal":
        return rep, EXIT_OK if cn else EXIT_FAIL
    T = cevian_solve(D)
    if (T is not None) != cn:
        raise InconsistencyError("Cevian solvability differs from complete normality", rep)
    if T is None:
        rep["result"] = "no Cevian operation exists"
        rep["note"] = "finite-scale result only"
        return rep, EXIT_FAIL
    chk = cevian_axiom_check(D, T)
    rep["result"] = "Cevian operation found"
    rep["axioms_ok"] = chk.ok
    rep["table"] = _table_text(D, T)
    rep["note"] = "finite-scale result only"
    return rep, EXIT_OK if chk.ok else EXIT_FAIL


def cmd_diagram(args) -> tuple:
    from .diagrams import verify_diagram_A, verify_diagram_D, verify_eta

    if args.which == "A":
        rep = verify_diagram_A()
    elif args.which == "D":
        rep = verify_diagram_D()
    else:
        rep = verify_eta(args.depth)
        rep["squares"] = [{k: v for k, v in s.items() if k != "failures" or v} for s in rep["squares"]]
    return rep, EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_condensate(args) -> tuple:
    from .posets import cube_poset, format_index, parse_index
    from .psbool import Condensate, PScaledBA, ScaledMorphism, powerset_diagram, restricted_D_diagram, tensor_morphism
    from .textfmt import read_scenario

    sc = read_scenario(args.file, "condensate")
    which = sc.get("diagram", "powerset")
    if which not in ("powerset", "restricted-D"):
        raise ParseError(f"unknown diagram {which!r}", *sc.where["diagram"])
    S = powerset_diagram() if which == "powerset" else restricted_D_diagram()
    P = cube_poset()

    def tags(key):
        out = {}
        line, col = sc.where[key]
        for part in sc.get(key).split(","):
            if "=" not in part:
                raise ParseError(f"expected 'atom=index', found {part.strip()!r}", line=line, col=col)
            a, t = (s.strip() for s in part.split("=", 1))
            try:
                out[a] = parse_index(t)
            except ValidationError as exc:
                raise ParseError(str(exc), line=line, col=col) from None
        return out

    A = PScaledBA.from_tags(P, tags("atoms"), name="A")
    C = Condensate(A, S)
    rep = {"diagram": which, "atoms": {a: format_index(t) for a, t in zip(A.atoms, (A.tag(a) for a in A.atoms))},
           "factors": [f"S_{format_index(t)} ({len(L)} elements)" for _, t, L in C.factors], "size": len(C)}
    code = EXIT_OK
    if sc.get("target"):
        B = PScaledBA.from_tags(P, tags("target"), name="B")
        if not sc.get("map"):
            raise ParseError("a target needs a map 'b->a, ...'", *sc.where["target"])
        amap = {}
        for part in sc.get("map").split(","):
            if "->" not in part:
                raise ParseError(f"expected 'b->a', found {part.strip()!r}", *sc.where["map"])
            b, a = (s.strip() for s in part.split("->", 1))
            amap[b] = a
        phi = ScaledMorphism(A, B, amap)
        tgt = Condensate(B, S)
        f = tensor_morphism(phi, S, C, tgt)
        surj = set(f.values()) == set(tgt.lattice.elements)
        rep["morphism"] = {"normal": phi.is_normal(), "target_size": len(tgt), "surjective": surj}
        if phi.is_normal() and not surj:
            raise InconsistencyError("tensor of a normal morphism is not surjective", rep)
    return rep, code


def cmd_cone(args) -> tuple:
    from .cones import AmbientCone, format_region, region_difference, region_lattice
    from .textfmt import parse_ambient, parse_region, read_scenario

    sc = read_scenario(args.file, "cone")
    n = sc.parse_with("dimension", int)
    amb = sc.parse_with("ambient", lambda t: parse_ambient(t, n)) if sc.get("ambient") else AmbientCone.trivial(n)
    A = sc.parse_with("A", lambda t: parse_region(t, amb))
    if args.action == "empty":
        w = None
        for cell in A.cells:
            from .cones import cell_witness

            w = cell_witness(cell)
            if w is not None:
                break
        rep = {"A": format_region(A), "empty": w is None}
        if w is not None:
            rep["witness"] = list(w)
        return rep, EXIT_OK if w is None else EXIT_FAIL
    if not sc.get("B"):
        raise ParseError(f"cone {args.action} needs a region B", line=1, col=1)
    B = sc.parse_with("B", lambda t: parse_region(t, amb))
    if args.action == "subset":
        w = region_difference(A, B)
        rep = {"A": format_region(A), "B": format_region(B), "subset": w is None}
        if w is not None:
            rep["witness"] = list(w)
        return rep, EXIT_OK if w is None else EXIT_FAIL
    R = region_lattice(args.action, A, B)
    return {"A": format_region(A), "B": format_region(B), args.action: format_region(R)}, EXIT_OK


def cmd_plot(args) -> tuple:
    from .plotting import plot_ceva
    from .textfmt import read_scenario

    inp = _ceva_input(read_scenario(args.file, "ceva"))
    try:
        plot_ceva(inp, args.out)
    except OSError as exc:
        raise ValidationError(f"cannot write {args.out}: {exc.strerror}") from None
    return {"figure": args.out, "input": {k: str(u) for k, u in inp.sets().items()}}, EXIT_OK


COMMANDS = {
    "ceva": cmd_ceva,
    "lemma43": cmd_lemma43,
    "lattice": cmd_lattice,
    "diagram": cmd_diagram,
    "condensate": cmd_condensate,
    "cone": cmd_cone,
    "plot": cmd_plot,
}


_DEFAULTS = {"report": "text", "threads": 1, "timings": False, "output": None}


def _input_hash(args) -> Optional[str]:
    path = getattr(args, "file", None)
    if not path or not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _emit(text: str, args):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    from .textfmt import render_json, render_text

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    for key, default in _DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, default)
    start = time.perf_counter()
    try:
        body, code = COMMANDS[args.command](args)
        status = {EXIT_OK: "pass", EXIT_FAIL: "fail"}[code]
    except InconsistencyError as exc:
        body, code, status = {"error": str(exc), "counterexample": exc.counterexample}, EXIT_INCONSISTENT, \
            "inconsistent"
    except (ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"cevian: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CevianError as exc:
        print(f"cevian: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"tool": f"cevian {__version__}", "command": " ".join(
        x for x in (args.command, getattr(args, "action", None), getattr(args, "which", None)) if x),
        "status": status, "result": body}
    digest = _input_hash(args)
    if digest:
        report["input_sha256"] = digest
    if args.timings:
        report["timings"] = {"seconds": round(time.perf_counter() - start, 3)}
    _emit(render_json(report) if args.report == "json" else render_text(report), args)
    return code


if __name__ == "__main__":
    sys.exit(main())
