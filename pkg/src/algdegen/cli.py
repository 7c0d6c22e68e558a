"""Command-line front end.

Every command prints diff-friendly ``STATUS\\tpair\\tevidence`` lines (or
plain text for ``catalog`` and ``info``).  Exit codes: 0 all checks passed,
1 a verification failed, 2 usage error, 3 a required check was
inconclusive."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import catalog, degeneration, graph, obstruction
from .algebra import (
    AlgebraFormatError,
    derivation_dim,
    format_algebra,
    left_annihilator,
    parse_algebra,
    plus_square,
    square,
)
from .catalog import CatalogError, CatalogRef, Unknown, Variety
from .config import GraphConfig, budget_from_env
from .scalar import ExprSyntaxError, scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

SUITE_CHOICES = ("a3", "a5", "sec4", "derived", "all")
RSETS = {"l4": obstruction.RSET_L4, "l5": obstruction.RSET_L5, "traceless": obstruction.RSET_TRACELESS}


class UsageError(Exception):
    pass


def _ref(text, params=()) -> CatalogRef:
    """Catalog reference from ``NAME``, ``NAME[value]`` or ``NAME`` plus
    ``--param key=value`` flags."""
    ref = catalog.parse_ref(text)
    for item in params or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        e = ref.entry
        if not e.is_family or key.strip() != e.param:
            raise UsageError(f"{ref.name} has no parameter {key.strip()!r}")
        ref = CatalogRef(ref.name, scalar(val.strip()))
    return ref


def _line(status, pair, evidence):
    return f"{status}\t{pair}\t{evidence}"


class Report:
    """Collects output lines and structured records in command order."""

    def __init__(self, out):
        self.out = out
        self.records = []

    def emit(self, status, pair, evidence, **extra):
        print(_line(status, pair, evidence), file=self.out)
        self.records.append({"status": status, "pair": str(pair), "evidence": str(evidence), **extra})

    def text(self, s=""):
        print(s, file=self.out)


# --------------------------------------------------------------------------
# commands


def cmd_catalog(args, rep: Report):
    rep.out.write(catalog.dump_catalog(args.variety))
    return EXIT_OK


def cmd_info(args, rep: Report):
    ref = _ref(args.name, args.param)
    A = catalog.get(ref)
    e = ref.entry
    rep.text(format_algebra(A.with_name(str(ref)), anticommutative=e.anticommutative).rstrip())
    rep.text(f"Der = {derivation_dim(A)}")
    rep.text(f"Ann_L = {left_annihilator(A).dim}")
    rep.text(f"A^(+2) = {plus_square(A).dim}")
    rep.text(f"A^2 = {square(A).dim}")
    try:
        tup = obstruction.s_tuple(A)
        rep.text("S = (" + ", ".join(str(x) for x in tup) + ")")
    except obstruction.NotStandard as exc:
        rep.text(f"S = none (not standard: {'; '.join(exc.args[0])})")
    if ref.param is None and e.is_family:
        rep.text(f"orbit dimension = {degeneration.orbit_dimension(ref)} (family)")
    else:
        rep.text(f"orbit dimension = {degeneration.orbit_dimension(ref)}")
    return EXIT_OK


def _suite_certificates(args):
    if args.file:
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            raise UsageError(str(exc)) from exc
        return degeneration.parse_certificates(text)
    names = degeneration.SUITES if args.table == "all" else (args.table,)
    return [c for n in names for c in degeneration.table(n)]


def cmd_verify(args, rep: Report):
    certs = _suite_certificates(args)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(degeneration.verify_certificate, certs))
    failed = 0
    for cert, r in zip(certs, reports):
        pair = f"{cert.source}->{cert.target}"
        if r.valid:
            ev = f"{cert.name} exceptions {r.exceptions}"
            rep.emit("PASS", pair, ev, certificate=cert.name, exceptions=str(r.exceptions))
        else:
            failed += 1
            rep.emit("FAIL", pair, f"{cert.name} {r.error}", certificate=cert.name)
    return EXIT_FAIL if failed else EXIT_OK


def _infer_variety(*refs):
    names = {r.name for r in refs}
    if any(n.startswith("A") for n in names):
        if any(n.startswith("L") for n in names):
            raise UsageError("anticommutative and non-Lie Leibniz algebras share no variety")
        return Variety.ACOM3
    return Variety.LEIB3


def cmd_nondegen(args, rep: Report):
    a, b = _ref(args.source), _ref(args.target)
    if args.param:
        a = _ref(args.source, args.param)
    pair = f"{a}->{b}"
    variety = Variety(args.variety) if args.variety else _infer_variety(a, b)
    cfg = GraphConfig(budget=budget_from_env(), seed=args.seed)
    G = graph.build_graph(variety, cfg)
    if a in G.nodes and b in G.nodes and a != b and graph.generic_reaches(G, a, b):
        rep.emit("DEGEN", pair, G.evidence(a, b))
        return EXIT_OK
    checks = graph.pair_checks(a, b, cfg)
    blocked = [c for c in checks if c[1] == "BLOCKED"]
    for name, status, detail in checks:
        rep.emit(status, pair, f"{name}: {detail}", check=name)
    if blocked:
        rep.emit("RESULT", pair, f"blocked by {blocked[0][0]}")
        return EXIT_OK
    if a in G.nodes and b in G.nodes and (a, b) in G.nonedges:
        rep.emit("RESULT", pair, f"blocked by {G.nonedges[(a, b)]}")
        return EXIT_OK
    inconclusive = any(c[1] == "INCONCLUSIVE" for c in checks)
    rep.emit("RESULT", pair, "unresolved" + (" (inconclusive check)" if inconclusive else ""))
    return EXIT_INCONCLUSIVE


def cmd_graph(args, rep: Report):
    G = graph.build_graph(args.variety, GraphConfig(budget=budget_from_env(), seed=args.seed))
    view = args.view
    if args.dot:
        Path(args.dot).write_text(graph.export_dot(G, primary_only=(view == "primary")))
    if view == "primary":
        pairs = graph.primary_reduction(G)
    else:
        pairs = sorted(G.closure(), key=lambda p: (G.nodes.index(p[0]), G.nodes.index(p[1])))
    for x, y in pairs:
        rep.emit("DEGEN", f"{x}->{y}", G.evidence(x, y))
    if args.all_pairs:
        for x in G.nodes:
            for y in G.nodes:
                if x != y and (x, y) not in G.closure():
                    rep.emit(G.status(x, y), f"{x}->{y}", G.evidence(x, y))
    else:
        for x, y in sorted(G.unresolved, key=lambda p: (G.nodes.index(p[0]), G.nodes.index(p[1]))):
            rep.emit("UNRESOLVED", f"{x}->{y}", "no certificate and no obstruction")
    return EXIT_INCONCLUSIVE if G.unresolved else EXIT_OK


def cmd_components(args, rep: Report):
    G = graph.build_graph(args.variety, GraphConfig(budget=budget_from_env(), seed=args.seed))
    for i, comp in enumerate(graph.components(G), 1):
        members = ", ".join(str(m) for m in comp.members)
        rep.emit("COMPONENT", f"K{i}:{comp.generic}", f"{{{members}}} ({comp.evidence})",
                 members=[str(m) for m in comp.members])
    return EXIT_OK


def cmd_identify(args, rep: Report):
    try:
        A = parse_algebra(Path(args.file).read_text())
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    budget = budget_from_env()
    try:
        ref = catalog.identify(A, args.variety, budget=budget, seed=args.seed)
    except Unknown as exc:
        rep.emit("UNKNOWN", args.file, str(exc))
        return EXIT_FAIL
    except RuntimeError as exc:
        rep.emit("INCONCLUSIVE", args.file, str(exc))
        return EXIT_INCONCLUSIVE
    rep.emit("MATCH", args.file, str(ref))
    return EXIT_OK


def cmd_stability(args, rep: Report):
    if args.file:
        try:
            R = obstruction.parse_rset(Path(args.file).read_text())
        except OSError as exc:
            raise UsageError(str(exc)) from exc
    else:
        R = RSETS[args.rset]
    res = obstruction.check_borel_stability(R, budget=budget_from_env(), seed=args.seed)
    rep.emit(res.verdict.value.upper(), R.name, res.detail or "-")
    return {obstruction.Stability.STABLE: EXIT_OK,
            obstruction.Stability.UNSTABLE: EXIT_FAIL}.get(res.verdict, EXIT_INCONCLUSIVE)


# --------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="algdegen", description="Exact checks of degenerations of 3-dimensional algebras.")
    p.add_argument("--json", metavar="FILE", help="also write the result records as JSON")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("catalog", help="dump the catalog in the algebra text format")
    s.add_argument("--variety", choices=[v.value for v in Variety])
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("info", help="invariants of a catalog algebra")
    s.add_argument("name")
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("verify", help="verify built-in certificate suites or a certificate file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--table", choices=SUITE_CHOICES)
    g.add_argument("--file")
    s.add_argument("--jobs", type=int, default=4)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("nondegen", help="run every applicable obstruction on a pair")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--param", action="append", metavar="KEY=VALUE", help="parameter of the source")
    s.add_argument("--variety", choices=[v.value for v in Variety])
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_nondegen)

    s = sub.add_parser("graph", help="build the degeneration graph")
    s.add_argument("--variety", required=True, choices=[v.value for v in Variety])
    s.add_argument("--dot", metavar="FILE")
    s.add_argument("--view", choices=("primary", "closure"), default="primary")
    s.add_argument("--all-pairs", action="store_true", help="also list obstructed and unresolved pairs")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("components", help="irreducible components")
    s.add_argument("--variety", required=True, choices=[v.value for v in Variety])
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_components)

    s = sub.add_parser("identify", help="identify an algebra file with a catalog entry")
    s.add_argument("file")
    s.add_argument("--variety", choices=[v.value for v in Variety], default="leib3")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_identify)

    s = sub.add_parser("stability", help="check Borel stability of an R-set")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--rset", choices=sorted(RSETS))
    g.add_argument("--file")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_stability)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    rep = Report(out)
    try:
        code = args.func(args, rep)
    except (UsageError, CatalogError, ExprSyntaxError, AlgebraFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        Path(args.json).write_text(json.dumps({"command": args.command, "exit": code, "records": rep.records},
                                              indent=2, sort_keys=True) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
