"""Command-line interface.

Exit codes:
    0  success
    1  usage error (argparse)
    2  graph or id parse error
    3  some target unresolved within the budget
    4  numeric verification failed
    5  census store corrupt or incompatible
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .census import StoreError, decode, load_store, run_census
from .groebner import Budget
from .identify import classify_graph, verify_report
from .parametrize import ParamRing, all_targets
from .report import (
    criteria_to_dict,
    criteria_to_text,
    report_from_dict,
    report_to_dot,
    report_to_json,
    report_to_text,
    verification_to_dict,
    verification_to_text,
)
from .semgraph import GraphError, parse_graph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_UNRESOLVED = 3
EXIT_VERIFY = 4
EXIT_STORE = 5

STORE_ENV = "SEMGB_STORE"


def _budget(args) -> Budget:
    return Budget(max_seconds=args.timeout_secs)


def _select_targets(g, names):
    if not names:
        return None
    # commas inside TE(i,j) do not separate names
    wanted = {n.strip() for n in re.findall(r"[^,(]+(?:\([^)]*\))?", names) if n.strip()}
    ts = [t for t in all_targets(g, ParamRing(g)) if t.name in wanted or t.label in wanted]
    missing = wanted - {t.name for t in ts} - {t.label for t in ts}
    if missing:
        raise GraphError(f"unknown target(s): {', '.join(sorted(missing))}")
    return ts


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_analyze(args) -> int:
    g = parse_graph(args.graph)
    targets = _select_targets(g, args.targets)
    rep = classify_graph(g, _budget(args), targets=targets, with_vanishing=targets is None)
    if args.format == "json":
        _emit(report_to_json(rep))
    elif args.format == "dot":
        _emit(report_to_dot(rep))
    else:
        _emit(report_to_text(rep))
    return EXIT_UNRESOLVED if rep.unresolved() else EXIT_OK


def _store_path(args, m: int | None = None) -> str:
    if args.store:
        return args.store
    env = os.environ.get(STORE_ENV)
    if env:
        return env
    return f"census-m{m}.jsonl" if m is not None else "census.jsonl"


def _parse_ids(text: str | None) -> list[int] | None:
    if not text:
        return None
    try:
        return [int(tok, 0) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise GraphError(f"bad graph id list {text!r}") from None


def cmd_census(args) -> int:
    only = _parse_ids(args.only)
    if only is not None:
        for gid in only:
            decode(args.nodes, gid)
    store = _store_path(args, args.nodes)

    def progress(rec):
        if args.verbose:
            print(f"  id {rec['id']}: {rec['report']['verdict']['text']}", file=sys.stderr)

    summary = run_census(args.nodes, store, _budget(args), resume=args.resume, jobs=args.jobs,
                         only=only, progress=progress)
    if args.format == "json":
        _emit(json.dumps(summary.to_dict(), indent=2))
    else:
        _emit(summary.to_text())
        if only is not None:
            recs = load_store(store, args.nodes)
            for gid in sorted(set(only)):
                rec = recs[gid]
                _emit(f"  {gid}: {decode(args.nodes, gid)}: {rec['report']['verdict']['text']}")
    return EXIT_UNRESOLVED if summary.unresolved_ids else EXIT_OK


def cmd_dot(args) -> int:
    if args.id is not None:
        if args.graph is not None:
            raise GraphError("give either a graph or --id, not both")
        m = args.nodes
        if m is None:
            raise GraphError("--id needs --nodes")
        gid = _parse_ids(args.id)[0]
        decode(m, gid)
        recs = load_store(_store_path(args, m), m)
        if gid in recs:
            rep = report_from_dict(recs[gid]["report"])
        else:
            rep = classify_graph(decode(m, gid), _budget(args))
    else:
        if args.graph is None:
            raise GraphError("no graph given")
        rep = classify_graph(parse_graph(args.graph), _budget(args))
    _emit(report_to_dot(rep))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = parse_graph(args.graph)
    targets = _select_targets(g, args.targets)
    rep = classify_graph(g, _budget(args), targets=targets, with_vanishing=False)
    vr = verify_report(rep, trials=args.trials, seed=args.seed)
    if args.format == "json":
        _emit(json.dumps(verification_to_dict(vr), indent=2))
    else:
        _emit(verification_to_text(vr))
    if not vr.ok:
        return EXIT_VERIFY
    return EXIT_UNRESOLVED if rep.unresolved() else EXIT_OK


def cmd_criteria(args) -> int:
    g = parse_graph(args.graph)
    if args.format == "json":
        _emit(json.dumps(criteria_to_dict(g), indent=2))
    else:
        _emit(criteria_to_text(g))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # argparse's own status 2 would collide with EXIT_PARSE
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="semgb",
        description="Identifiability of linear structural equation models via Groebner bases.",
        epilog="Graphs are written '<m>; <directed edges>; <bidirected edges>', "
               "e.g. '3; 1->2 2->3; 2<->3'.  Exit codes: 0 ok, 2 parse error, "
               "3 unresolved target, 4 verification failure, 5 store corruption.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("text", "json")):
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--timeout-secs", type=float, default=600.0,
                        help="Groebner budget per computation in seconds (default 600)")

    a = sub.add_parser("analyze", help="classify every parameter of one graph")
    a.add_argument("graph")
    a.add_argument("--targets", help="comma-separated target names, e.g. l23,w11,'TE(2,4)'")
    common(a, ("text", "json", "dot"))
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("census", help="classify all graphs on m vertices")
    c.add_argument("--nodes", type=int, required=True)
    c.add_argument("--store", help=f"JSONL store path (default ${STORE_ENV} or census-m<m>.jsonl)")
    c.add_argument("--resume", action="store_true", help="keep existing records and add the rest")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--only", help="graph ids to classify (comma or space separated)")
    c.add_argument("-v", "--verbose", action="store_true")
    common(c)
    c.set_defaults(func=cmd_census)

    d = sub.add_parser("dot", help="coloured DOT rendering of a classified graph")
    d.add_argument("graph", nargs="?")
    d.add_argument("--id", help="graph id, looked up in the store when present")
    d.add_argument("--nodes", type=int)
    d.add_argument("--store")
    d.add_argument("--timeout-secs", type=float, default=600.0)
    d.set_defaults(func=cmd_dot)

    v = sub.add_parser("verify", help="check identified targets at random exact parameter points")
    v.add_argument("graph")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--targets")
    common(v)
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("criteria", help="single-door, instrumental-variable and back-door table")
    k.add_argument("graph")
    k.add_argument("--format", choices=("text", "json"), default="text")
    k.set_defaults(func=cmd_criteria)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StoreError as exc:
        print(f"store error: {exc}", file=sys.stderr)
        return EXIT_STORE


if __name__ == "__main__":
    sys.exit(main())
