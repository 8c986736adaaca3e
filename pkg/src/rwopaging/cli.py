"""Command-line front end. Exit codes: 0 ok, 1 check failure, 2 usage, 3 budget."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .families import FAMILY_KINDS, FamilyId
from .graph import GraphError, is_walk, parse_graph_spec, parse_sequence
from .paging import PolicyId, simulate
from .walkstruct import NormalizationRequired, RewriteError, classify_turns, decompose_turns, normalize
from .worstorder import (
    InfeasibleMultisetError, RequestMultiset, SearchConfig, SizeGuardError, rwor_curve,
    worst_order_exact,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

GRAPH_SHORTHAND = {"In": "path", "Is": "path", "Jr": "chained_cycles", "ScriptIn": "chained_cycles",
                   "I1": "chained_cycles"}


class UsageError(Exception):
    pass


def _policy(name: str, tiebreak: str = "lowest_id") -> PolicyId:
    try:
        return PolicyId(name, tiebreak)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _graph(spec: str):
    try:
        return parse_graph_spec(spec)
    except GraphError as e:
        raise UsageError(str(e)) from None


def _walk(g, text: str):
    try:
        seq = parse_sequence(text)
        ok = is_walk(g, seq)
    except (ValueError, GraphError) as e:
        raise UsageError(str(e)) from None
    if not ok:
        raise UsageError(f"sequence is not a walk on {g.name}")
    return seq


def cmd_simulate(args) -> int:
    g = _graph(args.graph)
    seq = _walk(g, args.seq)
    trace = simulate(_policy(args.policy, args.tiebreak), seq, args.k)
    if args.json:
        sys.stdout.write(trace.to_jsonl())
        return EXIT_OK
    for e in trace.events:
        extra = ""
        if e.flushed:
            extra = " flush"
        elif e.evicted is not None:
            extra = f" evict {e.evicted}"
        print(f"{e.index:>4} {e.page:>4} {e.outcome}{extra}")
    print(f"{trace.policy} k={args.k}: {trace.total_faults} faults, {trace.hits} hits")
    return EXIT_OK


def cmd_worst_order(args) -> int:
    g = _graph(args.graph)
    try:
        m = RequestMultiset.parse(args.multiset)
        sc = SearchConfig(args.start, args.budget, args.jobs)
        res = worst_order_exact(g, m, _policy(args.policy, args.tiebreak), args.k, sc)
    except (InfeasibleMultisetError, SizeGuardError, GraphError, ValueError) as e:
        raise UsageError(str(e)) from None
    print(json.dumps({"max_faults": res.max_faults, "witness": list(res.witness),
                      "exhausted": res.exhausted, "nodes": res.nodes}))
    return EXIT_OK if res.exhausted else EXIT_BUDGET


def cmd_generate(args) -> int:
    try:
        seq, g = FamilyId(args.family, args.k, args.n).generate()
    except ValueError as e:
        raise UsageError(str(e)) from None
    print(",".join(map(str, seq)))
    print(f"{GRAPH_SHORTHAND[args.family]}:{_graph_param(args.family, g)}")
    return EXIT_OK


def _graph_param(family: str, g) -> int:
    if GRAPH_SHORTHAND[family] == "path":
        return g.vertex_count
    return g.vertex_count // 6


def cmd_normalize(args) -> int:
    g = _graph(args.graph)
    seq = _walk(g, args.seq)
    try:
        stages = normalize(seq, g, args.k)
    except (NormalizationRequired, RewriteError, GraphError) as e:
        raise UsageError(str(e)) from None
    for name, s in stages:
        t = decompose_turns(s, g)
        print(f"{name}: {','.join(map(str, s))}")
        print(f"  {t.format(classify_turns(t, args.k))}")
    return EXIT_OK


def cmd_rwor(args) -> int:
    a, b = _policy(args.policy_a), _policy(args.policy_b)
    sc = SearchConfig(node_budget=args.budget)
    try:
        pts = rwor_curve(args.family, a, b, args.k, range(1, args.n_max + 1), args.method, sc)
    except (ValueError, InfeasibleMultisetError) as e:
        raise UsageError(str(e)) from None
    if args.out == "json":
        print(json.dumps([p.as_dict() for p in pts], indent=2))
    else:
        print("n,a_w,b_w,ratio,slope,exhaustive")
        for p in pts:
            print(",".join(str(x) for x in p.as_row()))
    return EXIT_OK if all(p.exhaustive for p in pts) else EXIT_BUDGET


def cmd_verify(args) -> int:
    ids = args.check or None
    if ids:
        unknown = [i for i in ids if i not in harness.CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s) {', '.join(unknown)}; known: {', '.join(harness.CHECKS)}")
    reports = harness.run_all(args.scale, args.jobs, ids)
    print(harness.summary_table(reports))
    for r in reports:
        if r.status == harness.FAIL:
            print(f"FAIL {r.id}: {json.dumps(r.counterexample, default=str)}")
    if args.csv:
        Path(args.csv).write_text(harness.reports_csv(reports))
    if args.json:
        Path(args.json).write_text(harness.reports_json(reports))
    return harness.exit_code(reports)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rwopaging", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one policy over a request walk")
    s.add_argument("--policy", required=True, type=str.upper, choices=("LRU", "FIFO", "FWF", "LFD"))
    s.add_argument("--tiebreak", default="lowest_id", choices=("lowest_id", "match_lru"))
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--graph", required=True, help="e.g. path:5, cycle:4, chained_cycles:2")
    s.add_argument("--seq", required=True, help="comma-separated pages")
    s.add_argument("--json", action="store_true", help="emit one JSON event per line")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("worst-order", help="exact worst ordering of a multiset")
    w.add_argument("--policy", required=True, type=str.upper, choices=("LRU", "FIFO", "FWF", "LFD"))
    w.add_argument("--tiebreak", default="lowest_id", choices=("lowest_id", "match_lru"))
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--graph", required=True)
    w.add_argument("--multiset", required=True, help="page:count pairs, e.g. 1:4,2:2")
    w.add_argument("--start", type=int)
    w.add_argument("--budget", type=int, default=SearchConfig().node_budget)
    w.add_argument("--jobs", type=int, default=1)
    w.set_defaults(func=cmd_worst_order)

    gnr = sub.add_parser("generate", help="print a family sequence and its graph")
    gnr.add_argument("--family", required=True, choices=FAMILY_KINDS)
    gnr.add_argument("--k", type=int, default=0)
    gnr.add_argument("--n", type=int, default=1)
    gnr.set_defaults(func=cmd_generate)

    nm = sub.add_parser("normalize", help="run the cycle reduction pipeline")
    nm.add_argument("--graph", required=True, help="cycle:N")
    nm.add_argument("--k", type=int, required=True)
    nm.add_argument("--seq", required=True)
    nm.set_defaults(func=cmd_normalize)

    r = sub.add_parser("rwor", help="worst-order ratio data along a family")
    r.add_argument("--family", required=True, choices=FAMILY_KINDS)
    r.add_argument("--policy-a", required=True, type=str.upper)
    r.add_argument("--policy-b", required=True, type=str.upper)
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--n-max", type=int, required=True)
    r.add_argument("--method", choices=("closed", "search"), default="closed")
    r.add_argument("--budget", type=int, default=SearchConfig().node_budget)
    r.add_argument("--out", choices=("csv", "json"), default="csv")
    r.set_defaults(func=cmd_rwor)

    v = sub.add_parser("verify", help="run the claim checks")
    v.add_argument("--check", action="append", help="check id (repeatable); default all")
    v.add_argument("--scale", choices=harness.SCALES, default="default")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--csv", help="write the CSV report here")
    v.add_argument("--json", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
