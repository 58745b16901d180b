"""Command-line interface.

Exit status: 0 reachable (or success), 1 unreachable, 2 error.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import bench
from .compose import tensor
from .convert import TimedAutomaton, one_dta_to_ta, ta_to_1dta, ta_zone_reach
from .errors import HdtaError, ModelError
from .model import HdtaModel
from .modelfile import dump, load, serialize
from .regions import region_graph, region_reach
from .regions import write_dot as write_region_dot
from .semantics import bounded_search
from .zonegraph import RULES, zone_graph, zone_reach
from .zonegraph import write_dot as write_zone_dot

OK, UNREACHABLE, ERROR = 0, 1, 2
REGION_BOUND = 16


def _hdta(path) -> HdtaModel:
    m = load(path)
    return ta_to_1dta(m) if isinstance(m, TimedAutomaton) else m


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")


def cmd_validate(args):
    m = load(args.model)
    if isinstance(m, TimedAutomaton):
        print(f"ok: timed automaton, {len(m.locations)} locations, {len(m.edges)} edges, "
              f"clocks {' '.join(m.clocks) or '-'}")
    else:
        counts = ", ".join(f"{n}:{k}" for n, k in m.count_by_dim().items())
        print(f"ok: HDTA of dimension {m.dim}, cubes by dimension {{{counts}}}, "
              f"clocks {' '.join(m.clocks) or '-'}")
    return OK


def cmd_reach(args):
    m = load(args.model)
    t = time.perf_counter()
    if args.engine == "zone" and isinstance(m, TimedAutomaton) and args.rule == "sound":
        res = ta_zone_reach(m)
    else:
        model = ta_to_1dta(m) if isinstance(m, TimedAutomaton) else m
        if args.engine == "zone":
            trace = open(args.trace, "w", encoding="utf-8") if args.trace else None
            try:
                res = zone_reach(model, rule=args.rule, subsumption=not args.no_subsumption,
                                 trace=trace)
            finally:
                if trace:
                    trace.close()
        elif args.engine == "region":
            if model.cmax > args.region_bound:
                raise HdtaError(f"largest constant {model.cmax} exceeds the region engine "
                                f"bound {args.region_bound}; use --engine zone")
            res = region_reach(model)
        else:
            res = bounded_search(model, depth=args.depth)
    elapsed = time.perf_counter() - t
    if res.reachable:
        print("reachable")
    elif args.engine == "concrete":
        print(f"no accepting state within {args.depth} steps")
    else:
        print("unreachable")
    if res.witness is not None and not args.quiet:
        print("witness:")
        for st in res.witness:
            print(f"  {st}")
    s = res.stats
    print(f"explored {s.explored}, subsumed {s.subsumed}, peak waiting {s.peak_waiting}, "
          f"{elapsed:.3f}s")
    return OK if res.reachable else UNREACHABLE


def cmd_zonegraph(args):
    g = zone_graph(_hdta(args.model), rule=args.rule)
    out = _open_out(args.dot)
    try:
        write_zone_dot(g, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.dot not in (None, "-"):
        print(f"{len(g.nodes)} nodes, {len(g.edges)} edges")
    return OK


def cmd_regiongraph(args):
    model = _hdta(args.model)
    if model.cmax > args.region_bound:
        raise HdtaError(f"largest constant {model.cmax} exceeds the region engine "
                        f"bound {args.region_bound}")
    nodes, edges = region_graph(model)
    out = _open_out(args.dot)
    try:
        write_region_dot(model, nodes, edges, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.dot not in (None, "-"):
        print(f"{len(nodes)} nodes, {len(edges)} edges")
    return OK


def cmd_product(args):
    a, b = _hdta(args.left), _hdta(args.right)
    p = tensor(a, b, rename=args.rename)
    dump(p, args.output)
    print(f"wrote {args.output}: {len(p.space)} cubes, dimension {p.dim}")
    return OK


def cmd_convert(args):
    m = load(args.model)
    if args.direction == "ta-to-hdta":
        if not isinstance(m, TimedAutomaton):
            raise HdtaError(f"{args.model} is not a timed automaton file")
        out = ta_to_1dta(m)
    else:
        if isinstance(m, TimedAutomaton):
            raise HdtaError(f"{args.model} is not an HDTA file")
        out = one_dta_to_ta(m)
    if args.output in (None, "-"):
        sys.stdout.write(serialize(out))
    else:
        dump(out, args.output)
    return OK


def cmd_bench(args):
    if args.table:
        rows = bench.growth_table(range(1, args.n + 1), args.d, args.D, budget=args.budget)
        print(f"{'N':>3} {'hdta':>9} {'interleaved':>12} {'ratio':>7} {'seconds':>8}")
        for n, h, i, r, secs in rows:
            print(f"{n:>3} {h:>9} {i:>12} {r:>7.3f} {secs:>8.2f}")
        return OK
    hdta, inter = bench.gen_milner(bench.BenchSpec(args.n, args.d, args.D))
    model = inter if args.interleaved else hdta
    states, secs = bench.measure(model)
    kind = "interleaved" if args.interleaved else "hdta"
    print(f"{kind} N={args.n} d={args.d} D={args.D}: {len(model.space)} cubes, "
          f"{states} zone-graph states, {secs:.2f}s")
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hdta", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="parse and validate a model file")
    s.add_argument("model")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("reach", help="decide reachability of an accepting state")
    s.add_argument("model")
    s.add_argument("--engine", choices=["zone", "region", "concrete"], default="zone")
    s.add_argument("--rule", choices=RULES, default="sound",
                   help="zone successor rule (default: sound)")
    s.add_argument("--trace", metavar="OUT.jsonl", help="write explored states as JSON lines")
    s.add_argument("--no-subsumption", action="store_true")
    s.add_argument("--region-bound", type=int, default=REGION_BOUND,
                   help="largest constant the region engine accepts")
    s.add_argument("--depth", type=int, default=12, help="depth of the concrete search")
    s.add_argument("-q", "--quiet", action="store_true", help="omit the witness")
    s.set_defaults(func=cmd_reach)

    s = sub.add_parser("zonegraph", help="full zone graph as DOT")
    s.add_argument("model")
    s.add_argument("--dot", metavar="OUT.dot")
    s.add_argument("--rule", choices=RULES, default="sound")
    s.set_defaults(func=cmd_zonegraph)

    s = sub.add_parser("regiongraph", help="reachable region graph as DOT")
    s.add_argument("model")
    s.add_argument("--dot", metavar="OUT.dot")
    s.add_argument("--region-bound", type=int, default=REGION_BOUND)
    s.set_defaults(func=cmd_regiongraph)

    s = sub.add_parser("product", help="tensor product of two models")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--rename", action="store_true",
                   help="prefix clocks with l. and r. instead of failing on a clash")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("convert", help="convert between timed automata and 1-dimensional HDTA")
    s.add_argument("direction", choices=["ta-to-hdta", "hdta-to-ta"])
    s.add_argument("model")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("bench", help="benchmark families")
    s.add_argument("family", choices=["milner"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, default=4)
    s.add_argument("--D", type=int, default=30)
    s.add_argument("--interleaved", action="store_true")
    s.add_argument("--table", action="store_true", help="growth table for N = 1..n")
    s.add_argument("--budget", type=float, default=60.0,
                   help="stop the table once this many seconds have passed")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelError as e:
        for err in e.errors:
            print(f"error: {err}", file=sys.stderr)
        return ERROR
    except (HdtaError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
