"""Command-line interface: ``msdl materialise|add|query|gen|stats``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import generators, snapshot
from .engine import Reasoner
from .query import Query, QueryError, evaluate
from .registry import SchemeConfig
from .schemes.base import Domain, InvariantError
from .stats import RunStats, measure
from .syntax import DatalogError, SymbolTable, parse_facts, parse_program

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2

_DOMAINS = {"i": Domain.I, "delta": Domain.DELTA, "all": Domain.ALL}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_facts(path: str, symbols: SymbolTable) -> list[tuple]:
    p = Path(path)
    text = sys.stdin.read() if path == "-" else p.read_text()
    return parse_facts(text, symbols, tsv=p.suffix == ".tsv")


def _write_stats(reasoner: Reasoner, seconds: float, peak: int, out: str | None, as_csv: bool = False) -> RunStats:
    st = RunStats.collect(reasoner, seconds, peak)
    if out:
        text = st.csv() if out.endswith(".csv") or as_csv else "\n".join(st.lines()) + "\n"
        Path(out).write_text(text)
    return st


def cmd_materialise(args) -> int:
    program = parse_program(Path(args.rules).read_text())
    if args.mode == "standard":
        args.tc = args.union = False
    config = SchemeConfig(enable_tc=args.tc, enable_union=args.union, spacing=args.spacing)
    reasoner = Reasoner(program, config, verbose=args.verbose)
    facts = []
    for path in args.facts:
        facts.extend(read_facts(path, program.symbols))
    _, seconds, peak = measure(lambda: reasoner.materialise(facts))
    st = _write_stats(reasoner, seconds, peak, args.stats_out)
    if args.state:
        snapshot.save(reasoner, args.state)
    schemes = ",".join(f"{s.name}" for s in reasoner.registry.schemes)
    print(f"facts={st.facts} rounds={st.rounds} time={seconds:.6f} schemes={schemes}")
    return EXIT_OK


def cmd_add(args) -> int:
    reasoner = snapshot.load(args.state)
    reasoner.verbose = args.verbose
    facts = []
    for path in args.facts:
        facts.extend(read_facts(path, reasoner.symbols))
    before = reasoner.count()
    _, seconds, peak = measure(lambda: reasoner.add_facts(facts))
    st = _write_stats(reasoner, seconds, peak, args.stats_out)
    snapshot.save(reasoner, args.out or args.state)
    print(f"facts={st.facts} added={st.facts - before} rounds={len(reasoner.runs[-1].rounds)} time={seconds:.6f}")
    return EXIT_OK


def cmd_query(args) -> int:
    reasoner = snapshot.load(args.state)
    domain = _DOMAINS[args.domain]
    for text in args.q:
        q = Query.parse(text, reasoner.symbols)
        res = evaluate(q, reasoner.registry, domain, limit=None if args.count else args.limit)
        fmt = reasoner.symbols.format_constant
        if not q.projection:
            print(f"{'true' if res.cardinality else 'false'} time={res.seconds:.6f}")
            continue
        if not args.count:
            names = [reasoner.symbols.variables[v] for v in q.projection]
            for row in res.answers:
                print("\t".join(f"?{n}={fmt(c)}" for n, c in zip(names, row)))
        print(f"cardinality={res.cardinality} time={res.seconds:.6f}")
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.shape == "chain":
        edges = generators.chain_edges(args.n)
    elif args.shape == "dag":
        edges = generators.dag_edges(args.nodes, args.edges, args.seed)
    else:
        edges = generators.layered_edges(args.layers, args.width, p_back=args.p_back, seed=args.seed)
    tsv = args.tsv or (args.output or "").endswith(".tsv")
    text = generators.to_tsv(edges, args.pred) if tsv else generators.to_fact_text(edges, args.pred)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    reasoner = snapshot.load(args.state)
    run_seconds = sum(r.seconds for r in reasoner.runs)
    st = RunStats.collect(reasoner, run_seconds, 0)
    if args.csv:
        sys.stdout.write(st.csv())
    else:
        print("\n".join(st.lines()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="msdl", description="Datalog materialisation with compressed storage schemes.")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("materialise", aliases=["materialize"], help="materialise a program over facts")
    m.add_argument("--rules", required=True)
    m.add_argument("--facts", required=True, action="append", help="fact file (.tsv for tab-separated); repeatable")
    m.add_argument("--mode", choices=["standard", "multischeme"], default="multischeme")
    m.add_argument("--enable-tc-scheme", dest="tc", action=argparse.BooleanOptionalAction, default=True)
    m.add_argument("--enable-union-scheme", dest="union", action=argparse.BooleanOptionalAction, default=True)
    m.add_argument("--disable-tc", dest="tc", action="store_false")
    m.add_argument("--disable-union", dest="union", action="store_false")
    m.add_argument("--spacing", type=int, default=16)
    m.add_argument("--state", help="write a snapshot here")
    m.add_argument("--stats-out")
    m.add_argument("-v", "--verbose", action="store_true", help="per-round trace on stderr")
    m.set_defaults(func=cmd_materialise)

    a = sub.add_parser("add", help="add facts to a saved state")
    a.add_argument("--state", required=True)
    a.add_argument("--facts", required=True, action="append")
    a.add_argument("--out", help="write the updated snapshot here instead of in place")
    a.add_argument("--stats-out")
    a.add_argument("-v", "--verbose", action="store_true")
    a.set_defaults(func=cmd_add)

    q = sub.add_parser("query", help="answer conjunctive queries over a saved state")
    q.add_argument("--state", required=True)
    q.add_argument("--q", required=True, action="append", help='e.g. "R(?x,a)."; repeatable')
    q.add_argument("--domain", choices=sorted(_DOMAINS), default="all")
    q.add_argument("--limit", type=int, default=20, help="answers to print (cardinality is always exact)")
    q.add_argument("--count", action="store_true", help="only print the cardinality")
    q.set_defaults(func=cmd_query)

    g = sub.add_parser("gen", help="generate benchmark facts")
    gs = g.add_subparsers(dest="shape", required=True, parser_class=_Parser)
    gc = gs.add_parser("chain")
    gc.add_argument("n", type=int)
    gd = gs.add_parser("dag")
    gd.add_argument("nodes", type=int)
    gd.add_argument("edges", type=int)
    gd.add_argument("--seed", type=int, default=0)
    gl = gs.add_parser("layered")
    gl.add_argument("layers", type=int)
    gl.add_argument("width", type=int)
    gl.add_argument("--p-back", type=float, default=0.2)
    gl.add_argument("--seed", type=int, default=0)
    for sp in (gc, gd, gl):
        sp.add_argument("--pred", default="R")
        sp.add_argument("--tsv", action="store_true")
        sp.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("stats", help="print statistics of a saved state")
    s.add_argument("--state", required=True)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
        return args.func(args)
    except UsageError as e:
        print(f"msdl: error: {e}", file=sys.stderr)
        return EXIT_USER
    except InvariantError as e:
        print(f"msdl: internal invariant failure: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (DatalogError, QueryError, OSError, ValueError) as e:
        print(f"msdl: error: {e}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
