"""Multi-scheme seminaive reasoning loop and the naive fixpoint oracle."""
from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .registry import SchemeConfig, SchemeRegistry, assign_schemes
from .schemes.base import Domain, InvariantError
from .syntax import DatalogError, Fact, Program, Rule, match_atom

NAIVE_LIMIT = 10**6


class OracleOverflowError(DatalogError):
    """The naive oracle was asked to build more facts than its guard allows."""


@dataclass
class RoundStats:
    round: int
    delta_total: int
    per_scheme: dict[str, int]
    seconds: float


@dataclass
class RunRecord:
    facts_in: int
    rounds: list[RoundStats] = field(default_factory=list)
    seconds: float = 0.0


class Reasoner:
    """Materialisation state over a program.

    >>> from msdl.syntax import parse_program, parse_facts
    >>> prog = parse_program("R(?x,?z) :- R(?x,?y), R(?y,?z).")
    >>> r = Reasoner(prog)
    >>> _ = r.materialise(parse_facts("R(a,b). R(b,c).", prog.symbols))
    >>> r.count()
    3
    """

    def __init__(
        self,
        program: Program,
        config: SchemeConfig | None = None,
        verbose: bool = False,
        trace: IO[str] | None = None,
        max_rounds: int | None = None,
    ):
        self.program = program
        self.config = config or SchemeConfig()
        self.registry: SchemeRegistry = assign_schemes(program, self.config)
        self.round = 0
        self.runs: list[RunRecord] = []
        self.verbose = verbose
        self.trace = trace
        self.max_rounds = max_rounds

    @property
    def symbols(self):
        return self.program.symbols

    def _round_bound(self) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        sym = self.symbols
        arity = max(sym.arities.values(), default=1)
        return max(len(sym.constants), 1) ** arity * max(len(sym.predicates), 1) + 2

    def materialise(self, facts: Iterable[Fact]) -> "Reasoner":
        return self.add_facts(facts)

    def add_facts(self, facts: Iterable[Fact]) -> "Reasoner":
        reg = self.registry
        start = time.perf_counter()
        fresh = []
        seen = set()
        for f in facts:
            arity = self.symbols.arities.get(f[0])
            if arity is not None and arity != len(f) - 1:
                raise DatalogError(f"fact {self.symbols.format_fact(f)} has wrong arity")
            if f not in seen and not reg.contains(f, Domain.ALL):
                seen.add(f)
                fresh.append(f)
        run = RunRecord(facts_in=len(fresh))
        for f in fresh:
            reg.schedule(f)
        bound = self._round_bound()
        while True:
            t0 = time.perf_counter()
            for s in reg.schemes:
                s.derive()
            active = [s for s in reg.schemes if s.has_delta()]
            if not active:
                break
            self.round += 1
            if len(run.rounds) >= bound:
                raise InvariantError(f"no fixpoint after {bound} rounds")
            per_scheme = {}
            # every scheme's delta is offered before any scheme merges
            for s in active:
                if reg.listeners(s):
                    for f in s.new_delta():
                        reg.schedule(f, source=s)
                n = s.count(Domain.DELTA)
                per_scheme[s.name] = n
            for s in reg.schemes:
                s.merge()
            rs = RoundStats(self.round, sum(per_scheme.values()), per_scheme, time.perf_counter() - t0)
            run.rounds.append(rs)
            if self.verbose:
                parts = ",".join(f"{k}:{v}" for k, v in per_scheme.items())
                print(f"round={rs.round} delta_total={rs.delta_total} per_scheme={parts}", file=self.trace or sys.stderr)
        # schemes without a round still hold an empty derive; make it final
        for s in reg.schemes:
            s.merge()
        run.seconds = time.perf_counter() - start
        self.runs.append(run)
        return self

    def facts(self, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        for s in self.registry.schemes:
            yield from s.scan_all(domain)

    def fact_set(self) -> set[Fact]:
        return set(self.facts())

    def count(self, domain: Domain = Domain.ALL) -> int:
        return sum(s.count(domain) for s in self.registry.schemes)

    def contains(self, fact: Fact) -> bool:
        return self.registry.contains(fact, Domain.ALL)


def materialise(program: Program, facts: Iterable[Fact], config: SchemeConfig | None = None, **kw) -> Reasoner:
    return Reasoner(program, config, **kw).materialise(facts)


def _rule_matches(rule: Rule, index: dict, by_pred: dict) -> Iterator[dict]:
    body = rule.body

    def extend(k: int, subst: dict) -> Iterator[dict]:
        if k == len(body):
            yield subst
            return
        atom = body[k]
        cands = None
        for pos, t in enumerate(atom.args):
            val = subst.get(t.sym) if t.var else t.sym
            if val is not None:
                cands = index.get((atom.pred, pos, val), ())
                break
        if cands is None:
            cands = by_pred.get(atom.pred, ())
        for f in cands:
            s2 = match_atom(atom, f, subst)
            if s2 is not None:
                yield from extend(k + 1, s2)

    yield from extend(0, {})


def naive_materialise(program: Program, facts: Iterable[Fact], limit: int = NAIVE_LIMIT) -> set[Fact]:
    """Apply every rule to everything until nothing new appears."""
    I: set[Fact] = set()
    index: dict[tuple, list[Fact]] = {}
    by_pred: dict[int, list[Fact]] = {}

    def add(f: Fact) -> None:
        I.add(f)
        by_pred.setdefault(f[0], []).append(f)
        for pos, c in enumerate(f[1:]):
            index.setdefault((f[0], pos, c), []).append(f)

    for f in facts:
        if f not in I:
            add(f)
    while True:
        new = set()
        for rule in program.rules:
            h = rule.head
            for subst in _rule_matches(rule, index, by_pred):
                fact = (h.pred, *((subst[t.sym] if t.var else t.sym) for t in h.args))
                if fact not in I:
                    new.add(fact)
        if not new:
            return I
        if len(I) + len(new) > limit:
            raise OracleOverflowError(f"naive oracle exceeded {limit} facts")
        for f in new:
            add(f)
