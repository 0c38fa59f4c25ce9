"""Predicate-to-scheme assignment and cross-scheme fact access."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator

from .schemes.base import Domain, Pattern, Scheme
from .schemes.plain import PlainTable
from .schemes.tc import DEFAULT_SPACING, TcScheme, is_transitive_rule
from .schemes.union import UnionTable, is_copy_rule
from .syntax import Fact, Program, Rule, SymbolTable

log = logging.getLogger(__name__)

_ORDER = {"plain": 0, "tc": 1, "union": 2}


@dataclass
class SchemeConfig:
    enable_tc: bool = True
    enable_union: bool = True
    spacing: int = DEFAULT_SPACING


class SchemeRegistry:
    """Owns the schemes of one reasoning state.

    ``owner`` maps each predicate to the scheme storing its facts;
    ``interested`` maps it to every scheme that must see its new facts.
    """

    def __init__(self, symbols: SymbolTable, schemes: Iterable[Scheme], plain: PlainTable):
        self.symbols = symbols
        self.plain = plain
        self.schemes: list[Scheme] = sorted(schemes, key=lambda s: _ORDER.get(s.kind, 3))
        self.owner: dict[int, Scheme] = {}
        self.interested: dict[int, list[Scheme]] = {}
        for s in self.schemes:
            s.registry = self
            for p in s.owned:
                if p in self.owner:
                    raise ValueError(f"predicate {symbols.predicates[p]} owned twice")
                self.owner[p] = s
        self._rebuild_interest()

    def _rebuild_interest(self) -> None:
        self.interested = {}
        for s in self.schemes:
            for p in s.owned | s.body_preds:
                self.interested.setdefault(p, []).append(s)

    def arity(self, pred: int) -> int | None:
        return self.symbols.arities.get(pred)

    def adopt(self, pred: int) -> Scheme:
        """Give an unseen predicate to the plain table."""
        s = self.owner.get(pred)
        if s is None:
            self.plain.owned.add(pred)
            self.owner[pred] = self.plain
            self.interested.setdefault(pred, []).insert(0, self.plain)
            s = self.plain
        return s

    def contains(self, fact: Fact, domain: Domain = Domain.ALL) -> bool:
        s = self.owner.get(fact[0])
        return s is not None and s.contains(fact, domain)

    def scan(self, pred: int, pattern: Pattern, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        s = self.owner.get(pred)
        if s is None:
            return iter(())
        return s.scan(pred, tuple(pattern), domain)

    def schedule(self, fact: Fact, source: Scheme | None = None) -> None:
        targets = self.interested.get(fact[0])
        if targets is None:
            self.adopt(fact[0])
            targets = self.interested[fact[0]]
        for s in targets:
            if s is source and s.skip_own_delta:
                continue
            s.schedule(fact)

    def listeners(self, scheme: Scheme) -> bool:
        """True if anyone must be offered ``scheme``'s delta facts."""
        for p in scheme.owned:
            for s in self.interested.get(p, ()):
                if s is not scheme or not s.skip_own_delta:
                    return True
        return False

    def stats(self) -> list[dict]:
        return [s.stats() for s in self.schemes]

    def by_name(self, name: str) -> Scheme:
        for s in self.schemes:
            if s.name == name:
                return s
        raise KeyError(name)

    def tc_schemes(self) -> list[TcScheme]:
        return [s for s in self.schemes if isinstance(s, TcScheme)]

    def union_schemes(self) -> list[UnionTable]:
        return [s for s in self.schemes if isinstance(s, UnionTable)]


def _copy_cycle_preds(rules: list[Rule]) -> set[int]:
    """Predicates on a cycle of the copy-rule graph p → U."""
    graph: dict[int, set[int]] = {}
    for r in rules:
        if is_copy_rule(r):
            graph.setdefault(r.body[0].pred, set()).add(r.head.pred)
    on_cycle = set()
    for start in graph:
        stack, seen = list(graph[start]), set()
        while stack:
            x = stack.pop()
            if x == start:
                on_cycle.add(start)
                break
            if x in seen:
                continue
            seen.add(x)
            stack.extend(graph.get(x, ()))
    return on_cycle


def assign_schemes(program: Program, config: SchemeConfig | None = None, **flags) -> SchemeRegistry:
    """Partition predicates and rules into a plain table, TC and union schemes."""
    config = config or SchemeConfig(**flags)
    sym = program.symbols
    by_head: dict[int, list[Rule]] = {}
    for r in program.rules:
        by_head.setdefault(r.head.pred, []).append(r)

    schemes: list[Scheme] = []
    taken: set[int] = set()
    if config.enable_tc:
        for pred, rules in by_head.items():
            if any(is_transitive_rule(r) for r in rules):
                name = f"tc:{sym.predicates[pred]}"
                schemes.append(TcScheme(name, pred, rules, spacing=config.spacing))
                taken.add(pred)
    if config.enable_union:
        cyclic = _copy_cycle_preds(program.rules)
        for pred, rules in by_head.items():
            if pred in taken:
                continue
            if not all(is_copy_rule(r) for r in rules):
                continue
            if pred in cyclic:
                log.info("predicate %s is on a copy-rule cycle; using the plain table", sym.predicates[pred])
                continue
            schemes.append(UnionTable(f"union:{sym.predicates[pred]}", pred, rules))
            taken.add(pred)

    plain_preds = [p for p in range(len(sym.predicates)) if p not in taken]
    plain_rules = [r for r in program.rules if r.head.pred not in taken]
    plain = PlainTable("plain", plain_preds, plain_rules)
    return SchemeRegistry(sym, [plain, *schemes], plain)
