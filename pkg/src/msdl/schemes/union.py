"""Virtual storage for a predicate defined only by copy rules ``p(x⃗) → U(x⃗)``.

Only U facts that cannot be recovered from a supporting predicate are
stored. Everything else is a translation of a support's facts, produced on
the fly by the registry.
"""
from __future__ import annotations

from typing import Iterable, Iterator

from ..syntax import Fact, Rule
from .base import Domain, Label, Pattern, Scheme, matches
from .plain import LabelledFactStore

_OLD, _DELTA, _NEW = int(Label.OLD), int(Label.DELTA), int(Label.DELTA_NEW)


def is_copy_rule(rule: Rule) -> bool:
    """Single body atom, distinct variables, identical argument tuples, p ≠ U."""
    if len(rule.body) != 1:
        return False
    head, body = rule.head, rule.body[0]
    if head.pred == body.pred or head.args != body.args:
        return False
    syms = [t.sym for t in head.args]
    return all(t.var for t in head.args) and len(set(syms)) == len(syms)


class UnionTable(Scheme):
    kind = "union"
    skip_own_delta = True

    def __init__(self, name: str, pred: int, rules: Iterable[Rule]):
        rules = list(rules)
        super().__init__(name, [pred], rules)
        self.pred = pred
        # declaration order of supports fixes the dedup order of scans
        self.supports: list[int] = []
        for r in rules:
            p = r.body[0].pred
            if p not in self.supports:
                self.supports.append(p)
        self.store = LabelledFactStore()
        self._pending: set[Fact] = set()
        self._buffer: list[Fact] = []
        self._buffer_set: set[Fact] = set()
        self._delta_pos: list[int] = []
        self.round = 0

    def _as(self, pred: int, fact: Fact) -> Fact:
        return (pred, *fact[1:])

    def _recoverable(self, u: Fact) -> bool:
        reg = self.registry
        return any(reg.contains(self._as(p, u), Domain.I) for p in self.supports)

    def schedule(self, fact: Fact) -> None:
        u = self._as(self.pred, fact)
        # a fact already in this round's delta would otherwise resurface next round
        if u in self._pending or u in self._buffer_set or self.store.label_of(u) is not None:
            return
        if self._recoverable(u):
            return
        if fact[0] == self.pred:
            p = self.store.add(u, _NEW, 0)
            if p is not None:
                self._delta_pos.append(p)
        else:
            self._pending.add(u)

    def derive(self) -> Iterator[Fact]:
        self.round += 1
        store = self.store
        for p in self._delta_pos:
            store.labels[p] = _DELTA
            store.rounds[p] = self.round
        buf = [u for u in self._pending if store.label_of(u) is None]
        buf.sort()
        self._buffer = buf
        self._buffer_set = set(buf)
        self._pending = set()
        return self.delta()

    def delta(self) -> Iterator[Fact]:
        facts = self.store.facts
        for p in self._delta_pos:
            yield facts[p]
        yield from self._buffer

    def new_delta(self) -> Iterator[Fact]:
        return iter(self._buffer)

    def has_delta(self) -> bool:
        return bool(self._delta_pos or self._buffer)

    def merge(self) -> None:
        labels = self.store.labels
        for p in self._delta_pos:
            labels[p] = _OLD
        self._delta_pos = []
        self._buffer = []
        self._buffer_set = set()

    def _in_delta(self, u: Fact) -> bool:
        if u in self._buffer_set:
            return True
        return self.store.label_of(u) == _DELTA

    def _hidden(self, u: Fact) -> bool:
        """Facts that must not show in I: this round's Δ and the pending buffer."""
        return u in self._pending or self._in_delta(u) or self.store.label_of(u) == _NEW

    def contains(self, fact: Fact, domain: Domain = Domain.ALL) -> bool:
        if fact[0] != self.pred:
            return False
        if domain & Domain.DELTA and self._in_delta(fact):
            return True
        if not domain & Domain.I:
            return False
        if self.store.label_of(fact) == _OLD:
            return True
        return not self._hidden(fact) and self._recoverable(fact)

    def scan(self, pred: int, pattern: Pattern, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        if pred != self.pred:
            return
        want_i = bool(domain & Domain.I)
        if domain & Domain.DELTA:
            yield from self.store.scan(pred, pattern, Domain.DELTA)
            for u in self._buffer:
                if matches(u, pattern):
                    yield u
        if not want_i:
            return
        yield from self.store.scan(pred, pattern, Domain.I)
        reg = self.registry
        label_of = self.store.label_of
        for k, p in enumerate(self.supports):
            earlier = self.supports[:k]
            for f in reg.scan(p, pattern, Domain.I):
                u = (pred, *f[1:])
                if label_of(u) is not None or self._hidden(u):
                    continue
                if any(reg.contains((q, *f[1:]), Domain.I) for q in earlier):
                    continue
                yield u

    def count(self, domain: Domain = Domain.ALL) -> int:
        if domain == Domain.DELTA:
            return len(self._delta_pos) + len(self._buffer)
        arity = self.registry.arity(self.pred)
        return sum(1 for _ in self.scan(self.pred, (None,) * arity, domain))

    def stats(self) -> dict:
        reg = self.registry
        virtual = 0
        for p in self.supports:
            owner = reg.owner.get(p) if reg else None
            if owner is not None:
                arity = reg.arity(p)
                virtual += sum(1 for _ in reg.scan(p, (None,) * arity, Domain.I))
        return {
            "kind": self.kind,
            "name": self.name,
            "explicit_facts": len(self.store),
            "labels": self.store.label_counts(),
            "virtual_facts_upper_bound": virtual,
            "supports": list(self.supports),
        }
