from __future__ import annotations

from array import array
from collections import Counter
from typing import Callable, Iterable, Iterator

from ..joins import FactCache, apply_rule
from ..syntax import Fact, Rule
from .base import Domain, Label, Pattern, Scheme, matches

_OLD, _DELTA, _NEW = int(Label.OLD), int(Label.DELTA), int(Label.DELTA_NEW)


def _visible(label: int, domain: Domain) -> bool:
    if label == _OLD:
        return bool(domain & Domain.I)
    if label == _DELTA:
        return bool(domain & Domain.DELTA)
    return False


class LabelledFactStore:
    """Append-only fact list with a label and round stamp per fact.

    Lookup indexes on ``(predicate, argument position)`` are built on first
    use and maintained on every later append.
    """

    def __init__(self):
        self.facts: list[Fact] = []
        self.labels = bytearray()
        self.rounds = array("I")
        self.pos: dict[Fact, int] = {}
        self.by_pred: dict[int, list[int]] = {}
        self._index: dict[tuple[int, int], dict[int, list[int]]] = {}

    def __len__(self) -> int:
        return len(self.facts)

    def add(self, fact: Fact, label: int, round_: int) -> int | None:
        """Append ``fact``; None if it is already stored (under any label)."""
        if fact in self.pos:
            return None
        p = len(self.facts)
        self.facts.append(fact)
        self.labels.append(label)
        self.rounds.append(round_)
        self.pos[fact] = p
        pred = fact[0]
        lst = self.by_pred.get(pred)
        if lst is None:
            self.by_pred[pred] = [p]
        else:
            lst.append(p)
        for (ipred, argpos), idx in self._index.items():
            if ipred == pred:
                idx.setdefault(fact[argpos + 1], []).append(p)
        return p

    def label_of(self, fact: Fact) -> int | None:
        p = self.pos.get(fact)
        return None if p is None else self.labels[p]

    def _positions(self, pred: int, pattern: Pattern) -> list[int]:
        for argpos, val in enumerate(pattern):
            if val is not None:
                key = (pred, argpos)
                idx = self._index.get(key)
                if idx is None:
                    idx = self._index[key] = {}
                    for p in self.by_pred.get(pred, ()):
                        idx.setdefault(self.facts[p][argpos + 1], []).append(p)
                return idx.get(val, [])
        return self.by_pred.get(pred, [])

    def scan(self, pred: int, pattern: Pattern, domain: Domain) -> Iterator[Fact]:
        positions = self._positions(pred, pattern)
        n = len(positions)  # later appends are not part of this scan
        facts, labels = self.facts, self.labels
        want_old = bool(domain & Domain.I)
        want_delta = bool(domain & Domain.DELTA)
        full = all(v is None for v in pattern)
        for k in range(n):
            p = positions[k]
            lab = labels[p]
            if (lab == _OLD and want_old) or (lab == _DELTA and want_delta):
                f = facts[p]
                if full or matches(f, pattern):
                    yield f

    def label_counts(self) -> dict[str, int]:
        c = Counter(self.labels)
        return {Label(k).name: v for k, v in sorted(c.items())}


class PlainTable(Scheme):
    """Faithful storage: every fact is stored explicitly with its label."""

    kind = "plain"

    def __init__(self, name: str = "plain", owned: Iterable[int] = (), rules: Iterable[Rule] = ()):
        super().__init__(name, owned, rules)
        self.store = LabelledFactStore()
        self.cache = FactCache()
        self._pending: list[int] = []
        self._delta: list[int] = []
        self._scheduled = 0  # leading entries of _delta that came from schedule
        self.round = 0
        self.instance_hook: Callable[[Rule, int, dict], None] | None = None

    def schedule(self, fact: Fact) -> None:
        pred = fact[0]
        if pred in self.owned:
            p = self.store.add(fact, _NEW, 0)
            if p is not None:
                self._pending.append(p)
        if pred in self.body_preds:
            self.cache.add(fact)

    def derive(self) -> Iterator[Fact]:
        self.round += 1
        store = self.store
        for p in self._pending:
            store.labels[p] = _DELTA
            store.rounds[p] = self.round
        self._delta = self._pending
        self._scheduled = len(self._pending)
        self._pending = []
        if self.cache:
            for rule in self.rules:
                hook = None
                if self.instance_hook is not None:
                    hook = lambda pivot, subst, r=rule: self.instance_hook(r, pivot, subst)
                heads = list(apply_rule(rule, self.cache, self.registry, hook))
                for h in heads:
                    p = store.add(h, _DELTA, self.round)
                    if p is not None:
                        self._delta.append(p)
        self.cache.clear()
        return self.delta()

    def delta(self) -> Iterator[Fact]:
        facts = self.store.facts
        return (facts[p] for p in self._delta)

    def new_delta(self) -> Iterator[Fact]:
        facts = self.store.facts
        return (facts[p] for p in self._delta[self._scheduled:])

    def has_delta(self) -> bool:
        return bool(self._delta)

    def merge(self) -> None:
        labels = self.store.labels
        for p in self._delta:
            labels[p] = _OLD
        self._delta = []
        self._scheduled = 0

    def contains(self, fact: Fact, domain: Domain = Domain.ALL) -> bool:
        lab = self.store.label_of(fact)
        return lab is not None and _visible(lab, domain)

    def scan(self, pred: int, pattern: Pattern, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        return self.store.scan(pred, pattern, domain)

    def scan_all(self, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        if domain == Domain.DELTA:
            return self.delta()
        labels, facts = self.store.labels, self.store.facts
        return (facts[p] for p in range(len(facts)) if _visible(labels[p], domain))

    def count(self, domain: Domain = Domain.ALL) -> int:
        if domain == Domain.DELTA:
            return len(self._delta)
        n = len(self.store) - len(self._pending)
        return n - len(self._delta) if domain == Domain.I else n

    def stats(self) -> dict:
        per_pred = {}
        for pred, positions in self.store.by_pred.items():
            per_pred[pred] = len(positions)
        return {
            "kind": self.kind,
            "name": self.name,
            "facts": len(self.store),
            "labels": self.store.label_counts(),
            "per_predicate": per_pred,
        }
