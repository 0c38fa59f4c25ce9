"""Seminaive rule application shared by the schemes that evaluate generic rules.

For a rule ``B0 ∧ … ∧ Bn → H`` and a cache C of facts that became new in the
previous round, every instance with at least one body atom in C is produced
by picking a pivot ``i``: ``Bi`` is matched in C, atoms before the pivot in
``I \\ C`` and atoms after it in ``I ∪ C``. Each instance is therefore
generated for exactly one pivot.
"""
from __future__ import annotations

from collections import defaultdict
from typing import TYPE_CHECKING, Callable, Iterator

from .schemes.base import Domain
from .syntax import Atom, Fact, Rule

if TYPE_CHECKING:
    from .registry import SchemeRegistry

_OLD_ONLY = 0
_OLD_OR_CACHE = 1


class FactCache:
    """A scheme's C_T: facts scheduled for use as rule-body matches."""

    def __init__(self):
        self.facts: set[Fact] = set()
        self._by_pred: dict[int, list[Fact]] = defaultdict(list)
        self._index: dict[tuple[int, int], dict[int, list[Fact]]] = {}

    def add(self, fact: Fact) -> None:
        if fact in self.facts:
            return
        self.facts.add(fact)
        self._by_pred[fact[0]].append(fact)
        for (pred, pos), idx in self._index.items():
            if pred == fact[0]:
                idx.setdefault(fact[pos + 1], []).append(fact)

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact: Fact) -> bool:
        return fact in self.facts

    def has_pred(self, pred: int) -> bool:
        return bool(self._by_pred.get(pred))

    def clear(self) -> None:
        self.facts = set()
        self._by_pred = defaultdict(list)
        self._index = {}

    def scan(self, pred: int, pattern) -> list[Fact]:
        for pos, val in enumerate(pattern):
            if val is not None:
                key = (pred, pos)
                idx = self._index.get(key)
                if idx is None:
                    idx = self._index[key] = {}
                    for f in self._by_pred.get(pred, ()):
                        idx.setdefault(f[pos + 1], []).append(f)
                cands = idx.get(val, ())
                break
        else:
            return list(self._by_pred.get(pred, ()))
        return [f for f in cands if all(p is None or f[k + 1] == p for k, p in enumerate(pattern))]


def _compile(atom: Atom):
    """(pred, ((is_var, sym), ...))."""
    return atom.pred, tuple((t.var, t.sym) for t in atom.args)


def _pattern(args, subst) -> tuple:
    return tuple((subst.get(s) if v else s) for v, s in args)


def _bind(args, fact: Fact, subst: dict) -> dict | None:
    out = subst
    copied = False
    for (v, s), c in zip(args, fact[1:]):
        if not v:
            if s != c:
                return None
            continue
        b = out.get(s)
        if b is None:
            if not copied:
                out = dict(out)
                copied = True
            out[s] = c
        elif b != c:
            return None
    return out if copied else dict(out)


def _plan(rule: Rule, pivot: int) -> list[int]:
    """Greedy join order after the pivot: most bound variables first."""
    bound = set(rule.body[pivot].variables())
    rest = [j for j in range(len(rule.body)) if j != pivot]
    order = []
    while rest:
        best = max(rest, key=lambda j: (sum(1 for t in rule.body[j].args if not t.var or t.sym in bound), -j))
        order.append(best)
        rest.remove(best)
        bound.update(rule.body[best].variables())
    return order


def apply_rule(
    rule: Rule,
    cache: FactCache,
    registry: "SchemeRegistry",
    on_instance: Callable[[int, dict], None] | None = None,
) -> Iterator[Fact]:
    """Yield head facts of instances of ``rule`` with a body atom in ``cache``.

    Heads may repeat (distinct instances can share a head); callers dedup.
    """
    body = [_compile(a) for a in rule.body]
    head_pred, head_args = _compile(rule.head)

    def lookup(j: int, subst: dict, mode: int) -> Iterator[Fact]:
        pred, args = body[j]
        pat = _pattern(args, subst)
        if mode == _OLD_ONLY:
            for f in registry.scan(pred, pat, Domain.I):
                if f not in cache.facts:
                    yield f
        else:
            yield from registry.scan(pred, pat, Domain.I)
            for f in cache.scan(pred, pat):
                if not registry.contains(f, Domain.I):
                    yield f

    for pivot in range(len(body)):
        ppred, pargs = body[pivot]
        if not cache.has_pred(ppred):
            continue
        order = _plan(rule, pivot)
        modes = [_OLD_ONLY if j < pivot else _OLD_OR_CACHE for j in order]

        def extend(level: int, subst: dict) -> Iterator[dict]:
            if level == len(order):
                yield subst
                return
            j = order[level]
            for f in lookup(j, subst, modes[level]):
                s2 = _bind(body[j][1], f, subst)
                if s2 is not None:
                    yield from extend(level + 1, s2)

        for f in cache.scan(ppred, _pattern(pargs, {})):
            s0 = _bind(pargs, f, {})
            if s0 is None:
                continue
            for subst in extend(0, s0):
                if on_instance is not None:
                    on_instance(pivot, subst)
                yield (head_pred, *((subst[s] if v else s) for v, s in head_args))
