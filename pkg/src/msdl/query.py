"""Conjunctive queries over a materialised registry."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator

from .registry import SchemeRegistry
from .schemes.base import Domain
from .syntax import Atom, DatalogError, SymbolTable, match_atom, parse_atoms

MAX_ATOMS = 4


class QueryError(DatalogError):
    pass


@dataclass(frozen=True)
class Query:
    atoms: tuple[Atom, ...]
    projection: tuple[int, ...]

    @classmethod
    def parse(cls, text: str, symbols: SymbolTable, projection: list[str] | None = None) -> "Query":
        atoms = tuple(parse_atoms(text, symbols))
        if projection is None:
            proj = []
            for a in atoms:
                for v in a.variables():
                    if v not in proj:
                        proj.append(v)
        else:
            proj = [symbols.variable(name.lstrip("?")) for name in projection]
        q = cls(atoms, tuple(proj))
        q.validate()
        return q

    @property
    def variables(self) -> list[int]:
        out = []
        for a in self.atoms:
            for v in a.variables():
                if v not in out:
                    out.append(v)
        return out

    def validate(self) -> None:
        if not 1 <= len(self.atoms) <= MAX_ATOMS:
            raise QueryError(f"a query has 1 to {MAX_ATOMS} atoms, got {len(self.atoms)}")
        qvars = set(self.variables)
        if not set(self.projection) <= qvars:
            raise QueryError("projection names a variable the query does not use")
        # atoms must be connected through shared variables
        groups = [set(a.variables()) for a in self.atoms]
        reached = groups[0]
        pending = groups[1:]
        changed = True
        while pending and changed:
            changed = False
            for g in list(pending):
                if g & reached:
                    reached |= g
                    pending.remove(g)
                    changed = True
        if pending and any(pending):
            raise QueryError("query atoms are not connected by shared variables")


@dataclass
class QueryResult:
    answers: list[tuple]
    cardinality: int
    seconds: float


def _solutions(query: Query, registry: SchemeRegistry, domain: Domain) -> Iterator[dict]:
    atoms = query.atoms

    def extend(k: int, subst: dict) -> Iterator[dict]:
        if k == len(atoms):
            yield subst
            return
        atom = atoms[k]
        pattern = tuple(subst.get(t.sym) if t.var else t.sym for t in atom.args)
        if all(p is not None for p in pattern):
            if registry.contains((atom.pred, *pattern), domain):
                yield from extend(k + 1, subst)
            return
        for f in registry.scan(atom.pred, pattern, domain):
            s2 = match_atom(atom, f, subst)
            if s2 is not None:
                yield from extend(k + 1, s2)

    yield from extend(0, {})


def answers(query: Query, registry: SchemeRegistry, domain: Domain = Domain.ALL) -> Iterator[tuple]:
    """Yield projected answer tuples, each once."""
    for a in query.atoms:
        if a.pred not in registry.owner:
            raise QueryError(f"unknown predicate {registry.symbols.predicates[a.pred]}")
    proj = query.projection
    # a single atom with distinct variables matches each stored fact at most once
    if len(query.atoms) == 1:
        atom = query.atoms[0]
        args = atom.args
        vars_ = [t.sym for t in args if t.var]
        if len(vars_) == len(set(vars_)) and vars_:
            pattern = tuple(None if t.var else t.sym for t in args)
            where = [vars_.index(v) for v in proj]
            pos = [k + 1 for k, t in enumerate(args) if t.var]
            full = len(proj) == len(vars_)
            seen = None if full else set()
            for f in registry.scan(atom.pred, pattern, domain):
                row = tuple(f[pos[w]] for w in where)
                if seen is not None:
                    if row in seen:
                        continue
                    seen.add(row)
                yield row
            return
    full = set(proj) == set(query.variables)
    seen = None if full else set()
    for s in _solutions(query, registry, domain):
        row = tuple(s[v] for v in proj)
        if seen is not None:
            if row in seen:
                continue
            seen.add(row)
        yield row


def count(query: Query, registry: SchemeRegistry, domain: Domain = Domain.ALL) -> int:
    n = 0
    for _ in answers(query, registry, domain):
        n += 1
    return n


def evaluate(query: Query, registry: SchemeRegistry, domain: Domain = Domain.ALL, limit: int | None = None) -> QueryResult:
    """Answers (up to ``limit`` kept) plus the full cardinality."""
    t0 = time.perf_counter()
    kept: list[tuple] = []
    n = 0
    for row in answers(query, registry, domain):
        if limit is None or n < limit:
            kept.append(row)
        n += 1
    return QueryResult(kept, n, time.perf_counter() - t0)
