from __future__ import annotations

import enum
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from ..syntax import Fact, Rule

if TYPE_CHECKING:
    from ..registry import SchemeRegistry

# A scan pattern: one entry per argument, a constant id or None for "unbound".
Pattern = Sequence["int | None"]


class Domain(enum.IntFlag):
    """Which slice of a scheme's facts an access observes."""

    I = 1
    DELTA = 2
    ALL = 3


class Label(enum.IntEnum):
    OLD = 0  # domain I
    DELTA = 1
    DELTA_NEW = 2  # scheduled, not yet derived-through


class InvariantError(RuntimeError):
    """Internal consistency check failed; indicates a bug, not bad input."""


def matches(fact: Fact, pattern: Pattern) -> bool:
    for c, p in zip(fact[1:], pattern):
        if p is not None and c != p:
            return False
    return True


class Scheme:
    """Storage scheme contract.

    A scheme owns the facts of the predicates in ``owned`` and evaluates
    ``rules`` (whose heads are owned). ``body_preds`` are the predicates the
    scheme wants to see through :meth:`schedule`.
    """

    kind = "abstract"
    # When True the engine does not offer a scheme its own delta facts.
    skip_own_delta = False

    def __init__(self, name: str, owned: Iterable[int], rules: Iterable[Rule] = ()):
        self.name = name
        self.owned: set[int] = set(owned)
        self.rules: list[Rule] = list(rules)
        self.body_preds: set[int] = {a.pred for r in self.rules for a in r.body}
        self.registry: SchemeRegistry | None = None

    def wants(self, pred: int) -> bool:
        return pred in self.owned or pred in self.body_preds

    def schedule(self, fact: Fact) -> None:
        raise NotImplementedError

    def derive(self) -> Iterator[Fact]:
        """Apply the scheme's rules, fold pending facts into delta, return delta."""
        raise NotImplementedError

    def delta(self) -> Iterator[Fact]:
        return self.scan_all(Domain.DELTA)

    def new_delta(self) -> Iterator[Fact]:
        """Δ^T minus the facts that entered through schedule (Δ_n^T).

        Those were offered to every interested scheme when scheduled, so the
        engine does not offer them a second time.
        """
        return self.delta()

    def has_delta(self) -> bool:
        raise NotImplementedError

    def merge(self) -> None:
        raise NotImplementedError

    def contains(self, fact: Fact, domain: Domain = Domain.ALL) -> bool:
        raise NotImplementedError

    def scan(self, pred: int, pattern: Pattern, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        raise NotImplementedError

    def scan_all(self, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        for pred in sorted(self.owned):
            arity = self.registry.arity(pred) if self.registry else None
            if arity is None:
                continue
            yield from self.scan(pred, (None,) * arity, domain)

    def count(self, domain: Domain = Domain.ALL) -> int:
        return sum(1 for _ in self.scan_all(domain))

    def stats(self) -> dict:
        return {"kind": self.kind, "name": self.name}

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"
