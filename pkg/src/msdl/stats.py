"""Run statistics: fact counts, segment counts, time and memory."""
from __future__ import annotations

import csv
import io
import sys
import time
import tracemalloc
from dataclasses import dataclass, field
from types import FunctionType, ModuleType
from typing import Any, Callable

from .schemes.base import Domain, Label, Scheme
from .schemes.plain import PlainTable

_SKIP_TYPES = (type, ModuleType, FunctionType)


def deep_sizeof(obj: Any, exclude: tuple = ()) -> int:
    """Bytes reachable from ``obj`` as reported by ``sys.getsizeof``.

    Shared objects are counted once. Objects in ``exclude`` (and anything
    only reachable through them) are not counted.
    """
    seen = {id(x) for x in exclude}
    stack = [obj]
    total = 0
    while stack:
        o = stack.pop()
        if id(o) in seen or isinstance(o, _SKIP_TYPES):
            continue
        seen.add(id(o))
        total += sys.getsizeof(o)
        if isinstance(o, dict):
            stack.extend(o.keys())
            stack.extend(o.values())
        elif isinstance(o, (list, tuple, set, frozenset)):
            stack.extend(o)
        elif isinstance(o, (str, bytes, bytearray, int, float, memoryview)):
            continue
        else:
            d = getattr(o, "__dict__", None)
            if d is not None:
                stack.append(d)
            for cls in type(o).__mro__:
                for name in getattr(cls, "__slots__", ()):
                    if hasattr(o, name):
                        stack.append(getattr(o, name))
    return total


def scheme_bytes(scheme: Scheme) -> int:
    """Static size of a scheme's own structures (not the shared registry)."""
    exclude = (scheme.registry,) if scheme.registry is not None else ()
    return deep_sizeof(scheme, exclude)


def direct_plain_table(facts) -> PlainTable:
    """A plain table holding ``facts`` as merged, no rules, no derivation.

    Stores what a plain-only run would end with, minus the lazily built scan
    indexes, so its size is a lower bound for such a run.
    """
    facts = list(facts)
    pt = PlainTable("plain", sorted({f[0] for f in facts}))
    for f in facts:
        pt.store.add(f, int(Label.OLD), 0)
    return pt


def measure(fn: Callable[[], Any]) -> tuple[Any, float, int]:
    """Run ``fn`` under tracemalloc; returns (result, seconds, peak bytes)."""
    was_tracing = tracemalloc.is_tracing()
    if not was_tracing:
        tracemalloc.start()
    tracemalloc.reset_peak()
    base = tracemalloc.get_traced_memory()[0]
    t0 = time.perf_counter()
    try:
        result = fn()
    finally:
        seconds = time.perf_counter() - t0
        peak = tracemalloc.get_traced_memory()[1] - base
        if not was_tracing:
            tracemalloc.stop()
    return result, seconds, max(peak, 0)


@dataclass
class RunStats:
    seconds: float = 0.0
    peak: int = 0
    static: int = 0
    facts: int = 0
    segments: int = 0
    rounds: int = 0
    per_scheme: list[dict] = field(default_factory=list)

    @classmethod
    def collect(cls, reasoner, seconds: float = 0.0, peak: int = 0) -> "RunStats":
        per = []
        static = 0
        segments = 0
        facts = 0
        for s in reasoner.registry.schemes:
            info = dict(s.stats())
            info["static_bytes"] = scheme_bytes(s)
            info["represented_facts"] = info.get("represented_facts", s.count(Domain.ALL))
            static += info["static_bytes"]
            facts += info["represented_facts"]
            if hasattr(s, "segment_count"):
                segments += s.segment_count()
            per.append(info)
        rounds = sum(len(run.rounds) for run in reasoner.runs)
        return cls(seconds, peak, static, facts, segments, rounds, per)

    def lines(self) -> list[str]:
        out = [
            f"time={self.seconds:.6f}",
            f"peak={self.peak}",
            f"static={self.static}",
            f"facts={self.facts}",
            f"segments={self.segments}",
            f"rounds={self.rounds}",
        ]
        for info in self.per_scheme:
            name = info["name"]
            for k, v in info.items():
                if k in ("name", "per_predicate") or isinstance(v, (dict, list)):
                    continue
                out.append(f"{name}.{k}={v}")
        return out

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "peak", "static", "facts"])
        w.writerow([f"{self.seconds:.6f}", self.peak, self.static, self.facts])
        return buf.getvalue()
