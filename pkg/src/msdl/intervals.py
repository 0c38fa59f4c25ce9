"""Sets of non-negative integers stored as sorted, disjoint, non-adjacent closed intervals."""
from __future__ import annotations

import re
from array import array
from bisect import bisect_right
from typing import Iterable, Iterator

import numpy as np

# Above this many input segments, set operations run vectorised.
NUMPY_THRESHOLD = 256

_DEBUG_SEG = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]")


class ProbeCounter:
    """Counts segment comparisons made by :meth:`IntervalSet.probe`."""

    __slots__ = ("comparisons", "probes", "max_per_probe")

    def __init__(self):
        self.comparisons = 0
        self.probes = 0
        self.max_per_probe = 0


class IntervalSet:
    """Immutable integer set in canonical segment form.

    >>> IntervalSet([(1, 5), (4, 9)])
    IntervalSet('{[1,9]}')
    >>> IntervalSet([(1, 9)]) - IntervalSet([(4, 6)])
    IntervalSet('{[1,3],[7,9]}')
    """

    __slots__ = ("_lo", "_hi")

    def __init__(self, segments: Iterable[tuple[int, int]] = ()):
        segs = sorted((int(a), int(b)) for a, b in segments)
        lo, hi = array("q"), array("q")
        for a, b in segs:
            if a < 0 or b < a:
                raise ValueError(f"invalid segment [{a},{b}]")
            if hi and a <= hi[-1] + 1:
                if b > hi[-1]:
                    hi[-1] = b
            else:
                lo.append(a)
                hi.append(b)
        self._lo = lo
        self._hi = hi

    @classmethod
    def _raw(cls, lo: array, hi: array) -> "IntervalSet":
        s = object.__new__(cls)
        s._lo = lo
        s._hi = hi
        return s

    @classmethod
    def _from_numpy(cls, lo: np.ndarray, hi: np.ndarray) -> "IntervalSet":
        if len(lo) == 0:
            return EMPTY
        a, b = array("q"), array("q")
        a.frombytes(np.ascontiguousarray(lo, dtype=np.int64).tobytes())
        b.frombytes(np.ascontiguousarray(hi, dtype=np.int64).tobytes())
        return cls._raw(a, b)

    @classmethod
    def single(cls, x: int) -> "IntervalSet":
        return cls._raw(array("q", (x,)), array("q", (x,)))

    @classmethod
    def span(cls, lo: int, hi: int) -> "IntervalSet":
        if hi < lo:
            return EMPTY
        if lo < 0:
            raise ValueError(f"invalid segment [{lo},{hi}]")
        return cls._raw(array("q", (lo,)), array("q", (hi,)))

    @classmethod
    def from_ids(cls, ids: Iterable[int]) -> "IntervalSet":
        return cls((x, x) for x in ids)

    @classmethod
    def parse(cls, text: str) -> "IntervalSet":
        """Inverse of ``str()``: ``{[lo,hi],...}``."""
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"not an interval set: {text!r}")
        return cls((int(a), int(b)) for a, b in _DEBUG_SEG.findall(body))

    # -- inspection ----------------------------------------------------------

    def segments(self) -> list[tuple[int, int]]:
        return list(zip(self._lo, self._hi))

    @property
    def nsegments(self) -> int:
        return len(self._lo)

    def count(self) -> int:
        """Number of integers covered."""
        if len(self._lo) > NUMPY_THRESHOLD:
            return int((_np(self._hi) - _np(self._lo)).sum()) + len(self._lo)
        return sum(self._hi) - sum(self._lo) + len(self._lo)

    def __len__(self) -> int:
        return self.count()

    def __bool__(self) -> bool:
        return len(self._lo) > 0

    def __contains__(self, x: int) -> bool:
        lo = self._lo
        if not lo:
            return False
        i = bisect_right(lo, x) - 1
        return i >= 0 and x <= self._hi[i]

    def probe(self, x: int, counter: ProbeCounter) -> bool:
        """Membership test by explicit binary search, recording comparisons.

        Returns the same answer as ``x in self``.
        """
        lo, hi = self._lo, self._hi
        n = len(lo)
        counter.probes += 1
        if n == 0:
            return False
        left, right, cmps = 0, n, 0
        # find the last segment with lo <= x
        while left < right:
            mid = (left + right) // 2
            cmps += 1
            if lo[mid] <= x:
                left = mid + 1
            else:
                right = mid
        counter.comparisons += cmps
        if cmps > counter.max_per_probe:
            counter.max_per_probe = cmps
        i = left - 1
        return i >= 0 and x <= hi[i]

    def __iter__(self) -> Iterator[int]:
        for a, b in zip(self._lo, self._hi):
            yield from range(a, b + 1)

    def segments_within(self, lo: int, hi: int) -> list[tuple[int, int]]:
        return list((self & IntervalSet.span(lo, hi)).segments())

    @property
    def min(self) -> int:
        return self._lo[0]

    @property
    def max(self) -> int:
        return self._hi[-1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._lo == other._lo and self._hi == other._hi

    def __hash__(self) -> int:
        return hash((self._lo.tobytes(), self._hi.tobytes()))

    def __str__(self) -> str:
        return "{" + ",".join(f"[{a},{b}]" for a, b in zip(self._lo, self._hi)) + "}"

    def __repr__(self) -> str:
        return f"IntervalSet('{self}')"

    def __reduce__(self):
        return (IntervalSet._raw, (self._lo, self._hi))

    def nbytes(self) -> int:
        return self._lo.itemsize * (len(self._lo) + len(self._hi))

    # -- algebra -------------------------------------------------------------

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        if not other._lo:
            return self
        if not self._lo:
            return other
        if len(self._lo) + len(other._lo) > NUMPY_THRESHOLD:
            return union_many((self, other))
        return _py_union(self, other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        if not self._lo or not other._lo:
            return EMPTY
        if other._hi[-1] < self._lo[0] or self._hi[-1] < other._lo[0]:
            return EMPTY
        if len(self._lo) + len(other._lo) > NUMPY_THRESHOLD:
            return _np_combine(self, other, "and")
        return _py_intersect(self, other)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        if not self._lo or not other._lo:
            return self
        if other._hi[-1] < self._lo[0] or self._hi[-1] < other._lo[0]:
            return self
        if len(self._lo) + len(other._lo) > NUMPY_THRESHOLD:
            return _np_combine(self, other, "sub")
        return _py_minus(self, other)

    union = __or__
    intersection = __and__
    difference = __sub__

    def issubset(self, other: "IntervalSet") -> bool:
        return not (self - other)

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return not (self & other)

    def complement(self, universe_lo: int, universe_hi: int) -> "IntervalSet":
        return IntervalSet.span(universe_lo, universe_hi) - self


EMPTY = IntervalSet._raw(array("q"), array("q"))


def _np(a: array) -> np.ndarray:
    if not a:
        return np.empty(0, dtype=np.int64)
    return np.frombuffer(a, dtype=np.int64)


def union_many(sets: Iterable[IntervalSet]) -> IntervalSet:
    """Union of any number of sets in one sort-and-coalesce pass."""
    sets = [s for s in sets if s._lo]
    if not sets:
        return EMPTY
    if len(sets) == 1:
        return sets[0]
    total = sum(len(s._lo) for s in sets)
    if total <= NUMPY_THRESHOLD:
        acc = sets[0]
        for s in sets[1:]:
            acc = _py_union(acc, s)
        return acc
    lo = np.concatenate([_np(s._lo) for s in sets])
    hi = np.concatenate([_np(s._hi) for s in sets])
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    # a new segment starts where lo is beyond everything seen so far (plus adjacency)
    starts = np.flatnonzero(np.concatenate(([True], lo[1:] > reach[:-1] + 1)))
    ends = np.concatenate((starts[1:] - 1, [len(lo) - 1]))
    return IntervalSet._from_numpy(lo[starts], reach[ends])


def _py_union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    alo, ahi, blo, bhi = a._lo, a._hi, b._lo, b._hi
    na, nb = len(alo), len(blo)
    lo, hi = array("q"), array("q")
    i = j = 0
    while i < na or j < nb:
        if j >= nb or (i < na and alo[i] <= blo[j]):
            s, e = alo[i], ahi[i]
            i += 1
        else:
            s, e = blo[j], bhi[j]
            j += 1
        if hi and s <= hi[-1] + 1:
            if e > hi[-1]:
                hi[-1] = e
        else:
            lo.append(s)
            hi.append(e)
    return IntervalSet._raw(lo, hi)


def _py_intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    alo, ahi, blo, bhi = a._lo, a._hi, b._lo, b._hi
    na, nb = len(alo), len(blo)
    lo, hi = array("q"), array("q")
    i = j = 0
    while i < na and j < nb:
        s = alo[i] if alo[i] > blo[j] else blo[j]
        e = ahi[i] if ahi[i] < bhi[j] else bhi[j]
        if s <= e:
            lo.append(s)
            hi.append(e)
        if ahi[i] < bhi[j]:
            i += 1
        else:
            j += 1
    if not lo:
        return EMPTY
    return IntervalSet._raw(lo, hi)


def _py_minus(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    alo, ahi, blo, bhi = a._lo, a._hi, b._lo, b._hi
    nb = len(blo)
    lo, hi = array("q"), array("q")
    j = 0
    for s, e in zip(alo, ahi):
        while j < nb and bhi[j] < s:
            j += 1
        k = j
        cur = s
        while k < nb and blo[k] <= e:
            if blo[k] > cur:
                lo.append(cur)
                hi.append(blo[k] - 1)
            if bhi[k] + 1 > cur:
                cur = bhi[k] + 1
            if bhi[k] >= e:
                break
            k += 1
        if cur <= e:
            lo.append(cur)
            hi.append(e)
    if not lo:
        return EMPTY
    return IntervalSet._raw(lo, hi)


def _covered(lo: np.ndarray, end: np.ndarray, points: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(lo, points, side="right") - 1
    ok = idx >= 0
    out = np.zeros(len(points), dtype=bool)
    out[ok] = points[ok] < end[idx[ok]]
    return out


def _np_combine(a: IntervalSet, b: IntervalSet, op: str) -> IntervalSet:
    # half-open elementary pieces between all boundaries
    alo, aend = _np(a._lo), _np(a._hi) + 1
    blo, bend = _np(b._lo), _np(b._hi) + 1
    points = np.unique(np.concatenate((alo, aend, blo, bend)))
    starts = points[:-1]
    in_a = _covered(alo, aend, starts)
    in_b = _covered(blo, bend, starts)
    sel = in_a & in_b if op == "and" else in_a & ~in_b
    if not sel.any():
        return EMPTY
    padded = np.concatenate(([False], sel, [False]))
    rise = np.flatnonzero(~padded[:-2] & padded[1:-1])
    fall = np.flatnonzero(padded[1:-1] & ~padded[2:])
    return IntervalSet._from_numpy(points[rise], points[fall + 1] - 1)
