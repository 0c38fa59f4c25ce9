import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import msdl.intervals as iv
from msdl.intervals import EMPTY, IntervalSet, ProbeCounter, union_many

UNIVERSE = 64


def to_bits(s: IntervalSet) -> int:
    bits = 0
    for x in s:
        bits |= 1 << x
    return bits


def from_bits(bits: int) -> IntervalSet:
    return IntervalSet.from_ids(x for x in range(UNIVERSE + 1) if bits >> x & 1)


def canonical(s: IntervalSet) -> bool:
    segs = s.segments()
    if any(a > b for a, b in segs):
        return False
    return all(segs[k][1] + 1 < segs[k + 1][0] for k in range(len(segs) - 1))


bitsets = st.integers(min_value=0, max_value=(1 << (UNIVERSE + 1)) - 1)


@pytest.fixture(params=["python", "numpy"])
def backend(request, monkeypatch):
    if request.param == "numpy":
        monkeypatch.setattr(iv, "NUMPY_THRESHOLD", 0)
    return request.param


def test_examples(backend):
    assert str(IntervalSet([(1, 5)]) | IntervalSet([(4, 9)])) == "{[1,9]}"
    assert str(IntervalSet([(1, 9)]) - IntervalSet([(4, 6)])) == "{[1,3],[7,9]}"
    assert str(IntervalSet([(1, 3), (7, 9)]) & IntervalSet([(3, 7)])) == "{[3,3],[7,7]}"
    assert IntervalSet([(1, 3), (7, 9)]).count() == 6


def test_adjacent_segments_coalesce():
    assert IntervalSet([(1, 3), (4, 6)]).segments() == [(1, 6)]
    assert IntervalSet.from_ids([5, 3, 4, 9]).segments() == [(3, 5), (9, 9)]


def test_invalid_segment():
    with pytest.raises(ValueError):
        IntervalSet([(3, 1)])
    with pytest.raises(ValueError):
        IntervalSet([(-1, 1)])


def test_debug_roundtrip():
    s = IntervalSet([(0, 0), (7, 19), (40, 41)])
    assert IntervalSet.parse(str(s)) == s
    assert IntervalSet.parse("{}") == EMPTY


@settings(max_examples=300, deadline=None)
@given(bitsets, bitsets)
def test_ops_agree_with_bitsets(a_bits, b_bits):
    for threshold in (iv.NUMPY_THRESHOLD, 0):
        old, iv.NUMPY_THRESHOLD = iv.NUMPY_THRESHOLD, threshold
        try:
            a, b = from_bits(a_bits), from_bits(b_bits)
            for got, want in ((a | b, a_bits | b_bits), (a & b, a_bits & b_bits), (a - b, a_bits & ~b_bits)):
                assert canonical(got)
                assert to_bits(got) == want
            assert a.count() == bin(a_bits).count("1")
            assert list(a) == [x for x in range(UNIVERSE + 1) if a_bits >> x & 1]
            for x in range(UNIVERSE + 2):
                assert (x in a) == bool(a_bits >> x & 1)
        finally:
            iv.NUMPY_THRESHOLD = old


@settings(max_examples=100, deadline=None)
@given(st.lists(bitsets, max_size=6))
def test_union_many(bit_list):
    want = 0
    for b in bit_list:
        want |= b
    sets = [from_bits(b) for b in bit_list]
    old, iv.NUMPY_THRESHOLD = iv.NUMPY_THRESHOLD, 0
    try:
        got_np = union_many(sets)
    finally:
        iv.NUMPY_THRESHOLD = old
    got_py = union_many(sets)
    assert to_bits(got_np) == want == to_bits(got_py)
    assert canonical(got_np)


@settings(max_examples=100, deadline=None)
@given(bitsets, bitsets)
def test_minus_is_intersection_with_complement(a_bits, b_bits):
    a, b = from_bits(a_bits), from_bits(b_bits)
    assert a - b == a & b.complement(0, UNIVERSE)
    # distributivity spot check
    c = from_bits(a_bits ^ b_bits)
    assert a & (b | c) == (a & b) | (a & c)


@settings(max_examples=100, deadline=None)
@given(bitsets, st.integers(0, UNIVERSE + 1))
def test_probe_matches_contains_and_is_logarithmic(bits, x):
    s = from_bits(bits)
    c = ProbeCounter()
    assert s.probe(x, c) == (x in s)
    n = s.nsegments
    if n:
        assert c.comparisons <= (n - 1).bit_length() + 1


def test_large_sets_use_numpy_path():
    a = IntervalSet((k * 10, k * 10 + 4) for k in range(500))
    b = IntervalSet((k * 10 + 3, k * 10 + 7) for k in range(500))
    assert (a | b).segments() == [(k * 10, k * 10 + 7) for k in range(500)]
    assert (a & b).segments() == [(k * 10 + 3, k * 10 + 4) for k in range(500)]
    assert (a - b).segments() == [(k * 10, k * 10 + 2) for k in range(500)]
    assert a.count() == 2500
