import pytest

from msdl import materialise, parse_facts, parse_program
from msdl.query import Query, QueryError, answers, count, evaluate
from msdl.schemes.base import Domain

PROG = "R(?x,?z) :- R(?x,?y), R(?y,?z).\nU(?x) :- A(?x).\nU(?x) :- B(?x)."


@pytest.fixture
def reasoner():
    prog = parse_program(PROG)
    facts = parse_facts("R(a,b). R(b,c). R(c,d). A(a). A(b). B(b). B(c). P(a,a). P(a,b).", prog.symbols)
    return materialise(prog, facts)


def rows(r, text, projection=None):
    q = Query.parse(text, r.symbols, projection)
    fmt = r.symbols.format_constant
    return sorted(tuple(fmt(c) for c in row) for row in answers(q, r.registry))


def test_single_atom_patterns(reasoner):
    assert rows(reasoner, "R(?x,a).") == []
    assert rows(reasoner, "R(?x,d).") == [("a",), ("b",), ("c",)]
    assert rows(reasoner, "R(a,?y).") == [("b",), ("c",), ("d",)]
    assert len(rows(reasoner, "R(?x,?y).")) == 6
    assert rows(reasoner, "U(?x).") == [("a",), ("b",), ("c",)]


def test_repeated_variable_and_boolean(reasoner):
    assert rows(reasoner, "P(?x,?x).") == [("a",)]
    q = Query.parse("R(a,d).", reasoner.symbols)
    assert q.projection == () and count(q, reasoner.registry) == 1
    q = Query.parse("R(d,a).", reasoner.symbols)
    assert count(q, reasoner.registry) == 0


def test_join_and_projection_dedup(reasoner):
    assert rows(reasoner, "R(?x,?y), U(?y).", ["x"]) == [("a",), ("b",)]
    assert rows(reasoner, "R(?x,?y), R(?y,?z), U(?x).") == [("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")]
    assert rows(reasoner, "R(?x,?y).", ["x"]) == [("a",), ("b",), ("c",)]


def test_limit_keeps_exact_cardinality(reasoner):
    q = Query.parse("R(?x,?y).", reasoner.symbols)
    res = evaluate(q, reasoner.registry, Domain.ALL, limit=2)
    assert len(res.answers) == 2 and res.cardinality == 6


def test_invalid_queries(reasoner):
    sym = reasoner.symbols
    with pytest.raises(QueryError):
        Query.parse("R(?x,?y), R(?a,?b).", sym)
    with pytest.raises(QueryError):
        Query.parse("R(?x,?y).", sym, ["z"])
    with pytest.raises(QueryError):
        Query.parse("R(?a,?b), R(?b,?c), R(?c,?d), R(?d,?e), R(?e,?f).", sym)
    with pytest.raises(QueryError):
        list(answers(Query.parse("Nope(?x).", sym), reasoner.registry))
