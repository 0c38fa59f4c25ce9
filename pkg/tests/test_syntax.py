import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msdl.syntax import (
    ArityError, Atom, DatalogSyntaxError, Rule, SafetyError, SymbolTable, Term, apply_substitution,
    check_safety, format_rule, match_atom, parse_atoms, parse_facts, parse_program,
)


def test_transitive_rule_parses():
    prog = parse_program("R(?x,?z) :- R(?x,?y), R(?y,?z).")
    (rule,) = prog.rules
    assert len(rule.body) == 2
    assert format_rule(rule, prog.symbols) == "R(?x,?z) :- R(?x,?y), R(?y,?z)."


def test_unsafe_rule_names_variable():
    with pytest.raises(SafetyError) as e:
        parse_program("H(?x,?y) :- B(?x).")
    assert "?y" in str(e.value)


def test_arity_conflict_names_predicate():
    with pytest.raises((ArityError, DatalogSyntaxError)) as e:
        parse_program("P(?x) :- Q(?x).\nQ(?x,?y) :- P(?x), P(?y).")
    assert "predicate Q" in str(e.value)


def test_syntax_error_position():
    with pytest.raises(DatalogSyntaxError) as e:
        parse_program("P(?x) :- Q(?x).\nP(?x) :- Q(?x)\n")
    assert e.value.line in (2, 3)
    with pytest.raises(DatalogSyntaxError) as e:
        parse_program("P(?x) :- Q(?x) R(?x).")
    assert e.value.line == 1 and e.value.column == 16


def test_comments_quotes_and_tsv():
    sym = SymbolTable()
    facts = parse_facts("% header\nP('a b', c). P('it\\'s',d).\n", sym)
    assert [sym.format_fact(f) for f in facts] == ["P('a b',c)", "P('it\\'s',d)"]
    tsv = parse_facts("P\tx\ty\n\nP\tc\td\n", sym, tsv=True)
    assert tsv[1] == sym.fact("P", ["c", "d"])
    with pytest.raises(DatalogSyntaxError):
        parse_facts("P(?x, a).", sym)


def test_check_safety_examples():
    sym = SymbolTable()
    ok = parse_program("R(?x,?y) :- R(?y,?x).", sym).rules[0]
    assert check_safety(ok) is None
    x, z = sym.variable("x"), sym.variable("z")
    P, Q = sym.predicate("P", 1), sym.predicate("Q", 1)
    bad = Rule(Atom(P, (Term.variable(x),)), (Atom(Q, (Term.variable(z),)),))
    assert check_safety(bad) == x


def test_substitution_and_matching_examples():
    sym = SymbolTable()
    (a,) = parse_atoms("R(?x,?y)", sym)
    x, y = sym.variable("x"), sym.variable("y")
    ca, cb, cc = (sym.constant(c) for c in "abc")
    assert apply_substitution(a, {x: ca}) == Atom(a.pred, (Term.constant(ca), Term.variable(y)))
    (ground,) = parse_atoms("R(a,b)", sym)
    assert apply_substitution(ground, {x: cc}) == ground
    (xx,) = parse_atoms("R(?x,?x)", sym)
    assert apply_substitution(xx, {x: cc}).to_fact() == (a.pred, cc, cc)

    assert match_atom(a, (a.pred, ca, cb), {}) == {x: ca, y: cb}
    assert match_atom(xx, (a.pred, ca, cb), {}) is None
    (xb,) = parse_atoms("R(?x,b)", sym)
    sigma = {x: ca}
    assert match_atom(xb, (a.pred, ca, cb), sigma) == {x: ca}
    assert match_atom(xb, (a.pred, cb, cb), sigma) is None
    assert sigma == {x: ca}


# -- properties ---------------------------------------------------------------

PREDS = [("P", 1), ("Q", 2), ("S", 3)]
names = st.sampled_from(["a", "b", "c0", "x_y", "0", "quoted name", "it's"])


@st.composite
def atoms(draw, vars_):
    name, arity = draw(st.sampled_from(PREDS))
    args = []
    for _ in range(arity):
        if draw(st.booleans()):
            args.append("?" + draw(st.sampled_from(vars_)))
        else:
            c = draw(names)
            args.append(c if c.replace("_", "").isalnum() else "'" + c.replace("'", "\\'") + "'")
    return f"{name}({','.join(args)})"


@st.composite
def programs(draw):
    lines = []
    for _ in range(draw(st.integers(1, 5))):
        body = draw(st.lists(atoms(["x", "y", "z"]), min_size=1, max_size=3))
        body_vars = sorted({p.strip("?)") for b in body for p in b[b.index("(") + 1:-1].split(",") if p.startswith("?")})
        if body_vars:
            head = draw(atoms(body_vars))
        else:
            head = draw(atoms(["x"])).replace("?x", "k")
        lines.append(f"{head} :- {', '.join(body)}.")
    return "\n".join(lines)


@settings(max_examples=150, deadline=None)
@given(programs())
def test_parse_print_roundtrip(text):
    prog = parse_program(text)
    again = parse_program(prog.format(), prog.symbols)
    assert again.rules == prog.rules
    fresh = parse_program(prog.format())
    assert fresh.format() == prog.format()


@settings(max_examples=150, deadline=None)
@given(programs())
def test_safety_matches_brute_force(text):
    for rule in parse_program(text).rules:
        body_syms = [t.sym for a in rule.body for t in a.args if t.var]
        missing = [t.sym for t in rule.head.args if t.var and t.sym not in body_syms]
        assert check_safety(rule) == (missing[0] if missing else None)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_match_inverts_substitution(data):
    sym = SymbolTable()
    text = data.draw(atoms(["x", "y", "z"]))
    (atom,) = parse_atoms(text, sym)
    consts = [sym.constant(c) for c in ("a", "b", "c")]
    sigma = {v: data.draw(st.sampled_from(consts)) for v in atom.variables()}
    # extra bindings outside the atom must not leak into the match
    sigma[sym.variable("unused")] = consts[0]
    ground = apply_substitution(atom, sigma)
    assert ground.is_ground()
    got = match_atom(atom, ground.to_fact(), {})
    assert got == {v: sigma[v] for v in atom.variables()}
