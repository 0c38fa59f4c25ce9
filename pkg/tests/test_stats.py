from msdl import SchemeConfig, materialise, parse_program
from msdl.generators import chain_edges, edge_facts
from msdl.stats import RunStats, deep_sizeof, measure, scheme_bytes

TRANS = "R(?x,?z) :- R(?x,?y), R(?y,?z)."


def test_deep_sizeof_counts_shared_objects_once():
    shared = list(range(1000))
    assert deep_sizeof([shared, shared]) < 2 * deep_sizeof(shared)
    assert deep_sizeof({"a": shared}) > deep_sizeof(shared)


def test_tc_is_smaller_than_plain_on_a_chain():
    prog = parse_program(TRANS)
    facts = edge_facts(chain_edges(150), prog.symbols)
    tc = materialise(prog, facts)
    plain = materialise(parse_program(TRANS, prog.symbols), facts, SchemeConfig(False, False))
    assert tc.count() == plain.count() == 150 * 149 // 2
    tc_bytes = sum(scheme_bytes(s) for s in tc.registry.schemes)
    plain_bytes = sum(scheme_bytes(s) for s in plain.registry.schemes)
    assert plain_bytes > 10 * tc_bytes


def test_run_stats_lines_and_csv():
    prog = parse_program(TRANS)
    r, seconds, peak = measure(lambda: materialise(prog, edge_facts(chain_edges(20), prog.symbols)))
    assert seconds > 0 and peak > 0
    st = RunStats.collect(r, seconds, peak)
    assert st.facts == 190 and st.rounds == 1 and st.segments >= 1
    lines = st.lines()
    assert "facts=190" in lines and "tc:R.nodes=20" in lines
    head, row = st.csv().splitlines()
    assert head == "time,peak,static,facts" and row.endswith(",190")


def test_direct_load_matches_a_plain_run():
    from msdl.stats import direct_plain_table

    prog = parse_program(TRANS)
    facts = edge_facts(chain_edges(60), prog.symbols)
    run = materialise(prog, facts, SchemeConfig(False, False))
    pt = direct_plain_table(run.fact_set())
    assert set(pt.store.facts) == set(run.registry.plain.store.facts)
    assert scheme_bytes(pt) <= scheme_bytes(run.registry.plain)
