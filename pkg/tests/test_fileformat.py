import random

import pytest
from hypothesis import given, settings, strategies as st

from graphsup.fileformat import ParseError, Problem, SemanticError, export_dot, name_nodes, parse_problem, serialize
from graphsup.graph import INTO, Gate
from graphsup.matching import isomorphic

from helpers import FIXTURES, S, load_fixture, random_graph

FIXTURE_FILES = sorted(FIXTURES.glob("*.gsp"))


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.name)
def test_fixture_round_trip(path):
    once = serialize(parse_problem(path.read_text(encoding="utf-8")))
    again = parse_problem(once)
    assert serialize(again) == once
    assert again.structure() == parse_problem(path.read_text(encoding="utf-8")).structure()


def test_empty_file_is_an_empty_problem():
    p = parse_problem("")
    assert p.graphs == {} and p.rules == [] and p.asserts == []
    assert serialize(p) == ""
    assert parse_problem("# only a comment\n").graphs == {}


@pytest.mark.parametrize("text,line", [
    ("graph G { node a : s; }", 1),
    ("sort s;\ngraph G { node a : s; roots [a] }", 2),
    ("sort s;\n\nbogus;", 3),
    ("sort s;\ngraph G { node a : s; roots [b]; }", 2),
    ("sort s;\ngraph G { node a : s; edge a => a; }", 2),
    ("sort s;\ngraph G { node a : s label f(; }", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_problem(text)
    assert exc.value.line == line


def test_rules_between_dissimilar_graphs_are_semantic_errors():
    text = """sort s;
graph A { node a : s; roots [a]; }
graph B { node b : s label k; roots []; }
rule r : A -> B;
assert eq A B;
"""
    with pytest.raises(SemanticError) as exc:
        parse_problem(text)
    assert len(exc.value.errors) == 2
    assert all("not root-similar" in e for e in exc.value.errors)


def test_node_names_are_shared_between_graphs():
    p = load_fixture("example31.gsp")
    a1 = p.node("a1")
    assert a1 in p.graphs["G"].nodes and a1 in p.graphs["Expected"].nodes


def test_settings_and_goal_are_kept():
    text = """sort s;
set order node-count;
set crelation plain;
set budget merges=200 fuel=50;
graph A { node a : s; roots [a]; }
graph B { node b : s; roots [b]; }
goal A B;
"""
    p = parse_problem(text)
    assert p.settings == {"order": "node-count", "crelation": "plain", "merges": 200, "fuel": 50}
    assert p.goal == ("A", "B")
    assert parse_problem(serialize(p)).structure() == p.structure()


def test_dot_of_replacement_result():
    p = load_fixture("example31.gsp")
    dot = export_dot(p.graphs["Expected"], p.names, "Expected")
    assert dot.count("shape=") == 6
    assert dot.count("->") == 6
    assert '"b1" [label="b1:s:f(x)"' in dot
    assert dot == export_dot(p.graphs["Expected"], p.names, "Expected")


def test_dot_draws_gates_as_boxes():
    p = load_fixture("fig3.gsp")
    dot = export_dot(p.graphs["G3"], p.names, "G3")
    assert dot.count("shape=") == 7
    assert dot.count("shape=box") == 1
    assert dot.count("shape=doublecircle") == 3


def test_circuit_definitions_round_trip():
    p = load_fixture("fig3.gsp")
    assert p.circuits["Composed"][0] == "seq"
    text = serialize(p)
    assert "circuit Composed = (G2 par G1) seq G3;" in text
    assert isomorphic(parse_problem(text).graphs["Composed"], p.graphs["Composed"])


def test_gate_sorts_parse():
    p = parse_problem("graph G { node g : gate(2,1) label f; node i : into label 1; roots []; edge i -> g; }")
    g = p.graphs["G"]
    assert {n.sort for n in g.nodes} == {Gate(2, 1), INTO}


@given(st.integers(0, 10**6))
@settings(max_examples=100, deadline=None)
def test_random_problems_round_trip(seed):
    rng = random.Random(seed)
    graphs = {f"G{i}": random_graph(rng, max_nodes=5, start=10 * i) for i in range(3)}
    p = Problem(sorts=["s"], graphs=graphs, names=name_nodes(graphs))
    text = serialize(p)
    q = parse_problem(text)
    assert serialize(q) == text
    for k, g in graphs.items():
        h = q.graphs[k]
        assert len(h.nodes) == len(g.nodes) and len(h.edges) == len(g.edges)
        assert [q.names[r] for r in h.roots] == [p.names[r] for r in g.roots]
        assert all(n.sort == S for n in h.nodes)
