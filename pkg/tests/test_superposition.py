import random

import pytest
from hypothesis import given, settings, strategies as st

from graphsup.graph import Graph, Node
from graphsup.matching import isomorphic
from graphsup.superposition import (
    FALSUM,
    Eq,
    LiteralIndex,
    Neq,
    ProverConfig,
    ResourceOut,
    Saturated,
    Unsat,
    infer_reflection,
    infer_sup_neg,
    infer_sup_pos,
    is_redundant,
    normalize_literal,
    prove,
    replay,
    saturate,
)
from graphsup.terms import Var, const, fn

from helpers import S, random_graph

seeds = st.integers(0, 10**6)


def leaf(label, base=0):
    r, x = Node(base, S), Node(base + 1, S)
    return Graph([r, x], [r], [(r, x)], {x: label})


def pair(l1, l2, base=0):
    """A closed graph: two labeled nodes joined by an edge."""
    a, b = Node(base, S), Node(base + 1, S)
    return Graph([a, b], [], [(a, b)], {a: l1, b: l2})


A, B, C = const("a"), const("b"), const("c")
BARE = Graph([Node(0, S)], [Node(0, S)])


def test_literals_need_root_similar_sides():
    with pytest.raises(ValueError):
        Eq(leaf(A), pair(A, B))
    with pytest.raises(ValueError):
        Neq(leaf(A), pair(A, B))


def test_reflection_closes_isomorphic_disequation():
    out = infer_reflection(Neq(pair(A, B), pair(A, B, base=10)))
    assert [lit for lit, _, _ in out] == [FALSUM]


def test_reflection_unifies_labels():
    out = infer_reflection(Neq(leaf(fn("f", Var("x"))), leaf(fn("f", A), base=5)))
    assert out and out[0][0] is FALSUM
    assert out[0][1]["x"] == A
    assert infer_reflection(Neq(leaf(A), leaf(B))) == []


def test_positive_superposition_rewrites_inside_larger_graph():
    rule = Eq(leaf(A), leaf(B))
    host = Eq(pair(C, A), pair(C, C, base=5))
    out = [lit for lit, _, _ in infer_sup_pos(rule, host)]
    expected = Eq(pair(C, B), pair(C, C, base=5))
    assert any(isomorphic(x.left, expected.left) and isomorphic(x.right, expected.right) for x in out)


def test_negative_superposition_rewrites_disequation():
    rule = Eq(leaf(A), leaf(B))
    goal = Neq(pair(C, A), pair(C, B, base=5))
    out = [lit for lit, _, _ in infer_sup_neg(goal, rule)]
    assert any(isomorphic(x.left, x.right) for x in out)


def test_prove_entailed_goal_and_replay():
    axioms = [Eq(leaf(A), leaf(B)), Eq(leaf(B), leaf(C))]
    res = prove(axioms, Eq(pair(C, A), pair(C, C, base=5)))
    assert isinstance(res, Unsat)
    assert res.proof[-1].conclusion is FALSUM
    assert replay(res.proof)
    assert {r.rule for r in res.proof} <= {"input", "S+", "S-", "R"}


def test_unentailed_goal_saturates():
    res = prove([Eq(leaf(A), BARE)], Eq(pair(C, A), pair(C, B, base=5)))
    assert isinstance(res, Saturated)
    assert res.complete


def test_literal_budget_gives_resource_out():
    grow = Eq(leaf(A), Graph([Node(0, S), Node(1, S), Node(2, S)], [Node(0, S)],
                             [(Node(0, S), Node(1, S)), (Node(1, S), Node(2, S))],
                             {Node(1, S): A, Node(2, S): A}))
    res = saturate([grow, Neq(leaf(A), leaf(B))], ProverConfig(max_literals=20))
    assert isinstance(res, (ResourceOut, Saturated))
    assert not isinstance(res, Unsat)


def test_instances_and_reducible_literals_are_redundant():
    s = LiteralIndex()
    general = normalize_literal(Eq(leaf(Var("x")), leaf(B)))
    s.add(general)
    assert is_redundant(normalize_literal(Eq(leaf(A), leaf(B))), s)
    s2 = LiteralIndex()
    s2.add(normalize_literal(Eq(leaf(A), BARE)))
    closed = Graph([Node(0, S)], [], [], {Node(0, S): C})
    assert is_redundant(normalize_literal(Eq(pair(C, A), closed)), s2)
    assert not is_redundant(normalize_literal(Eq(pair(C, B), closed)), s2)


def test_unorientable_equations_do_not_demodulate():
    s = LiteralIndex()
    s.add(normalize_literal(Eq(leaf(A), leaf(B))))
    assert not is_redundant(normalize_literal(Eq(pair(C, A), pair(C, B))), s)


def test_tautologies_are_redundant():
    assert is_redundant(normalize_literal(Eq(pair(A, B), pair(A, B, base=7))), LiteralIndex())


def test_inputs_containing_falsum_are_unsat():
    assert isinstance(saturate([FALSUM]), Unsat)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_reflexive_goals_are_proved_with_replayable_proofs(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_nodes=5)
    res = prove([], Eq(g, g))
    assert isinstance(res, Unsat)
    assert replay(res.proof)
