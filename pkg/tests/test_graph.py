import random

import pytest
from hypothesis import given, settings, strategies as st

from graphsup.graph import (
    FROM,
    INTO,
    Custom,
    DomainError,
    Gate,
    Graph,
    GraphError,
    Node,
    NodeAllocator,
    NodeRenaming,
    apply_renaming,
    graph_invariant,
    root_similar,
    validate_graph,
)
from graphsup.terms import Var, const, fn

from helpers import S, T, random_graph

a, b, c = Node(0, S), Node(1, S), Node(2, S)


def test_roots_are_unlabeled_and_inner_nodes_labeled():
    with pytest.raises(GraphError, match="root carries label"):
        Graph([a], [a], [], {a: const("x")})
    with pytest.raises(GraphError):
        Graph([a, b], [a], [(a, b)], {})


def test_roots_repetition_free_and_edges_inside():
    assert "root sequence has repetitions" in validate_graph(Graph([a], [a, a], check=False))
    assert validate_graph(Graph([a], [], [(a, b)], {a: const("k")}, check=False))


def test_sort_printing():
    assert str(Gate(1, 2)) == "gate(1,2)"
    assert str(INTO) == "into" and str(FROM) == "from"
    assert str(Custom("tm")) == "tm"
    with pytest.raises(ValueError):
        Custom("into")


def test_free_vars_and_adjacency():
    g = Graph([a, b, c], [a], [(a, b), (b, c)], {b: fn("f", Var("x")), c: const("k")})
    assert g.free_vars() == {"x"}
    assert g.succ(a) == {b} and g.pred(c) == {b}
    assert g.inner == {b, c}


def test_renaming_must_be_injective_and_sort_preserving():
    with pytest.raises(ValueError):
        NodeRenaming({a: c, b: c})
    with pytest.raises(ValueError):
        NodeRenaming({a: Node(5, T)})
    with pytest.raises(DomainError):
        apply_renaming(NodeRenaming({a: c}), Graph([a, b], [a, b]))


def test_root_similarity_checks_length_and_sorts():
    assert root_similar(Graph([a], [a]), Graph([c], [c]))
    assert not root_similar(Graph([a], [a]), Graph([Node(3, T)], [Node(3, T)]))
    assert not root_similar(Graph([a], [a]), Graph())


def test_allocator_skips_used_ids():
    alloc = NodeAllocator()
    alloc.bump(Graph([Node(7, S)], [Node(7, S)]))
    assert alloc.new(S).id == 8


@given(st.integers(0, 10**6))
@settings(max_examples=200, deadline=None)
def test_invariant_is_stable_under_renaming(seed):
    rng = random.Random(seed)
    g = random_graph(rng, sorts=(S, T))
    perm = list(range(len(g.nodes)))
    rng.shuffle(perm)
    ren = NodeRenaming({n: Node(100 + perm[i], n.sort) for i, n in enumerate(sorted(g.nodes))})
    h = apply_renaming(ren, g)
    assert graph_invariant(g) == graph_invariant(h)
    assert apply_renaming(ren.inverse(), h) == g
