"""Randomized law checks shared by the unit tests and the acceptance run.

Each function takes a seed and returns the names of the laws that failed.
"""

from __future__ import annotations

import random

from graphsup.circuits import (
    CIRCUITS,
    Circuit,
    ElementaryGate,
    IdGraph,
    build_primitive,
    empty_circuit,
    is_circuit,
    is_subcircuit,
    parallel_compose,
    random_circuit,
    random_layer,
    sequential_compose,
)
from graphsup.graph import Graph, Node, NodeAllocator, NodeRenaming, apply_label_subst, apply_renaming
from graphsup.matching import isomorphic
from graphsup.order import NODE_COUNT, OrderVerdict
from graphsup.rewrite import _substitutable, crelation_violations, is_subgraph, replace
from graphsup.terms import Substitution, Var, const, fn

from helpers import OPEN_LABELS, fresh_start, random_graph, random_replacement, random_subgraph


def replacement_algebra(seed: int) -> list[str]:
    rng = random.Random(seed)
    bad = []
    g = random_graph(rng)
    h = random_subgraph(rng, g)
    k = random_subgraph(rng, h)
    if not (is_subgraph(g, g) and is_subgraph(h, g)):
        bad.append("reflexivity")
    if is_subgraph(k, h) and not is_subgraph(k, g):
        bad.append("transitivity")
    if replace(g, h, h) != g:
        bad.append("trivial replacement")
    h2 = random_replacement(rng, h, fresh_start(g))
    g2 = replace(g, h, h2)
    if not is_subgraph(h2, g2) or replace(g2, h2, h) != g:
        bad.append("round trip")
    h3 = random_replacement(rng, h2, fresh_start(g, h2))
    if _substitutable(h3, h2, g2) and replace(g2, h2, h3) != replace(g, h, h3):
        bad.append("sequential")
    other = random_subgraph(rng, g)
    if not (other.nodes & h.nodes):
        r1 = random_replacement(rng, h, fresh_start(g), reuse_p=0)
        r2 = random_replacement(rng, other, fresh_start(g, r1), reuse_p=0)
        if replace(replace(g, h, r1), other, r2) != replace(replace(g, other, r2), h, r1):
            bad.append("disjoint commutation")
    k2 = random_replacement(rng, k, fresh_start(g))
    if _substitutable(k2, k, h) and replace(g, k, k2) != replace(g, h, replace(h, k, k2)):
        bad.append("nested")
    mu = NodeRenaming({n: Node(n.id + 1000, n.sort) for n in g.nodes | h2.nodes})
    if apply_renaming(mu, g2) != replace(apply_renaming(mu, g), apply_renaming(mu, h), apply_renaming(mu, h2)):
        bad.append("renaming equivariance")
    return bad


def order_axioms(seed: int) -> list[str]:
    rng = random.Random(seed)
    bad = []
    g = random_graph(rng, labels=OPEN_LABELS)
    h = random_graph(rng, labels=OPEN_LABELS)
    v = NODE_COUNT.compare(g, h)
    if (v is OrderVerdict.GREATER) != (NODE_COUNT.measure(g) > NODE_COUNT.measure(h)) \
            or NODE_COUNT.measure(g) < 0:
        bad.append("well-foundedness measure")
    sigma = Substitution({"x": fn("f", const("a")), "y": Var("z")})
    if NODE_COUNT.compare(apply_label_subst(sigma, g), apply_label_subst(sigma, h)) is not v:
        bad.append("substitution closure")
    sub = random_subgraph(rng, g)
    rep = random_replacement(rng, sub, fresh_start(g, h), labels=OPEN_LABELS)
    g2 = replace(g, sub, rep)
    if NODE_COUNT.greater(sub, rep) and not NODE_COUNT.greater(g, g2):
        bad.append("replacement monotonicity")
    if NODE_COUNT.greater(rep, sub) and not NODE_COUNT.greater(g2, g):
        bad.append("replacement monotonicity")
    ground = [random_graph(rng) for _ in range(2)]
    if NODE_COUNT.compare(*ground) is OrderVerdict.INCOMPARABLE:
        bad.append("ground totality")
    return bad


def circuit_laws(seed: int) -> list[str]:
    rng = random.Random(seed)
    alloc = NodeAllocator()
    bad = []
    a = random_circuit(rng, rng.randint(0, 2), alloc)
    b = random_circuit(rng, rng.randint(0, 2), alloc)
    c = random_circuit(rng, rng.randint(0, 2), alloc)
    if not all(is_circuit(x.graph) for x in (a, b, c)):
        bad.append("composition validates")
    if parallel_compose(parallel_compose(a, b), c) != parallel_compose(a, parallel_compose(b, c)):
        bad.append("parallel associativity")
    if parallel_compose(a, empty_circuit()) != a or parallel_compose(empty_circuit(), a) != a:
        bad.append("empty neutrality")
    s1 = random_layer(rng, len(a.outputs), alloc)
    s2 = random_layer(rng, len(s1.outputs), alloc)
    if sequential_compose(sequential_compose(a, s1), s2) != sequential_compose(a, sequential_compose(s1, s2)):
        bad.append("sequential associativity")
    b2 = random_layer(rng, len(b.outputs), alloc)
    left = sequential_compose(parallel_compose(a, b), parallel_compose(s1, b2))
    right = parallel_compose(sequential_compose(a, s1), sequential_compose(b, b2))
    if left != right:
        bad.append("interchange")
    ident_in = build_primitive(IdGraph(len(a.inputs)), alloc) if a.inputs else empty_circuit()
    ident_out = build_primitive(IdGraph(len(a.outputs)), alloc) if a.outputs else empty_circuit()
    if not isomorphic(sequential_compose(ident_in, a).graph, a.graph) \
            or not isomorphic(sequential_compose(a, ident_out).graph, a.graph):
        bad.append("identity")
    return bad


def embedded(g: Graph, piece: Circuit) -> Graph:
    """The image of ``piece`` inside a composite ``g`` built from it."""
    ren = {}
    for o in piece.outputs:
        if o not in g.nodes:
            ren[o] = next(iter(g.succ(piece.src(o))))
    pg = piece.graph
    m = {n: ren.get(n, n) for n in pg.nodes}
    return Graph(m.values(), [m[r] for r in pg.roots], {(m[x], m[y]) for x, y in pg.edges}, pg.labels)


def subcircuit_relation(seed: int) -> list[str]:
    """The C-relation properties for subcircuits of a random composite."""
    rng = random.Random(seed)
    alloc = NodeAllocator()
    if rng.random() < 0.5:
        x = build_primitive(ElementaryGate(fn("g", Var("x")), rng.randint(0, 2), rng.randint(0, 2)), alloc)
    else:
        x = random_circuit(rng, 1, alloc)
    y = random_circuit(rng, rng.randint(0, 1), alloc)
    first = parallel_compose(x, y)
    z = random_layer(rng, len(first.outputs), alloc)
    g = sequential_compose(first, z).graph
    h, other = embedded(g, x), embedded(g, y)
    if not is_subcircuit(h, g) or not is_subcircuit(other, g):
        return ["subcircuit images"]
    n_in = sum(1 for r in h.roots if r in x.graph.roots and r in x.inputs)
    rep = build_primitive(ElementaryGate(const("r"), n_in, len(h.roots) - n_in), alloc).graph
    mu = NodeRenaming({n: Node(n.id + 1000, n.sort) for n in g.nodes})
    sigma = Substitution({"x": const("k")})
    return crelation_violations(CIRCUITS, g, h, other=other, replacement=rep, renaming=mu, subst=sigma)
