"""Random generators shared by the test modules."""

from __future__ import annotations

import random
from pathlib import Path

from graphsup.fileformat import parse_problem
from graphsup.graph import Custom, Graph, Node
from graphsup.terms import Var, const, fn

S = Custom("s")
T = Custom("t")
GROUND_LABELS = (const("a"), const("b"), fn("f", const("a")))
OPEN_LABELS = GROUND_LABELS + (Var("x"), fn("f", Var("y")))


def random_graph(rng: random.Random, max_nodes: int = 8, *, start: int = 0, sorts=(S,), labels=GROUND_LABELS,
                 edge_p: float = 0.25, root_p: float = 0.3, min_nodes: int = 0) -> Graph:
    n = rng.randint(min_nodes, max_nodes)
    nodes = [Node(start + i, rng.choice(sorts)) for i in range(n)]
    roots = [x for x in nodes if rng.random() < root_p]
    rng.shuffle(roots)
    edges = [(a, b) for a in nodes for b in nodes if rng.random() < edge_p / (3 if a == b else 1)]
    inner = [x for x in nodes if x not in roots]
    return Graph(nodes, roots, edges, {x: rng.choice(labels) for x in inner})


def random_subgraph(rng: random.Random, g: Graph, *, extra_root_p: float = 0.2) -> Graph:
    """A random ``H ⊑ g``: an induced node subset with every frontier node a root."""
    chosen = {x for x in g.nodes if rng.random() < 0.5}
    edges = [(a, b) for a, b in g.edges if a in chosen and b in chosen]
    must = {x for x in chosen if x in g.roots}
    for a, b in g.edges:
        if a in chosen and b not in chosen:
            must.add(a)
        if b in chosen and a not in chosen:
            must.add(b)
    roots = list(must | {x for x in chosen if rng.random() < extra_root_p})
    roots.sort()
    rng.shuffle(roots)
    labels = {x: g.labels[x] for x in chosen if x not in roots}
    return Graph(chosen, roots, edges, labels)


def random_replacement(rng: random.Random, h: Graph, start: int, *, max_inner: int = 3, reuse_p: float = 0.3,
                       labels=GROUND_LABELS) -> Graph:
    """A graph root-similar to ``h`` whose nodes are fresh (ids from ``start``)
    or taken from ``h``."""
    nxt = start
    used = set()
    roots = []
    for r in h.roots:
        pool = [x for x in sorted(h.nodes) if x.sort == r.sort and x not in used]
        if pool and rng.random() < reuse_p:
            x = rng.choice(pool)
        else:
            x = Node(nxt, r.sort)
            nxt += 1
        used.add(x)
        roots.append(x)
    inner = []
    for _ in range(rng.randint(0, max_inner)):
        pool = [x for x in sorted(h.nodes) if x not in used]
        if pool and rng.random() < reuse_p / 2:
            x = rng.choice(pool)
        else:
            x = Node(nxt, S)
            nxt += 1
        used.add(x)
        inner.append(x)
    nodes = roots + inner
    edges = [(a, b) for a in nodes for b in nodes if a != b and rng.random() < 0.3]
    return Graph(nodes, roots, edges, {x: rng.choice(labels) for x in inner})


def fresh_start(*graphs: Graph) -> int:
    return 1 + max((n.id for g in graphs for n in g.nodes), default=-1)


FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str):
    return parse_problem((FIXTURES / name).read_text(encoding="utf-8"))
