"""Rooted labeled graphs, node sorts, node renamings."""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from types import MappingProxyType

from .terms import Substitution, Term, anonymize, apply_substitution, variables


class GraphError(ValueError):
    """A graph failed its structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DomainError(KeyError):
    """A node renaming was applied to a node outside its domain."""


@dataclass(frozen=True, order=True)
class Sort:
    kind: str
    name: str = ""
    entries: int = 0
    outputs: int = 0

    def __str__(self):
        if self.kind == "gate":
            return f"gate({self.entries},{self.outputs})"
        if self.kind == "custom":
            return self.name
        return self.kind

    def __hash__(self):
        return hash((self.kind, self.name, self.entries, self.outputs))

    @property
    def is_gate(self) -> bool:
        return self.kind == "gate"


INTO = Sort("into")
FROM = Sort("from")


def Gate(entries: int, outputs: int) -> Sort:
    if entries < 0 or outputs < 0:
        raise ValueError("gate arities must be non-negative")
    return Sort("gate", "", entries, outputs)


def Custom(name: str) -> Sort:
    if name in ("into", "from", "gate"):
        raise ValueError(f"{name!r} is a builtin sort")
    return Sort("custom", name)


@dataclass(frozen=True, order=True)
class Node:
    id: int
    sort: Sort

    def __hash__(self):
        return self.id

    def __repr__(self):
        return f"n{self.id}:{self.sort}"


class NodePreorder:
    """Preorder on nodes. The default relates nodes of equal sort."""

    def leq(self, a: Node, b: Node) -> bool:
        return a.sort == b.sort

    def equiv(self, a: Node, b: Node) -> bool:
        return self.leq(a, b) and self.leq(b, a)


SAME_SORT = NodePreorder()


class Graph:
    """An immutable rooted graph ``(nodes, roots, edges, labels)``.

    ``labels`` must be defined on exactly the non-root nodes. Construction
    raises :class:`GraphError` on any violation unless ``check=False``.
    """

    __slots__ = ("nodes", "roots", "edges", "labels", "_hash", "_inner", "_succ", "_pred", "_profile")

    def __init__(
        self,
        nodes: Iterable[Node] = (),
        roots: Iterable[Node] = (),
        edges: Iterable[tuple[Node, Node]] = (),
        labels: Mapping[Node, Term] | None = None,
        *,
        check: bool = True,
    ):
        self.nodes = frozenset(nodes)
        self.roots = tuple(roots)
        self.edges = frozenset((a, b) for a, b in edges)
        self.labels = MappingProxyType(dict(labels or {}))
        self._hash = None
        self._inner = None
        self._succ = None
        self._pred = None
        self._profile = None
        if check:
            problems = validate_graph(self)
            if problems:
                raise GraphError(problems)

    @property
    def inner(self) -> frozenset[Node]:
        if self._inner is None:
            self._inner = self.nodes.difference(self.roots)
        return self._inner

    def _adjacency(self):
        succ = {n: set() for n in self.nodes}
        pred = {n: set() for n in self.nodes}
        for a, b in self.edges:
            succ.setdefault(a, set()).add(b)
            pred.setdefault(b, set()).add(a)
        self._succ = {k: frozenset(v) for k, v in succ.items()}
        self._pred = {k: frozenset(v) for k, v in pred.items()}

    def succ(self, n: Node) -> frozenset[Node]:
        if self._succ is None:
            self._adjacency()
        return self._succ.get(n, frozenset())

    def pred(self, n: Node) -> frozenset[Node]:
        if self._pred is None:
            self._adjacency()
        return self._pred.get(n, frozenset())

    def neighbours(self, n: Node) -> frozenset[Node]:
        return self.succ(n) | self.pred(n)

    def free_vars(self) -> frozenset[str]:
        out: set[str] = set()
        for t in self.labels.values():
            out |= variables(t)
        return frozenset(out)

    def is_ground(self) -> bool:
        return not self.free_vars()

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.roots == other.roots
            and self.edges == other.edges
            and dict(self.labels) == dict(other.labels)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nodes, self.roots, self.edges, frozenset(self.labels.items())))
        return self._hash

    def __repr__(self):
        labels = ", ".join(f"{n!r}={t}" for n, t in sorted(self.labels.items()))
        edges = ", ".join(f"{a.id}->{b.id}" for a, b in sorted(self.edges))
        roots = ", ".join(str(r.id) for r in self.roots)
        return f"Graph(roots=[{roots}], edges=[{edges}], labels=[{labels}])"


def validate_graph(g: Graph) -> list[str]:
    """Return every violated graph invariant (empty list when valid)."""
    problems = []
    if len(set(g.roots)) != len(g.roots):
        problems.append("root sequence has repetitions")
    for r in g.roots:
        if r not in g.nodes:
            problems.append(f"root {r!r} is not a node")
        if r in g.labels:
            problems.append(f"root carries label: {r!r}")
    for a, b in g.edges:
        if a not in g.nodes or b not in g.nodes:
            problems.append(f"edge {a!r}->{b!r} has an endpoint outside the graph")
    for n in g.labels:
        if n not in g.nodes:
            problems.append(f"label on absent node {n!r}")
    for n in g.nodes.difference(g.roots):
        if n not in g.labels:
            problems.append(f"inner node without label: {n!r}")
    ids = {}
    for n in g.nodes:
        if n.id in ids and ids[n.id] != n:
            problems.append(f"node id {n.id} used with two sorts")
        ids[n.id] = n
    return problems


EMPTY_GRAPH = Graph()


class NodeRenaming(Mapping):
    """Partial injective, sort- and preorder-preserving map on nodes."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[Node, Node] | Iterable[tuple[Node, Node]] = (),
                 preorder: NodePreorder = SAME_SORT):
        m = dict(mapping)
        if len(set(m.values())) != len(m):
            raise ValueError("node renaming is not injective")
        for a, b in m.items():
            if a.sort != b.sort:
                raise ValueError(f"node renaming changes sort: {a!r} -> {b!r}")
            if not preorder.equiv(a, b):
                raise ValueError(f"node renaming breaks the node preorder: {a!r} -> {b!r}")
        self._map = m

    def __getitem__(self, n):
        return self._map[n]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        return "NodeRenaming({" + ", ".join(f"{a.id}->{b.id}" for a, b in sorted(self._map.items())) + "})"

    def inverse(self) -> "NodeRenaming":
        return NodeRenaming({b: a for a, b in self._map.items()})

    def compose(self, first: Mapping[Node, Node]) -> "NodeRenaming":
        """``self ∘ first`` restricted to where both are defined."""
        return NodeRenaming({a: self._map[b] for a, b in first.items() if b in self._map})

    def extend(self, more: Mapping[Node, Node]) -> "NodeRenaming":
        m = dict(self._map)
        m.update(more)
        return NodeRenaming(m)


def identity_renaming(nodes: Iterable[Node]) -> NodeRenaming:
    return NodeRenaming({n: n for n in nodes})


def apply_renaming(m: Mapping[Node, Node], g: Graph) -> Graph:
    missing = [n for n in g.nodes if n not in m]
    if missing:
        raise DomainError(f"renaming undefined on {sorted(missing)!r}")
    return Graph(
        (m[n] for n in g.nodes),
        (m[r] for r in g.roots),
        ((m[a], m[b]) for a, b in g.edges),
        {m[n]: t for n, t in g.labels.items()},
        check=False,
    )


def apply_label_subst(s: Mapping[str, Term], g: Graph) -> Graph:
    if not s or not g.labels:
        return g
    return Graph(g.nodes, g.roots, g.edges,
                 {n: apply_substitution(s, t) for n, t in g.labels.items()}, check=False)


def rename_graph_vars(g: Graph, reserved: Iterable[str]) -> tuple[Graph, Substitution]:
    """Rename the label variables of ``g`` away from ``reserved``."""
    from .terms import fresh_renaming

    ren = fresh_renaming(g.free_vars(), reserved)
    return apply_label_subst(ren, g), ren


def max_node_id(*graphs: Graph) -> int:
    return max((n.id for g in graphs for n in g.nodes), default=-1)


def fresh_copy(g: Graph, *avoid: Graph, start: int | None = None) -> tuple[Graph, NodeRenaming]:
    """Copy of ``g`` on node ids above every id in ``g`` and ``avoid``."""
    base = max(max_node_id(g, *avoid) + 1, start or 0)
    ren = NodeRenaming({n: Node(base + i, n.sort) for i, n in enumerate(sorted(g.nodes))})
    return apply_renaming(ren, g), ren


class NodeAllocator:
    """Per-problem counter handing out node ids."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)

    def new(self, sort: Sort) -> Node:
        return Node(next(self._counter), sort)

    def bump(self, *graphs: Graph):
        nxt = max_node_id(*graphs) + 1
        current = next(self._counter)
        self._counter = itertools.count(max(nxt, current))


def root_similar(g: Graph, h: Graph, preorder: NodePreorder = SAME_SORT) -> bool:
    if len(g.roots) != len(h.roots):
        return False
    return all(a.sort == b.sort and preorder.equiv(a, b) for a, b in zip(g.roots, h.roots))


def graph_invariant(g: Graph, rounds: int = 3) -> tuple:
    """Isomorphism-invariant fingerprint, insensitive to variable names.

    Equal graphs up to node and variable renaming share a fingerprint; the
    converse is not guaranteed, so callers confirm with an exact check.
    """
    pos = {r: i for i, r in enumerate(g.roots)}
    colour = {
        n: hash((n.sort, pos.get(n, -1), anonymize(g.labels[n]) if n in g.labels else None))
        for n in g.nodes
    }
    for _ in range(rounds):
        colour = {
            n: hash((colour[n],
                     tuple(sorted(colour[s] for s in g.succ(n))),
                     tuple(sorted(colour[p] for p in g.pred(n))),
                     (n, n) in g.edges))
            for n in g.nodes
        }
    return (len(g.nodes), len(g.edges), tuple(r.sort for r in g.roots), tuple(sorted(colour.values())))


def disjoint(g: Graph, h: Graph) -> bool:
    return not (g.nodes & h.nodes)


NodePredicate = Callable[[Node, Node], bool]
