"""Brute-force semantics on small finite slices of the ground graphs.

Used to cross-check the prover: a bounded universe of ground graphs (one
representative per isomorphism class) and a union-find approximation of
the least congruence generated by a set of equations. Every merge is
recorded with the reason that licenses it, so traces can be audited.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from math import comb, factorial

from .graph import Custom, Graph, Node, Sort, apply_label_subst, graph_invariant
from .matching import find_isomorphism
from .rewrite import PLAIN, CRelation, RewriteRule, rewrite_step
from .superposition import Eq, Neq
from .terms import Term, const

HARD_NODE_CAP = 6
REACHABLE_NODE_CAP = 16
HARD_CANDIDATE_CAP = 2_000_000


class BoundsTooLarge(ValueError):
    pass


class OperandOutsideUniverse(LookupError):
    pass


@dataclass(frozen=True)
class Bounds:
    max_nodes: int = 3
    max_edges: int | None = None
    sorts: tuple[Sort, ...] = (Custom("n"),)
    labels: tuple[Term, ...] = (const("a"),)
    max_graphs: int = 20000


@dataclass
class GroundUniverse:
    graphs: list[Graph]
    bounds: Bounds
    complete: bool = True
    _buckets: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i, g in enumerate(self.graphs):
            self._buckets.setdefault(graph_invariant(g), []).append(i)

    def index(self, g: Graph) -> int | None:
        for i in self._buckets.get(graph_invariant(g), ()):
            if find_isomorphism(g, self.graphs[i]) is not None:
                return i
        return None

    def add(self, g: Graph) -> tuple[int, bool]:
        i = self.index(g)
        if i is not None:
            return i, False
        self.graphs.append(g)
        i = len(self.graphs) - 1
        self._buckets.setdefault(graph_invariant(g), []).append(i)
        return i, True

    def __len__(self):
        return len(self.graphs)

    def __contains__(self, g: Graph):
        return self.index(g) is not None


def _estimate(b: Bounds) -> int:
    total = 0
    for n in range(b.max_nodes + 1):
        roots = sum(comb(n, k) * factorial(k) for k in range(n + 1))
        total += len(b.sorts) ** n * roots * 2 ** (n * n) * max(1, len(b.labels)) ** n
    return total


def _check_bounds(b: Bounds, cap: int = HARD_NODE_CAP):
    if b.max_nodes > cap:
        raise BoundsTooLarge(f"{b.max_nodes} nodes exceeds the cap of {cap}")


def enumerate_universe(bounds: Bounds, c: CRelation = PLAIN) -> GroundUniverse:
    """Every ground graph within ``bounds`` in ``c``, one per isomorphism class."""
    _check_bounds(bounds)
    if _estimate(bounds) > HARD_CANDIDATE_CAP:
        raise BoundsTooLarge(f"about {_estimate(bounds)} candidates; tighten the bounds")
    u = GroundUniverse([], bounds)
    for n in range(bounds.max_nodes + 1):
        for sorts in itertools.combinations_with_replacement(bounds.sorts, n):
            nodes = [Node(i, s) for i, s in enumerate(sorts)]
            pairs = [(a, b) for a in nodes for b in nodes]
            for k in range(n + 1):
                for roots in itertools.permutations(nodes, k):
                    inner = [x for x in nodes if x not in roots]
                    for edges in _edge_sets(pairs, bounds.max_edges):
                        for labs in itertools.product(bounds.labels, repeat=len(inner)):
                            g = Graph(nodes, roots, edges, dict(zip(inner, labs)), check=False)
                            if c.member(g):
                                u.add(g)
    return u


def _edge_sets(pairs, cap):
    top = len(pairs) if cap is None else min(cap, len(pairs))
    for k in range(top + 1):
        yield from itertools.combinations(pairs, k)


def _instances(eq, alphabet: Sequence[Term]):
    """Ground instances of an equation with variables ranging over ``alphabet``."""
    names = sorted(eq.left.free_vars() | eq.right.free_vars())
    if not names:
        yield eq
        return
    for values in itertools.product(alphabet, repeat=len(names)):
        s = dict(zip(names, values))
        yield type(eq)(apply_label_subst(s, eq.left), apply_label_subst(s, eq.right))


def ground_rules(equations: Iterable[Eq], alphabet: Sequence[Term]) -> list[RewriteRule]:
    """Both orientations of every ground instance."""
    out = []
    for i, eq in enumerate(equations):
        for j, inst in enumerate(_instances(eq, alphabet)):
            out.append(RewriteRule(f"ax{i}.{j}", inst.left, inst.right))
            out.append(RewriteRule(f"ax{i}.{j}~", inst.right, inst.left))
    return out


def reachable_universe(seeds: Iterable[Graph], equations: Iterable[Eq], bounds: Bounds,
                       c: CRelation = PLAIN) -> GroundUniverse:
    """Graphs reachable from ``seeds`` by replacing equation instances in
    either direction, never exceeding ``bounds.max_nodes``."""
    _check_bounds(bounds, REACHABLE_NODE_CAP)
    rules = ground_rules(list(equations), bounds.labels)
    u = GroundUniverse([], bounds)
    todo = deque()
    for g in seeds:
        i, new = u.add(g)
        if new:
            todo.append(g)
    while todo:
        g = todo.popleft()
        for step in rewrite_step(g, rules, c):
            h = step.graph
            if len(h.nodes) > bounds.max_nodes or not c.member(h):
                continue
            _, new = u.add(h)
            if new:
                if len(u) > bounds.max_graphs:
                    u.complete = False
                    return u
                todo.append(h)
    return u


@dataclass(frozen=True)
class Merge:
    a: int
    b: int
    reason: str
    detail: tuple = ()


class CongruenceApprox:
    """Union-find over universe indices with a merge trace."""

    def __init__(self, universe: GroundUniverse):
        self.universe = universe
        self.parent = list(range(len(universe)))
        self.trace: list[Merge] = []

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int, reason: str, detail: tuple = ()) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        self.trace.append(Merge(a, b, reason, detail))
        return True

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def classes(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values())


def congruence_closure_bounded(equations: Iterable[Eq], u: GroundUniverse, c: CRelation = PLAIN, *,
                               until: tuple[int, int] | None = None) -> CongruenceApprox:
    """Least fixpoint of axiom instances and their replacement contexts inside ``u``.

    Contexts are closed over the axiom instances and over pairs already
    merged inside ``u``; a replacement result outside ``u`` is dropped.
    With ``until``, stop as soon as that pair of indices is merged.
    """
    cc = CongruenceApprox(u)

    def done():
        return until is not None and cc.same(*until)

    base = ground_rules(list(equations), u.bounds.labels)
    for r in base:
        i, j = u.index(r.lhs), u.index(r.rhs)
        if i is not None and j is not None:
            cc.union(i, j, "axiom", (r.name,))
    if done():
        return cc
    rules = list(base)
    used: set = set()
    while True:
        changed = False
        for gi, g in enumerate(u.graphs):
            for step in rewrite_step(g, rules, c):
                j = u.index(step.graph)
                if j is not None and cc.union(gi, j, "context", (step.rule,)):
                    changed = True
                    if done():
                        return cc
        fresh = []
        for i in range(len(u)):
            root = cc.find(i)
            if root != i and (i, root) not in used and _root_similar(u.graphs[i], u.graphs[root]):
                used.add((i, root))
                fresh.append(RewriteRule(f"u{i}>{root}", u.graphs[i], u.graphs[root]))
                fresh.append(RewriteRule(f"u{root}>{i}", u.graphs[root], u.graphs[i]))
        if not changed and not fresh:
            return cc
        rules += fresh


def _root_similar(g: Graph, h: Graph) -> bool:
    return len(g.roots) == len(h.roots) and all(a.sort == b.sort for a, b in zip(g.roots, h.roots))


@dataclass(frozen=True)
class Yes:
    trace: tuple = ()


@dataclass(frozen=True)
class Unknown:
    reason: str = ""


def entails_bounded(equations: Iterable[Eq], lit, u: GroundUniverse, c: CRelation = PLAIN,
                    closure: CongruenceApprox | None = None):
    """``Yes`` when the literal holds in every model, as far as ``u`` can tell."""
    for side in (lit.left, lit.right):
        if not side.is_ground():
            raise ValueError("entailment is only checked for ground literals")
    i, j = u.index(lit.left), u.index(lit.right)
    if i is None or j is None:
        raise OperandOutsideUniverse("literal side is not in the universe")
    if isinstance(lit, Neq):
        return Unknown("disequations need a countermodel")
    if i == j:
        return Yes()
    cc = closure or congruence_closure_bounded(equations, u, c, until=(i, j))
    if cc.same(i, j):
        return Yes(tuple(cc.trace))
    return Unknown("not merged inside the universe")


def replay_trace(equations: Iterable[Eq], u: GroundUniverse, trace: Iterable[Merge],
                 c: CRelation = PLAIN) -> bool:
    """Re-derive every merge of ``trace`` from the earlier ones."""
    equations = list(equations)
    base = {r.name: r for r in ground_rules(equations, u.bounds.labels)}
    parent = list(range(len(u)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for m in trace:
        a, b = u.graphs[m.a], u.graphs[m.b]
        if m.reason == "axiom":
            r = base[m.detail[0]]
            ok = find_isomorphism(a, r.lhs) is not None and find_isomorphism(b, r.rhs) is not None
        else:
            name = m.detail[0]
            if name in base:
                rule = base[name]
            else:
                x, y = (int(s) for s in name[1:].split(">"))
                if find(x) != find(y):
                    return False
                rule = RewriteRule(name, u.graphs[x], u.graphs[y])
            ok = any(find_isomorphism(s.graph, b) is not None for s in rewrite_step(a, [rule], c))
        if not ok:
            return False
        ra, rb = find(m.a), find(m.b)
        parent[max(ra, rb)] = min(ra, rb)
    return True
