"""Critical pairs, joinability and local confluence of graph rewrite systems."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .graph import Graph, Node, NodeRenaming, apply_label_subst, apply_renaming, graph_invariant
from .matching import find_isomorphism, overlaps
from .rewrite import CRelation, PLAIN, RewriteRule, merges, replace, rewrite_step
from .terms import fresh_renaming


class BudgetExceeded(Exception):
    """Merge enumeration was truncated; ``pairs`` holds what was found."""

    def __init__(self, pairs, budget):
        self.pairs = pairs
        self.budget = budget
        super().__init__(f"merge budget {budget} exhausted after {len(pairs)} critical pairs")


@dataclass(frozen=True)
class CriticalPair:
    left: Graph
    right: Graph
    overlap: Graph
    rules: tuple[str, str]
    trivial: bool
    shared: int = 0


def _renumber(graphs: Iterable[Graph], start: int) -> tuple[list[Graph], int]:
    out = []
    for g in graphs:
        ren = NodeRenaming({n: Node(start + i, n.sort) for i, n in enumerate(sorted(g.nodes))})
        out.append(apply_renaming(ren, g))
        start += len(g.nodes)
    return out, start


def _copies(r1: RewriteRule, r2: RewriteRule):
    (l1, q1, l2, q2), _ = _renumber((r1.lhs, r1.rhs, r2.lhs, r2.rhs), 0)
    v1 = l1.free_vars() | q1.free_vars()
    v2 = l2.free_vars() | q2.free_vars()
    ren = fresh_renaming(v2, v1)
    return l1, q1, apply_label_subst(ren, l2), apply_label_subst(ren, q2)


def _identify(h: Graph, shared: dict, start: int) -> Graph:
    m = {}
    nxt = start
    for n in sorted(h.nodes):
        if n in shared:
            m[n] = shared[n]
        else:
            m[n] = Node(nxt, n.sort)
            nxt += 1
    return apply_renaming(m, h)


def _same_pair(a: CriticalPair, b: CriticalPair) -> bool:
    return (find_isomorphism(a.left, b.left) is not None
            and find_isomorphism(a.right, b.right) is not None)


def critical_pairs(
    rules: Iterable[RewriteRule],
    c: CRelation = PLAIN,
    merge_budget: int = 200,
    *,
    include_trivial: bool = False,
) -> list[CriticalPair]:
    """Critical pairs of ``rules``, deduplicated up to isomorphism.

    Every unordered pair of rules is overlapped, each rule also with a
    renamed copy of itself. Raises :class:`BudgetExceeded` once more than
    ``merge_budget`` candidate merges were examined.
    """
    rules = sorted(rules, key=lambda r: r.name)
    found: list[CriticalPair] = []
    buckets: dict = {}
    spent = 0

    def emit(p: CriticalPair):
        key = (p.rules, p.trivial, graph_invariant(p.left), graph_invariant(p.right))
        bucket = buckets.setdefault(key, [])
        if any(_same_pair(p, q) for q in bucket):
            return
        bucket.append(p)
        found.append(p)

    for i, r1 in enumerate(rules):
        for r2 in rules[i:]:
            g, g2, h, h2 = _copies(r1, r2)
            top = max(n.id for x in (g, g2, h, h2) for n in x.nodes) + 1 if any(
                x.nodes for x in (g, g2, h, h2)) else 0
            cands = [(ov.shared, ov.subst) for ov in overlaps(g, h)]
            if include_trivial:
                cands.append(({}, None))
            for shared, _ in cands:
                hh = _identify(h, shared, top)
                for m, sigma, _e in merges(g, hh, c):
                    spent += 1
                    if spent > merge_budget:
                        raise BudgetExceeded(found, merge_budget)
                    left = replace(m, apply_label_subst(sigma, g), apply_label_subst(sigma, g2), check=False)
                    right = replace(m, apply_label_subst(sigma, hh), apply_label_subst(sigma, h2), check=False)
                    emit(CriticalPair(left, right, m, (r1.name, r2.name), not shared, len(shared)))
    return found


@dataclass(frozen=True)
class Joinable:
    witness: Graph
    depth: int = 0


@dataclass(frozen=True)
class Unknown:
    """No common reduct found. ``exhausted`` means both reduct sets were
    explored completely, so the pair is genuinely not joinable."""

    exhausted: bool
    explored: int = 0


class _IsoSet:
    def __init__(self):
        self.buckets: dict = {}

    def find(self, g: Graph):
        for h in self.buckets.get(graph_invariant(g), ()):
            if find_isomorphism(g, h) is not None:
                return h
        return None

    def add(self, g: Graph) -> bool:
        if self.find(g) is not None:
            return False
        self.buckets.setdefault(graph_invariant(g), []).append(g)
        return True


def _reducts(start: Graph, rules, c, fuel, cap):
    seen = _IsoSet()
    seen.add(start)
    layers = [[start]]
    complete = True
    total = 1
    for _ in range(fuel):
        nxt = []
        for g in layers[-1]:
            for step in rewrite_step(g, rules, c):
                if seen.add(step.graph):
                    nxt.append(step.graph)
                    total += 1
                    if total > cap:
                        return seen, layers + [nxt], False
        if not nxt:
            return seen, layers, complete
        layers.append(nxt)
    frontier_open = any(rewrite_step(g, rules, c) for g in layers[-1])
    return seen, layers, not frontier_open


def is_joinable(p: CriticalPair, rules: Iterable[RewriteRule], c: CRelation = PLAIN,
                fuel: int = 10, max_graphs: int = 2000):
    """Search for a common reduct of both sides, up to isomorphism."""
    rules = list(rules)
    if find_isomorphism(p.left, p.right) is not None:
        return Joinable(p.left, 0)
    left_seen, left_layers, left_done = _reducts(p.left, rules, c, fuel, max_graphs)
    right_seen, right_layers, right_done = _reducts(p.right, rules, c, fuel, max_graphs)
    for depth, layer in enumerate(right_layers):
        for g in layer:
            if left_seen.find(g) is not None:
                return Joinable(g, depth)
    explored = sum(len(x) for x in left_layers) + sum(len(x) for x in right_layers)
    return Unknown(left_done and right_done, explored)


@dataclass(frozen=True)
class LocallyConfluent:
    pairs_checked: int = 0


@dataclass(frozen=True)
class CounterexampleCandidate:
    pair: CriticalPair


@dataclass(frozen=True)
class Inconclusive:
    undecided: list = field(default_factory=list)
    truncated: bool = False


def check_local_confluence(rules: Iterable[RewriteRule], c: CRelation = PLAIN, fuel: int = 10,
                           merge_budget: int = 200):
    rules = list(rules)
    truncated = False
    try:
        pairs = critical_pairs(rules, c, merge_budget)
    except BudgetExceeded as exc:
        pairs, truncated = exc.pairs, True
    undecided = []
    for p in pairs:
        if p.trivial:
            continue
        verdict = is_joinable(p, rules, c, fuel)
        if isinstance(verdict, Joinable):
            continue
        if verdict.exhausted:
            return CounterexampleCandidate(p)
        undecided.append(p)
    if undecided or truncated:
        return Inconclusive(undecided, truncated)
    return LocallyConfluent(len(pairs))
