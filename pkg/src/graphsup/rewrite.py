"""Subgraphs, replacement, merges, C-relations and rule-based rewriting."""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from .graph import (
    Graph,
    Node,
    NodePreorder,
    NodeRenaming,
    SAME_SORT,
    apply_label_subst,
    apply_renaming,
    max_node_id,
    rename_graph_vars,
    root_similar,
)
from .matching import find_embeddings
from .terms import NoUnifier, Substitution, apply_substitution, unify


class PreconditionError(ValueError):
    pass


class Incompatible(Exception):
    """Shared inner nodes carry labels without a common instance."""


class EdgeShapeError(ValueError):
    pass


def subgraph_violations(h: Graph, g: Graph) -> list[str]:
    """Which of the six subgraph conditions fail for ``h`` inside ``g``."""
    out = []
    if not h.nodes <= g.nodes:
        out.append("nodes not included")
        return out
    if not h.edges <= g.edges:
        out.append("edges not included")
    h_roots = frozenset(h.roots)
    for a, b in g.edges:
        ina, inb = a in h.nodes, b in h.nodes
        if ina and inb and (a, b) not in h.edges:
            out.append(f"edge {a.id}->{b.id} between nodes of the subgraph is missing")
        elif ina != inb:
            inside = a if ina else b
            if inside not in h_roots:
                out.append(f"frontier edge {a.id}->{b.id} touches inner node {inside.id}")
    for r in g.roots:
        if r in h.nodes and r not in h_roots:
            out.append(f"host root {r.id} is inner in the subgraph")
    for n in h.inner:
        if g.labels.get(n) != h.labels.get(n):
            out.append(f"label of {n.id} differs from the host")
    return out


def is_subgraph(h: Graph, g: Graph) -> bool:
    return not subgraph_violations(h, g)


def is_substitutable(h2: Graph, h1: Graph, g: Graph, preorder: NodePreorder = SAME_SORT) -> bool:
    if not is_subgraph(h1, g):
        raise PreconditionError("graph to be replaced is not a subgraph of the host")
    return _substitutable(h2, h1, g, preorder)


def _substitutable(h2, h1, g, preorder=SAME_SORT) -> bool:
    return root_similar(h1, h2, preorder) and (g.nodes & h2.nodes) <= h1.nodes


def replace(g: Graph, h: Graph, h2: Graph, *, check: bool = True) -> Graph:
    """``g[h -> h2]``: splice ``h2`` into ``g`` in place of its subgraph ``h``."""
    if check:
        if not is_subgraph(h, g):
            raise PreconditionError("graph to be replaced is not a subgraph of the host")
        if not _substitutable(h2, h, g):
            raise PreconditionError("replacement is not substitutable")
    mu = dict(zip(h.roots, h2.roots))
    back = dict(zip(h2.roots, h.roots))
    kept = g.nodes - h.nodes
    for n in kept:
        mu[n] = n
    nodes = kept | h2.nodes
    roots = tuple(mu[r] for r in g.roots)
    edges = {(mu[a], mu[b]) for a, b in g.edges - h.edges}
    edges |= h2.edges
    root_set = frozenset(roots)
    labels = {}
    h2_inner = h2.inner
    for n in nodes:
        if n in root_set:
            continue
        if n in h2_inner:
            labels[n] = h2.labels[n]
        elif n not in h2.nodes:
            labels[n] = g.labels[n]
        else:
            src = back[n]
            if src in g.labels:
                labels[n] = g.labels[src]
    return Graph(nodes, roots, edges, labels, check=check)


def label_mgu(g1: Graph, g2: Graph, subst: Mapping | None = None) -> Substitution:
    """Most general unifier of the labels of nodes inner in both graphs."""
    pairs = [(g1.labels[n], g2.labels[n]) for n in sorted(g1.nodes & g2.nodes)
             if n in g1.labels and n in g2.labels]
    try:
        return unify(pairs, base=subst)
    except NoUnifier as exc:
        raise Incompatible(str(exc)) from None


def merge_edge_candidates(g1: Graph, g2: Graph) -> list[tuple[Node, Node]]:
    """Edges allowed in an E-merge: between a root of one graph outside the
    other and a root of the other outside the first, either direction."""
    r1 = [r for r in g1.roots if r not in g2.nodes]
    r2 = [r for r in g2.roots if r not in g1.nodes]
    out = []
    for a in r1:
        for b in r2:
            out.append((a, b))
            out.append((b, a))
    return out


def e_merge(g1: Graph, g2: Graph, e: Iterable[tuple[Node, Node]] = (), *,
            subst: Mapping | None = None) -> tuple[Graph, Substitution]:
    """The E-merge of ``g1`` and ``g2`` together with the label mgu.

    Roots keep the order of ``g1`` followed by the new ones of ``g2``.
    """
    e = frozenset(e)
    allowed = set(merge_edge_candidates(g1, g2))
    bad = [x for x in e if x not in allowed]
    if bad:
        raise EdgeShapeError(f"edges {bad!r} do not join external roots of the two graphs")
    sigma = Substitution(subst) if subst is not None else label_mgu(g1, g2)
    inner = g1.inner | g2.inner
    roots = []
    for r in g1.roots + g2.roots:
        if r not in inner and r not in roots:
            roots.append(r)
    labels = {n: apply_substitution(sigma, t) for n, t in g2.labels.items()}
    labels.update({n: apply_substitution(sigma, t) for n, t in g1.labels.items()})
    return Graph(g1.nodes | g2.nodes, roots, g1.edges | g2.edges | e, labels, check=False), sigma


def frontier_merge(g1: Graph, g2: Graph, host: Graph) -> Graph:
    """E-merge using the host edges between the external roots."""
    e = [x for x in merge_edge_candidates(g1, g2) if x in host.edges]
    return e_merge(g1, g2, e)[0]


def _all_edge_subsets(g1: Graph, g2: Graph) -> Iterator[frozenset]:
    cands = merge_edge_candidates(g1, g2)
    for k in range(len(cands) + 1):
        for combo in itertools.combinations(cands, k):
            yield frozenset(combo)


@dataclass(frozen=True)
class CRelation:
    """A class of graphs with a rewritable-subgraph relation.

    ``edge_sets`` proposes E sets for merges inside the class; callers cap
    how many they consume. ``arrange`` reorders the roots of a merge into
    the shape the class demands.
    """

    name: str
    member: Callable[[Graph], bool]
    sub: Callable[[Graph, Graph], bool]
    choose_merge: Callable[[Graph, Graph, Graph], Graph]
    edge_sets: Callable[[Graph, Graph], Iterator[frozenset]] = _all_edge_subsets
    arrange: Callable[[Graph], Graph] = lambda g: g


def _always(_g: Graph) -> bool:
    return True


PLAIN = CRelation("plain", _always, is_subgraph, frontier_merge)


def merges(g1: Graph, g2: Graph, c: CRelation = PLAIN, *, subst=None) -> Iterator[tuple[Graph, Substitution, frozenset]]:
    """Class members that are E-merges of ``g1`` and ``g2``.

    Both operands (after the mgu) must stand in ``c.sub`` to the merge.
    """
    try:
        sigma = label_mgu(g1, g2, subst)
    except Incompatible:
        return
    s1, s2 = apply_label_subst(sigma, g1), apply_label_subst(sigma, g2)
    for e in c.edge_sets(g1, g2):
        m = c.arrange(e_merge(g1, g2, e, subst=sigma)[0])
        if c.member(m) and c.sub(s1, m) and c.sub(s2, m):
            yield m, sigma, e


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Graph
    rhs: Graph

    def __post_init__(self):
        if not root_similar(self.lhs, self.rhs):
            raise ValueError(f"rule {self.name}: sides are not root-similar")

    def reversed(self, name: str | None = None) -> "RewriteRule":
        return RewriteRule(name or f"{self.name}~", self.rhs, self.lhs)


@dataclass(frozen=True)
class MatchResult:
    rule: str
    renaming: NodeRenaming
    label_subst: Substitution
    image: Graph
    replacement: Graph

    @property
    def matched_ids(self) -> tuple[int, ...]:
        return tuple(sorted(n.id for n in self.image.nodes))


def _fresh_side(side: Graph, start: int) -> NodeRenaming:
    return NodeRenaming({n: Node(start + i, n.sort) for i, n in enumerate(sorted(side.nodes))})


def match_rule(r: RewriteRule, g: Graph, c: CRelation = PLAIN, *, limit: int | None = None) -> list[MatchResult]:
    """Every way the rule's left side occurs as a ``c``-subgraph of ``g``.

    Right-hand nodes are always renamed onto ids unused by ``g``.
    """
    lhs, rhs = r.lhs, r.rhs
    host_vars = g.free_vars()
    if (lhs.free_vars() | rhs.free_vars()) & host_vars:
        both = Graph(lhs.nodes | rhs.nodes, (), lhs.edges | rhs.edges,
                     {**rhs.labels, **lhs.labels}, check=False)
        _, ren = rename_graph_vars(both, host_vars)
        lhs, rhs = apply_label_subst(ren, lhs), apply_label_subst(ren, rhs)
    start = max_node_id(g) + 1
    fresh = _fresh_side(rhs, start)
    out = []
    for emb in find_embeddings(lhs, g, mode="match"):
        mu = NodeRenaming(emb.nodes)
        image = apply_label_subst(emb.subst, apply_renaming(mu, lhs))
        if not c.sub(image, g):
            continue
        replacement = apply_label_subst(emb.subst, apply_renaming(fresh, rhs))
        out.append(MatchResult(r.name, mu.extend(fresh), emb.subst, image, replacement))
        if limit is not None and len(out) >= limit:
            break
    out.sort(key=lambda m: m.matched_ids)
    return out


@dataclass(frozen=True)
class Step:
    graph: Graph
    rule: str
    match: MatchResult


def _ordered(rules: Iterable[RewriteRule]) -> list[RewriteRule]:
    return sorted(rules, key=lambda r: r.name)


def apply_match(g: Graph, m: MatchResult) -> Graph:
    return replace(g, m.image, m.replacement, check=False)


def rewrite_step(g: Graph, rules: Iterable[RewriteRule], c: CRelation = PLAIN) -> list[Step]:
    steps = []
    for r in _ordered(rules):
        for m in match_rule(r, g, c):
            steps.append(Step(apply_match(g, m), r.name, m))
    return steps


def first_step(g: Graph, rules: Sequence[RewriteRule], c: CRelation = PLAIN) -> Step | None:
    for r in _ordered(rules):
        ms = match_rule(r, g, c)
        if ms:
            return Step(apply_match(g, ms[0]), r.name, ms[0])
    return None


@dataclass(frozen=True)
class NormalForm:
    graph: Graph
    steps: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class FuelExhausted:
    graph: Graph
    steps: tuple = field(default=(), repr=False)


def normalize(g: Graph, rules: Iterable[RewriteRule], c: CRelation = PLAIN, fuel: int = 100):
    """Rewrite with the first match in (rule name, matched ids) order until
    no rule applies or ``fuel`` steps were taken."""
    rules = _ordered(rules)
    trace = []
    for _ in range(fuel):
        step = first_step(g, rules, c)
        if step is None:
            return NormalForm(g, tuple(trace))
        trace.append((step.rule, step.match.matched_ids))
        g = step.graph
    if first_step(g, rules, c) is None:
        return NormalForm(g, tuple(trace))
    return FuelExhausted(g, tuple(trace))


def crelation_violations(
    c: CRelation,
    host: Graph,
    h: Graph,
    *,
    other: Graph | None = None,
    replacement: Graph | None = None,
    renaming: Mapping[Node, Node] | None = None,
    subst: Mapping | None = None,
) -> list[str]:
    """Check the closure properties of a C-relation on one instance.

    ``h`` must satisfy ``c.sub(h, host)``. ``other`` is a second
    ``c``-subgraph of ``host``; ``replacement`` a class member substitutable
    for ``h``; ``renaming`` covers the nodes of ``host``.
    """
    out = []
    if not c.sub(h, host):
        return ["premise: h is not related to host"]
    if not is_subgraph(h, host):
        out.append("inclusion in the subgraph relation")
    if not c.sub(host, host) or not c.sub(h, h):
        out.append("reflexivity")
    if not (c.member(h) and c.member(host)):
        out.append("1: class membership")
    if replacement is not None and c.member(replacement) and _substitutable(replacement, h, host):
        g2 = replace(host, h, replacement)
        if not c.sub(replacement, g2):
            out.append("2: preservation under replacement")
    if renaming is not None:
        if not c.sub(apply_renaming(renaming, h), apply_renaming(renaming, host)):
            out.append("3: renaming")
    if other is not None and c.sub(other, host):
        if not (h.nodes & other.nodes) and replacement is not None and c.member(replacement) \
                and _substitutable(replacement, h, host):
            if not c.sub(other, replace(host, h, replacement)):
                out.append("4: disjoint replacement")
        try:
            m = c.choose_merge(h, other, host)
        except Incompatible:
            m = None
        if m is None or not is_merge_of(m, h, other) or not c.sub(m, host) \
                or not c.sub(h, m) or not c.sub(other, m):
            out.append("5: merge existence")
        if c.sub(other, h) and not c.sub(other, host):
            out.append("transitivity")
    if subst is not None:
        if not c.sub(apply_label_subst(subst, h), apply_label_subst(subst, host)):
            out.append("6: substitution")
    return out


def is_merge_of(m: Graph, g1: Graph, g2: Graph) -> bool:
    """Whether ``m`` is some E-merge of ``g1`` and ``g2``."""
    if m.nodes != g1.nodes | g2.nodes:
        return False
    extra = m.edges - g1.edges - g2.edges
    allowed = set(merge_edge_candidates(g1, g2))
    if not extra <= allowed:
        return False
    try:
        expected, _ = e_merge(g1, g2, extra)
    except Incompatible:
        return False
    return expected.nodes == m.nodes and set(expected.roots) == set(m.roots) \
        and expected.edges == m.edges and dict(expected.labels) == dict(m.labels)
