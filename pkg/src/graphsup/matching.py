"""Backtracking search for embeddings, isomorphisms and overlaps of graphs.

All searches share one idea: extend an injective node map one node at a
time, checking sorts, edge agreement with the already mapped nodes, and
label compatibility through an incrementally grown substitution.

Label modes:

``equal``
    labels must coincide, no substitution is produced.
``match``
    pattern variables may be instantiated, host variables are rigid.
``unify``
    both sides may be instantiated (used for most general unifiers of
    whole graphs).
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterator, Mapping
from dataclasses import dataclass

from .graph import Graph, Node, NodePreorder, SAME_SORT, apply_label_subst
from .terms import (
    App,
    NoUnifier,
    Substitution,
    Var,
    apply_substitution,
    fresh_renaming,
    unify,
)

MODES = ("equal", "match", "unify")


@dataclass(frozen=True)
class Embedding:
    nodes: Mapping[Node, Node]
    subst: Substitution


def _label_step(mode, a, b, sub, rigid):
    """Extend ``sub`` so that ``sub(a) == sub(b)``; ``None`` on failure."""
    if mode == "equal":
        return sub if a == b else None
    if isinstance(a, App) and isinstance(b, App) and (a.symbol != b.symbol or len(a.args) != len(b.args)):
        return None
    try:
        return unify([(a, b)], rigid=rigid, base=sub)
    except NoUnifier:
        return None


def _compatible_heads(mode, a, b) -> bool:
    if isinstance(a, App) and isinstance(b, App):
        return a.symbol == b.symbol and len(a.args) == len(b.args)
    if mode == "equal":
        return a == b
    if mode == "match" and isinstance(b, Var):
        return isinstance(a, Var)
    return True


class _Search:
    def __init__(self, pattern: Graph, host: Graph, mode: str, iso: bool,
                 subst: Mapping | None, preorder: NodePreorder, fixed: Mapping[Node, Node] | None):
        if mode not in MODES:
            raise ValueError(f"unknown label mode {mode!r}")
        self.mode = mode
        self.iso = iso
        self.preorder = preorder
        self.back = None
        self.pattern_vars = pattern.free_vars()
        if mode == "match":
            clash = pattern.free_vars() & host.free_vars()
            if clash:
                ren = fresh_renaming(pattern.free_vars(), pattern.free_vars() | host.free_vars())
                pattern = apply_label_subst(ren, pattern)
                self.back = ren
            self.rigid = host.free_vars()
        else:
            self.rigid = frozenset()
        self.p = pattern
        self.h = host
        self.sub = Substitution(subst or {})
        self.fixed = dict(fixed or {})
        self.host_roots = frozenset(host.roots)
        self.by_sort: dict = {}
        for n in host.nodes:
            self.by_sort.setdefault(n.sort, []).append(n)
        for v in self.by_sort.values():
            v.sort()
        self.order = self._order()

    def _admissible(self, p: Node, c: Node) -> bool:
        h = self.h
        if p.sort != c.sort or (self.preorder is not SAME_SORT and not self.preorder.equiv(p, c)):
            return False
        if p in self.p.labels:
            if c in self.host_roots:
                return False
            if len(self.p.succ(p)) != len(h.succ(c)) or len(self.p.pred(p)) != len(h.pred(c)):
                return False
            if not _compatible_heads(self.mode, self.p.labels[p], h.labels[c]):
                return False
        return ((p, p) in self.p.edges) == ((c, c) in h.edges)

    def _candidates_static(self, p: Node) -> list[Node]:
        if self.iso and p not in self.p.labels:
            return []
        return [c for c in self.by_sort.get(p.sort, ()) if self._admissible(p, c)]

    def _order(self) -> list[Node]:
        static = {p: self._candidates_static(p) for p in self.p.nodes}
        self.static = static
        remaining = set(self.p.nodes) - set(self.fixed)
        placed = set(self.fixed)
        order = []
        while remaining:
            best = min(
                remaining,
                key=lambda n: (-len(self.p.neighbours(n) & placed), len(static[n]), n),
            )
            order.append(best)
            placed.add(best)
            remaining.discard(best)
        return order

    def _consistent(self, p: Node, c: Node, m: dict) -> bool:
        pe, he = self.p.edges, self.h.edges
        for q in self.p.neighbours(p):
            if q in m:
                k = m[q]
                if ((p, q) in pe) != ((c, k) in he) or ((q, p) in pe) != ((k, c) in he):
                    return False
        for k in self.h.neighbours(c):
            q = self.inv.get(k)
            if q is not None and q not in self.p.neighbours(p):
                return False
        return True

    def run(self) -> Iterator[Embedding]:
        p, h = self.p, self.h
        if self.iso:
            if len(p.nodes) != len(h.nodes) or len(p.edges) != len(h.edges) or len(p.roots) != len(h.roots):
                return
            for a, b in zip(p.roots, h.roots):
                if a.sort != b.sort or not self.preorder.equiv(a, b):
                    return
                if self.fixed.get(a, b) != b:
                    return
                self.fixed[a] = b
            self.order = self._order()
        else:
            if len(p.nodes) > len(h.nodes) or len(p.edges) > len(h.edges):
                return
        m: dict[Node, Node] = {}
        self.inv: dict[Node, Node] = {}
        sub = self.sub
        for a, b in self.fixed.items():
            if a.sort != b.sort or b in self.inv or b not in h.nodes:
                return
            if a not in p.nodes or not self._admissible(a, b):
                return
            if not self._consistent(a, b, m):
                return
            m[a] = b
            self.inv[b] = a
            if a in p.labels:
                sub = _label_step(self.mode, apply_substitution(sub, p.labels[a]),
                                  apply_substitution(sub, h.labels[b]), sub, self.rigid)
                if sub is None:
                    return
        yield from self._extend(0, m, sub)

    def _extend(self, i: int, m: dict, sub: Substitution) -> Iterator[Embedding]:
        if i == len(self.order):
            yield self._result(m, sub)
            return
        p = self.order[i]
        anchor = next((q for q in sorted(self.p.neighbours(p)) if q in m), None)
        if anchor is None:
            cands = self.static[p]
        else:
            k = m[anchor]
            near = set()
            if p in self.p.succ(anchor):
                near |= self.h.succ(k)
            if p in self.p.pred(anchor):
                near |= self.h.pred(k)
            allowed = set(self.static[p])
            cands = sorted(c for c in near if c in allowed)
        for c in cands:
            if c in self.inv or not self._consistent(p, c, m):
                continue
            nsub = sub
            if p in self.p.labels:
                nsub = _label_step(self.mode, apply_substitution(sub, self.p.labels[p]),
                                   apply_substitution(sub, self.h.labels[c]), sub, self.rigid)
                if nsub is None:
                    continue
            m[p] = c
            self.inv[c] = p
            yield from self._extend(i + 1, m, nsub)
            del m[p]
            del self.inv[c]

    def _result(self, m, sub) -> Embedding:
        if self.back is not None:
            sub = Substitution({x: apply_substitution(sub, self.back.get(x, Var(x))) for x in self.pattern_vars})
        return Embedding(dict(m), sub)


def _profile(g: Graph):
    """Sort counts, and counts of inner nodes by (sort, label head)."""
    if g._profile is None:
        sorts = Counter(n.sort for n in g.nodes)
        heads = Counter((n.sort, t.symbol, len(t.args)) for n, t in g.labels.items() if isinstance(t, App))
        g._profile = (sorts, heads, any(isinstance(t, Var) for t in g.labels.values()))
    return g._profile


def _may_fit(pattern: Graph, host: Graph, mode: str) -> bool:
    ps, ph, _ = _profile(pattern)
    hs, hh, host_vars = _profile(host)
    if any(hs[k] < v for k, v in ps.items()):
        return False
    if mode == "unify" and host_vars:
        return True
    return all(hh[k] >= v for k, v in ph.items())


def find_embeddings(
    pattern: Graph,
    host: Graph,
    *,
    mode: str = "match",
    subst: Mapping | None = None,
    fixed: Mapping[Node, Node] | None = None,
    preorder: NodePreorder = SAME_SORT,
) -> Iterator[Embedding]:
    """Enumerate ``(μ, σ)`` such that ``σ(μ(pattern))`` is a subgraph of ``host``.

    In ``match`` mode ``σ`` only touches pattern variables; in ``unify``
    mode ``σ(μ(pattern))`` is a subgraph of ``σ(host)``.
    """
    if not _may_fit(pattern, host, mode):
        return iter(())
    return _Search(pattern, host, mode, False, subst, preorder, fixed).run()


def find_isomorphisms(g: Graph, h: Graph, *, mode: str = "equal", subst=None,
                      preorder: NodePreorder = SAME_SORT) -> Iterator[Embedding]:
    if len(g.nodes) != len(h.nodes) or not _may_fit(g, h, mode):
        return iter(())
    return _Search(g, h, mode, True, subst, preorder, None).run()


def find_isomorphism(g: Graph, h: Graph, *, mode: str = "equal", preorder: NodePreorder = SAME_SORT):
    """A root-order preserving isomorphism ``g -> h`` or ``None``."""
    return next(find_isomorphisms(g, h, mode=mode, preorder=preorder), None)


def isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def _is_var_renaming(sub: Mapping) -> bool:
    vals = list(sub.values())
    return all(isinstance(v, Var) for v in vals) and len(set(vals)) == len(vals)


def variant(g: Graph, h: Graph) -> bool:
    """Isomorphic up to an injective renaming of label variables."""
    if g.is_ground() and h.is_ground():
        return isomorphic(g, h)
    if len(g.free_vars()) != len(h.free_vars()):
        return False
    return any(_is_var_renaming(e.subst) for e in find_isomorphisms(g, h, mode="match"))


def instance_of(general: Graph, specific: Graph):
    """An ``Embedding`` showing ``specific ≅ σ(general)``, or ``None``."""
    return next(find_isomorphisms(general, specific, mode="match"), None)


@dataclass(frozen=True)
class Overlap:
    """Identification of some nodes of ``h`` with nodes of ``g``.

    ``shared`` maps nodes of ``h`` to nodes of ``g``; ``subst`` unifies
    the labels of identified nodes that are inner on both sides.
    """

    shared: Mapping[Node, Node]
    subst: Substitution


def overlaps(g: Graph, h: Graph, *, subst: Mapping | None = None,
             preorder: NodePreorder = SAME_SORT) -> Iterator[Overlap]:
    """Enumerate nonempty node identifications under which ``g`` and ``h``
    can both remain subgraphs of their union.

    ``g`` and ``h`` must be node-disjoint. The constraints are local:
    identified pairs agree on edges among identified nodes, a node with a
    neighbour outside the overlap on one side must be a root on the other,
    and labels of nodes inner on both sides unify.
    """
    if g.nodes & h.nodes:
        raise ValueError("overlap operands must be node-disjoint")
    hn = sorted(h.nodes)
    g_roots, h_roots = frozenset(g.roots), frozenset(h.roots)
    start = Substitution(subst or {})

    def ok_final(m: dict) -> bool:
        img = set(m.values())
        for a, b in m.items():
            if any(x not in m for x in h.neighbours(a)) and b not in g_roots:
                return False
            if any(y not in img for y in g.neighbours(b)) and a not in h_roots:
                return False
        return True

    def rec(i: int, m: dict, used: set, sub: Substitution):
        if i == len(hn):
            if m and ok_final(m):
                yield Overlap(dict(m), sub)
            return
        a = hn[i]
        for b in sorted(g.nodes):
            if b in used or b.sort != a.sort or not preorder.equiv(a, b):
                continue
            if ((a, a) in h.edges) != ((b, b) in g.edges):
                continue
            if any(((a, x) in h.edges) != ((b, y) in g.edges) or ((x, a) in h.edges) != ((y, b) in g.edges)
                   for x, y in m.items()):
                continue
            nsub = sub
            if a in h.labels and b in g.labels:
                nsub = _label_step("unify", apply_substitution(sub, h.labels[a]),
                                   apply_substitution(sub, g.labels[b]), sub, ())
                if nsub is None:
                    continue
            m[a] = b
            used.add(b)
            yield from rec(i + 1, m, used, nsub)
            del m[a]
            used.discard(b)
        yield from rec(i + 1, m, used, sub)

    yield from rec(0, {}, set(), start)

