"""Graph literals, the superposition rules, redundancy and saturation."""

from __future__ import annotations

import time
import heapq
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import Union

from .graph import Graph, Node, apply_label_subst, apply_renaming, root_similar
from .matching import find_embeddings, find_isomorphisms, overlaps
from .order import NODE_COUNT, GraphOrder
from .rewrite import PLAIN, CRelation, merges, replace
from .terms import Substitution, Var, fresh_renaming


@dataclass(frozen=True)
class Eq:
    left: Graph
    right: Graph

    def __post_init__(self):
        if not root_similar(self.left, self.right):
            raise ValueError("sides of an equation must be root-similar")

    def __str__(self):
        return f"{self.left!r} ≈ {self.right!r}"


@dataclass(frozen=True)
class Neq:
    left: Graph
    right: Graph

    def __post_init__(self):
        if not root_similar(self.left, self.right):
            raise ValueError("sides of a disequation must be root-similar")

    def __str__(self):
        return f"{self.left!r} ≉ {self.right!r}"


class _Falsum:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "⊥"

    def __reduce__(self):
        return (_Falsum, ())


FALSUM = _Falsum()
Literal = Union[Eq, Neq, _Falsum]


def free_vars(lit) -> frozenset[str]:
    if lit is FALSUM:
        return frozenset()
    return lit.left.free_vars() | lit.right.free_vars()


def is_ground(lit) -> bool:
    return not free_vars(lit)


def canonical(g: Graph, start: int = 0) -> Graph:
    """Renumber nodes to ``start, start+1, ...`` in id order."""
    m = {n: Node(start + i, n.sort) for i, n in enumerate(sorted(g.nodes))}
    return apply_renaming(m, g)


def normalize_literal(lit):
    if lit is FALSUM:
        return lit
    return type(lit)(canonical(lit.left), canonical(lit.right))


def _sides(lit):
    yield lit.left, lit.right
    yield lit.right, lit.left


def _rename_apart(fixed, other):
    """Copy of ``other`` sharing neither nodes nor variables with ``fixed``."""
    if other is FALSUM:
        return other
    top = 1 + max((n.id for g in (fixed.left, fixed.right) for n in g.nodes), default=-1)
    left = canonical(other.left, top)
    right = canonical(other.right, top + len(left.nodes))
    ren = fresh_renaming(free_vars(other), free_vars(fixed))
    return type(other)(apply_label_subst(ren, left), apply_label_subst(ren, right))


def _fresh_above(g: Graph, *avoid: Graph) -> Graph:
    top = 1 + max((n.id for x in avoid for n in x.nodes), default=-1)
    return canonical(g, top)


@dataclass(frozen=True)
class InferenceRecord:
    id: int
    rule: str
    premises: tuple[int, ...]
    conclusion: object
    unifier: Substitution = field(default_factory=Substitution)
    detail: tuple = ()


@dataclass
class Stats:
    generated: int = 0
    kept: int = 0
    given: int = 0
    redundant: int = 0
    merges: int = 0
    merge_truncations: int = 0
    seconds: float = 0.0

    def as_dict(self):
        return dict(self.__dict__)


def infer_sup_pos(l1: Eq, l2: Eq, order: GraphOrder = NODE_COUNT, c: CRelation = PLAIN,
                  merge_budget: int = 500, stats: Stats | None = None) -> list:
    """Positive superposition conclusions of two equations.

    Returns ``(literal, unifier, detail)`` triples. Premises are renamed
    apart first, so callers may pass the same literal twice.
    """
    l2 = _rename_apart(l1, l2)
    out = []
    spent = 0
    for g, g2 in _sides(l1):
        for h, h2 in _sides(l2):
            if order.greater(g2, g) or order.greater(h2, h):
                continue
            top = 1 + max(n.id for x in (l1.left, l1.right, l2.left, l2.right) for n in x.nodes) \
                if any(x.nodes for x in (l1.left, l1.right, l2.left, l2.right)) else 0
            for ov in overlaps(g, h):
                ident = {}
                nxt = top
                for n in sorted(h.nodes):
                    if n in ov.shared:
                        ident[n] = ov.shared[n]
                    else:
                        ident[n] = Node(nxt, n.sort)
                        nxt += 1
                hh = apply_renaming(ident, h)
                for m, sigma, _e in merges(g, hh, c):
                    spent += 1
                    if spent > merge_budget:
                        if stats is not None:
                            stats.merge_truncations += 1
                            stats.merges += spent - 1
                        return out
                    sg = apply_label_subst(sigma, g)
                    sh = apply_label_subst(sigma, hh)
                    sg2 = apply_label_subst(sigma, _fresh_above(g2, m))
                    sh2 = apply_label_subst(sigma, _fresh_above(h2, m))
                    a = replace(m, sg, sg2, check=False)
                    b = replace(m, sh, sh2, check=False)
                    if order.greater(a, m) or order.greater(b, m):
                        continue
                    shared = tuple(sorted((x.id, y.id) for x, y in ov.shared.items()))
                    out.append((Eq(a, b), sigma, ("merge", shared)))
    if stats is not None:
        stats.merges += spent
    return out


def infer_sup_neg(l1: Neq, l2: Eq, order: GraphOrder = NODE_COUNT, c: CRelation = PLAIN) -> list:
    """Negative superposition: rewrite a side of ``l1`` with ``l2``."""
    l2 = _rename_apart(l1, l2)
    out = []
    for g, g2 in _sides(l1):
        for h, h2 in _sides(l2):
            for emb in find_embeddings(h, g, mode="unify"):
                sigma = emb.subst
                sg = apply_label_subst(sigma, g)
                sg2 = apply_label_subst(sigma, g2)
                sh = apply_label_subst(sigma, apply_renaming(emb.nodes, h))
                if not c.sub(sh, sg):
                    continue
                sh2 = apply_label_subst(sigma, h2)
                if order.greater(sg2, sg) or order.greater(sh2, apply_label_subst(sigma, h)):
                    continue
                rhs = _fresh_above(sh2, sg, sg2)
                a = replace(sg, sh, rhs, check=False)
                mapping = tuple(sorted((x.id, y.id) for x, y in emb.nodes.items()))
                out.append((Neq(a, sg2), sigma, ("embed", mapping)))
    return out


def unify_graphs(g: Graph, h: Graph):
    """An embedding witnessing ``σ(g) ≅ σ(h)``, or ``None``."""
    return next(find_isomorphisms(g, h, mode="unify"), None)


def infer_reflection(l: Neq) -> list:
    w = unify_graphs(l.left, l.right)
    if w is None:
        return []
    return [(FALSUM, w.subst, ())]


def _shape(g: Graph):
    """Label-free structure; preserved by instantiation and renaming."""
    roots = frozenset(g.roots)
    degrees = sorted((str(n.sort), len(g.pred(n)), len(g.succ(n)), n in roots) for n in g.nodes)
    return (len(g.edges), tuple(str(r.sort) for r in g.roots), tuple(degrees))


def _key(lit):
    if lit is FALSUM:
        return ("F",)
    a, b = sorted((_shape(lit.left), _shape(lit.right)))
    return (type(lit).__name__, a, b)


def instance_witness(general, specific):
    """``σ`` with ``σ(general) ≅ specific`` (sides matched in either order)."""
    if general is FALSUM or specific is FALSUM:
        return Substitution() if general is specific else None
    if type(general) is not type(specific):
        return None
    ren = fresh_renaming(free_vars(general), free_vars(specific))
    gl, gr = apply_label_subst(ren, general.left), apply_label_subst(ren, general.right)
    for a, b in ((gl, gr), (gr, gl)):
        for e1 in find_isomorphisms(a, specific.left, mode="match"):
            for e2 in find_isomorphisms(b, specific.right, mode="match", subst=e1.subst):
                return e2.subst
    return None


class LiteralIndex:
    """Literals bucketed by side shapes, for subsumption lookups."""

    def __init__(self):
        self.buckets: dict = {}
        self.has_falsum = False
        self.equations: list = []

    def add(self, lit):
        if lit is FALSUM:
            self.has_falsum = True
            return
        self.buckets.setdefault(_key(lit), []).append(lit)
        if isinstance(lit, Eq):
            self.equations.append(lit)

    def candidates(self, lit):
        return self.buckets.get(_key(lit), ())

    def __iter__(self):
        for b in self.buckets.values():
            yield from b


def _demod_rules(s: LiteralIndex, order: GraphOrder):
    for eq in s.equations:
        for lhs, rhs in _sides(eq):
            if order.greater(lhs, rhs) and rhs.free_vars() <= lhs.free_vars():
                yield lhs, rhs


def _one_step_reducts(lit, s: LiteralIndex, order: GraphOrder, c: CRelation) -> Iterator:
    for lhs, rhs in _demod_rules(s, order):
        for side in (0, 1):
            host = lit.left if side == 0 else lit.right
            for emb in find_embeddings(lhs, host, mode="match"):
                image = apply_label_subst(emb.subst, apply_renaming(emb.nodes, lhs))
                if not c.sub(image, host):
                    continue
                new = replace(host, image, apply_label_subst(emb.subst, _fresh_above(rhs, host)), check=False)
                yield type(lit)(new, lit.right) if side == 0 else type(lit)(lit.left, new)


def is_redundant(lit, s: LiteralIndex, order: GraphOrder = NODE_COUNT, fuel: int = 2,
                 c: CRelation = PLAIN) -> bool:
    """The four redundancy cases; the rewriting case only for ground literals."""
    if s.has_falsum:
        return True
    if lit is FALSUM:
        return False
    if isinstance(lit, Eq) and unify_graphs_exact(lit.left, lit.right):
        return True
    for other in s.candidates(lit):
        if instance_witness(other, lit) is not None:
            return True
    if fuel > 0 and is_ground(lit):
        for reduct in _one_step_reducts(lit, s, order, c):
            if is_redundant(reduct, s, order, fuel - 1, c):
                return True
    return False


def unify_graphs_exact(g: Graph, h: Graph) -> bool:
    return next(find_isomorphisms(g, h, mode="equal"), None) is not None


@dataclass(frozen=True)
class ProverConfig:
    order: GraphOrder = NODE_COUNT
    crelation: CRelation = PLAIN
    merge_budget: int = 500
    max_literals: int = 10000
    redundancy_fuel: int = 2
    timeout: float | None = None
    pick_ratio: int = 4


@dataclass
class Unsat:
    proof: list
    stats: dict


@dataclass
class Saturated:
    literals: list
    stats: dict
    complete: bool = True


@dataclass
class ResourceOut:
    stats: dict
    literals: list = field(default_factory=list)


def generate(given_id: int, given, processed: list, config: ProverConfig, stats: Stats) -> Iterator:
    """All conclusions between ``given`` and the processed literals
    (including ``given`` itself)."""
    o, c = config.order, config.crelation
    if isinstance(given, Neq):
        for lit, sigma, det in infer_reflection(given):
            yield "R", (given_id,), lit, sigma, det
    for pid, p in processed:
        if isinstance(given, Eq) and isinstance(p, Eq):
            for lit, sigma, det in infer_sup_pos(given, p, o, c, config.merge_budget, stats):
                yield "S+", (given_id, pid), lit, sigma, det
        elif isinstance(given, Neq) and isinstance(p, Eq):
            for lit, sigma, det in infer_sup_neg(given, p, o, c):
                yield "S-", (given_id, pid), lit, sigma, det
        elif isinstance(given, Eq) and isinstance(p, Neq):
            for lit, sigma, det in infer_sup_neg(p, given, o, c):
                yield "S-", (pid, given_id), lit, sigma, det


def weight(lit) -> int:
    if lit is FALSUM:
        return 0
    return sum(len(g.nodes) + len(g.edges) for g in (lit.left, lit.right))


class _Passive:
    """Lightest-first selection, with every ``ratio``-th pick by age."""

    def __init__(self, ratio: int):
        self.ratio = max(0, ratio)
        self.fifo = deque()
        self.heap: list = []
        self.taken: set = set()
        self.count = 0
        self.pending = 0

    def append(self, rid: int, lit):
        self.pending += 1
        self.fifo.append(rid)
        heapq.heappush(self.heap, (weight(lit), rid))

    def _pop(self, by_age: bool) -> int:
        while True:
            rid = self.fifo.popleft() if by_age else heapq.heappop(self.heap)[1]
            if rid not in self.taken:
                self.taken.add(rid)
                self.pending -= 1
                return rid

    def popleft(self) -> int:
        self.count += 1
        return self._pop(self.ratio == 0 or self.count % (self.ratio + 1) == 0)

    def __bool__(self):
        return len(self.heap) + len(self.fifo) > 0 and self.pending > 0


def saturate(literals: Iterable, config: ProverConfig = ProverConfig()):
    """Given-literal saturation; lightest literals first, interleaved by age."""
    t0 = time.monotonic()
    stats = Stats()
    records: dict[int, InferenceRecord] = {}
    queue = _Passive(config.pick_ratio)
    index = LiteralIndex()
    processed: list = []
    for lit in literals:
        lit = normalize_literal(lit)
        rid = len(records)
        records[rid] = InferenceRecord(rid, "input", (), lit)
        if lit is FALSUM:
            return Unsat(extract_proof(records, rid), _finish(stats, t0))
        queue.append(rid, lit)
        index.add(lit)
    proc_index = LiteralIndex()

    def out_of_time():
        return config.timeout is not None and time.monotonic() - t0 > config.timeout

    while queue:
        gid = queue.popleft()
        given = records[gid].conclusion
        if is_redundant(given, proc_index, config.order, 0, config.crelation):
            stats.redundant += 1
            continue
        stats.given += 1
        processed.append((gid, given))
        proc_index.add(given)
        for rule, prem, lit, sigma, det in generate(gid, given, processed, config, stats):
            stats.generated += 1
            lit = normalize_literal(lit)
            rid = len(records)
            if lit is FALSUM:
                records[rid] = InferenceRecord(rid, rule, prem, lit, sigma, det)
                return Unsat(extract_proof(records, rid), _finish(stats, t0))
            if is_redundant(lit, index, config.order, config.redundancy_fuel, config.crelation):
                stats.redundant += 1
            else:
                records[rid] = InferenceRecord(rid, rule, prem, lit, sigma, det)
                index.add(lit)
                queue.append(rid, lit)
                stats.kept += 1
            if stats.generated >= config.max_literals or out_of_time():
                return ResourceOut(_finish(stats, t0), [records[i].conclusion for i, _ in processed])
    return Saturated([lit for _, lit in processed], _finish(stats, t0), stats.merge_truncations == 0)


def _finish(stats: Stats, t0: float) -> dict:
    stats.seconds = round(time.monotonic() - t0, 3)
    return stats.as_dict()


def extract_proof(records: dict, last: int) -> list:
    needed = set()
    todo = [last]
    while todo:
        i = todo.pop()
        if i in needed:
            continue
        needed.add(i)
        todo.extend(records[i].premises)
    return [records[i] for i in sorted(needed)]


def prove(axioms: Iterable, goal: Eq, config: ProverConfig = ProverConfig()):
    """Refute ``axioms ∪ {¬goal}``; ``Unsat`` means the goal is entailed."""
    return saturate(list(axioms) + [Neq(goal.left, goal.right)], config)


def same_literal(a, b) -> bool:
    if a is FALSUM or b is FALSUM:
        return a is b
    if type(a) is not type(b):
        return False
    w1 = instance_witness(a, b)
    w2 = instance_witness(b, a)
    return w1 is not None and w2 is not None and all(isinstance(v, Var) for v in w1.values())


def replay(proof: list, config: ProverConfig = ProverConfig()) -> bool:
    """Re-run every inference of ``proof`` and check each conclusion recurs."""
    by_id = {r.id: r.conclusion for r in proof}
    stats = Stats()
    for r in proof:
        if r.rule == "input":
            continue
        prem = [by_id[i] for i in r.premises]
        if r.rule == "R":
            produced = infer_reflection(prem[0])
        elif r.rule == "S+":
            produced = infer_sup_pos(prem[0], prem[1], config.order, config.crelation,
                                     config.merge_budget, stats)
        elif r.rule == "S-":
            produced = infer_sup_neg(prem[0], prem[1], config.order, config.crelation)
        else:
            return False
        if not any(same_literal(normalize_literal(lit), r.conclusion) for lit, _, _ in produced):
            return False
    return proof[-1].conclusion is FALSUM
