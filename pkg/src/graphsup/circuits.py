"""The circuit class: validation, subcircuits, compositions and primitives."""

from __future__ import annotations

import random
from collections.abc import Iterator
from dataclasses import dataclass

from .graph import (
    FROM,
    INTO,
    Gate,
    Graph,
    Node,
    NodeAllocator,
    NodeRenaming,
    apply_renaming,
    max_node_id,
)
from .rewrite import CRelation, frontier_merge, is_subgraph, merge_edge_candidates
from .terms import App, Term, const


class ArityMismatch(ValueError):
    pass


class InvalidCircuit(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def port_number(t: Term | None) -> int | None:
    """The positive integer a port label denotes, if it is one."""
    if isinstance(t, App) and not t.args and t.symbol.isdigit() and int(t.symbol) > 0:
        return int(t.symbol)
    return None


def port(i: int) -> App:
    if i <= 0:
        raise ValueError("port numbers start at 1")
    return const(str(i))


def circuit_violations(g: Graph) -> list[str]:
    out = []
    for n in sorted(g.nodes):
        if n.sort not in (INTO, FROM) and not n.sort.is_gate:
            out.append(f"item 2: node {n.id} has non-circuit sort {n.sort}")
    for n in sorted(g.nodes):
        lab = g.labels.get(n)
        succ, pred = g.succ(n), g.pred(n)
        if n.sort.is_gate:
            if n not in g.labels:
                out.append(f"item 3: gate {n.id} is a root")
            ins = sorted(port_number(g.labels.get(p)) or 0 for p in pred if p.sort == INTO)
            outs = sorted(port_number(g.labels.get(s)) or 0 for s in succ if s.sort == FROM)
            if ins != list(range(1, n.sort.entries + 1)):
                out.append(f"item 3: gate {n.id} entry ports are {ins}")
            if outs != list(range(1, n.sort.outputs + 1)):
                out.append(f"item 3: gate {n.id} output ports are {outs}")
        elif n.sort == INTO:
            if len(pred) != 1 or len(succ) > 1:
                out.append(f"item 4: into-port {n.id} has {len(pred)} incoming, {len(succ)} outgoing edges")
            if lab is not None:
                i = port_number(lab)
                if i is None:
                    out.append(f"item 1: port {n.id} label {lab} is not a positive integer")
                elif len(succ) != 1 or not next(iter(succ)).sort.is_gate \
                        or i > next(iter(succ)).sort.entries:
                    out.append(f"item 5: into-port {n.id} labeled {i} does not enter a gate")
        elif n.sort == FROM:
            if len(succ) != 1 or len(pred) > 1:
                out.append(f"item 4: from-port {n.id} has {len(pred)} incoming, {len(succ)} outgoing edges")
            if lab is not None:
                i = port_number(lab)
                if i is None:
                    out.append(f"item 1: port {n.id} label {lab} is not a positive integer")
                elif len(pred) != 1 or not next(iter(pred)).sort.is_gate \
                        or i > next(iter(pred)).sort.outputs:
                    out.append(f"item 6: from-port {n.id} labeled {i} does not leave a gate")
    for a, b in sorted(g.edges):
        if a.sort == INTO and b.sort.is_gate and a in g.labels:
            continue
        if a.sort.is_gate and b.sort == FROM and b in g.labels:
            continue
        if a.sort == FROM and b.sort == INTO:
            continue
        out.append(f"item 7: edge {a.id}->{b.id} ({a.sort} -> {b.sort}) is not allowed")
    seen_into = False
    for r in g.roots:
        if r.sort == FROM and not g.pred(r) and not seen_into:
            continue
        if r.sort == INTO and not g.succ(r):
            seen_into = True
            continue
        out.append(f"item 8: root {r.id} breaks the inputs-then-outputs shape")
    return out


def is_circuit(g: Graph) -> bool:
    return not circuit_violations(g)


@dataclass(frozen=True)
class Circuit:
    graph: Graph

    def __post_init__(self):
        problems = circuit_violations(self.graph)
        if problems:
            raise InvalidCircuit(problems)

    @property
    def inputs(self) -> tuple[Node, ...]:
        return tuple(r for r in self.graph.roots if r.sort == FROM)

    @property
    def outputs(self) -> tuple[Node, ...]:
        return tuple(r for r in self.graph.roots if r.sort == INTO)

    def trg(self, n: Node) -> Node:
        return next(iter(self.graph.succ(n)))

    def src(self, n: Node) -> Node:
        return next(iter(self.graph.pred(n)))


def validate_circuit(g: Graph):
    """A :class:`Circuit` or the list of violated items."""
    problems = circuit_violations(g)
    return problems if problems else Circuit(g)


def _apart(c1: Circuit, c2: Circuit) -> tuple[Circuit, NodeRenaming | None]:
    if not (c1.graph.nodes & c2.graph.nodes):
        return c2, None
    base = max_node_id(c1.graph, c2.graph) + 1
    ren = NodeRenaming({n: Node(base + i, n.sort) for i, n in enumerate(sorted(c2.graph.nodes))})
    return Circuit(apply_renaming(ren, c2.graph)), ren


def parallel_compose(c1: Circuit, c2: Circuit) -> Circuit:
    """``c1 ⊗ c2``; ``c2`` is moved to fresh node ids if the two overlap."""
    c2, _ = _apart(c1, c2)
    g1, g2 = c1.graph, c2.graph
    roots = c1.inputs + c2.inputs + c1.outputs + c2.outputs
    return Circuit(Graph(g1.nodes | g2.nodes, roots, g1.edges | g2.edges,
                         {**g1.labels, **g2.labels}, check=False))


def sequential_compose(c1: Circuit, c2: Circuit) -> Circuit:
    """Plug the outputs of ``c1`` into the inputs of ``c2`` (``c1`` runs first)."""
    c2, _ = _apart(c1, c2)
    outs, ins = c1.outputs, c2.inputs
    if len(outs) != len(ins):
        raise ArityMismatch(f"{len(outs)} outputs cannot feed {len(ins)} inputs")
    ups = {}
    for a, b in zip(outs, ins):
        ups[a] = c2.trg(b)
        ups[b] = c1.src(a)

    def u(n):
        return ups.get(n, n)

    g1, g2 = c1.graph, c2.graph
    nodes = {u(n) for n in g1.nodes | g2.nodes}
    edges = {(u(a), u(b)) for a, b in g1.edges | g2.edges}
    roots = c1.inputs + c2.outputs
    return Circuit(Graph(nodes, roots, edges, {**g1.labels, **g2.labels}, check=False))


def empty_circuit() -> Circuit:
    return Circuit(Graph())


@dataclass(frozen=True)
class IdGraph:
    k: int = 1


@dataclass(frozen=True)
class SwapGraph:
    pass


@dataclass(frozen=True)
class ElementaryGate:
    label: Term
    n: int
    m: int


def build_primitive(p, alloc: NodeAllocator | None = None) -> Circuit:
    alloc = alloc or NodeAllocator()
    if isinstance(p, IdGraph):
        c = empty_circuit()
        for _ in range(p.k):
            a, b = alloc.new(FROM), alloc.new(INTO)
            c = parallel_compose(Circuit(Graph([a, b], [a, b], [(a, b)])), c)
        return c
    if isinstance(p, SwapGraph):
        a1, a2, a3, a4 = alloc.new(FROM), alloc.new(FROM), alloc.new(INTO), alloc.new(INTO)
        return Circuit(Graph([a1, a2, a3, a4], [a1, a2, a3, a4], [(a1, a4), (a2, a3)]))
    if isinstance(p, ElementaryGate):
        gate = alloc.new(Gate(p.n, p.m))
        nodes, roots_in, roots_out, edges, labels = [gate], [], [], [], {gate: p.label}
        for i in range(1, p.n + 1):
            src, entry = alloc.new(FROM), alloc.new(INTO)
            nodes += [src, entry]
            roots_in.append(src)
            edges += [(src, entry), (entry, gate)]
            labels[entry] = port(i)
        for j in range(1, p.m + 1):
            exit_, dst = alloc.new(FROM), alloc.new(INTO)
            nodes += [exit_, dst]
            roots_out.append(dst)
            edges += [(gate, exit_), (exit_, dst)]
            labels[exit_] = port(j)
        return Circuit(Graph(nodes, roots_in + roots_out, edges, labels))
    raise TypeError(f"unknown primitive {p!r}")


def is_elementary_gate(c: Circuit) -> bool:
    g = c.graph
    gates = [n for n in g.nodes if n.sort.is_gate]
    if len(gates) != 1:
        return False
    firsts = [port_number(g.labels.get(c.trg(a))) for a in c.inputs]
    lasts = [port_number(g.labels.get(c.src(b))) for b in c.outputs]
    return all(x is not None for x in firsts + lasts) and firsts == sorted(set(firsts)) \
        and lasts == sorted(set(lasts))


def is_subcircuit(h: Graph, g: Graph) -> bool:
    return is_circuit(g) and is_circuit(h) and is_subgraph(h, g)


def _circuit_edge_sets(g1: Graph, g2: Graph) -> Iterator[frozenset]:
    both = g1.edges | g2.edges
    busy_out = {a for a, _ in both}
    busy_in = {b for _, b in both}
    cands = [(a, b) for a, b in merge_edge_candidates(g1, g2)
             if a.sort == FROM and b.sort == INTO and a not in busy_out and b not in busy_in]

    def rec(i, used_a, used_b, chosen):
        if i == len(cands):
            yield frozenset(chosen)
            return
        yield from rec(i + 1, used_a, used_b, chosen)
        a, b = cands[i]
        if a not in used_a and b not in used_b:
            yield from rec(i + 1, used_a | {a}, used_b | {b}, chosen + [cands[i]])

    yield from rec(0, frozenset(), frozenset(), [])


def _inputs_first(g: Graph) -> Graph:
    roots = [r for r in g.roots if r.sort == FROM] + [r for r in g.roots if r.sort != FROM]
    return Graph(g.nodes, roots, g.edges, g.labels, check=False)


def _circuit_merge(g1: Graph, g2: Graph, host: Graph) -> Graph:
    return _inputs_first(frontier_merge(g1, g2, host))


CIRCUITS = CRelation("circuits", is_circuit, is_subcircuit, _circuit_merge, _circuit_edge_sets, _inputs_first)


def random_primitive(rng: random.Random, alloc: NodeAllocator, labels=("f", "g", "h")) -> Circuit:
    kind = rng.randrange(3)
    if kind == 0:
        return build_primitive(IdGraph(rng.randint(1, 2)), alloc)
    if kind == 1:
        return build_primitive(SwapGraph(), alloc)
    return build_primitive(ElementaryGate(const(rng.choice(labels)), rng.randint(0, 2), rng.randint(0, 2)), alloc)


def random_layer(rng: random.Random, k: int, alloc: NodeAllocator) -> Circuit:
    """A random circuit with exactly ``k`` inputs."""
    c = empty_circuit()
    left = k
    while left > 0:
        pick = rng.randrange(3)
        if pick == 0 or left == 1 and pick == 1:
            piece = build_primitive(IdGraph(1), alloc)
            used = 1
        elif pick == 1:
            piece = build_primitive(SwapGraph(), alloc)
            used = 2
        else:
            used = rng.randint(1, min(left, 2))
            piece = build_primitive(ElementaryGate(const(rng.choice("fgh")), used, rng.randint(0, 2)), alloc)
        c = parallel_compose(c, piece)
        left -= used
    return c


def random_circuit(rng: random.Random, depth: int = 2, alloc: NodeAllocator | None = None) -> Circuit:
    alloc = alloc or NodeAllocator()
    if depth <= 0:
        return random_primitive(rng, alloc)
    first = random_circuit(rng, depth - 1, alloc)
    if rng.random() < 0.5:
        return parallel_compose(first, random_circuit(rng, depth - 1, alloc))
    return sequential_compose(first, random_layer(rng, len(first.outputs), alloc))
