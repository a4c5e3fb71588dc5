"""Problem files (``.gsp``): parsing, canonical serialization, DOT export.

Grammar, one statement per ``;``::

    sort s, t;
    vars x, y;
    graph G { node a : from; node g1 : gate(1,2) label f(x); roots [a]; edge a -> g1; }
    circuit C = (G2 par G1) seq G3;
    rule R1 : L -> R;
    assert eq G H;
    assert neq G H;
    goal G H;
    set order node-count;
    set crelation circuits;
    set budget merges=200 fuel=50;

``#`` starts a comment. Node names are global to a file: the same name in
two graphs denotes the same node. ``A seq B`` runs ``B`` first and feeds
its outputs into ``A``; ``par`` binds tighter than ``seq``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .graph import FROM, INTO, Custom, Gate, Graph, GraphError, Node, NodeAllocator, Sort, root_similar
from .terms import App, Term, Var


class ParseError(Exception):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class SemanticError(Exception):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class Problem:
    sorts: list[str] = field(default_factory=list)
    vars: list[str] = field(default_factory=list)
    graphs: dict[str, Graph] = field(default_factory=dict)
    circuits: dict[str, tuple] = field(default_factory=dict)
    names: dict[Node, str] = field(default_factory=dict)
    rules: list[tuple[str, str, str]] = field(default_factory=list)
    asserts: list[tuple[str, str, str]] = field(default_factory=list)
    goal: tuple[str, str] | None = None
    settings: dict[str, object] = field(default_factory=dict)

    def node(self, name: str) -> Node:
        for n, s in self.names.items():
            if s == name:
                return n
        raise KeyError(name)

    def rewrite_rules(self):
        from .rewrite import RewriteRule

        return [RewriteRule(n, self.graphs[a], self.graphs[b]) for n, a, b in self.rules]

    def literals(self):
        from .superposition import Eq, Neq

        out = []
        for kind, a, b in self.asserts:
            cls = Eq if kind == "eq" else Neq
            out.append(cls(self.graphs[a], self.graphs[b]))
        return out

    def structure(self):
        """Id-free view used to compare problems."""
        def g_view(g: Graph):
            nm = self.names
            return (
                frozenset((nm[n], str(n.sort)) for n in g.nodes),
                tuple(nm[r] for r in g.roots),
                frozenset((nm[a], nm[b]) for a, b in g.edges),
                frozenset((nm[n], str(t)) for n, t in g.labels.items()),
            )

        plain = {k: g_view(v) for k, v in self.graphs.items() if k not in self.circuits}
        return (tuple(self.sorts), tuple(self.vars), plain, dict(self.circuits),
                tuple(self.rules), tuple(self.asserts), self.goal, dict(self.settings))


_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
    |(?P<arrow>->)
    |(?P<num>\d+)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:-(?!>)[A-Za-z0-9_']+)*)
    |(?P<punct>[{}()\[\];,:=])""",
    re.VERBOSE,
)


def _tokenize(text: str):
    line = 1
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(line, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        val = m.group()
        if kind == "nl":
            line += 1
        elif kind not in ("ws", "comment"):
            out.append((kind, val, line))
        pos = m.end()
    out.append(("eof", "", line))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.p = Problem()
        self.alloc = NodeAllocator()
        self.by_name: dict[str, Node] = {}
        self.errors: list[str] = []

    def peek(self, k=0):
        return self.toks[self.i + k]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val=None, kind=None):
        t = self.next()
        if (val is not None and t[1] != val) or (kind is not None and t[0] != kind):
            want = val if val is not None else kind
            raise ParseError(t[2], f"expected {want!r}, found {t[1] or 'end of file'!r}")
        return t

    def name(self):
        t = self.next()
        if t[0] not in ("ident", "num"):
            raise ParseError(t[2], f"expected a name, found {t[1] or 'end of file'!r}")
        return t[1]

    def names_list(self, end=";"):
        out = [self.name()]
        while self.peek()[1] == ",":
            self.next()
            out.append(self.name())
        return out

    def parse(self) -> Problem:
        while self.peek()[0] != "eof":
            kw = self.next()
            handler = getattr(self, f"st_{kw[1]}", None)
            if kw[0] != "ident" or handler is None:
                raise ParseError(kw[2], f"unknown statement {kw[1]!r}")
            handler(kw[2])
        if self.errors:
            raise SemanticError(self.errors)
        return self.p

    def st_sort(self, line):
        for s in self.names_list():
            if s in ("into", "from", "gate"):
                raise ParseError(line, f"{s!r} is a builtin sort")
            if s not in self.p.sorts:
                self.p.sorts.append(s)
        self.expect(";")

    def st_vars(self, line):
        for v in self.names_list():
            if v not in self.p.vars:
                self.p.vars.append(v)
        self.expect(";")

    def sort(self) -> Sort:
        t = self.next()
        if t[1] == "into":
            return INTO
        if t[1] == "from":
            return FROM
        if t[1] == "gate":
            self.expect("(")
            n = int(self.expect(kind="num")[1])
            self.expect(",")
            m = int(self.expect(kind="num")[1])
            self.expect(")")
            return Gate(n, m)
        if t[0] == "ident" and t[1] in self.p.sorts:
            return Custom(t[1])
        raise ParseError(t[2], f"unknown sort {t[1]!r}")

    def term(self) -> Term:
        t = self.next()
        if t[0] == "num":
            return App(t[1])
        if t[0] != "ident":
            raise ParseError(t[2], f"expected a term, found {t[1]!r}")
        if self.peek()[1] == "(":
            self.next()
            args = [self.term()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            if t[1] in self.p.vars:
                raise ParseError(t[2], f"variable {t[1]!r} applied to arguments")
            return App(t[1], tuple(args))
        if t[1] in self.p.vars:
            return Var(t[1])
        return App(t[1])

    def declare_node(self, name, sort, line) -> Node:
        n = self.by_name.get(name)
        if n is None:
            n = self.alloc.new(sort)
            self.by_name[name] = n
            self.p.names[n] = name
        elif n.sort != sort:
            raise ParseError(line, f"node {name!r} redeclared with sort {sort} (was {n.sort})")
        return n

    def st_graph(self, line):
        gname = self.name()
        if gname in self.p.graphs:
            raise ParseError(line, f"graph {gname!r} defined twice")
        self.expect("{")
        nodes, roots, edges, labels = [], [], [], {}
        local = {}
        while self.peek()[1] != "}":
            t = self.next()
            if t[1] == "node":
                nm = self.name()
                self.expect(":")
                s = self.sort()
                n = self.declare_node(nm, s, t[2])
                if nm in local:
                    raise ParseError(t[2], f"node {nm!r} declared twice in {gname}")
                local[nm] = n
                nodes.append(n)
                if self.peek()[1] == "label":
                    self.next()
                    labels[n] = self.term()
                self.expect(";")
            elif t[1] == "roots":
                self.expect("[")
                if self.peek()[1] != "]":
                    for nm in self.names_list():
                        roots.append(self._local(local, nm, t[2]))
                self.expect("]")
                self.expect(";")
            elif t[1] == "edge":
                chain = [self._local(local, self.name(), t[2])]
                self.expect("->")
                chain.append(self._local(local, self.name(), t[2]))
                while self.peek()[1] == "->":
                    self.next()
                    chain.append(self._local(local, self.name(), t[2]))
                edges.extend(zip(chain, chain[1:]))
                self.expect(";")
            elif t[0] == "eof":
                raise ParseError(t[2], f"unterminated graph {gname!r}")
            else:
                raise ParseError(t[2], f"unexpected {t[1]!r} in graph {gname!r}")
        self.expect("}")
        try:
            self.p.graphs[gname] = Graph(nodes, roots, edges, labels)
        except GraphError as exc:
            self.errors.extend(f"graph {gname}: {v}" for v in exc.violations)

    def _local(self, local, nm, line):
        if nm not in local:
            raise ParseError(line, f"node {nm!r} is not declared in this graph")
        return local[nm]

    def cexpr(self):
        left = self.cpar()
        while self.peek()[1] == "seq":
            self.next()
            left = ("seq", left, self.cpar())
        return left

    def cpar(self):
        left = self.catom()
        while self.peek()[1] == "par":
            self.next()
            left = ("par", left, self.catom())
        return left

    def catom(self):
        t = self.peek()
        if t[1] == "(":
            self.next()
            e = self.cexpr()
            self.expect(")")
            return e
        nm = self.name()
        if nm not in self.p.graphs:
            raise ParseError(t[2], f"unknown graph {nm!r}")
        return ("ref", nm)

    def st_circuit(self, line):
        from .circuits import InvalidCircuit

        cname = self.name()
        if cname in self.p.graphs:
            raise ParseError(line, f"graph {cname!r} defined twice")
        self.expect("=")
        expr = self.cexpr()
        self.expect(";")
        try:
            self.p.graphs[cname] = build_circuit(expr, self.p.graphs, self.p.names)
            self.p.circuits[cname] = expr
            self.alloc.bump(Graph(self.p.names, check=False))
        except (InvalidCircuit, ValueError) as exc:
            self.errors.append(f"circuit {cname}: {exc}")

    def _graph_ref(self, line):
        nm = self.name()
        if nm not in self.p.graphs:
            raise ParseError(line, f"unknown graph {nm!r}")
        return nm

    def st_rule(self, line):
        rname = self.name()
        self.expect(":")
        a = self._graph_ref(line)
        self.expect("->")
        b = self._graph_ref(line)
        self.expect(";")
        if not root_similar(self.p.graphs[a], self.p.graphs[b]):
            self.errors.append(f"rule {rname}: {a} and {b} are not root-similar")
        self.p.rules.append((rname, a, b))

    def st_assert(self, line):
        kind = self.next()
        if kind[1] not in ("eq", "neq"):
            raise ParseError(kind[2], "expected 'eq' or 'neq'")
        a, b = self._graph_ref(line), self._graph_ref(line)
        self.expect(";")
        if not root_similar(self.p.graphs[a], self.p.graphs[b]):
            self.errors.append(f"assert {kind[1]} {a} {b}: not root-similar")
        self.p.asserts.append((kind[1], a, b))

    def st_goal(self, line):
        a, b = self._graph_ref(line), self._graph_ref(line)
        self.expect(";")
        if not root_similar(self.p.graphs[a], self.p.graphs[b]):
            self.errors.append(f"goal {a} {b}: not root-similar")
        self.p.goal = (a, b)

    def st_set(self, line):
        key = self.name()
        if key in ("order", "crelation"):
            self.p.settings[key] = self.name()
        elif key == "budget":
            while self.peek()[1] != ";":
                k = self.name()
                self.expect("=")
                v = self.expect(kind="num")[1]
                if k not in ("merges", "fuel", "literals"):
                    raise ParseError(line, f"unknown budget {k!r}")
                self.p.settings[k] = int(v)
        else:
            raise ParseError(line, f"unknown setting {key!r}")
        self.expect(";")


def build_circuit(expr, graphs: dict[str, Graph], names: dict[Node, str]) -> Graph:
    """Evaluate a circuit expression.

    An operand overlapping the other one is copied onto unused node ids;
    the copies are named after the originals with a numeric suffix.
    """
    from .circuits import Circuit, parallel_compose, sequential_compose
    from .graph import NodeRenaming, apply_renaming

    def fresh(c: Circuit) -> Circuit:
        base = max((n.id for n in names), default=-1) + 1
        taken = set(names.values())
        ren = {}
        for i, n in enumerate(sorted(c.graph.nodes)):
            new = Node(base + i, n.sort)
            ren[n] = new
            k = 1
            while f"{names[n]}_{k}" in taken:
                k += 1
            names[new] = f"{names[n]}_{k}"
            taken.add(names[new])
        return Circuit(apply_renaming(NodeRenaming(ren), c.graph))

    def ev(e):
        if e[0] == "ref":
            return Circuit(graphs[e[1]])
        a, b = ev(e[1]), ev(e[2])
        if a.graph.nodes & b.graph.nodes:
            b = fresh(b)
        if e[0] == "par":
            return parallel_compose(a, b)
        return sequential_compose(b, a)

    return ev(expr).graph


def parse_problem(text: str) -> Problem:
    return _Parser(text).parse()


def _fmt_expr(e, top=True) -> str:
    if e[0] == "ref":
        return e[1]
    if e[0] == "par":
        s = f"{_fmt_expr(e[1], False)} par {_fmt_expr(e[2], False)}"
        return s if top else f"({s})"
    s = f"{_fmt_expr(e[1], False)} seq {_fmt_expr(e[2], False)}"
    return s if top else f"({s})"


def serialize(p: Problem) -> str:
    """Canonical text: sorts, vars, graphs by name, circuits, rules, asserts."""
    lines = []
    if p.sorts:
        lines.append(f"sort {', '.join(sorted(p.sorts))};")
    if p.vars:
        lines.append(f"vars {', '.join(sorted(p.vars))};")
    for key in ("order", "crelation"):
        if key in p.settings:
            lines.append(f"set {key} {p.settings[key]};")
    budget = [f"{k}={p.settings[k]}" for k in ("merges", "fuel", "literals") if k in p.settings]
    if budget:
        lines.append(f"set budget {' '.join(budget)};")
    if lines:
        lines.append("")
    rank: dict[Node, int] = {}
    needed = _graph_order(p)
    for gname in needed:
        g = p.graphs[gname]
        order = sorted(g.nodes, key=lambda n: (0, rank[n]) if n in rank else (1, n.id))
        for n in order:
            rank.setdefault(n, len(rank))
        lines.append(f"graph {gname} {{")
        for n in order:
            lab = f" label {g.labels[n]}" if n in g.labels else ""
            lines.append(f"  node {p.names[n]} : {n.sort}{lab};")
        lines.append(f"  roots [{', '.join(p.names[r] for r in g.roots)}];")
        for a, b in sorted(g.edges, key=lambda e: (rank[e[0]], rank[e[1]])):
            lines.append(f"  edge {p.names[a]} -> {p.names[b]};")
        lines.append("}")
        lines.append("")
    for cname in p.circuits:
        lines.append(f"circuit {cname} = {_fmt_expr(p.circuits[cname])};")
    if p.circuits:
        lines.append("")
    for r in p.rules:
        lines.append(f"rule {r[0]} : {r[1]} -> {r[2]};")
    for kind, a, b in p.asserts:
        lines.append(f"assert {kind} {a} {b};")
    if p.goal:
        lines.append(f"goal {p.goal[0]} {p.goal[1]};")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n" if lines else ""


def _graph_order(p: Problem) -> list[str]:
    return sorted(k for k in p.graphs if k not in p.circuits)


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: Graph, names: dict[Node, str] | None = None, title: str = "G") -> str:
    names = names or {}
    roots = set(g.roots)
    lines = [f"digraph {_dot_id(title)} {{"]
    for n in sorted(g.nodes):
        nm = names.get(n, f"n{n.id}")
        if n in roots:
            text = f"{nm}:{n.sort}:root{g.roots.index(n) + 1}"
            shape = "doublecircle"
        else:
            text = f"{nm}:{n.sort}:{g.labels[n]}"
            shape = "box" if n.sort.is_gate else "ellipse"
        lines.append(f"  {_dot_id(nm)} [label={_dot_id(text)}, shape={shape}];")
    for a, b in sorted(g.edges):
        lines.append(f"  {_dot_id(names.get(a, f'n{a.id}'))} -> {_dot_id(names.get(b, f'n{b.id}'))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def name_nodes(graphs: dict[str, Graph], prefix: str = "n") -> dict[Node, str]:
    """Default names for nodes built programmatically."""
    out = {}
    for g in graphs.values():
        for n in g.nodes:
            out.setdefault(n, f"{prefix}{n.id}")
    return out
