"""Encoding Turing machine runs as graph equations.

A configuration ``(q, w, w')`` (head on the first symbol of ``w'``) becomes
a chain ``s -> w -> h -> w' -> e`` of labeled nodes plus an isolated node
labeled with the state. Transitions become equations between local
windows of such chains; window ends are unlabeled root stubs.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .fileformat import Problem
from .graph import Custom, Graph, Node
from .terms import const

TM_SORT = Custom("tm")
MARKERS = ("s", "h", "e")


class NondeterministicMachine(ValueError):
    pass


@dataclass(frozen=True)
class Transition:
    state: str
    read: str
    new_state: str
    write: str
    move: str

    def __post_init__(self):
        if self.move not in ("L", "R"):
            raise ValueError(f"move must be L or R, got {self.move!r}")


@dataclass
class TuringMachine:
    transitions: Sequence[Transition]
    initial: str = "q0"
    final: str = "qf"
    blank: str = "b"
    alphabet: Sequence[str] = field(default_factory=tuple)

    def __post_init__(self):
        seen = {}
        for t in self.transitions:
            key = (t.state, t.read)
            if key in seen and seen[key] != t:
                raise NondeterministicMachine(f"two transitions for state {t.state} reading {t.read}")
            seen[key] = t
        letters = set(self.alphabet) | {self.blank}
        for t in self.transitions:
            letters |= {t.read, t.write}
        self.alphabet = tuple(sorted(letters))
        states = {self.initial, self.final} | {t.state for t in self.transitions} \
            | {t.new_state for t in self.transitions}
        clash = (set(MARKERS) & (letters | states)) | (letters & states)
        if clash:
            raise ValueError(f"names used twice among states, symbols and markers: {sorted(clash)}")
        if self.initial == self.final:
            raise ValueError("initial state must differ from the final state")


class _Builder:
    def __init__(self):
        self.next_id = 0
        self.names: dict[Node, str] = {}

    def chain(self, gname: str, state: str | None, labels: Sequence[str | None]) -> Graph:
        """Isolated state node plus a path whose ``None`` entries are roots."""
        nodes, labs, roots = [], {}, []
        if state is not None:
            q = self._node(gname, "q")
            nodes.append(q)
            labs[q] = const(state)
        path = []
        for i, lab in enumerate(labels):
            n = self._node(gname, f"c{i}")
            path.append(n)
            if lab is None:
                roots.append(n)
            else:
                labs[n] = const(lab)
        nodes += path
        return Graph(nodes, roots, zip(path, path[1:]), labs)

    def _node(self, gname, suffix):
        n = Node(self.next_id, TM_SORT)
        self.next_id += 1
        self.names[n] = f"{gname}_{suffix}"
        return n


def encode_configuration(state: str, left: Sequence[str], right: Sequence[str],
                         builder: _Builder | None = None, name: str = "C") -> Graph:
    b = builder or _Builder()
    return b.chain(name, state, ["s", *left, "h", *right, "e"])


def transition_equations(m: TuringMachine) -> list[tuple[str, list, list]]:
    """``(name, left window, right window)`` triples; ``None`` marks a stub."""
    out = []
    gamma = m.alphabet
    for t in sorted(m.transitions, key=lambda t: (t.state, t.read)):
        q1, i, q2, j = t.state, t.read, t.new_state, t.write
        tag = f"{q1}_{i}"
        if t.move == "R":
            for k in gamma:
                out.append((f"R1_{tag}_{k}", (q1, [None, "h", i, k, None]), (q2, [None, j, "h", k, None])))
            out.append((f"R2_{tag}", (q1, [None, "h", i, "e"]), (q2, [None, j, "h", m.blank, "e"])))
        else:
            for k in gamma:
                for l in gamma:
                    out.append((f"L1_{tag}_{k}_{l}", (q1, [None, l, k, "h", i, None]),
                                (q2, [None, l, "h", k, j, None])))
            out.append((f"L2_{tag}", (q1, ["s", m.blank, "h", i, None]),
                        (q2, ["s", m.blank, "h", m.blank, j, None])))
    b = m.blank
    out.append(("Dstart", (None, ["s", b, b, None]), (None, ["s", b, None])))
    out.append(("Dend", (None, [None, b, b, "e"]), (None, [None, b, "e"])))
    return out


def gen_tm(m: TuringMachine) -> Problem:
    """Equations for every transition plus the negated halting goal.

    Each equation is also emitted as a rule oriented along the run.
    """
    bld = _Builder()
    p = Problem(sorts=["tm"], settings={"order": "node-count", "crelation": "plain"})
    for name, (sa, la), (sb, lb) in transition_equations(m):
        ga = bld.chain(f"{name}_L", sa, la)
        gb = bld.chain(f"{name}_R", sb, lb)
        p.graphs[f"{name}_L"] = ga
        p.graphs[f"{name}_R"] = gb
        p.rules.append((name, f"{name}_L", f"{name}_R"))
        p.asserts.append(("eq", f"{name}_L", f"{name}_R"))
    p.graphs["Start"] = encode_configuration(m.initial, [m.blank], [m.blank], bld, "Start")
    p.graphs["Halt"] = encode_configuration(m.final, [m.blank], [m.blank], bld, "Halt")
    p.asserts.append(("neq", "Start", "Halt"))
    p.names = bld.names
    return p


def parse_transition(text: str) -> Transition:
    """``q0,b,qf,b,L`` -> :class:`Transition`."""
    parts = [x.strip() for x in text.split(",")]
    if len(parts) != 5:
        raise ValueError(f"transition needs 5 comma-separated fields: {text!r}")
    return Transition(*parts)


def machine_from_specs(specs: Iterable[str], **kw) -> TuringMachine:
    return TuringMachine([parse_transition(s) for s in specs], **kw)
