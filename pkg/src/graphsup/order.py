"""Graph reduction orders."""

from __future__ import annotations

import enum

from .graph import Graph


class OrderVerdict(enum.Enum):
    GREATER = "StrictlyGreater"
    LESS = "StrictlyLess"
    EQUIVALENT = "Equivalent"
    INCOMPARABLE = "Incomparable"


class GraphOrder:
    """Interface: a well-founded preorder on graphs, total on ground graphs."""

    name = "abstract"

    def compare(self, g: Graph, h: Graph) -> OrderVerdict:
        raise NotImplementedError

    def greater(self, g: Graph, h: Graph) -> bool:
        return self.compare(g, h) is OrderVerdict.GREATER

    def geq(self, g: Graph, h: Graph) -> bool:
        return self.compare(g, h) in (OrderVerdict.GREATER, OrderVerdict.EQUIVALENT)


def compare_node_count(g: Graph, h: Graph) -> OrderVerdict:
    a, b = len(g.nodes), len(h.nodes)
    if a > b:
        return OrderVerdict.GREATER
    if a < b:
        return OrderVerdict.LESS
    return OrderVerdict.EQUIVALENT


class NodeCountOrder(GraphOrder):
    name = "node-count"

    def compare(self, g: Graph, h: Graph) -> OrderVerdict:
        return compare_node_count(g, h)

    def measure(self, g: Graph) -> int:
        return len(g.nodes)


NODE_COUNT = NodeCountOrder()

ORDERS = {"node-count": NODE_COUNT}
