"""Rooted graph rewriting and a superposition prover for graph equations."""

from .circuits import CIRCUITS, Circuit, is_circuit, parallel_compose, sequential_compose
from .confluence import check_local_confluence, critical_pairs, is_joinable
from .fileformat import ParseError, Problem, SemanticError, export_dot, parse_problem, serialize
from .graph import FROM, INTO, Custom, Gate, Graph, GraphError, Node, NodeRenaming
from .matching import find_embeddings, find_isomorphism, isomorphic
from .order import NODE_COUNT, OrderVerdict
from .rewrite import PLAIN, CRelation, RewriteRule, e_merge, is_subgraph, normalize, replace, rewrite_step
from .superposition import FALSUM, Eq, Neq, ProverConfig, ResourceOut, Saturated, Unsat, prove, saturate
from .terms import App, Substitution, Var, const, fn, unify

__all__ = [
    "App", "CIRCUITS", "CRelation", "Circuit", "Custom", "Eq", "FALSUM", "FROM", "Gate", "Graph",
    "GraphError", "INTO", "NODE_COUNT", "Neq", "Node", "NodeRenaming", "OrderVerdict", "PLAIN",
    "ParseError", "Problem", "ProverConfig", "ResourceOut", "RewriteRule", "Saturated", "SemanticError",
    "Substitution", "Unsat", "Var", "check_local_confluence", "const", "critical_pairs", "e_merge",
    "export_dot", "find_embeddings", "find_isomorphism", "fn", "is_circuit", "is_joinable", "is_subgraph",
    "isomorphic", "normalize", "parallel_compose", "parse_problem", "prove", "replace", "rewrite_step",
    "saturate", "sequential_compose", "serialize", "unify",
]
