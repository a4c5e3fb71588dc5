"""Command-line front end.

Exit codes: 0 success, 10 unsatisfiable, 20 saturated, 30 resources
exhausted, 40 oracle disagreement, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuits import CIRCUITS, circuit_violations
from .confluence import (
    BudgetExceeded,
    CounterexampleCandidate,
    Inconclusive,
    LocallyConfluent,
    check_local_confluence,
    critical_pairs,
)
from .fileformat import ParseError, Problem, SemanticError, export_dot, parse_problem, serialize
from .graph import Graph, GraphError
from .oracle import Bounds, BoundsTooLarge, Yes, entails_bounded, reachable_universe
from .order import ORDERS
from .rewrite import PLAIN, NormalForm, PreconditionError, normalize, rewrite_step
from .superposition import FALSUM, Eq, Neq, ProverConfig, ResourceOut, Saturated, Unsat, replay, saturate
from .turing import NondeterministicMachine, TuringMachine, parse_transition

EXIT_OK, EXIT_USAGE, EXIT_UNSAT, EXIT_SAT, EXIT_RESOURCE, EXIT_ORACLE = 0, 1, 10, 20, 30, 40
CRELATIONS = {"plain": PLAIN, "circuits": CIRCUITS}
ORACLE_NODES = 6


class UsageError(Exception):
    pass


class Report:
    """Plain text lines, or one JSON object per line with ``--json``."""

    def __init__(self, as_json: bool, out=None):
        self.as_json = as_json
        self.out = out or sys.stdout

    def line(self, kind: str, text: str = "", **data):
        if self.as_json:
            rec = {"kind": kind, **data}
            if text:
                rec["text"] = text
            print(json.dumps(rec, sort_keys=True, default=str), file=self.out)
        else:
            print(f"{kind} {text}".rstrip() if text else kind, file=self.out)


def show_graph(g: Graph, names: dict | None = None) -> str:
    """One-line rendering: ``[roots] node:sort=label ... | a>b ...``."""
    names = names or {}

    def nm(n):
        return names.get(n, f"n{n.id}")

    nodes = " ".join(f"{nm(n)}:{n.sort}" + (f"={g.labels[n]}" if n in g.labels else "") for n in sorted(g.nodes))
    edges = " ".join(f"{nm(a)}>{nm(b)}" for a, b in sorted(g.edges))
    return f"[{','.join(nm(r) for r in g.roots)}] {nodes} | {edges}".rstrip()


def show_literal(lit, names=None) -> str:
    if lit is FALSUM:
        return "⊥"
    op = "≈" if isinstance(lit, Eq) else "≉"
    return f"{show_graph(lit.left, names)}  {op}  {show_graph(lit.right, names)}"


def _load(path: str) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_problem(text)


def _crelation(args, p: Problem):
    name = args.crelation or p.settings.get("crelation", "plain")
    if name not in CRELATIONS:
        raise UsageError(f"unknown C-relation {name!r}; choose from {', '.join(CRELATIONS)}")
    return CRELATIONS[name]


def _order(args, p: Problem):
    name = args.order or p.settings.get("order", "node-count")
    if name not in ORDERS:
        raise UsageError(f"unknown order {name!r}; choose from {', '.join(ORDERS)}")
    return ORDERS[name]


def _budget(args, p: Problem, key: str, flag: str, default: int) -> int:
    v = getattr(args, flag)
    if v is None:
        v = p.settings.get(key, default)
    if v < 0:
        raise UsageError(f"--{flag} must be non-negative")
    return v


def _graph(p: Problem, name: str) -> Graph:
    if name not in p.graphs:
        raise UsageError(f"no graph named {name!r}")
    return p.graphs[name]


def cmd_validate(args, rep: Report) -> int:
    p = _load(args.file)
    c = _crelation(args, p)
    bad = 0
    for name in sorted(p.graphs):
        g = p.graphs[name]
        problems = circuit_violations(g) if (name in p.circuits or c is CIRCUITS) else []
        if problems:
            bad += 1
            for msg in problems:
                rep.line("invalid", f"{name}: {msg}", graph=name, message=msg)
        else:
            rep.line("ok", f"{name} nodes={len(g.nodes)} edges={len(g.edges)} roots={len(g.roots)}",
                     graph=name, nodes=len(g.nodes), edges=len(g.edges), roots=len(g.roots))
    rep.line("summary", f"graphs={len(p.graphs)} rules={len(p.rules)} literals={len(p.asserts)} invalid={bad}",
             graphs=len(p.graphs), rules=len(p.rules), literals=len(p.asserts), invalid=bad)
    return EXIT_USAGE if bad else EXIT_OK


def cmd_rewrite(args, rep: Report) -> int:
    p = _load(args.file)
    c = _crelation(args, p)
    rules = p.rewrite_rules()
    if args.rule:
        rules = [r for r in rules if r.name == args.rule]
        if not rules:
            raise UsageError(f"no rule named {args.rule!r}")
    g = _graph(p, args.graph)
    steps = rewrite_step(g, rules, c)
    for s in steps:
        at = ",".join(p.names.get(n, f"n{n.id}") for n in sorted(s.match.image.nodes))
        rep.line("step", f"{s.rule} at {at} => {show_graph(s.graph, p.names)}", rule=s.rule, at=at,
                 result=show_graph(s.graph, p.names))
    rep.line("summary", f"steps={len(steps)}", steps=len(steps))
    return EXIT_OK


def cmd_normalize(args, rep: Report) -> int:
    p = _load(args.file)
    c = _crelation(args, p)
    fuel = _budget(args, p, "fuel", "fuel", 100)
    res = normalize(_graph(p, args.graph), p.rewrite_rules(), c, fuel)
    for rule, ids in res.steps:
        rep.line("step", f"{rule} at {','.join(map(str, ids))}", rule=rule, at=list(ids))
    verdict = type(res).__name__
    rep.line(verdict, f"steps={len(res.steps)} {show_graph(res.graph, p.names)}", steps=len(res.steps),
             graph=show_graph(res.graph, p.names))
    return EXIT_OK if isinstance(res, NormalForm) else EXIT_RESOURCE


def cmd_critical_pairs(args, rep: Report) -> int:
    p = _load(args.file)
    c = _crelation(args, p)
    budget = _budget(args, p, "merges", "merges", 500)
    code = EXIT_OK
    try:
        pairs = critical_pairs(p.rewrite_rules(), c, budget, include_trivial=args.trivial)
    except BudgetExceeded as exc:
        pairs, code = exc.pairs, EXIT_RESOURCE
    for i, cp in enumerate(pairs):
        rep.line("pair", f"{i} rules={cp.rules[0]},{cp.rules[1]} shared={cp.shared} trivial={cp.trivial}",
                 index=i, rules=list(cp.rules), shared=cp.shared, trivial=cp.trivial,
                 overlap=show_graph(cp.overlap), left=show_graph(cp.left), right=show_graph(cp.right))
        if not rep.as_json:
            rep.line("  overlap", show_graph(cp.overlap))
            rep.line("  left", show_graph(cp.left))
            rep.line("  right", show_graph(cp.right))
    rep.line("summary", f"pairs={len(pairs)} truncated={code == EXIT_RESOURCE}", pairs=len(pairs),
             truncated=code == EXIT_RESOURCE)
    return code


def cmd_confluence(args, rep: Report) -> int:
    p = _load(args.file)
    c = _crelation(args, p)
    fuel = _budget(args, p, "fuel", "fuel", 100)
    budget = _budget(args, p, "merges", "merges", 500)
    res = check_local_confluence(p.rewrite_rules(), c, fuel, budget)
    if isinstance(res, LocallyConfluent):
        rep.line("LocallyConfluent", f"pairs={res.pairs_checked}", pairs=res.pairs_checked)
        return EXIT_OK
    if isinstance(res, CounterexampleCandidate):
        cp = res.pair
        rep.line("CounterexampleCandidate", f"rules={cp.rules[0]},{cp.rules[1]}", rules=list(cp.rules),
                 left=show_graph(cp.left), right=show_graph(cp.right))
        if not rep.as_json:
            rep.line("  left", show_graph(cp.left))
            rep.line("  right", show_graph(cp.right))
        return EXIT_OK
    assert isinstance(res, Inconclusive)
    rep.line("Inconclusive", f"undecided={len(res.undecided)} truncated={res.truncated}",
             undecided=len(res.undecided), truncated=res.truncated)
    return EXIT_RESOURCE


def _problem_literals(p: Problem):
    lits = p.literals()
    if p.goal is not None:
        a, b = p.goal
        lits.append(Neq(p.graphs[a], p.graphs[b]))
    return lits


def _prover_config(args, p: Problem) -> ProverConfig:
    return ProverConfig(
        order=_order(args, p),
        crelation=_crelation(args, p),
        merge_budget=_budget(args, p, "merges", "merges", 500),
        max_literals=_budget(args, p, "literals", "max_literals", 10000),
        timeout=args.timeout,
    )


def _run_saturation(args, rep: Report, show_proof: bool) -> int:
    p = _load(args.file)
    cfg = _prover_config(args, p)
    lits = _problem_literals(p)
    res = saturate(lits, cfg)
    stats = " ".join(f"{k}={v}" for k, v in res.stats.items())
    if isinstance(res, Unsat):
        rep.line("Unsat", stats, stats=res.stats)
        if show_proof:
            for r in res.proof:
                rep.line("proof", f"[{r.id}] {r.rule} {list(r.premises)}: {show_literal(r.conclusion)}",
                         id=r.id, rule=r.rule, premises=list(r.premises),
                         conclusion=show_literal(r.conclusion))
            ok = replay(res.proof, cfg)
            rep.line("replay", "ok" if ok else "FAILED", ok=ok)
            if not ok:
                return EXIT_ORACLE
        if args.oracle:
            return _oracle_check(p, lits, cfg, rep)
        return EXIT_UNSAT
    if isinstance(res, Saturated):
        rep.line("Saturated", f"{stats} complete={res.complete}", stats=res.stats, complete=res.complete,
                 literals=len(res.literals))
        if args.verbose:
            for lit in res.literals:
                rep.line("literal", show_literal(lit))
        return EXIT_SAT
    assert isinstance(res, ResourceOut)
    rep.line("ResourceOut", stats, stats=res.stats)
    return EXIT_RESOURCE


def _oracle_check(p: Problem, lits, cfg: ProverConfig, rep: Report) -> int:
    eqs = [x for x in lits if isinstance(x, Eq)]
    neqs = [x for x in lits if isinstance(x, Neq)]
    if len(neqs) != 1 or not all(x.left.is_ground() and x.right.is_ground() for x in lits):
        rep.line("oracle", "skipped: needs ground equations and exactly one disequation", checked=False)
        return EXIT_UNSAT
    goal = Eq(neqs[0].left, neqs[0].right)
    bound = max([ORACLE_NODES] + [len(g.nodes) for x in lits for g in (x.left, x.right)])
    labels = tuple(sorted({t for x in eqs + [goal] for g in (x.left, x.right) for t in g.labels.values()},
                          key=str))
    try:
        u = reachable_universe([goal.left, goal.right], eqs, Bounds(max_nodes=bound, labels=labels),
                               cfg.crelation)
    except BoundsTooLarge as exc:
        rep.line("oracle", f"skipped: {exc}", checked=False)
        return EXIT_UNSAT
    verdict = entails_bounded(eqs, goal, u, cfg.crelation)
    if isinstance(verdict, Yes):
        rep.line("oracle", f"agree universe={len(u)}", checked=True, agree=True, universe=len(u))
        return EXIT_UNSAT
    rep.line("oracle", f"DISAGREE: unconfirmed in universe={len(u)} ({verdict.reason})", checked=True,
             agree=False, universe=len(u))
    return EXIT_ORACLE


def cmd_saturate(args, rep: Report) -> int:
    return _run_saturation(args, rep, show_proof=False)


def cmd_prove(args, rep: Report) -> int:
    return _run_saturation(args, rep, show_proof=True)


def cmd_export_dot(args, rep: Report) -> int:
    p = _load(args.file)
    names = [args.graph] if args.graph else sorted(p.graphs)
    for n in names:
        sys.stdout.write(export_dot(_graph(p, n), p.names, n))
    return EXIT_OK


def cmd_gen_tm(args, rep: Report) -> int:
    if not args.transition:
        raise UsageError("gen-tm needs at least one --transition")
    try:
        m = TuringMachine([parse_transition(t) for t in args.transition], initial=args.initial,
                          final=args.final, blank=args.blank,
                          alphabet=tuple(x for x in args.alphabet.split(",") if x))
    except NondeterministicMachine as exc:
        raise UsageError(f"nondeterministic machine: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    from .turing import gen_tm

    text = serialize(gen_tm(m))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphsup", description="Graph rewriting and superposition over rooted graphs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", help="graph reduction order (default: node-count)")
    common.add_argument("--crelation", help="subgraph relation: plain or circuits")
    common.add_argument("--fuel", type=int, help="rewrite step budget (default 100)")
    common.add_argument("--merges", type=int, help="merge budget per inference (default 500)")
    common.add_argument("--max-literals", type=int, dest="max_literals",
                        help="generated literal budget (default 10000)")
    common.add_argument("--timeout", type=float, help="wall-clock limit in seconds for saturation")
    common.add_argument("--oracle", action="store_true", help="cross-check Unsat against the bounded oracle")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized components")
    common.add_argument("--json", action="store_true", help="one JSON record per output line")
    common.add_argument("--jobs", type=int, default=1, help="worker cap (work runs in one process)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, graph=None):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("file")
        if graph == "required":
            sp.add_argument("graph")
        elif graph == "optional":
            sp.add_argument("graph", nargs="?")
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "parse and check every graph")
    rw = add("rewrite", cmd_rewrite, "list one-step rewrites of a graph", "required")
    rw.add_argument("--rule", help="only this rule")
    add("normalize", cmd_normalize, "rewrite a graph to normal form", "required")
    cp = add("critical-pairs", cmd_critical_pairs, "enumerate critical pairs")
    cp.add_argument("--trivial", action="store_true", help="include pairs with disjoint left-hand sides")
    add("confluence", cmd_confluence, "check local confluence")
    add("saturate", cmd_saturate, "saturate the literal set")
    add("prove", cmd_prove, "refute the literal set and print the proof")
    add("export-dot", cmd_export_dot, "print graphs as DOT", "optional")
    tm = sub.add_parser("gen-tm", parents=[common], help="encode a Turing machine as a problem file")
    tm.add_argument("--transition", action="append", default=[], metavar="Q,READ,Q2,WRITE,L|R")
    tm.add_argument("--initial", default="q0")
    tm.add_argument("--final", default="qf")
    tm.add_argument("--blank", default="b")
    tm.add_argument("--alphabet", default="", help="comma-separated tape symbols")
    tm.add_argument("-o", "--output")
    tm.set_defaults(func=cmd_gen_tm)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    rep = Report(args.json)
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if args.timeout is not None and args.timeout <= 0:
            raise UsageError("--timeout must be positive")
        return args.func(args, rep)
    except UsageError as exc:
        rep.line("error", str(exc), message=str(exc))
    except ParseError as exc:
        rep.line("error", f"parse: {exc}", message=str(exc))
    except SemanticError as exc:
        for e in exc.errors:
            rep.line("error", e, message=e)
    except (GraphError, PreconditionError) as exc:
        rep.line("error", str(exc), message=str(exc))
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
