"""Acceptance criteria 1-8, one test each, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or as a script.
"""

from __future__ import annotations

import random
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import checks  # noqa: E402
from helpers import FIXTURES, load_fixture  # noqa: E402

from graphsup import cli  # noqa: E402
from graphsup.circuits import Circuit, is_circuit, parallel_compose, random_circuit, sequential_compose  # noqa: E402
from graphsup.confluence import CounterexampleCandidate, LocallyConfluent, check_local_confluence  # noqa: E402
from graphsup.fileformat import parse_problem, serialize  # noqa: E402
from graphsup.graph import Custom, Graph, Node  # noqa: E402
from graphsup.oracle import Bounds, Yes, entails_bounded, reachable_universe  # noqa: E402
from graphsup.rewrite import RewriteRule, replace, rewrite_step  # noqa: E402
from graphsup.superposition import Eq, ProverConfig, ResourceOut, Saturated, Unsat, prove, replay, saturate  # noqa: E402
from graphsup.terms import const  # noqa: E402

SEEDS = 1000
ORACLE_PROBLEMS = 200
ORACLE_NODES = 6


def report(capsys, n: int, ok: bool, detail: str):
    """Print the verdict line past pytest's capture, then assert it."""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def _tally(fn, seeds) -> Counter:
    bad = Counter()
    for s in seeds:
        for v in fn(s):
            bad[v] += 1
    return bad


def test_criterion_1_replacement_algebra(capsys):
    t = time.monotonic()
    bad = _tally(checks.replacement_algebra, range(SEEDS))
    dt = time.monotonic() - t
    report(capsys, 1, not bad and dt < 60, f"{SEEDS} instances, violations={dict(bad)}, {dt:.1f}s")


def test_criterion_2_figure_fixtures(capsys):
    ex = load_fixture("example31.gsp")
    fig = load_fixture("fig3.gsp")
    replaced = replace(ex.graphs["G"], ex.graphs["H"], ex.graphs["Hp"]) == ex.graphs["Expected"]
    g1, g2, g3 = (Circuit(fig.graphs[k]) for k in ("G1", "G2", "G3"))
    composed = sequential_compose(g3, parallel_compose(g2, g1)).graph == fig.graphs["Expected"]
    from_file = fig.graphs["Composed"] == fig.graphs["Expected"]
    valid = all(cli.main(["validate", str(FIXTURES / f)]) == 0 for f in ("example31.gsp", "fig3.gsp"))
    report(capsys, 2, replaced and composed and from_file and valid,
           f"replacement={replaced} composition={composed and from_file} validate={valid}")


def test_criterion_3_confluence(capsys):
    out = {}
    for name, want in (("confluent.gsp", LocallyConfluent), ("divergent.gsp", CounterexampleCandidate)):
        t = time.monotonic()
        res = check_local_confluence(load_fixture(name).rewrite_rules(), fuel=10, merge_budget=200)
        out[name] = (isinstance(res, want), round(time.monotonic() - t, 2), type(res).__name__)
    ok = all(good and dt < 10 for good, dt, _ in out.values())
    report(capsys, 3, ok, ", ".join(f"{k}: {v[2]} {v[1]}s" for k, v in out.items()))


N = Custom("n")
LABELS = (const("a"), const("b"))


def _small_graph(rng: random.Random, nroots: int, most: int = 3) -> Graph:
    n = rng.randint(max(1, nroots), most)
    nodes = [Node(i, N) for i in range(n)]
    edges = [(a, b) for a in nodes for b in nodes if a != b and rng.random() < 0.3]
    return Graph(nodes, nodes[:nroots], edges, {x: rng.choice(LABELS) for x in nodes[nroots:]})


def _oracle_problem(rng: random.Random):
    """Random ground equations and a goal; half the goals are rewrites of
    a random graph, so the prover has something to refute."""
    nr = rng.randint(0, 1)
    eqs = [Eq(_small_graph(rng, nr), _small_graph(rng, nr)) for _ in range(rng.randint(1, 2))]
    nr_goal = rng.randint(0, 1)
    left = _small_graph(rng, nr_goal)
    right = _small_graph(rng, nr_goal)
    if rng.random() < 0.5:
        rules = [RewriteRule(f"e{i}{d}", *(sides if d == "+" else sides[::-1]))
                 for i, sides in enumerate((e.left, e.right) for e in eqs) for d in "+-"]
        right = left
        for _ in range(rng.randint(1, 2)):
            steps = [s.graph for s in rewrite_step(right, rules) if len(s.graph.nodes) <= ORACLE_NODES]
            if steps:
                right = rng.choice(steps)
    return eqs, Eq(left, right)


def test_criterion_4_prover_agrees_with_oracle(capsys):
    rng = random.Random(2024)
    verdicts = Counter()
    disagreements = []
    for k in range(ORACLE_PROBLEMS):
        eqs, goal = _oracle_problem(rng)
        res = prove(eqs, goal, ProverConfig(max_literals=300, timeout=2))
        verdicts[type(res).__name__] += 1
        if isinstance(res, Unsat):
            u = reachable_universe([goal.left, goal.right], eqs,
                                   Bounds(max_nodes=ORACLE_NODES, labels=LABELS, max_graphs=1500))
            if not isinstance(entails_bounded(eqs, goal, u), Yes):
                disagreements.append(k)
    report(capsys, 4, not disagreements and verdicts["Unsat"] > 0,
           f"{ORACLE_PROBLEMS} problems, verdicts={dict(verdicts)}, disagreements={disagreements}")


def test_criterion_5_turing_machines(capsys):
    p = load_fixture("tm_halting.gsp")
    t = time.monotonic()
    halting = saturate(p.literals(), ProverConfig(max_literals=10_000))
    dt = time.monotonic() - t
    halts = isinstance(halting, Unsat) and halting.stats["generated"] <= 10_000 and dt < 30 \
        and replay(halting.proof)
    cycle = saturate(load_fixture("tm_cycle.gsp").literals(), ProverConfig(max_literals=10_000, timeout=30))
    runs_out = isinstance(cycle, ResourceOut)
    report(capsys, 5, halts and runs_out,
           f"halting: {type(halting).__name__} generated={halting.stats['generated']} {dt:.1f}s; "
           f"2-cycle: {type(cycle).__name__} generated={cycle.stats['generated']}")
    assert not isinstance(cycle, (Unsat, Saturated))


def test_criterion_6_circuits(capsys):
    invalid = sum(not is_circuit(random_circuit(random.Random(s), 3).graph) for s in range(SEEDS))
    laws = _tally(checks.circuit_laws, range(SEEDS))
    sub = _tally(checks.subcircuit_relation, range(SEEDS // 2))
    report(capsys, 6, not invalid and not laws and not sub,
           f"{SEEDS} compositions invalid={invalid}, law violations={dict(laws)}, "
           f"{SEEDS // 2} subcircuit triples violations={dict(sub)}")


def test_criterion_7_order_axioms(capsys):
    bad = _tally(checks.order_axioms, range(SEEDS))
    report(capsys, 7, not bad, f"{SEEDS} instances, violations={dict(bad)}")


def test_criterion_8_round_trip(capsys):
    files = sorted(Path(__file__).resolve().parent.parent.rglob("*.gsp"))
    failed = []
    for f in files:
        once = serialize(parse_problem(f.read_text(encoding="utf-8")))
        if serialize(parse_problem(once)) != once:
            failed.append(f.name)
    report(capsys, 8, bool(files) and not failed, f"{len(files)} files, failed={failed}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
