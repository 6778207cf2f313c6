from __future__ import annotations

import random
from fractions import Fraction

import pytest

from ollivier.graph import WeightedGraph
from ollivier.walks import PolynomialWalk

from oracles import random_rational

ACCEPTANCE_LINES: list = []


def random_connected_graph(rng: random.Random, n: int, extra: float = 0.4, weighted: bool = True,
                           measure: bool = True) -> WeightedGraph:
    """Random spanning tree plus random chords, with rational weights."""
    verts = list(range(n))
    omega = {}
    for v in verts[1:]:
        u = rng.randrange(v)
        omega[(u, v)] = random_rational(rng) if weighted else Fraction(1)
    for u in verts:
        for v in verts[u + 1:]:
            if (u, v) not in omega and rng.random() < extra:
                omega[(u, v)] = random_rational(rng) if weighted else Fraction(1)
    m = {v: (random_rational(rng, 1, 3, 2) if measure else Fraction(1)) for v in verts}
    return WeightedGraph(m, omega)


def random_affine_walk(rng: random.Random, g: WeightedGraph, degree: int = 1) -> PolynomialWalk:
    """``(1 - eps^k) delta_z + eps^k nu_z`` with random ``nu_z`` on the closed neighbourhood."""
    table = {}
    for z in g.vertices:
        ball = [z] + list(g.neighbors(z))
        raw = [rng.randint(0, 4) for _ in ball]
        raw[0] += 1
        total = sum(raw)
        row = {w: tuple([0] * degree + [Fraction(r, total)]) for w, r in zip(ball, raw)}
        row[z] = tuple([1] + [0] * (degree - 1) + [Fraction(raw[0], total) - 1])
        table[z] = row
    return PolynomialWalk(g, table, "random-affine" if degree == 1 else "random-polynomial")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def k2():
    return WeightedGraph.from_edges([("x", "y")])


@pytest.fixture
def p3():
    return WeightedGraph.from_edges([("x", "y"), ("y", "z")])


@pytest.fixture
def k3():
    return WeightedGraph.from_edges([("x", "y"), ("y", "z"), ("x", "z")])


def record_acceptance(number: int, name: str, passed: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}  {name}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    ACCEPTANCE_LINES.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
