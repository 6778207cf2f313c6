from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ollivier.errors import GraphFormatError, MetricError, UnknownVertexError, WeightError
from ollivier.graph import (UNREACHABLE, Metric, WeightedGraph, apply_laplacian, grad, graph_from_json,
                            graph_to_json, load_graph, metric_ball, shortest_path_distance)

from conftest import random_connected_graph
from oracles import all_simple_path_lengths, bfs_distances


def test_same_vertex_distance_is_zero(k2):
    assert shortest_path_distance(k2, "eta", "x", "x") == 0


def test_path_distance_adds_weights():
    g = WeightedGraph.from_edges([("x", "y", 1, 2), ("y", "z", 1, 3)])
    assert shortest_path_distance(g, "eta", "x", "z") == 5


def test_triangle_prefers_two_hop_route():
    g = WeightedGraph.from_edges([("x", "z", 1, 10), ("x", "y", 1, 2), ("y", "z", 1, 3)])
    assert shortest_path_distance(g, "eta", "x", "z") == 5
    adj = {v: g.neighbors(v) for v in g.vertices}
    assert all_simple_path_lengths(adj, g.eta, "x", "z") == 5


def test_disconnected_pair_is_unreachable():
    g = WeightedGraph({"a": 1, "b": 1, "c": 1}, {("a", "b"): 1})
    assert shortest_path_distance(g, "omega", "a", "c") is UNREACHABLE
    d = Metric.from_graph(g)
    assert d("a", "c") is UNREACHABLE
    assert metric_ball(g, d, "a", 100) == {"a", "b"}


def test_unknown_vertex_rejected(k2):
    with pytest.raises(UnknownVertexError):
        shortest_path_distance(k2, "eta", "x", "q")


def test_nonpositive_weight_rejected():
    with pytest.raises(WeightError):
        WeightedGraph.from_edges([("x", "y", 0)])
    with pytest.raises(WeightError):
        WeightedGraph({"x": 0, "y": 1}, {("x", "y"): 1})


def test_weights_symmetric(k3):
    assert k3.omega("x", "y") == k3.omega("y", "x")
    assert k3.eta("z", "x") == k3.eta("x", "z")


@pytest.mark.parametrize("seed", range(50))
def test_unit_weights_match_bfs(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(2, 9), weighted=False)
    adj = {v: g.neighbors(v) for v in g.vertices}
    d = Metric.from_graph(g, "combinatorial")
    for s in g.vertices:
        ref = bfs_distances(adj, s)
        for t in g.vertices:
            assert d(s, t) == ref[t]


@pytest.mark.parametrize("seed", range(20))
def test_weighted_distance_matches_path_enumeration(seed):
    rng = random.Random(1000 + seed)
    g = random_connected_graph(rng, rng.randint(2, 6))
    adj = {v: g.neighbors(v) for v in g.vertices}
    d = Metric.from_graph(g, "omega")
    for s in g.vertices:
        for t in g.vertices:
            ref = all_simple_path_lengths(adj, g.omega, s, t) if s != t else 0
            assert d(s, t) == ref


def test_metric_axioms_rejected():
    with pytest.raises(MetricError):
        Metric.from_matrix(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(MetricError):
        Metric.from_matrix(["a", "b"], [[0, 1], [2, 0]])
    with pytest.raises(MetricError):
        Metric.from_matrix(["a", "b"], [[0, 0], [0, 0]])


def test_explicit_metric_accepted():
    d = Metric.from_matrix(["a", "b", "c"], [[0, "1/2", 1], ["1/2", 0, 1], [1, 1, 0]])
    assert d("a", "b") == Fraction(1, 2)
    assert d.diameter() == 1
    assert d.scaled(3)("a", "c") == 3


def test_laplacian_of_constant_is_zero(k3):
    assert all(v == 0 for v in apply_laplacian(k3, "general", {v: 7 for v in k3.vertices}).values())


def test_laplacian_k2():
    g = WeightedGraph.from_edges([("x", "y")])
    out = apply_laplacian(g, "general", {"x": 0, "y": 1})
    assert out == {"x": 1, "y": -1}


def test_laplacian_variants_on_star():
    g = WeightedGraph.from_edges([("c", "a", 2), ("c", "b", 3), ("c", "d", 5)], measure={"c": 7})
    f = {"c": 0, "a": 1, "b": 0, "d": 0}
    assert apply_laplacian(g, "combinatorial", f)["c"] == 1
    assert apply_laplacian(g, "normalized", f)["c"] == Fraction(2, 10)
    unit = WeightedGraph.from_edges([("c", "a"), ("c", "b"), ("c", "d")])
    assert apply_laplacian(unit, "normalized", f)["c"] == Fraction(1, 3)
    assert apply_laplacian(g, "general", f)["c"] == Fraction(2, 7)


def test_normalized_laplacian_rejects_isolated_vertex():
    g = WeightedGraph({"a": 1, "b": 1, "c": 1}, {("a", "b"): 1})
    with pytest.raises(GraphFormatError):
        apply_laplacian(g, "normalized", {"a": 0, "b": 0, "c": 0})


@pytest.mark.parametrize("seed", range(10))
def test_laplacian_divergence_and_self_adjoint(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(2, 7))
    verts = g.vertices
    basis = [{v: Fraction(int(v == w)) for v in verts} for w in verts]
    for f in basis + [{v: Fraction(rng.randint(-5, 5), 3) for v in verts}]:
        lf = apply_laplacian(g, "general", f)
        assert sum(g.m(v) * lf[v] for v in verts) == 0
    for f in basis:
        lf = apply_laplacian(g, "general", f)
        for h in basis:
            lh = apply_laplacian(g, "general", h)
            assert sum(g.m(v) * lf[v] * h[v] for v in verts) == sum(g.m(v) * f[v] * lh[v] for v in verts)


def test_grad_values():
    d = Metric.from_matrix(["x", "y"], [[0, 3], [3, 0]])
    f = {"x": 0, "y": 3}
    assert grad(d, f, "x", "y") == 1
    assert grad(d, f, "y", "x") == -1
    assert grad(d, {"x": 2, "y": 2}, "x", "y") == 0
    with pytest.raises(MetricError):
        grad(d, f, "x", "x")


def test_metric_ball(p3):
    d = Metric.from_graph(p3)
    assert metric_ball(p3, d, "x", 0) == {"x"}
    assert metric_ball(p3, d, "x", 1) == {"x", "y"}
    assert metric_ball(p3, d, "x", d.diameter()) == set(p3.vertices)
    with pytest.raises(UnknownVertexError):
        metric_ball(p3, d, "w", 1)


def test_json_defaults_and_errors(tmp_path):
    g = graph_from_json({"vertices": [{"id": "x"}, {"id": "y"}], "edges": [{"u": "x", "v": "y"}]})
    assert g.m("x") == 1 and g.omega("x", "y") == 1 and g.eta("x", "y") == 1
    with pytest.raises(GraphFormatError, match="nonpositive vertex measure"):
        graph_from_json({"vertices": [{"id": "x", "m": 0}], "edges": []})
    with pytest.raises(GraphFormatError, match="duplicate edge"):
        graph_from_json({"vertices": ["x", "y"], "edges": [{"u": "x", "v": "y"}, {"u": "y", "v": "x"}]})
    with pytest.raises(GraphFormatError, match="dangling"):
        graph_from_json({"vertices": ["x"], "edges": [{"u": "x", "v": "q"}]})
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [\n  {"id": "x"},\n  oops\n]}')
    with pytest.raises(GraphFormatError, match="line 3"):
        load_graph(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=2, max_value=7))
def test_json_round_trip(seed, n):
    g = random_connected_graph(random.Random(seed), n)
    text = json.dumps(graph_to_json(g))
    assert graph_from_json(json.loads(text)) == g
