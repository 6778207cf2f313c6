from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from ollivier.errors import MeasureError, WalkError
from ollivier.graph import Metric, WeightedGraph
from ollivier.numeric import poly_add
from ollivier.walks import (CustomWalk, FiniteMeasure, HeatKernelWalk, beta_walk, constant_walk,
                            polynomial_walk_from_json, theta_walk, xi_walk, zeta_walk)

from conftest import random_connected_graph


def test_beta_on_k2(k2):
    mu = beta_walk(k2).evaluate("x", Fraction(1, 4))
    assert mu.entries == {"x": Fraction(3, 4), "y": Fraction(1, 4)}


def test_beta_weighted_masses():
    g = WeightedGraph.from_edges([("x", "y", 2), ("x", "z", 1)], measure={"x": 4})
    mu = beta_walk(g).evaluate("x", Fraction(1, 2))
    # omega / m: y gets eps * 2/4, z gets eps * 1/4
    assert mu.entries == {"x": Fraction(5, 8), "y": Fraction(1, 4), "z": Fraction(1, 8)}


@pytest.mark.parametrize("factory", [beta_walk, zeta_walk, constant_walk,
                                     lambda g: xi_walk(g, Metric.from_graph(g), 2)])
def test_every_kind_starts_at_delta(k3, factory):
    w = factory(k3)
    for z in k3.vertices:
        assert w.evaluate(z, 0).entries == {z: 1}


def test_heat_kernel_starts_at_delta(k3):
    assert HeatKernelWalk(k3).evaluate("x", 0).entries == {"x": 1}


@pytest.mark.parametrize("t", [0.01, 0.3, 1.0])
def test_heat_kernel_k2_closed_form(k2, t):
    mu = HeatKernelWalk(k2).evaluate("x", t)
    assert mu["x"] == pytest.approx((1 + math.exp(-2 * t)) / 2, abs=1e-12)
    assert mu["y"] == pytest.approx((1 - math.exp(-2 * t)) / 2, abs=1e-12)


def test_heat_kernel_refuses_rational_mode(k2):
    with pytest.raises(WalkError):
        HeatKernelWalk(k2, arithmetic="rational").evaluate("x", Fraction(1, 10))


def test_one_jets(k2):
    assert beta_walk(k2).one_jet("x").entries == {"x": -1, "y": 1}
    assert HeatKernelWalk(k2).one_jet("x").entries == {"x": -1, "y": 1}
    assert constant_walk(k2).one_jet("x").entries == {}


def test_beta_jet_is_laplacian_row():
    g = WeightedGraph.from_edges([("a", "b", 3), ("a", "c", "1/2")], measure={"a": 2})
    jet = beta_walk(g).one_jet("a")
    assert jet.entries == {"a": Fraction(-7, 4), "b": Fraction(3, 2), "c": Fraction(1, 4)}


def test_support_hulls(k2, p3):
    assert beta_walk(k2).support_hull("x", "y") == {"x", "y"}
    assert beta_walk(p3).support_hull("x", "y") == {"x", "y", "z"}
    assert HeatKernelWalk(p3).support_hull("x", "y") == set(p3.vertices)


def test_zeta_and_xi_masses(p3):
    z = zeta_walk(p3).evaluate("y", Fraction(1, 3))
    assert z.entries == {"y": Fraction(2, 3), "x": Fraction(1, 6), "z": Fraction(1, 6)}
    g = WeightedGraph.from_edges([("a", "b", 1), ("a", "c", 2)])
    d = Metric.from_graph(g, "omega")
    xi = xi_walk(g, d, 1).evaluate("a", Fraction(1, 2))
    assert xi["a"] == Fraction(1, 2)
    assert float(xi["b"] / xi["c"]) == pytest.approx(math.e, rel=1e-12)
    assert xi.total() == 1


def test_zeta_isolated_vertex_is_delta():
    g = WeightedGraph({"a": 1, "b": 1, "c": 1}, {("a", "b"): 1})
    assert zeta_walk(g).evaluate("c", Fraction(1, 2)).entries == {"c": 1}


def test_beta_validity_and_negative_mass():
    g = WeightedGraph.from_edges([("x", "y", 2), ("x", "z", 2)])
    w = beta_walk(g)
    assert w.validity("x") == Fraction(1, 4)
    with pytest.raises(WalkError) as info:
        w.evaluate("x", Fraction(1, 2))
    assert info.value.context["vertex"] == "x"


def test_measure_invariants():
    with pytest.raises(MeasureError):
        FiniteMeasure({"a": Fraction(1, 2)})
    with pytest.raises(MeasureError):
        FiniteMeasure({"a": Fraction(3, 2), "b": Fraction(-1, 2)})
    assert FiniteMeasure({"a": 1, "b": -1}, "signed").total() == 0


def test_polynomial_table(p3):
    obj = [{"z": "x", "rows": [{"w": "y", "coeffs": ["0", "1/2", "1/2"]}]}]
    w = polynomial_walk_from_json(p3, obj)
    assert w.coefficients("x")["x"] == (1, Fraction(-1, 2), Fraction(-1, 2))
    assert w.one_jet("x").entries == {"x": Fraction(-1, 2), "y": Fraction(1, 2)}
    assert w.evaluate("y", Fraction(1, 2)).entries == {"y": 1}
    assert w.validity("x") == pytest.approx(1, abs=1e-9)
    with pytest.raises(WalkError):
        polynomial_walk_from_json(p3, [{"z": "x", "rows": [{"w": "y", "coeffs": ["1/2"]}]}])


def test_custom_walk_needs_derivative(k2):
    w = CustomWalk(k2, lambda z, e: {z: 1}, None, lambda z: [z])
    assert w.evaluate("x", Fraction(1, 2)).entries == {"x": 1}
    with pytest.raises(WalkError):
        w.one_jet("x")


@pytest.mark.parametrize("seed", range(12))
def test_random_walk_invariants(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(2, 7))
    d = Metric.from_graph(g)
    walks = [beta_walk(g), zeta_walk(g), xi_walk(g, d, rng.choice([1, 2]))]
    for w in walks:
        for z in g.vertices:
            row = w.coefficients(z)
            total = ()
            for cs in row.values():
                total = poly_add(total, cs)
            assert total == (1,)
            assert w.one_jet(z).total() == 0
            hull = w.support_hull(z, z)
            hi = w.validity(z)
            for k in range(21):
                eps = hi * Fraction(k, 20)
                mu = w.evaluate(z, eps)
                assert mu.total() == 1
                assert all(v >= 0 for v in mu.entries.values())
                assert mu.support <= hull
    jet = HeatKernelWalk(g).one_jet(g.vertices[0])
    assert jet.total() == 0


@pytest.mark.parametrize("seed", range(6))
def test_theta_normalization_identity(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(2, 6))
    # lam1 + lam2 * Deg + lam3 * sum(omega/m) == 1 for the lazy-walk coefficients
    lam1, lam2, lam3 = (1,), (0, -1), (0, 1)
    w = theta_walk(g, lam1, lam2, lam3, g.Deg, lambda z, u: g.omega(z, u) / g.m(z))
    for z in g.vertices:
        for k in range(20):
            eps = Fraction(k, 19) * w.validity(z)
            lhs = 1 - eps * g.Deg(z) + sum(eps * g.omega(z, u) / g.m(z) for u in g.neighbors(z))
            assert lhs == 1
            assert w.evaluate(z, eps).total() == 1
