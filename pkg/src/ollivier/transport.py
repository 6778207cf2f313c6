"""Wasserstein-1 distance by the transportation LP and by its Kantorovich dual."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import MeasureError, MetricError
from .graph import Metric, vertex_key
from .lp import LinearProgram, _require, solve_lp
from .numeric import exact
from .walks import FiniteMeasure


@dataclass(frozen=True)
class TransportPlan:
    value: Fraction
    coupling: dict

    def cost(self, d: Metric) -> Fraction:
        return sum((q * exact(d.finite(u, v)) for (u, v), q in self.coupling.items()), Fraction(0))


def _as_exact(mu: FiniteMeasure | Mapping) -> FiniteMeasure:
    if not isinstance(mu, FiniteMeasure):
        mu = FiniteMeasure(dict(mu))
    if mu.kind != "probability":
        raise MeasureError("transport needs probability measures")
    return mu.exact()


def _ordered(vs: Iterable) -> list:
    return sorted(set(vs), key=vertex_key)


def w1(d: Metric, mu, nu, hull: Iterable | None = None) -> TransportPlan:
    """Exact W1 distance and an optimal coupling.

    Parameters
    ----------
    d : Metric
    mu, nu : FiniteMeasure or mapping
        Probability measures; float weights are read exactly and renormalized.
    hull : iterable, optional
        Vertex set on which couplings may live. Defaults to
        ``supp(mu) | supp(nu)``; a larger set gives the same value.

    Returns
    -------
    TransportPlan
        ``value`` and ``coupling`` as ``{(u, v): mass}`` with zero entries dropped.
    """
    mu, nu = _as_exact(mu), _as_exact(nu)
    support = mu.support | nu.support
    verts = _ordered(support if hull is None else hull)
    if not support <= set(verts):
        raise MeasureError("hull does not contain the supports")
    if hull is None:
        rows_u, cols_v = _ordered(mu.support), _ordered(nu.support)
    else:
        rows_u = cols_v = verts
    pairs = [(u, v) for u in rows_u for v in cols_v]
    cost = [exact(d.finite(u, v)) for u, v in pairs]
    A_eq, b_eq = [], []
    for u in rows_u:
        A_eq.append([1 if p[0] == u else 0 for p in pairs])
        b_eq.append(mu[u])
    for v in cols_v:
        A_eq.append([1 if p[1] == v else 0 for p in pairs])
        b_eq.append(nu[v])
    sol = _require(solve_lp(LinearProgram(cost, (), (), "min", A_eq, b_eq)), "transportation program")
    coupling = {pq: x for pq, x in zip(pairs, sol.point) if x}
    return TransportPlan(sol.value, coupling)


def lipschitz_program(d: Metric, hull: list, anchor=None) -> tuple:
    """Constraint block shared by every potential-based program on ``hull``.

    Rows ``f(u) - f(v) <= d(u, v)`` for every ordered pair plus the anchor
    equality ``f(anchor) = diam(hull)``, which pins the translation freedom
    and makes ``f >= 0`` automatic.
    """
    n = len(hull)
    anchor = hull[0] if anchor is None else anchor
    idx = {v: i for i, v in enumerate(hull)}
    if anchor not in idx:
        raise MeasureError(f"anchor {anchor!r} not in hull")
    A, b = [], []
    dist = [[exact(d.finite(u, v)) for v in hull] for u in hull]
    for i in range(n):
        for j in range(i + 1, n):
            row = [0] * n
            row[i], row[j] = 1, -1
            A.append(row)
            b.append(dist[i][j])
            A.append([-c for c in row])
            b.append(dist[i][j])
    diam = max((dist[i][j] for i in range(n) for j in range(n)), default=Fraction(0))
    anchor_row = [0] * n
    anchor_row[idx[anchor]] = 1
    return A, b, [anchor_row], [diam]


def kantorovich_potential(d: Metric, mu, nu, hull: Iterable | None = None, anchor=None) -> tuple:
    """Maximize ``sum f (mu - nu)`` over 1-Lipschitz ``f`` on ``hull``.

    Returns ``(value, f)`` where ``f`` is a dict on the hull with
    ``f(anchor) = diam(hull)``. The anchor defaults to the smallest vertex id.
    """
    mu, nu = _as_exact(mu), _as_exact(nu)
    support = mu.support | nu.support
    verts = _ordered(support if hull is None else hull)
    if not support <= set(verts):
        raise MeasureError("hull does not contain the supports")
    A, b, A_eq, b_eq = lipschitz_program(d, verts, anchor)
    c = [mu[v] - nu[v] for v in verts]
    sol = _require(solve_lp(LinearProgram(c, A, b, "max", A_eq, b_eq)), "Kantorovich program")
    return sol.value, dict(zip(verts, sol.point))


def check_lipschitz(d: Metric, f: Mapping, what: str = "function") -> None:
    verts = _ordered(f)
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            if abs(f[u] - f[v]) > d.finite(u, v):
                raise MetricError(f"{what} is not 1-Lipschitz on ({u!r}, {v!r})", pair=(u, v))


def lipschitz_extend(f: Mapping, d: Metric, target: Iterable) -> dict:
    """Extend a 1-Lipschitz ``f`` from its domain to ``target`` by ``sup_w f(w) - d(z, w)``."""
    check_lipschitz(d, f)
    target = _ordered(target)
    if not set(f) <= set(target):
        raise MeasureError("target set must contain the domain of f")
    out = {}
    for z in target:
        if z in f:
            out[z] = f[z]
        else:
            out[z] = max(f[w] - d.finite(z, w) for w in f)
    return out
