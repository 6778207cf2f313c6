"""Curvature flows: RK4 integration of edge weights, distances and vertex measure.

The state is floating point. At every Runge-Kutta stage the weights are
converted exactly to rationals, curvature is computed by the exact LP path
and the result converted back to float, so a trajectory is a deterministic
function of its inputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Mapping

from .errors import FlowBoundaryError, FlowError, MetricDegenerationError, MetricError
from .graph import Metric, WeightedGraph, vertex_key
from .curvature import ric_ct, scal
from .numeric import format_number
from .walks import beta_walk

LAW_KINDS = ("classic", "classic-with-mass", "coupled-distance", "custom")
# relative slack for triangle checks on float-evolved distances
METRIC_TOL = 1e-12


@dataclass(frozen=True)
class FlowState:
    """Snapshot ``(t, omega, m, d)``; ``d`` is ``None`` when it is the path distance of ``omega``."""

    t: float
    omega: Mapping
    m: Mapping
    d: Mapping | None = None
    curvature: Mapping | None = field(default=None, compare=False)

    @classmethod
    def from_graph(cls, g: WeightedGraph, d: Metric | None = None) -> "FlowState":
        omega = {e: float(w) for e, w in g.omega_weights.items()}
        m = {v: float(g.m(v)) for v in g.vertices}
        table = None
        if d is not None:
            table = {}
            for i, u in enumerate(g.vertices):
                for v in g.vertices[i + 1:]:
                    table[(u, v)] = float(d.finite(u, v))
        return cls(0.0, omega, m, table)


@dataclass
class FlowLaw:
    """Right-hand side of the flow.

    ``kind`` selects a preset:

    ``classic``: ``omega' = -kappa * omega``, ``d = d_omega``, ``m' = 0``.
    ``classic-with-mass``: additionally ``m' = -h(scal) * m``.
    ``coupled-distance``: ``omega' = -kappa * omega`` and ``d' = -kappa * d`` for every pair.
    ``custom``: ``f``, ``g`` and ``h`` return ``omega'``, ``d'`` (or ``None`` for
    ``d = d_omega``) and ``m'``; each is called as ``fn(t, omega, d, m, kappa)``.

    ``walk`` builds the curvature walk from a graph snapshot and its metric.
    """

    kind: str = "classic"
    walk: Callable = field(default=lambda g, d: beta_walk(g))
    f: Callable | None = None
    g: Callable | None = None
    h: Callable | None = None
    scal_mode: str = "ct"
    uses_curvature: bool = True

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise FlowError(f"unknown flow law {self.kind!r}")
        if self.kind == "custom" and self.f is None:
            raise FlowError("custom law needs at least f")
        if self.kind == "classic-with-mass" and self.h is None:
            self.h = lambda s: s

    @property
    def evolves_distance(self) -> bool:
        return self.kind == "coupled-distance" or (self.kind == "custom" and self.g is not None)


def _snapshot(omega: Mapping, m: Mapping, template: WeightedGraph) -> WeightedGraph:
    return template.with_weights({e: Fraction(w) for e, w in omega.items()},
                                 {v: Fraction(x) for v, x in m.items()})


def _metric_from_table(vertices, table: Mapping, tol: float) -> Metric:
    full = {}
    for (u, v), x in table.items():
        full[(u, v)] = Fraction(x)
        full[(v, u)] = Fraction(x)
    for v in vertices:
        full[(v, v)] = Fraction(0)
    return Metric(vertices, full, "explicit", tol=tol)


class _Evaluator:
    def __init__(self, template: WeightedGraph, law: FlowLaw, threshold: float):
        self.template = template
        self.law = law
        self.threshold = threshold

    def check(self, t, omega, m, d):
        for e, w in omega.items():
            if not w > self.threshold:
                raise FlowBoundaryError(f"edge weight on {e} reached {w} at t={t}", component=e, t=t)
        for v, x in m.items():
            if not x > self.threshold:
                raise FlowBoundaryError(f"vertex measure at {v!r} reached {x} at t={t}", component=v, t=t)
        if d is not None:
            for pair, x in d.items():
                if not x > 0:
                    raise MetricDegenerationError(f"distance {pair} reached {x} at t={t}", component=pair, t=t)

    def curvature(self, omega, m, d):
        g = _snapshot(omega, m, self.template)
        if d is None:
            metric = Metric.from_graph(g, "omega")
        else:
            try:
                metric = _metric_from_table(g.vertices, d, METRIC_TOL)
            except MetricError as exc:
                raise MetricDegenerationError(f"evolved distance is no longer a metric: {exc}") from None
        if not self.law.uses_curvature:
            return g, metric, None, {}
        walk = self.law.walk(g, metric)
        pairs = list(d) if d is not None and self.law.kind == "coupled-distance" else list(g.edges)
        kappa = {p: float(ric_ct(g, metric, walk, *p)) for p in pairs}
        return g, metric, walk, kappa

    def rhs(self, t, omega, m, d):
        self.check(t, omega, m, d)
        g, metric, walk, kappa = self.curvature(omega, m, d)
        law = self.law
        dm = {v: 0.0 for v in m}
        dd = None
        if law.kind == "custom":
            domega = dict(law.f(t, omega, d, m, kappa))
            if law.g is not None:
                dd = dict(law.g(t, omega, d, m, kappa))
            if law.h is not None:
                dm = dict(law.h(t, omega, d, m, kappa))
        else:
            domega = {e: -kappa[e] * w for e, w in omega.items()}
            if law.kind == "classic-with-mass":
                for v in m:
                    s = float(scal(g, metric, walk, v, law.scal_mode))
                    dm[v] = -law.h(s) * m[v]
            if law.kind == "coupled-distance":
                dd = {p: -kappa[p] * x for p, x in d.items()}
        return domega, dm, dd, kappa


def _axpy(base: Mapping, k: Mapping | None, h: float) -> dict:
    if k is None:
        return dict(base)
    return {key: base[key] + h * k.get(key, 0.0) for key in base}


def _combine(base, ks, dt):
    k1, k2, k3, k4 = ks
    return {key: base[key] + dt / 6.0 * (k1.get(key, 0.0) + 2.0 * k2.get(key, 0.0)
                                         + 2.0 * k3.get(key, 0.0) + k4.get(key, 0.0))
            for key in base}


def _step(state: FlowState, law: FlowLaw, dt: float, template: WeightedGraph, threshold: float) -> tuple:
    if not dt > 0:
        raise FlowError("step size must be positive")
    ev = _Evaluator(template, law, threshold)
    d0 = state.d if law.evolves_distance else None
    t = state.t
    k1 = ev.rhs(t, state.omega, state.m, d0)
    om2, m2 = _axpy(state.omega, k1[0], dt / 2), _axpy(state.m, k1[1], dt / 2)
    d2 = _axpy(d0, k1[2], dt / 2) if d0 is not None else None
    k2 = ev.rhs(t + dt / 2, om2, m2, d2)
    om3, m3 = _axpy(state.omega, k2[0], dt / 2), _axpy(state.m, k2[1], dt / 2)
    d3 = _axpy(d0, k2[2], dt / 2) if d0 is not None else None
    k3 = ev.rhs(t + dt / 2, om3, m3, d3)
    om4, m4 = _axpy(state.omega, k3[0], dt), _axpy(state.m, k3[1], dt)
    d4 = _axpy(d0, k3[2], dt) if d0 is not None else None
    k4 = ev.rhs(t + dt, om4, m4, d4)
    ks = (k1, k2, k3, k4)
    omega = _combine(state.omega, [k[0] for k in ks], dt)
    m = _combine(state.m, [k[1] for k in ks], dt)
    d = _combine(d0, [k[2] or {} for k in ks], dt) if d0 is not None else None
    new_t = t + dt
    ev.check(new_t, omega, m, d)
    if d is not None:
        try:
            _metric_from_table(template.vertices, d, METRIC_TOL)
        except MetricError as exc:
            raise MetricDegenerationError(f"evolved distance is no longer a metric at t={new_t}: {exc}") from None
    return FlowState(new_t, omega, m, d), k1[3]


def flow_step(state: FlowState, law: FlowLaw, dt: float, template: WeightedGraph,
              threshold: float = 1e-9) -> FlowState:
    """One classical fourth-order Runge-Kutta step.

    Curvature is recomputed from each stage's weights (``template`` supplies
    the fixed edge set). Raises :class:`FlowBoundaryError` if any stage or
    the result has a weight or measure at or below ``threshold``, and
    :class:`MetricDegenerationError` if an independently evolved ``d`` stops
    being a metric.
    """
    return _step(state, law, dt, template, threshold)[0]


@dataclass
class Trajectory:
    states: list
    reason: str
    message: str = ""

    @property
    def final(self) -> FlowState:
        return self.states[-1]

    def edges(self) -> list:
        return sorted(self.states[0].omega, key=lambda e: (vertex_key(e[0]), vertex_key(e[1])))

    def vertices(self) -> list:
        return sorted(self.states[0].m, key=vertex_key)

    def write_csv(self, fh) -> None:
        edges, verts = self.edges(), self.vertices()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"omega[{u}|{v}]" for u, v in edges] + [f"m[{v}]" for v in verts])
        for s in self.states:
            w.writerow([format_number(float(s.t))] + [format_number(s.omega[e]) for e in edges]
                       + [format_number(s.m[v]) for v in verts])

    def snapshots(self, every: int = 1) -> dict:
        edges, verts = self.edges(), self.vertices()
        snaps = []
        for i, s in enumerate(self.states):
            if i % every and i != len(self.states) - 1:
                continue
            snap = {"t": format_number(float(s.t)),
                    "omega": [{"u": u, "v": v, "value": format_number(s.omega[(u, v)])} for u, v in edges],
                    "m": [{"id": v, "value": format_number(s.m[v])} for v in verts]}
            if s.d is not None:
                snap["d"] = [{"u": u, "v": v, "value": format_number(x)} for (u, v), x in sorted(
                    s.d.items(), key=lambda kv: (vertex_key(kv[0][0]), vertex_key(kv[0][1])))]
            snaps.append(snap)
        return {"reason": self.reason, "message": self.message, "snapshots": snaps}

    def write_json(self, fh, every: int = 1) -> None:
        json.dump(self.snapshots(every), fh, indent=2)
        fh.write("\n")


def flow_run(g0: WeightedGraph, law: FlowLaw, t_end: float, dt: float, threshold: float = 1e-9,
             d0: Metric | None = None) -> Trajectory:
    """Integrate from ``t = 0`` to ``t_end`` in fixed steps of ``dt``.

    Parameters
    ----------
    g0 : WeightedGraph
        Initial weights and measure; the edge set stays fixed.
    law : FlowLaw
    t_end, dt : float
    threshold : float
        Weights or measures at or below this value stop the run with reason
        ``"boundary"``.
    d0 : Metric, optional
        Initial distance for laws that evolve ``d`` independently.

    Returns
    -------
    Trajectory
        States at ``0, dt, 2 dt, ...`` and the stop reason: ``"completed"``,
        ``"boundary"`` or ``"metric-degeneration"``.
    """
    if not t_end > 0:
        raise FlowError("t_end must be positive")
    if not dt > 0:
        raise FlowError("step size must be positive")
    if law.evolves_distance and d0 is None:
        d0 = Metric.from_graph(g0, "omega")
    state = FlowState.from_graph(g0, d0 if law.evolves_distance else None)
    _Evaluator(g0, law, threshold).check(0.0, state.omega, state.m, state.d)
    states = [state]
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        n_steps = int(t_end // dt)
    for k in range(n_steps):
        try:
            nxt, kappa = _step(state, law, dt, g0, threshold)
        except FlowBoundaryError as exc:
            return Trajectory(states, "boundary", exc.message)
        except MetricDegenerationError as exc:
            return Trajectory(states, "metric-degeneration", exc.message)
        # keep t on the grid k * dt rather than accumulating rounding
        nxt = replace(nxt, t=(k + 1) * dt)
        states[-1] = replace(state, curvature=kappa)
        state = nxt
        states.append(state)
    return Trajectory(states, "completed")
