"""One-parameter random-walk families ``eps -> mu_z^eps``.

Every family satisfies ``mu_z^0 = delta_z``. Polynomial families (all the
lazy walks, theta-walks with polynomial coefficients and user tables) are
stored as exact coefficient lists per ``(z, w)`` so that curvature profiles
can be traced exactly. The heat-kernel family is float-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
import scipy.linalg

from .errors import MeasureError, WalkError
from .graph import Metric, WeightedGraph, laplacian_rows, vertex_key
from .numeric import exact, parse_number, poly_add, poly_degree, poly_eval, poly_scale, poly_trim

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class FiniteMeasure:
    """Finitely supported measure; zero entries are dropped.

    ``kind`` is ``"probability"`` (nonnegative, total 1) or ``"signed"``.
    Probability invariants are checked exactly for rational weights and to
    ``FLOAT_TOL`` for floats.
    """

    entries: Mapping
    kind: str = "probability"

    def __post_init__(self):
        clean = {w: v for w, v in self.entries.items() if v != 0}
        object.__setattr__(self, "entries", dict(sorted(clean.items(), key=lambda kv: vertex_key(kv[0]))))
        if self.kind not in ("probability", "signed"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == "probability":
            self.check_probability()

    def check_probability(self) -> None:
        is_float = any(isinstance(v, float) for v in self.entries.values())
        tol = FLOAT_TOL if is_float else 0
        for w, v in self.entries.items():
            if v < -tol:
                raise MeasureError(f"negative mass {v} at {w!r}", vertex=w)
        total = self.total()
        if abs(total - 1) > tol:
            raise MeasureError(f"probability measure has total mass {total}")

    def __getitem__(self, w):
        return self.entries.get(w, 0)

    @property
    def support(self) -> frozenset:
        return frozenset(self.entries)

    def total(self):
        return sum(self.entries.values(), Fraction(0))

    def items(self):
        return self.entries.items()

    def exact(self) -> "FiniteMeasure":
        """Exact-rational copy; float probability weights are renormalized exactly."""
        ent = {w: exact(v) for w, v in self.entries.items()}
        if self.kind == "probability":
            total = sum(ent.values(), Fraction(0))
            ent = {w: v / total for w, v in ent.items() if v > 0}
        return FiniteMeasure(ent, self.kind)

    @staticmethod
    def delta(z) -> "FiniteMeasure":
        return FiniteMeasure({z: Fraction(1)})


class WalkFamily:
    """Base class. Subclasses implement :meth:`evaluate`, :meth:`one_jet`, :meth:`hull`."""

    kind = "abstract"
    arithmetic = "rational"

    def __init__(self, graph: WeightedGraph):
        self.graph = graph

    def evaluate(self, z, eps) -> FiniteMeasure:
        raise NotImplementedError

    def one_jet(self, z) -> FiniteMeasure:
        raise WalkError(f"{self.kind} walk has no registered derivative at 0")

    def hull(self, z) -> frozenset:
        """Set containing ``supp(mu_z^eps)`` for every admissible ``eps``."""
        raise NotImplementedError

    def support_hull(self, x, y) -> frozenset:
        return frozenset(self.hull(x)) | frozenset(self.hull(y))

    def validity(self, z):
        """Largest ``eps_max <= 1`` with ``mu_z^eps`` a probability measure on ``[0, eps_max]``."""
        return Fraction(1)

    def validity_interval(self, *vertices) -> tuple:
        hi = min((self.validity(z) for z in vertices), default=Fraction(1))
        return (Fraction(0), hi)

    @property
    def is_polynomial(self) -> bool:
        return False

    def check_params(self, z, eps) -> None:
        self.graph.check_vertex(z)
        if eps < 0 or eps > 1:
            raise WalkError(f"parameter {eps} outside [0, 1]", vertex=z)


class PolynomialWalk(WalkFamily):
    """Walk with ``mu_z^eps(w) = p_zw(eps)`` for exact coefficient lists.

    Parameters
    ----------
    graph : WeightedGraph
    table : mapping z -> (mapping w -> coefficients)
        Coefficients are in increasing degree. Vertices missing from the
        table are lazy with ``mu_z^eps = delta_z``.
    kind : str
        Label reported in diagnostics.
    """

    def __init__(self, graph: WeightedGraph, table: Mapping, kind: str = "polynomial"):
        super().__init__(graph)
        self.kind = kind
        rows = {}
        for z in graph.vertices:
            row = {w: poly_trim(exact(c) for c in cs) for w, cs in table.get(z, {z: (1,)}).items()}
            row = {w: cs for w, cs in row.items() if cs}
            for w in row:
                graph.check_vertex(w)
            total = ()
            for cs in row.values():
                total = poly_add(total, cs)
            if total != (Fraction(1),):
                raise WalkError(f"masses at {z!r} do not sum to 1 identically", vertex=z)
            for w, cs in row.items():
                if w != z and cs[0] != 0:
                    raise WalkError(f"mu_{z}^0 must be delta_{z}; mass at {w!r} is {cs[0]}", vertex=z)
            rows[z] = row
        self._rows = rows
        self._validity = {}

    @property
    def is_polynomial(self) -> bool:
        return True

    def coefficients(self, z) -> dict:
        self.graph.check_vertex(z)
        return dict(self._rows[z])

    @property
    def degree(self) -> int:
        return max((poly_degree(cs) for row in self._rows.values() for cs in row.values()), default=0)

    def evaluate(self, z, eps) -> FiniteMeasure:
        self.check_params(z, eps)
        eps = exact(eps)
        ent = {w: poly_eval(cs, eps) for w, cs in self._rows[z].items()}
        for w, v in ent.items():
            if v < 0:
                raise WalkError(f"negative mass {v} at {w!r} for z={z!r}, eps={eps}; "
                                f"walk is valid on [0, {self.validity(z)}]", vertex=w, z=z)
        return FiniteMeasure(ent)

    def one_jet(self, z) -> FiniteMeasure:
        self.graph.check_vertex(z)
        return FiniteMeasure({w: cs[1] if len(cs) > 1 else 0 for w, cs in self._rows[z].items()},
                             "signed")

    def hull(self, z) -> frozenset:
        self.graph.check_vertex(z)
        return frozenset(self._rows[z]) | {z}

    def validity(self, z):
        if z not in self._validity:
            self.graph.check_vertex(z)
            self._validity[z] = min((_nonneg_until(cs) for cs in self._rows[z].values()),
                                    default=Fraction(1))
        return self._validity[z]


def _nonneg_until(coeffs, samples: int = 256, iters: int = 60) -> Fraction:
    """Largest ``t <= 1`` with ``p >= 0`` on ``[0, t]`` (exact for degree <= 1)."""
    coeffs = poly_trim(coeffs)
    if not coeffs:
        return Fraction(1)
    if len(coeffs) <= 2:
        a = coeffs[0]
        b = coeffs[1] if len(coeffs) == 2 else 0
        if a < 0:
            return Fraction(0)
        if b >= 0:
            return Fraction(1)
        return min(Fraction(1), a / -b)
    # lowest-order nonzero coefficient decides the sign just right of 0
    lead = next(c for c in coeffs if c != 0)
    if lead < 0:
        return Fraction(0)
    prev = Fraction(0)
    for k in range(1, samples + 1):
        t = Fraction(k, samples)
        if poly_eval(coeffs, t) < 0:
            lo, hi = prev, t
            for _ in range(iters):
                mid = (lo + hi) / 2
                if poly_eval(coeffs, mid) < 0:
                    hi = mid
                else:
                    lo = mid
            return lo
        prev = t
    return Fraction(1)


def theta_walk(graph: WeightedGraph, lam1, lam2, lam3, phi1: Callable, phi2: Callable,
               kind: str = "theta") -> PolynomialWalk:
    """Walk with idle mass ``lam1 + lam2*phi1(z)`` and mass ``lam3*phi2(z, w)`` at neighbours.

    ``lam1``, ``lam2`` and ``lam3`` are coefficient lists in ``eps``; ``phi1``
    maps a vertex and ``phi2`` a (vertex, neighbour) pair to exact weights.
    """
    lam1 = tuple(exact(c) for c in lam1)
    lam2 = tuple(exact(c) for c in lam2)
    lam3 = tuple(exact(c) for c in lam3)
    table = {}
    for z in graph.vertices:
        row = {z: poly_add(lam1, poly_scale(lam2, exact(phi1(z))))}
        for w in graph.neighbors(z):
            row[w] = poly_scale(lam3, exact(phi2(z, w)))
        table[z] = row
    return PolynomialWalk(graph, table, kind)


def beta_walk(graph: WeightedGraph) -> PolynomialWalk:
    """Lazy walk ``delta_z + eps * Delta delta_z``: idle ``1 - eps Deg(z)``, ``eps omega_zw / m(z)`` at neighbours."""
    return theta_walk(graph, (1,), (0, -1), (0, 1), graph.Deg,
                      lambda z, w: graph.omega(z, w) / graph.m(z), kind="beta")


def zeta_walk(graph: WeightedGraph) -> PolynomialWalk:
    """Idle ``1 - eps`` and uniform ``eps / deg(z)`` on neighbours (delta at isolated vertices)."""
    table = {}
    for z in graph.vertices:
        nbrs = graph.neighbors(z)
        if not nbrs:
            table[z] = {z: (Fraction(1),)}
            continue
        share = Fraction(1, len(nbrs))
        table[z] = {z: (Fraction(1), Fraction(-1)), **{w: (Fraction(0), share) for w in nbrs}}
    return PolynomialWalk(graph, table, "zeta")


def xi_walk(graph: WeightedGraph, metric: Metric, p=1) -> PolynomialWalk:
    """Idle ``1 - eps``; neighbour ``w`` gets ``eps * exp(-d(z,w)^p) / C_z`` with per-vertex ``C_z``.

    The exponential weights are computed in floating point, then converted
    to exact rationals and normalized exactly so each row sums to 1.
    """
    p = float(p)
    table = {}
    for z in graph.vertices:
        nbrs = graph.neighbors(z)
        if not nbrs:
            table[z] = {z: (Fraction(1),)}
            continue
        raw = {w: Fraction(math.exp(-float(metric.finite(z, w)) ** p)) for w in nbrs}
        if any(v == 0 for v in raw.values()):
            raise WalkError(f"xi weight underflows at {z!r}; distances too large for p={p}", vertex=z)
        total = sum(raw.values())
        table[z] = {z: (Fraction(1), Fraction(-1)),
                    **{w: (Fraction(0), v / total) for w, v in raw.items()}}
    return PolynomialWalk(graph, table, "xi")


def constant_walk(graph: WeightedGraph) -> PolynomialWalk:
    """The trivial family ``mu_z^eps = delta_z``."""
    return PolynomialWalk(graph, {z: {z: (1,)} for z in graph.vertices}, "constant")


def polynomial_walk_from_json(graph: WeightedGraph, obj) -> PolynomialWalk:
    """Table walk from ``{"z": ..., "rows": [{"w": ..., "coeffs": [...]}]}`` objects.

    ``obj`` may be a single object or a list of them. When a row for ``z``
    itself is absent the idle mass is ``1 - sum`` of the given rows.
    """
    records = obj if isinstance(obj, list) else [obj]
    table = {}
    for i, rec in enumerate(records):
        try:
            z = rec["z"]
            rows = rec["rows"]
        except (KeyError, TypeError):
            raise WalkError(f"polynomial table entry {i} needs 'z' and 'rows'") from None
        graph.check_vertex(z)
        if z in table:
            raise WalkError(f"duplicate polynomial table entry for {z!r}")
        row = {}
        for j, r in enumerate(rows):
            try:
                row[r["w"]] = tuple(parse_number(c) for c in r["coeffs"])
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise WalkError(f"entry {i} row {j}: bad coefficients ({exc})") from None
        if z not in row:
            rest = ()
            for cs in row.values():
                rest = poly_add(rest, cs)
            row[z] = poly_add((Fraction(1),), poly_scale(rest, -1))
        table[z] = row
    return PolynomialWalk(graph, table, "polynomial")


class HeatKernelWalk(WalkFamily):
    """``mu_z^eps = exp(eps * Delta) delta_z`` computed with a dense matrix exponential.

    Float only: :meth:`evaluate` refuses the rational mode. The one-jet is
    the exact Laplacian row.
    """

    kind = "heat"
    arithmetic = "float"

    def __init__(self, graph: WeightedGraph, variant: str = "general", arithmetic: str = "float"):
        super().__init__(graph)
        self.variant = variant
        self.arithmetic = arithmetic
        self._rows = laplacian_rows(graph, variant)
        idx = {v: i for i, v in enumerate(graph.vertices)}
        n = len(idx)
        mat = np.zeros((n, n))
        for x, row in self._rows.items():
            for w, c in row.items():
                mat[idx[x], idx[w]] = float(c)
        self._index = idx
        self._matrix = mat

    def evaluate(self, z, eps) -> FiniteMeasure:
        self.check_params(z, eps)
        if self.arithmetic == "rational":
            raise WalkError("heat-kernel walk needs float arithmetic")
        if eps == 0:
            return FiniteMeasure.delta(z)
        # Delta acts on functions; mu_z^eps(w) is the row z of exp(eps Delta)
        row = scipy.linalg.expm(float(eps) * self._matrix)[self._index[z]]
        row = np.clip(row, 0.0, None)
        row = row / row.sum()
        return FiniteMeasure({w: float(row[i]) for w, i in self._index.items() if row[i] > 0})

    def one_jet(self, z) -> FiniteMeasure:
        self.graph.check_vertex(z)
        return FiniteMeasure(self._rows[z], "signed")

    def hull(self, z) -> frozenset:
        self.graph.check_vertex(z)
        return frozenset(self.graph.vertices)


class CustomWalk(WalkFamily):
    """User walk from an ``(evaluate, derivative, support_hull)`` triple.

    ``evaluate(z, eps)`` and ``derivative(z)`` return mappings ``w -> mass``;
    ``support_hull(z)`` returns an iterable of vertices. ``derivative`` may
    be ``None``, in which case :meth:`one_jet` raises.
    """

    kind = "custom"

    def __init__(self, graph: WeightedGraph, evaluate: Callable, derivative: Callable | None,
                 support_hull: Callable, arithmetic: str = "rational"):
        super().__init__(graph)
        self._evaluate = evaluate
        self._derivative = derivative
        self._hull = support_hull
        self.arithmetic = arithmetic

    def evaluate(self, z, eps) -> FiniteMeasure:
        self.check_params(z, eps)
        ent = dict(self._evaluate(z, eps))
        for w, v in ent.items():
            if v < 0:
                raise WalkError(f"negative mass {v} at {w!r} for z={z!r}, eps={eps}", vertex=w, z=z)
        return FiniteMeasure(ent)

    def one_jet(self, z) -> FiniteMeasure:
        if self._derivative is None:
            raise WalkError("custom walk has no registered derivative at 0")
        jet = FiniteMeasure(dict(self._derivative(z)), "signed")
        if any(isinstance(v, float) for v in jet.entries.values()):
            if abs(float(jet.total())) > FLOAT_TOL:
                raise WalkError(f"one-jet at {z!r} does not have zero total", vertex=z)
        elif jet.total() != 0:
            raise WalkError(f"one-jet at {z!r} does not have zero total", vertex=z)
        return jet

    def hull(self, z) -> frozenset:
        return frozenset(self._hull(z)) | {z}


WALK_KINDS = ("beta", "zeta", "xi", "poly", "heat", "constant", "custom")


def make_walk(kind: str, graph: WeightedGraph, metric: Metric | None = None, *,
              p=1, table=None, arithmetic: str = "rational", custom: tuple | None = None) -> WalkFamily:
    """Factory over the built-in kinds."""
    if kind == "beta":
        return beta_walk(graph)
    if kind == "zeta":
        return zeta_walk(graph)
    if kind == "xi":
        if metric is None:
            raise WalkError("xi walk needs a metric")
        return xi_walk(graph, metric, p)
    if kind == "poly":
        if table is None:
            raise WalkError("polynomial walk needs a table")
        return polynomial_walk_from_json(graph, table)
    if kind == "heat":
        return HeatKernelWalk(graph, arithmetic=arithmetic)
    if kind == "constant":
        return constant_walk(graph)
    if kind == "custom":
        if custom is None:
            raise WalkError("custom walk needs (evaluate, derivative, support_hull)")
        return CustomWalk(graph, *custom, arithmetic=arithmetic)
    raise WalkError(f"unknown walk kind {kind!r}")


# Functional aliases matching the operation names.

def evaluate_walk(walk: WalkFamily, z, eps) -> FiniteMeasure:
    return walk.evaluate(z, eps)


def one_jet(walk: WalkFamily, z) -> FiniteMeasure:
    return walk.one_jet(z)


def support_hull(walk: WalkFamily, x, y) -> frozenset:
    return walk.support_hull(x, y)
