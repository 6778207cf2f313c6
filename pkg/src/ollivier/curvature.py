"""Discrete-time, continuous-time and operator curvature, profiles and scalar curvature."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import MeasureError, PieceBudgetExceeded, UnknownVertexError, WalkError
from .graph import Metric, WeightedGraph, laplacian_rows, vertex_key
from .lp import (LinearProgram, Piece, PiecewiseFunction, _require, solve_lp, solve_parametric_affine,
                 trace_parametric_polynomial)
from .numeric import exact, format_number, poly_add, poly_degree, poly_scale
from .polytope import pieces_bound
from .transport import lipschitz_program, w1
from .walks import WalkFamily

NEG_INF = float("-inf")


@dataclass(frozen=True)
class OperatorMatrix:
    """Square matrix ``{u: {w: entry}}`` over an ordered index set."""

    index: tuple
    rows: Mapping

    def __post_init__(self):
        index = tuple(sorted(self.index, key=vertex_key))
        ids = set(index)
        rows = {}
        for u in index:
            row = {w: exact(v) for w, v in self.rows.get(u, {}).items() if v != 0}
            for w in row:
                if w not in ids:
                    raise UnknownVertexError(f"operator entry ({u!r}, {w!r}) outside index set")
            rows[u] = row
        for u in self.rows:
            if u not in ids:
                raise UnknownVertexError(f"operator row {u!r} outside index set")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def laplacian(cls, g: WeightedGraph, variant: str = "general") -> "OperatorMatrix":
        return cls(g.vertices, laplacian_rows(g, variant))

    @classmethod
    def identity(cls, vertices: Iterable) -> "OperatorMatrix":
        vs = tuple(vertices)
        return cls(vs, {v: {v: 1} for v in vs})

    @classmethod
    def from_dense(cls, vertices, matrix) -> "OperatorMatrix":
        vs = list(vertices)
        return cls(vs, {u: {w: matrix[i][j] for j, w in enumerate(vs)} for i, u in enumerate(vs)})

    def entry(self, u, w) -> Fraction:
        return self.rows[u].get(w, Fraction(0))

    def dense(self) -> list:
        return [[self.entry(u, w) for w in self.index] for u in self.index]

    def scaled(self, c) -> "OperatorMatrix":
        c = exact(c)
        return OperatorMatrix(self.index, {u: {w: c * v for w, v in r.items()} for u, r in self.rows.items()})

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.index != other.index:
            raise ValueError("operators have different index sets")
        rows = {}
        for u in self.index:
            r = dict(self.rows[u])
            for w, v in other.rows[u].items():
                r[w] = r.get(w, Fraction(0)) + v
            rows[u] = r
        return OperatorMatrix(self.index, rows)


# -- discrete-time curvature ---------------------------------------------

def ric_eps(g: WeightedGraph, d: Metric, walk: WalkFamily, x, y, eps, hull: Iterable | None = None) -> Fraction:
    """``1 - W1(mu_x^eps, mu_y^eps) / d(x, y)``, exact.

    The transport problem lives on the supports of the two measures unless
    ``hull`` is given (any superset gives the same value).
    """
    _check_pair(g, x, y)
    mu, nu = walk.evaluate(x, eps), walk.evaluate(y, eps)
    plan = w1(d, mu, nu, hull)
    return 1 - plan.value / exact(d.finite(x, y))


def _check_pair(g, x, y):
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        raise ValueError("curvature needs two distinct vertices")


@dataclass(frozen=True)
class Switch:
    eps: Fraction
    left_slope: Fraction
    right_slope: Fraction

    @property
    def jump(self) -> Fraction:
        """Right minus left slope; nonpositive for concave profiles."""
        return self.right_slope - self.left_slope


@dataclass(frozen=True)
class CurvatureProfile:
    edge: tuple
    function: PiecewiseFunction
    switches: tuple
    piece_budget: int | None = None
    certified: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def domain(self) -> tuple:
        return self.function.domain

    @property
    def pieces(self) -> tuple:
        return self.function.pieces

    def __call__(self, eps):
        return self.function(eps)

    def slopes(self) -> list:
        """Right derivative at the start of every piece."""
        return [pc.slope[0] if pc.slope else Fraction(0) for pc in self.pieces]

    def to_json(self) -> dict:
        fmt = format_number
        return {
            "edge": list(self.edge),
            "domain": [fmt(self.domain[0]), fmt(self.domain[1])],
            "certified": self.certified,
            "piece_budget": self.piece_budget,
            "pieces": [{"lo": fmt(pc.lo), "hi": fmt(pc.hi), "coeffs": [fmt(c) for c in pc.coeffs] or ["0"],
                        "exact": pc.exact} for pc in self.pieces],
            "switches": [{"eps": fmt(s.eps), "left_slope": fmt(s.left_slope), "right_slope": fmt(s.right_slope)}
                         for s in self.switches],
        }


def _hull_list(walk, x, y, hull) -> list:
    verts = walk.support_hull(x, y) if hull is None else set(hull)
    return sorted(verts, key=vertex_key)


def ric_profile(g: WeightedGraph, d: Metric, walk: WalkFamily, x, y, piece_budget: int | None = None,
                hull: Iterable | None = None, samples: int = 32) -> CurvatureProfile:
    """Curvature ``eps -> ORic_eps(x, y)`` on the walk's validity interval.

    Polynomial walks give an exact (affine) or verified (higher degree)
    piecewise representation obtained from the Kantorovich program with
    the parameter in the objective. Other walks are sampled and the
    profile is flagged non-certified.
    """
    _check_pair(g, x, y)
    lo, hi = walk.validity_interval(x, y)
    dxy = exact(d.finite(x, y))
    verts = _hull_list(walk, x, y, hull)
    meta = {"hull_size": len(verts), "validity": (lo, hi)}
    if not walk.is_polynomial:
        return _sampled_profile(g, d, walk, x, y, lo, hi, samples, meta)
    cx, cy = walk.coefficients(x), walk.coefficients(y)
    cpolys = [poly_add(cx.get(v, ()), poly_scale(cy.get(v, ()), -1)) for v in verts]
    degree = max((poly_degree(c) for c in cpolys), default=0)
    if piece_budget is None:
        piece_budget = pieces_bound(max(len(verts), 2), degree)
    A, b, A_eq, b_eq = lipschitz_program(d, verts)
    program = LinearProgram([0] * len(verts), A, b, "max", A_eq, b_eq)
    if degree <= 1:
        c0 = [c[0] if len(c) > 0 else 0 for c in cpolys]
        c1 = [c[1] if len(c) > 1 else 0 for c in cpolys]
        w1_fn = solve_parametric_affine(program, c0, c1, lo, hi)
        if len(w1_fn) > piece_budget:
            raise PieceBudgetExceeded(f"{len(w1_fn)} pieces exceed budget {piece_budget}")
    else:
        w1_fn = trace_parametric_polynomial(program, cpolys, lo, hi, piece_budget)
    fn = w1_fn.map_affine(Fraction(1), -1 / dxy)
    switches = tuple(Switch(t, left, right) for t, left, right in fn.one_sided_slopes())
    meta["degree"] = degree
    return CurvatureProfile((x, y), fn, switches, piece_budget, True, meta)


def _sampled_profile(g, d, walk, x, y, lo, hi, samples, meta) -> CurvatureProfile:
    ts = [lo + (hi - lo) * Fraction(k, samples) for k in range(samples + 1)]
    vals = [ric_eps(g, d, walk, x, y, float(t) if walk.arithmetic == "float" else t) for t in ts]
    pieces = []
    for (a, va), (b, vb) in zip(zip(ts, vals), zip(ts[1:], vals[1:])):
        slope = (vb - va) / (b - a)
        pieces.append(Piece(a, b, (va - slope * a, slope), (), False))
    fn = PiecewiseFunction(tuple(pieces), certified=False)
    return CurvatureProfile((x, y), fn, (), None, False, meta)


# -- continuous-time curvature --------------------------------------------

def _potential_program(d: Metric, verts: list, x, y, weights: Mapping) -> tuple:
    """minimize sum_w f(w) weights[w] / d(x,y) over 1-Lipschitz f with f(y) - f(x) = d(x, y)."""
    dxy = exact(d.finite(x, y))
    A, b, A_eq, b_eq = lipschitz_program(d, verts)
    idx = {v: i for i, v in enumerate(verts)}
    row = [0] * len(verts)
    row[idx[y]], row[idx[x]] = 1, -1
    A_eq = A_eq + [row]
    b_eq = b_eq + [dxy]
    c = [weights.get(v, Fraction(0)) / dxy for v in verts]
    sol = _require(solve_lp(LinearProgram(c, A, b, "min", A_eq, b_eq)), "limit-free program")
    return sol.value, dict(zip(verts, sol.point))


def ric_ct_with_potential(g: WeightedGraph, d: Metric, walk: WalkFamily, x, y,
                          hull: Iterable | None = None) -> tuple:
    _check_pair(g, x, y)
    verts = _hull_list(walk, x, y, hull)
    jx, jy = walk.one_jet(x), walk.one_jet(y)
    for jet, z in ((jx, x), (jy, y)):
        outside = jet.support - set(verts)
        if outside:
            raise WalkError(f"one-jet at {z!r} charges vertices outside the hull: {sorted(outside, key=vertex_key)}")
    weights = {v: exact(jx[v]) - exact(jy[v]) for v in verts}
    return _potential_program(d, verts, x, y, weights)


def ric_ct(g: WeightedGraph, d: Metric, walk: WalkFamily, x, y, hull: Iterable | None = None) -> Fraction:
    """Continuous-time curvature from the walk's one-jet.

    With ``Lf(z) = sum_w f(w) mu_z(w)`` built from the jet ``mu_z``, returns
    the minimum of ``(Lf(x) - Lf(y)) / d(x, y)`` over 1-Lipschitz ``f`` on
    the support hull with ``f(y) - f(x) = d(x, y)``.
    """
    return ric_ct_with_potential(g, d, walk, x, y, hull)[0]


def ric_operator(g: WeightedGraph, d: Metric, L: OperatorMatrix, x, y, support: Iterable | None = None):
    """Curvature of an operator: ``inf (Lf(x) - Lf(y)) / d(x, y)`` over the same test functions.

    Returns ``float('-inf')`` when the infimum is unbounded, which happens
    exactly when the rows of ``x`` and ``y`` have different sums on the
    support (adding constants to ``f`` then moves the objective freely).
    """
    if x not in L.index or y not in L.index:
        raise UnknownVertexError(f"({x!r}, {y!r}) not in the operator's index set")
    if x == y:
        raise ValueError("curvature needs two distinct vertices")
    verts = sorted(L.index if support is None else set(support), key=vertex_key)
    vset = set(verts)
    if x not in vset or y not in vset:
        raise UnknownVertexError("support must contain x and y")
    for z in (x, y):
        outside = [w for w in L.rows[z] if w not in vset]
        if outside:
            raise MeasureError(f"row {z!r} of the operator charges vertices outside the support")
    weights = {v: L.entry(x, v) - L.entry(y, v) for v in verts}
    if sum(weights.values()) != 0:
        return NEG_INF
    return _potential_program(d, verts, x, y, weights)[0]


def scal(g: WeightedGraph, d: Metric, walk_or_L, x, mode: str = "ct", eps=None):
    """Scalar curvature at ``x``.

    ``ct`` sums continuous-time curvature over the neighbours of ``x``;
    ``eps`` sums ``ric_eps`` over ``supp(mu_x^eps)`` minus ``x``.
    """
    g.check_vertex(x)
    if mode == "ct":
        total = Fraction(0)
        for y in g.neighbors(x):
            if isinstance(walk_or_L, OperatorMatrix):
                val = ric_operator(g, d, walk_or_L, x, y)
            else:
                val = ric_ct(g, d, walk_or_L, x, y)
            total = total + val
        return total
    if mode == "eps":
        if eps is None:
            raise ValueError("eps mode needs a parameter value")
        if isinstance(walk_or_L, OperatorMatrix):
            raise ValueError("eps mode needs a walk")
        support = walk_or_L.evaluate(x, eps).support - {x}
        return sum((ric_eps(g, d, walk_or_L, x, y, eps) for y in sorted(support, key=vertex_key)), Fraction(0))
    raise ValueError(f"unknown scalar mode {mode!r}")


@dataclass(frozen=True)
class OperatorReport:
    rough_differential: bool
    weakly_divergence: bool
    self_adjoint: bool

    def as_dict(self) -> dict:
        return {"rough_differential": self.rough_differential,
                "weakly_divergence": self.weakly_divergence,
                "self_adjoint": self.self_adjoint}


def check_operator(g: WeightedGraph, L: OperatorMatrix) -> OperatorReport:
    """Exact checks of ``L 1 = 0``, ``m^T L = 0`` and symmetry of ``diag(m) L``."""
    if set(L.index) != set(g.vertices):
        raise UnknownVertexError("operator must be indexed by all graph vertices")
    idx = L.index
    rough = all(sum(L.rows[u].values(), Fraction(0)) == 0 for u in idx)
    div = all(sum((g.m(u) * L.entry(u, w) for u in idx), Fraction(0)) == 0 for w in idx)
    sa = all(g.m(u) * L.entry(u, w) == g.m(w) * L.entry(w, u) for u in idx for w in idx)
    return OperatorReport(rough, div, sa)


# -- whole-graph maps ------------------------------------------------------

def thread_count() -> int:
    raw = os.environ.get("RICCI_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def curvature_map(g: WeightedGraph, d: Metric, walk: WalkFamily, mode: str = "ct", eps=None,
                  pairs: Iterable | None = None, threads: int | None = None) -> dict:
    """Curvature of every edge (or of the given pairs), computed in parallel."""
    pairs = list(g.edges if pairs is None else pairs)

    def one(pair):
        u, v = pair
        if mode == "ct":
            return ric_ct(g, d, walk, u, v)
        return ric_eps(g, d, walk, u, v, eps)

    workers = threads or thread_count()
    if workers <= 1 or len(pairs) <= 1:
        values = [one(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, pairs))
    return dict(zip(pairs, values))
