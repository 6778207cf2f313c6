"""Exact rational simplex and parametric-objective analysis.

Programs are ``min/max c.x`` subject to ``A x <= b``, optional equality rows
``A_eq x = b_eq`` and ``x >= 0``. Everything is done in
:class:`fractions.Fraction` with Bland's rule, so results are exact and
pivoting always terminates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import LPError, PieceBudgetExceeded
from .numeric import exact, poly_add, poly_degree, poly_derivative, poly_eval, poly_scale, poly_trim

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


def _vec(xs) -> tuple:
    return tuple(exact(x) for x in xs)


@dataclass(frozen=True)
class LinearProgram:
    c: Sequence
    A: Sequence = ()
    b: Sequence = ()
    sense: str = "min"
    A_eq: Sequence = ()
    b_eq: Sequence = ()

    def __post_init__(self):
        c = _vec(self.c)
        A = tuple(_vec(row) for row in self.A)
        A_eq = tuple(_vec(row) for row in self.A_eq)
        b, b_eq = _vec(self.b), _vec(self.b_eq)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', not {self.sense!r}")
        if len(A) != len(b) or len(A_eq) != len(b_eq):
            raise ValueError("row count of A and length of b differ")
        for row in A + A_eq:
            if len(row) != len(c):
                raise ValueError(f"constraint row has {len(row)} entries, expected {len(c)}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A_eq", A_eq)
        object.__setattr__(self, "b_eq", b_eq)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.A) + len(self.A_eq)

    def with_objective(self, c, sense: str | None = None) -> "LinearProgram":
        return LinearProgram(c, self.A, self.b, sense or self.sense, self.A_eq, self.b_eq)

    def with_equality(self, row, rhs) -> "LinearProgram":
        return LinearProgram(self.c, self.A, self.b, self.sense,
                             self.A_eq + (_vec(row),), self.b_eq + (exact(rhs),))


@dataclass(frozen=True)
class LPSolution:
    """Result of :func:`solve_lp`.

    ``dual`` holds multipliers for the inequality rows followed by the
    equality rows, in the sign convention of the program's own sense, so
    ``dual_value = b.y_ineq + b_eq.y_eq`` equals ``value`` at optimality.
    """

    status: str
    value: Fraction | None = None
    point: tuple = ()
    basis: tuple = ()
    dual: tuple = ()
    dual_value: Fraction | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def solve_lp(p: LinearProgram) -> LPSolution:
    """Two-phase dense-tableau simplex with Bland's rule, exact throughout."""
    n = p.n
    sign = 1 if p.sense == "min" else -1
    rows_A = list(p.A) + list(p.A_eq)
    rhs = list(p.b) + list(p.b_eq)
    n_ineq = len(p.A)
    m = len(rows_A)
    # columns: x (n) | slacks (n_ineq) | artificials (m)
    n_slack = n_ineq
    width = n + n_slack + m
    art0 = n + n_slack
    flip = []
    tab = []
    basis = []
    for i in range(m):
        row = [Fraction(0)] * (width + 1)
        for j, a in enumerate(rows_A[i]):
            row[j] = a
        if i < n_ineq:
            row[n + i] = Fraction(1)
        row[width] = rhs[i]
        s = -1 if rhs[i] < 0 else 1
        if s < 0:
            row = [-v for v in row]
        flip.append(s)
        if i < n_ineq and s > 0:
            basis.append(n + i)
        else:
            row[art0 + i] = Fraction(1)
            basis.append(art0 + i)
        tab.append(row)
    init_cols = list(basis)
    artificial = set(range(art0, width))
    needs_phase1 = any(b in artificial for b in basis)

    if needs_phase1:
        cost = [Fraction(0)] * width
        for j in artificial:
            cost[j] = Fraction(1)
        obj = _reduced_row(tab, basis, cost, width)
        _run_simplex(tab, basis, obj, width, forbidden=set())
        if obj[width] != 0:
            # obj[width] holds -(phase-1 objective)
            return LPSolution(INFEASIBLE)
        # drive zero-level artificials out of the basis where possible
        for i, bj in enumerate(basis):
            if bj in artificial:
                for j in range(art0):
                    if tab[i][j] != 0:
                        _pivot(tab, basis, obj, i, j, width)
                        break

    cost = [Fraction(0)] * width
    for j, cj in enumerate(p.c):
        cost[j] = sign * cj
    obj = _reduced_row(tab, basis, cost, width)
    status = _run_simplex(tab, basis, obj, width, forbidden=artificial)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED)
    x = [Fraction(0)] * width
    for i, bj in enumerate(basis):
        x[bj] = tab[i][width]
    point = tuple(x[:n])
    value = sum((cj * xj for cj, xj in zip(p.c, point)), Fraction(0))
    # reduced cost of the initial identity column of row i is -y'_i
    dual = tuple(-flip[i] * obj[init_cols[i]] * sign for i in range(m))
    dual_value = sum((yi * bi for yi, bi in zip(dual, rhs)), Fraction(0))
    return LPSolution(OPTIMAL, value, point, tuple(sorted(j for j in basis if j < art0)), dual, dual_value)


def _reduced_row(tab, basis, cost, width) -> list:
    obj = list(cost) + [Fraction(0)]
    for i, bj in enumerate(basis):
        cb = cost[bj]
        if cb:
            row = tab[i]
            for j in range(width + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    return obj


def _pivot(tab, basis, obj, r, s, width) -> None:
    prow = tab[r]
    piv = prow[s]
    if piv != 1:
        prow = [v / piv for v in prow]
        tab[r] = prow
    nz = [j for j in range(width + 1) if prow[j]]
    for i, row in enumerate(tab):
        if i != r:
            f = row[s]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = obj[s]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]
    basis[r] = s


def _run_simplex(tab, basis, obj, width, forbidden) -> str:
    while True:
        entering = None
        for j in range(width):
            if obj[j] < 0 and j not in forbidden:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(tab):
            a = row[entering]
            if a > 0:
                ratio = row[width] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(tab, basis, obj, best[1], entering, width)


def dual_program(p: LinearProgram) -> LinearProgram:
    """LP dual of a ``min`` program with inequality and equality rows.

    The dual of ``min c.x, A x <= b, A_eq x = b_eq, x >= 0`` is
    ``max b.y + b_eq.z`` with ``A^T y + A_eq^T z <= c``, ``y <= 0`` and ``z``
    free. Variables are returned in nonnegative form ``(-y, z+, z-)``.
    """
    if p.sense != "min":
        raise ValueError("dual_program expects a min program")
    k, e = len(p.A), len(p.A_eq)
    c = [-bi for bi in p.b] + list(p.b_eq) + [-bi for bi in p.b_eq]
    rows = []
    for j in range(p.n):
        row = [-p.A[i][j] for i in range(k)]
        row += [p.A_eq[i][j] for i in range(e)]
        row += [-p.A_eq[i][j] for i in range(e)]
        rows.append(row)
    return LinearProgram(c, rows, p.c, "max")


def _require(sol: LPSolution, what: str) -> LPSolution:
    if sol.status == INFEASIBLE:
        raise LPError(f"{what}: feasible set is empty")
    if sol.status == UNBOUNDED:
        raise LPError(f"{what}: objective is unbounded on the feasible set")
    return sol


# -- piecewise functions ------------------------------------------------

@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    coeffs: tuple
    witness: tuple = ()
    exact: bool = True

    def __call__(self, t):
        return poly_eval(self.coeffs, t)

    @property
    def slope(self):
        """Derivative of the piece polynomial (a coefficient tuple)."""
        return poly_derivative(self.coeffs)


@dataclass(frozen=True)
class PiecewiseFunction:
    """Contiguous polynomial pieces on ``[domain[0], domain[1]]``.

    ``pieces[i].hi == pieces[i+1].lo``; adjacent polynomials differ. Breakpoints
    flagged ``exact=False`` on a piece mean its right end was located by
    bisection only.
    """

    pieces: tuple
    certified: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def domain(self) -> tuple:
        return (self.pieces[0].lo, self.pieces[-1].hi)

    @property
    def breakpoints(self) -> tuple:
        return tuple(pc.hi for pc in self.pieces[:-1])

    def __len__(self) -> int:
        return len(self.pieces)

    def piece_at(self, t) -> Piece:
        lo, hi = self.domain
        if t < lo or t > hi:
            raise ValueError(f"{t} outside domain [{lo}, {hi}]")
        for pc in self.pieces:
            if t <= pc.hi:
                return pc
        return self.pieces[-1]

    def __call__(self, t):
        return self.piece_at(t)(t)

    def map_affine(self, a, b) -> "PiecewiseFunction":
        """Pointwise ``a + b * f``."""
        pieces = []
        for pc in self.pieces:
            pieces.append(Piece(pc.lo, pc.hi, poly_add((a,), poly_scale(pc.coeffs, b)), pc.witness, pc.exact))
        return PiecewiseFunction(tuple(pieces), self.certified, dict(self.meta))

    def one_sided_slopes(self) -> list:
        """``(t, left derivative, right derivative)`` at every breakpoint."""
        out = []
        for left, right in zip(self.pieces, self.pieces[1:]):
            t = left.hi
            out.append((t, poly_eval(left.slope, t), poly_eval(right.slope, t)))
        return out


# -- parametric affine ---------------------------------------------------

def _line_value(c0, c1, x, t):
    return sum((a * xi for a, xi in zip(c0, x)), Fraction(0)) + t * sum(
        (b * xi for b, xi in zip(c1, x)), Fraction(0))


def _line(c0, c1, x) -> tuple:
    return (sum((a * xi for a, xi in zip(c0, x)), Fraction(0)),
            sum((b * xi for b, xi in zip(c1, x)), Fraction(0)))


def _tangent(p: LinearProgram, c0, c1, t, side: str):
    """Optimal vertex at ``t`` whose line is the one-sided tangent of ``min``-value."""
    ct = [a + t * b for a, b in zip(c0, c1)]
    base = _require(solve_lp(p.with_objective(ct, "min")), "parametric program")
    # among optimal points, smallest slope gives the right tangent of a concave min
    tie = p.with_equality(ct, base.value).with_objective(c1, "min" if side == "right" else "max")
    sol = _require(solve_lp(tie), "parametric program")
    return base.value, sol.point


def solve_parametric_affine(p: LinearProgram, c0, c1, lo=0, hi=1) -> PiecewiseFunction:
    """Exact optimal value of ``p`` under the objective ``c0 + eps * c1`` for ``eps`` in ``[lo, hi]``.

    Parameters
    ----------
    p : LinearProgram
        Supplies the feasible set and the sense; its own objective is ignored.
    c0, c1 : sequence
        Constant and linear parts of the objective.
    lo, hi : rational
        Parameter interval.

    Returns
    -------
    PiecewiseFunction
        Affine pieces with exact rational breakpoints, each carrying an
        optimal vertex of the feasible set as witness.

    Notes
    -----
    The optimal value of a ``min`` program is the lower envelope of the
    vertex lines ``eps -> c(eps).v``. The envelope is built by repeatedly
    intersecting supporting lines at the ends of an interval and probing the
    intersection, which yields breakpoints as exact rationals.
    """
    c0, c1 = _vec(c0), _vec(c1)
    lo, hi = exact(lo), exact(hi)
    if len(c0) != p.n or len(c1) != p.n:
        raise ValueError("objective length does not match program")
    if hi < lo:
        raise ValueError("empty parameter interval")
    s = 1 if p.sense == "min" else -1
    c0s, c1s = [s * a for a in c0], [s * b for b in c1]

    _, x_lo = _tangent(p, c0s, c1s, lo, "right")
    if c1s == [0] * p.n or hi == lo:
        pieces = [(lo, hi, x_lo)]
    else:
        _, x_hi = _tangent(p, c0s, c1s, hi, "left")
        pieces = []
        stack = [(lo, hi, x_lo, x_hi)]
        # depth-first, left to right
        while stack:
            a, b, xa, xb = stack.pop()
            la, lb = _line(c0s, c1s, xa), _line(c0s, c1s, xb)
            if la == lb:
                pieces.append((a, b, xa))
                continue
            if la[1] == lb[1]:
                raise LPError("parallel supporting lines; feasible set may be unbounded")
            t = (lb[0] - la[0]) / (la[1] - lb[1])
            t = min(max(t, a), b)
            val = _line_value(c0s, c1s, xa, t)
            _, x_left = _tangent(p, c0s, c1s, t, "left")
            true_val = _line_value(c0s, c1s, x_left, t)
            if true_val == val:
                pieces.append((a, t, xa))
                pieces.append((t, b, xb))
                continue
            _, x_right = _tangent(p, c0s, c1s, t, "right")
            stack.append((t, b, x_right, xb))
            stack.append((a, t, xa, x_left))
    out = []
    for a, b, x in pieces:
        k0, k1 = _line(c0, c1, x)
        out.append(Piece(a, b, poly_trim((k0, k1)), tuple(x)))
    return PiecewiseFunction(_merge_contiguous(out, lo, hi))


def _merge_contiguous(pieces: list, lo, hi) -> tuple:
    out = []
    for pc in pieces:
        if out and pc.lo == pc.hi and not (pc.lo == lo and pc.hi == hi):
            continue
        if out and out[-1].coeffs == pc.coeffs:
            prev = out[-1]
            out[-1] = Piece(prev.lo, pc.hi, prev.coeffs, prev.witness, prev.exact and pc.exact)
        else:
            out.append(pc)
    if not out:
        raise LPError("no pieces produced")
    return tuple(out)


# -- parametric polynomial -----------------------------------------------

def _objective_at(cpolys, t) -> list:
    return [poly_eval(cs, t) for cs in cpolys]


def _vertex_poly(cpolys, x) -> tuple:
    acc = ()
    for cs, xi in zip(cpolys, x):
        if xi:
            acc = poly_add(acc, poly_scale(cs, xi))
    return acc


def trace_parametric_polynomial(p: LinearProgram, cpolys, lo=0, hi=1, piece_budget: int | None = None,
                                samples: int = 16, resolution=Fraction(1, 2 ** 40)) -> PiecewiseFunction:
    """Optimal value of ``p`` under a polynomial objective ``c(eps)``.

    Parameters
    ----------
    p : LinearProgram
        Bounded, nonempty feasible set and sense.
    cpolys : sequence of coefficient lists
        ``cpolys[j]`` is the coefficient of variable ``j`` as a polynomial in
        ``eps`` (increasing degree).
    lo, hi : rational
    piece_budget : int, optional
        Maximum admissible number of pieces; exceeding it raises
        :class:`PieceBudgetExceeded`.
    samples : int
        Initial number of uniform probe intervals.
    resolution : rational
        Bisection stops once a breakpoint is bracketed this tightly.

    Returns
    -------
    PiecewiseFunction
        Each piece is ``c(eps).v`` for an optimal vertex ``v`` and has been
        checked exactly against a fresh solve at ``D + 2`` interior points.
        Breakpoints are exact when two adjacent piece polynomials differ by
        a linear polynomial; otherwise they are bisection brackets and the
        piece carries ``exact=False``.
    """
    cpolys = [poly_trim(exact(c) for c in cs) for cs in cpolys]
    if len(cpolys) != p.n:
        raise ValueError("objective length does not match program")
    lo, hi = exact(lo), exact(hi)
    degree = max((poly_degree(cs) for cs in cpolys), default=0)
    sense = p.sense
    cache = {}

    def probe(t):
        if t not in cache:
            sol = _require(solve_lp(p.with_objective(_objective_at(cpolys, t), sense)), "parametric program")
            cache[t] = (sol.value, _vertex_poly(cpolys, sol.point), sol.point)
        return cache[t]

    def better(u, v):
        # u strictly better than v in the program's sense
        return u < v if sense == "min" else u > v

    if degree == 0 or lo == hi:
        _, poly, x = probe(lo)
        return PiecewiseFunction((Piece(lo, hi, poly, tuple(x)),), meta={"degree": degree})

    grid = sorted({lo + (hi - lo) * Fraction(k, samples) for k in range(samples + 1)})
    while True:
        # locate breakpoints between consecutive probes with different polynomials
        segments = []  # (a, b, poly, witness, exact_right_end)
        pts = grid
        cur_lo = pts[0]
        _, cur_poly, cur_x = probe(pts[0])
        # a probe at a tie may return the left polynomial; use the right tangent instead
        cur_poly, cur_x = _right_poly(probe, better, cur_poly, cur_x, pts[0], pts[1], cpolys)
        for k in range(1, len(pts)):
            a, b = pts[k - 1], pts[k]
            _, poly_b, x_b = probe(b)
            if poly_b == cur_poly:
                continue
            inner = _split(probe, better, cpolys, a, b, cur_poly, poly_b, resolution)
            for (t, exact_bp, left_poly, right_poly, right_x) in inner:
                segments.append((cur_lo, t, cur_poly, cur_x, exact_bp))
                cur_lo, cur_poly, cur_x = t, right_poly, right_x
            if piece_budget is not None and len(segments) + 1 > piece_budget:
                raise PieceBudgetExceeded(
                    f"more than {piece_budget} pieces while tracing parametric objective",
                    budget=piece_budget, found=len(segments) + 1)
        segments.append((cur_lo, hi, cur_poly, cur_x, True))
        # verify every piece at degree + 2 interior points
        refine = set()
        for (a, b, poly, x, _) in segments:
            if a == b:
                continue
            for k in range(1, degree + 3):
                t = a + (b - a) * Fraction(k, degree + 3)
                val, _, _ = probe(t)
                if val != poly_eval(poly, t):
                    refine.add(t)
        if not refine:
            break
        grid = sorted(set(grid) | refine)
    pieces = []
    for (a, b, poly, x, exact_bp) in segments:
        pieces.append(Piece(a, b, poly, tuple(x), exact_bp))
    pieces = list(_merge_contiguous(pieces, lo, hi))
    if piece_budget is not None and len(pieces) > piece_budget:
        raise PieceBudgetExceeded(f"{len(pieces)} pieces exceed budget {piece_budget}",
                                  budget=piece_budget, found=len(pieces))
    return PiecewiseFunction(tuple(pieces), meta={"degree": degree, "budget": piece_budget})


def _right_poly(probe, better, poly, x, a, b, cpolys):
    _, poly_b, x_b = probe(b)
    if poly_b == poly:
        return poly, x
    # if the other polynomial ties at a and is at least as good just right of a, prefer it
    if poly_eval(poly_b, a) == poly_eval(poly, a):
        t = a + (b - a) / 2 ** 20
        if not better(poly_eval(poly, t), poly_eval(poly_b, t)):
            return poly_b, x_b
    return poly, x


def _split(probe, better, cpolys, a, b, left_poly, right_poly, resolution) -> list:
    """Breakpoints in ``(a, b]`` between ``left_poly`` (optimal at a) and ``right_poly`` (at b).

    Returns ``[(t, exact, left, right, right_witness), ...]`` left to right.
    """
    diff = poly_add(left_poly, poly_scale(right_poly, -1))
    if poly_degree(diff) == 1:
        t = -diff[0] / diff[1] if len(diff) > 1 else None
        if t is not None and a <= t <= b:
            val, _, _ = probe(t)
            if val == poly_eval(left_poly, t):
                # confirm nothing else sits between a and t or between t and b
                for lo_, hi_, expected in ((a, t, left_poly), (t, b, right_poly)):
                    if lo_ < hi_:
                        m = (lo_ + hi_) / 2
                        vm, _, _ = probe(m)
                        if vm != poly_eval(expected, m):
                            return _bisect(probe, better, cpolys, a, b, left_poly, right_poly, resolution)
                _, _, xb = probe(b)
                return [(t, True, left_poly, right_poly, xb)]
    return _bisect(probe, better, cpolys, a, b, left_poly, right_poly, resolution)


def _bisect(probe, better, cpolys, a, b, left_poly, right_poly, resolution) -> list:
    m = (a + b) / 2
    _, pm, xm = probe(m)
    if b - a <= resolution:
        _, _, xb = probe(b)
        return [(b, False, left_poly, right_poly, xb)]
    if pm == left_poly:
        return _split(probe, better, cpolys, m, b, left_poly, right_poly, resolution)
    if pm == right_poly:
        return _split(probe, better, cpolys, a, m, left_poly, right_poly, resolution)
    first = _split(probe, better, cpolys, a, m, left_poly, pm, resolution)
    second = _split(probe, better, cpolys, m, b, pm, right_poly, resolution)
    return first + second
