"""Independent reference computations used by the tests.

Nothing here calls the package's simplex: linear programs are solved by
enumerating every basic solution with exact Gaussian elimination, and
distances by enumerating simple paths.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from fractions import Fraction


def solve_square(rows, rhs):
    """Exact solve of a square system; ``None`` if singular."""
    n = len(rows)
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [aug[i][n] for i in range(n)]


def enumerate_vertices(n, A=(), b=(), A_eq=(), b_eq=()):
    """All vertices of ``{x >= 0, A x <= b, A_eq x = b_eq}`` by brute force.

    Every vertex is the unique solution of some ``n`` linearly independent
    constraints taken from the equality, inequality or sign rows.
    """
    ineq = [list(r) for r in A] + [[-1 if j == k else 0 for k in range(n)] for j in range(n)]
    ineq_b = list(b) + [0] * n
    rows_all = [list(r) for r in A_eq] + ineq
    rhs_all = list(b_eq) + ineq_b
    found = set()
    for sub in itertools.combinations(range(len(rows_all)), n):
        x = solve_square([rows_all[i] for i in sub], [rhs_all[i] for i in sub])
        if x is None:
            continue
        if all(sum(Fraction(a) * xi for a, xi in zip(r, x)) <= bi for r, bi in zip(ineq, ineq_b)) and \
                all(sum(Fraction(a) * xi for a, xi in zip(r, x)) == bi for r, bi in zip(A_eq, b_eq)):
            found.add(tuple(x))
    return sorted(found)


def brute_force_lp(c, A=(), b=(), A_eq=(), b_eq=(), sense="min"):
    """Optimal value over the vertex set (bounded feasible sets only); ``None`` if empty."""
    verts = enumerate_vertices(len(c), A, b, A_eq, b_eq)
    if not verts:
        return None
    vals = [sum(Fraction(ci) * xi for ci, xi in zip(c, x)) for x in verts]
    return min(vals) if sense == "min" else max(vals)


def brute_force_w1(dist, mu, nu):
    """W1 by enumerating vertices of the transportation polytope.

    ``dist`` is a function of two vertices; ``mu`` and ``nu`` are dicts.
    """
    us, vs = sorted(mu, key=str), sorted(nu, key=str)
    pairs = [(u, v) for u in us for v in vs]
    A_eq, b_eq = [], []
    # the last column constraint is implied; dropping it keeps the system square-able
    for u in us:
        A_eq.append([1 if p[0] == u else 0 for p in pairs])
        b_eq.append(Fraction(mu[u]))
    for v in vs[:-1]:
        A_eq.append([1 if p[1] == v else 0 for p in pairs])
        b_eq.append(Fraction(nu[v]))
    cost = [Fraction(dist(u, v)) for u, v in pairs]
    return brute_force_lp(cost, (), (), A_eq, b_eq, "min")


def all_simple_path_lengths(adj, weight, s, t):
    """Minimum over every simple path from ``s`` to ``t``; ``None`` if none exists."""
    best = None
    stack = [(s, (s,), Fraction(0))]
    while stack:
        u, path, length = stack.pop()
        if u == t:
            if best is None or length < best:
                best = length
            continue
        for w in adj[u]:
            if w not in path:
                stack.append((w, path + (w,), length + weight(u, w)))
    return best


def bfs_distances(adj, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def random_rational(rng: random.Random, lo=1, hi=4, den=4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)
