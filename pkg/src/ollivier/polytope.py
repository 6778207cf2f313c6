"""Vertex-count bounds for bounded polytopes with a given number of facets.

All quantities are integers. The quadratic roots that select the binomial
arguments are never evaluated in floating point: their floors and ceilings
come from :func:`math.isqrt`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass


def _comb(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def h1(m: int, r: int) -> int:
    """``C(m - r, r)``."""
    return _comb(m - r, r)


def h2(m: int, r: int) -> int:
    """``C(m - r, r - 1)``."""
    return _comb(m - r, r - 1)


def _floor_ceil_root(a: int, disc: int) -> tuple:
    """Floor and ceiling of ``(a - sqrt(disc)) / 10``, exactly."""
    k = math.isqrt(disc)
    if k * k == disc:
        lo_num = hi_num = a - k
    else:
        # sqrt(disc) lies strictly between k and k + 1
        lo_num, hi_num = a - k - 1, a - k
    return lo_num // 10, -((-hi_num) // 10)


def r11_bounds(m: int) -> tuple:
    """``(floor, ceil)`` of the smaller root of the ratio test for ``h1``."""
    return _floor_ceil_root(5 * m - 3, 5 * m * m + 10 * m + 9)


def r21_bounds(m: int) -> tuple:
    """``(floor, ceil)`` of the smaller root of the ratio test for ``h2``."""
    return _floor_ceil_root(5 * m + 2, 5 * m * m + 4)


def r11(m: int) -> float:
    return (5 * m - 3 - math.sqrt(5 * m * m + 10 * m + 9)) / 10


def r21(m: int) -> float:
    return (5 * m + 2 - math.sqrt(5 * m * m + 4)) / 10


def h_clamped(kind: int, m: int, root_bounds: tuple, half_dim: int) -> int:
    fl, ce = root_bounds
    h = h1 if kind == 1 else h2
    return max(h(m, min(fl, half_dim)), h(m, min(ce, half_dim)))


@dataclass(frozen=True)
class BoundBreakdown:
    N: int
    m: int
    r11_m: tuple
    r11_m1: tuple
    r21_m1: tuple
    h111_m: int
    h111_m1: int
    h221_m1: int
    branch_odd: int
    branch_even: int
    value: int

    def as_dict(self) -> dict:
        out = asdict(self)
        for key in ("r11_m", "r11_m1", "r21_m1"):
            out[key] = {"floor": out[key][0], "ceil": out[key][1]}
        out["r11_m_approx"] = r11(self.m)
        out["r11_m1_approx"] = r11(self.m - 1)
        out["r21_m1_approx"] = r21(self.m - 1)
        return out


def lambda_bound(N: int, m: int) -> BoundBreakdown:
    """Upper bound on the vertex count of a bounded polytope in ``R^N`` with ``m`` facets.

    Parameters
    ----------
    N : int
        Ambient dimension, at least 1.
    m : int
        Number of facets, at least 3.

    Returns
    -------
    BoundBreakdown
        Every intermediate quantity; ``value`` is
        ``max(2*h111(m-1), h111(m) + h221(m-1))`` with binomial arguments
        clamped by ``N // 2``.
    """
    if not isinstance(N, int) or not isinstance(m, int) or isinstance(N, bool) or isinstance(m, bool):
        raise TypeError("N and m must be integers")
    if N < 1:
        raise ValueError("dimension N must be positive")
    if m < 3:
        raise ValueError("facet count m must be at least 3")
    half = N // 2
    b11_m, b11_m1, b21_m1 = r11_bounds(m), r11_bounds(m - 1), r21_bounds(m - 1)
    h111_m = h_clamped(1, m, b11_m, half)
    h111_m1 = h_clamped(1, m - 1, b11_m1, half)
    h221_m1 = h_clamped(2, m - 1, b21_m1, half)
    odd, even = 2 * h111_m1, h111_m + h221_m1
    return BoundBreakdown(N, m, b11_m, b11_m1, b21_m1, h111_m, h111_m1, h221_m1, odd, even, max(odd, even))


def lambda_value(N: int, m: int) -> int:
    return lambda_bound(N, m).value


def f_cyc(d: int, m: int) -> int:
    """Facet count of the cyclic ``d``-polytope with ``m`` vertices."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if d >= m:
        raise ValueError("cyclic polytope needs d < m")
    r, odd = divmod(d, 2)
    if odd:
        return 2 * _comb(m - r - 1, r)
    return _comb(m - r, r) + _comb(m - r - 1, r - 1)


def f_cyc_direct(d: int, m: int) -> int:
    """The unsplit two-binomial expression; agrees with :func:`f_cyc`."""
    return _comb(m - (d + 1) // 2, d // 2) + _comb(m - 1 - d // 2, (d - 1) // 2)


def pieces_bound(hull_size: int, max_degree: int) -> int:
    """Piece budget ``max_degree * Lambda(N, 2N^2 - 2N + 1) + 1`` for an ``N``-vertex hull."""
    if hull_size < 2:
        raise ValueError("hull must contain at least two vertices")
    if max_degree < 0:
        raise ValueError("degree must be nonnegative")
    if max_degree == 0:
        return 1
    n = hull_size
    return max_degree * lambda_value(n, 2 * n * n - 2 * n + 1) + 1


def crude_bound(N: int, m: int) -> int:
    """Window bound: maxima of the binomials over ``m // 5 - 1 <= r <= ceil(3m/10)``, clamped by ``N // 2``."""
    half = N // 2
    top = min(-((-3 * m) // 10), half)

    def window(start):
        lo = max(0, min(start, half))
        return range(lo, max(top, lo) + 1)

    odd = max(2 * h1(m - 1, r) for r in window(m // 5 - 1))
    even = max(h1(m, r) for r in window(m // 5 - 1)) + max(h2(m - 1, r) for r in window(m // 5))
    return max(odd, even)


def asymptotic_envelope(m: int) -> tuple:
    """Natural logs of the lower and upper exponential envelopes ``2.70^(m/3.70)`` and ``(2.70e)^(m/3.70)``."""
    return (m / 3.70 * math.log(2.70), m / 3.70 * (math.log(2.70) + 1))
