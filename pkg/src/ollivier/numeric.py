"""Number parsing and formatting shared by every module."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[Fraction, int, float]


def parse_number(value) -> Fraction:
    """Read a user-supplied number exactly.

    Accepts ints, Fractions, ``"p/q"`` or decimal strings, and floats. Floats
    are read through their shortest decimal representation, so a JSON ``0.1``
    becomes ``1/10`` rather than the nearest binary double.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a number")


def exact(value) -> Fraction:
    """Exact rational value of a number (binary floats are converted bit-for-bit)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    return parse_number(value)


def format_number(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return format(value, ".17g")
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def poly_eval(coeffs, t):
    """Horner evaluation; ``coeffs`` are in increasing degree."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def poly_trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def poly_add(p, q) -> tuple:
    n = max(len(p), len(q))
    return poly_trim(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def poly_scale(p, s) -> tuple:
    return poly_trim(c * s for c in p)


def poly_mul(p, q) -> tuple:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_derivative(p) -> tuple:
    return poly_trim(i * c for i, c in enumerate(p) if i > 0)


def poly_degree(p) -> int:
    p = poly_trim(p)
    return len(p) - 1 if p else 0
