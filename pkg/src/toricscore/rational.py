"""Parsing and formatting of exact rationals.

``fractions.Fraction`` already keeps numerator/denominator reduced with a
positive denominator, so it is used directly as the rational type.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value) -> Fraction:
    """Accept an int, a ``[p, q]`` pair, or a decimal-free string ``"p/q"``."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        p, q = value
        if isinstance(p, bool) or isinstance(q, bool) or not isinstance(p, Integral) or not isinstance(q, Integral):
            raise ValueError(f"rational pair must hold two integers: {value!r}")
        if q == 0:
            raise ValueError("zero denominator")
        return Fraction(int(p), int(q))
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValueError(f"not a decimal-free rational string: {value!r}")
        q = int(m.group(2)) if m.group(2) is not None else 1
        if q == 0:
            raise ValueError("zero denominator")
        return Fraction(int(m.group(1)), q)
    raise ValueError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_fraction_vector(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)
