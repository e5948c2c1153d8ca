"""Exact rational parsing and formatting helpers."""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from typing import Union

RationalLike = Union[int, str, Fraction, Decimal]

#: Threshold values that cannot be met by any probability.
INFEASIBLE = math.inf


def as_rational(value: RationalLike) -> Fraction:
    """Convert an int, "num/den" string, decimal string or Decimal exactly.

    Binary floats are rejected because they rarely hold the intended value.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite number {value}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"binary float {value!r} is ambiguous; pass a string")
    raise TypeError(f"cannot read {type(value).__name__} as a rational")


def format_rational(value) -> Union[str, int]:
    """Render a rational as an int when integral, else as "num/den".

    Infinite threshold sentinels render as "inf" / "-inf".
    """
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        raise TypeError("floats are not part of the exact core")
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def parse_threshold(value) -> Union[Fraction, float]:
    """Inverse of format_rational, accepting the infinite sentinels."""
    if value in ("inf", "+inf"):
        return math.inf
    if value == "-inf":
        return -math.inf
    return as_rational(value)


def lcm_of_denominators(values) -> int:
    den = 1
    for v in values:
        den = math.lcm(den, v.denominator)
    return den
