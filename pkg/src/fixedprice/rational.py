"""Exact rational parsing, formatting, and high-precision rounding helpers.

All probabilities and prices in this package are ``fractions.Fraction``
values.  JSON files may spell a rational as an integer, a decimal string
("0.25"), or a slash string ("1/6"); decimals are parsed exactly as scaled
integers.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

RationalLike = Union[int, str, Fraction, Rational]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse a JSON-style rational (int, "a/b", or exact decimal string)."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        raise ValueError(
            f"refusing to parse float {value!r}; pass an int, Fraction, or string"
        )
    if isinstance(value, str):
        # Fraction() parses both "a/b" and decimal strings exactly.
        return Fraction(value.strip())
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "a/b", or a bare integer string when exact."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def coerce_rational(value) -> Fraction:
    """Like :func:`parse_rational` but also accepts floats exactly.

    A Python float is a dyadic rational; this conversion is exact and is
    appropriate for caller-supplied numeric parameters (not for JSON data,
    where decimals must round-trip through strings).
    """
    if isinstance(value, float):
        return Fraction(value)
    return parse_rational(value)


def round_to_rational(value: Fraction, tol: Fraction) -> Fraction:
    """Best rational approximation of ``value`` within ``tol``.

    Walks the continued-fraction convergents of ``value`` and returns the
    first one within ``tol``; used to turn extended-precision floating
    results into small exact rationals.
    """
    value = Fraction(value)
    if tol <= 0:
        return value
    a0 = value.numerator // value.denominator  # floor
    p_prev, q_prev = 1, 0
    p_cur, q_cur = a0, 1
    rest = value - a0
    while abs(value - Fraction(p_cur, q_cur)) > tol and rest != 0:
        rest = 1 / rest
        a = rest.numerator // rest.denominator
        rest -= a
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return Fraction(p_cur, q_cur)
