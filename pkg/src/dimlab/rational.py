"""Exact rationals and their string form."""
import re
from fractions import Fraction
from math import gcd

from .errors import ParseError

Rat = Fraction

_RAT_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rat(text):
    """Parse ``"num/den"`` (or a bare integer) into a Fraction.

    Non-reduced forms such as ``"2/4"`` and zero denominators are rejected so
    that every rational has exactly one textual form.
    """
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ParseError(f"not a rational: {text!r}")
    m = _RAT_RE.match(text.strip())
    if not m:
        raise ParseError(f"not a rational: {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    den = int(m.group(2))
    if den == 0:
        raise ParseError(f"zero denominator: {text!r}")
    if gcd(num, den) != 1:
        raise ParseError(f"rational not in lowest terms: {text!r}")
    return Fraction(num, den)


def as_rat(v):
    """Coerce ints, Fractions and strings. Floats are refused (inexact)."""
    if isinstance(v, float):
        raise ParseError(f"float {v!r} given where an exact rational is required")
    return parse_rat(v)


def fmt_rat(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"
