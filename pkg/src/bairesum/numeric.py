"""Numeric tower: exact rationals, plus a private 113-bit mpmath context.

Squared norms are carried as :class:`fractions.Fraction` whenever the branch
oracle can produce them exactly, and as ``mpf`` values of :data:`MP`
otherwise.  Inexact comparisons use the absolute tolerance :data:`TOL`.
"""

from fractions import Fraction
from math import isqrt

import mpmath

MP = mpmath.MPContext()
MP.prec = 113

TOL = MP.mpf("1e-12")

APPROX_DIGITS = 30


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def parse_fraction(text):
    """Parse ``"p/q"`` or ``"p"``; decimals are rejected."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        num, den = int(num), int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        return Fraction(num, den)
    return Fraction(int(text))


def fraction_str(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def to_mpf(x):
    if isinstance(x, Fraction):
        return MP.mpf(x.numerator) / x.denominator
    return MP.mpf(x)


def sqrt_approx(x):
    return MP.sqrt(to_mpf(x))


def approx_str(x, digits=APPROX_DIGITS):
    return mpmath.nstr(to_mpf(x), digits, strip_zeros=False)


def rational_sqrt(x):
    """Exact square root of a nonnegative Fraction, or None if irrational."""
    x = Fraction(x)
    if x < 0:
        return None
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def zero(exact):
    return Fraction(0) if exact else MP.mpf(0)


def greater(a, b, exact):
    """a > b, with tolerance in inexact mode."""
    if exact:
        return a > b
    return a > b + TOL


def at_least(a, b, exact):
    """a >= b, with tolerance in inexact mode."""
    if exact:
        return a >= b
    return a >= b - TOL


def close(a, b, exact, tol=None):
    if exact:
        return a == b
    return abs(to_mpf(a) - to_mpf(b)) <= (TOL if tol is None else tol)
