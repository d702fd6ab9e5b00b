"""Exact rational scalars.

All arithmetic in the package goes through :data:`Q`.  gmpy2's ``mpq`` is
used when available because coefficient arithmetic dominates the running
time of the dressing recursions; :class:`fractions.Fraction` is the fallback.
"""

from __future__ import annotations

from fractions import Fraction

try:  # pragma: no cover - depends on the environment
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def to_q(x) -> "Q":
    """Convert ints, Fractions, mpq values and ``"num/den"`` strings to :data:`Q`."""
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational literal")
        f = Fraction(s)
        return Q(f.numerator, f.denominator)
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted as exact scalars")
    return Q(x)


def q_str(x) -> str:
    """Canonical ``num/den`` string (denominator always present)."""
    x = to_q(x)
    return f"{int(x.numerator)}/{int(x.denominator)}"


def q_short(x) -> str:
    """Short human form: ``3`` for integers, ``-1/2`` otherwise."""
    x = to_q(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def parse_vector(text: str) -> list:
    """Parse a comma-separated list of rationals such as ``"1/2,0,-3"``."""
    parts = [p for p in text.replace(" ", "").split(",")]
    if parts == [""]:
        return []
    return [to_q(p) for p in parts]
