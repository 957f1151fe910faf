"""Bit-exact rational codec.

All quantities in the engine are `fractions.Fraction`.  The wire form is a
canonical string: gcd-reduced, positive denominator, and the denominator is
omitted when it equals one ("0", "1/2", "-7/5").  Floats are rejected
everywhere; they would silently corrupt exact rank and equality tests.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def rat(value: int | str | Fraction) -> Fraction:
    """Parse an exact rational from an int, a Fraction, or a "p/q" string."""
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"floats are not accepted, got {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"cannot parse rational from {type(value).__name__}")


def fmt(value: Fraction) -> str:
    """Canonical string form: reduced, q > 0, "/1" omitted."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rat_vector(values: Iterable[int | str | Fraction]) -> tuple[Fraction, ...]:
    return tuple(rat(v) for v in values)


def fmt_vector(values: Sequence[Fraction]) -> list[str]:
    return [fmt(v) for v in values]
