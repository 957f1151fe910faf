"""Exact verification of the multinomial moment-bound combinatorics.

The left-hand side sums, over all compositions of p into m nonnegative parts,
the multinomial coefficient times (product of odd double factorials minus
one); it is checked against the closed bound 4^p p! m^(p-1) by brute force on
a finite range.  The two bound formulas are evaluated exactly as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial


def double_factorial(n: int) -> int:
    """n!! for odd n >= -1, with (-1)!! = 1."""
    if n == -1:
        return 1
    if n < -1 or n % 2 == 0:
        raise ValueError("double factorial is defined here for odd n >= -1 only")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def multinomial_lhs(p: int, m: int) -> int:
    """Brute-force sum over all compositions of p into m parts."""
    if p < 1 or m < 1:
        raise ValueError("need p >= 1 and m >= 1")
    total = 0
    for ks in _compositions(p, m):
        coeff = factorial(p)
        prod = 1
        for k in ks:
            coeff //= factorial(k)
            prod *= double_factorial(2 * k - 1)
        total += coeff * (prod - 1)
    return total


@dataclass(frozen=True)
class BoundReport:
    p: int
    m: int
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}


def verify_multinomial_inequality(p_max: int, m_max: int) -> list[BoundReport]:
    """Exhaustive reports for 1 <= p <= p_max, p <= m <= m_max."""
    reports = []
    for p in range(1, p_max + 1):
        for m in range(max(p, 1), m_max + 1):
            rhs = 4**p * factorial(p) * m ** (p - 1)
            reports.append(BoundReport(p, m, multinomial_lhs(p, m), rhs))
    return reports


def dm2_bound(p: int, m: int, sigma_bar: Fraction, s: Fraction, t: Fraction) -> Fraction:
    """sigma^(2p) (t-s)^p (1 + 4^p p! / m); evaluation only."""
    if p < 1 or p >= m:
        raise ValueError("need 1 <= p < m")
    if s >= t:
        raise ValueError("need s < t")
    return sigma_bar ** (2 * p) * (t - s) ** p * (1 + Fraction(4**p * factorial(p), m))


def moment_bound(k: int, sigma_bar: Fraction, t: Fraction) -> Fraction:
    """(2k-1)!! sigma^(2k) t^k, the even moment ceiling; k = 0 gives 1."""
    if k < 0:
        raise ValueError("need k >= 0")
    return double_factorial(2 * k - 1) * sigma_bar ** (2 * k) * t**k


def report_json(reports: list[BoundReport]) -> dict:
    return {
        "all_hold": all(r.holds for r in reports),
        "reports": [r.to_json() for r in reports],
    }
