"""The calibrated martingale-measure polytope and its extreme points.

The measure set is {q >= 0 : Aq = b} over terminal cells, with one martingale
row per (period, predecessor cell, asset), one calibration row per claim, a
single normalization row, and zero bounds outside the prior support.  Extreme
points are enumerated by the double description method run on the homogenized
cone over exact rationals, so emptiness, vertex identity, and certificates are
all exact yes/no facts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import linalg
from .errors import ConstraintViolation
from .model import FilteredModel, Measure, Payoff

ZERO = Fraction(0)
ONE = Fraction(1)

RowLabel = tuple


@dataclass(frozen=True)
class Row:
    label: RowLabel
    coeffs: Payoff
    rhs: Fraction


@dataclass(frozen=True)
class ConstraintSystem:
    rows: tuple[Row, ...]
    allowed: frozenset[int]
    n_cells: int

    def matrix(self) -> list[list[Fraction]]:
        return [list(r.coeffs) for r in self.rows]

    def rhs(self) -> list[Fraction]:
        return [r.rhs for r in self.rows]


@dataclass(frozen=True)
class ExtremalityCertificate:
    extreme: bool
    witness_rows: tuple[int, ...] | None = None
    direction: Payoff | None = None


@dataclass(frozen=True)
class VertexSet:
    vertices: tuple[Measure, ...]
    certificates: tuple[ExtremalityCertificate, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def to_json(self, model: FilteredModel) -> list[dict]:
        return [m.to_json(model) for m in self.vertices]


def build_constraints(model: FilteredModel) -> ConstraintSystem:
    """Equality description of the calibrated martingale-measure set."""
    rows: list[Row] = []
    for k in range(1, model.horizon + 1):
        groups = model.coarse_groups[k - 1]
        for c, group in enumerate(groups):
            for j in range(model.prices.assets):
                coeffs = [ZERO] * model.n_cells
                for a in group:
                    coeffs[a] = model.price(j, k, a) - model.price(j, k - 1, a)
                rows.append(Row(("martingale", k, c, j), tuple(coeffs), ZERO))
    for i in range(len(model.claims)):
        rows.append(Row(("calibration", i), model.claim_vector(i), ZERO))
    rows.append(Row(("normalization",), tuple([ONE] * model.n_cells), ONE))
    return ConstraintSystem(tuple(rows), frozenset(model.priors.allowed), model.n_cells)


def member(measure: Measure, cs: ConstraintSystem) -> bool:
    """Exact satisfaction of every row, the bounds, and the support mask."""
    if len(measure.weights) != cs.n_cells:
        return False
    if any(w < 0 for w in measure.weights):
        return False
    if any(w > 0 and a not in cs.allowed for a, w in enumerate(measure.weights)):
        return False
    for row in cs.rows:
        if linalg.dot(row.coeffs, measure.weights) != row.rhs:
            return False
    return True


def is_extreme(measure: Measure, cs: ConstraintSystem) -> tuple[bool, ExtremalityCertificate]:
    """Vertex test: the equality columns on the support must be independent.

    On failure the certificate carries a nonzero direction d with Ad = 0 and
    support(d) inside support(Q), so Q +/- eps*d stays feasible.
    """
    if not member(measure, cs):
        raise ConstraintViolation("measure does not satisfy the constraint system")
    support = measure.support
    restricted = [[row.coeffs[a] for a in support] for row in cs.rows]
    kernel = linalg.nullspace(restricted)
    if not kernel:
        witness = tuple(linalg.independent_rows(restricted))
        return True, ExtremalityCertificate(True, witness_rows=witness)
    direction = [ZERO] * cs.n_cells
    for a, value in zip(support, kernel[0]):
        direction[a] = value
    return False, ExtremalityCertificate(False, direction=tuple(direction))


def _canonical_ray(ray: Sequence[Fraction]) -> tuple[Fraction, ...]:
    denominators = [x.denominator for x in ray]
    scale = 1
    for d in denominators:
        scale = scale * d // gcd(scale, d)
    ints = [int(x * scale) for x in ray]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


def _forced_zero_columns(rows: list[tuple[Payoff, Fraction]], cols: list[int]) -> set[int] | None:
    """Columns pinned to zero by the equalities plus nonnegativity.

    Runs Gaussian elimination and collects rows of one sign with zero right
    hand side; returns None when a row is outright infeasible over q >= 0.
    """
    forced: set[int] = set()
    active = list(cols)
    while True:
        key = {c: i for i, c in enumerate(active)}
        tableau = [[coeffs[c] for c in active] + [rhs] for coeffs, rhs in rows]
        reduced, _ = linalg.rref(tableau)
        new: set[int] = set()
        for row in reduced:
            body, rhs = row[:-1], row[-1]
            pos = [c for c in active if body[key[c]] > 0]
            neg = [c for c in active if body[key[c]] < 0]
            if not pos and not neg:
                if rhs != 0:
                    return None
                continue
            if rhs == 0 and not neg:
                new.update(pos)
            elif rhs == 0 and not pos:
                new.update(neg)
            elif rhs < 0 and not neg:
                return None
            elif rhs > 0 and not pos:
                return None
        new -= forced
        if not new:
            return forced
        forced |= new
        active = [c for c in active if c not in forced]
        if not active:
            return forced


def enumerate_extreme_points(cs: ConstraintSystem) -> VertexSet:
    """All vertices of {q >= 0 : Aq = b}, in canonical order, with certificates.

    Double description on the homogenized cone {(q, t) >= 0 : Aq = b t}: start
    from the coordinate rays and intersect with one equality hyperplane at a
    time, keeping only adjacent sign-crossing pairs.  The normalization row
    forces t > 0 on every surviving ray, so rays and vertices correspond
    one-to-one.
    """
    cols = sorted(cs.allowed)
    data = [(row.coeffs, row.rhs) for row in cs.rows]
    forced = _forced_zero_columns(data, cols)
    if forced is None:
        return VertexSet((), ())
    cols = [c for c in cols if c not in forced]
    if not cols:
        return VertexSet((), ())

    dim = len(cols) + 1  # trailing homogenization coordinate t
    rays: list[tuple[Fraction, ...]] = []
    for i in range(dim):
        unit = [ZERO] * dim
        unit[i] = ONE
        rays.append(tuple(unit))

    for row in cs.rows:
        normal = [row.coeffs[c] for c in cols] + [-row.rhs]
        if all(x == 0 for x in normal):
            continue
        values = [linalg.dot(normal, r) for r in rays]
        zero = [r for r, v in zip(rays, values) if v == 0]
        plus = [(r, v) for r, v in zip(rays, values) if v > 0]
        minus = [(r, v) for r, v in zip(rays, values) if v < 0]
        if not plus and not minus:
            continue
        zero_sets = {r: frozenset(i for i, x in enumerate(r) if x == 0) for r in rays}
        new_rays = list(zero)
        for rp, vp in plus:
            for rm, vm in minus:
                common = zero_sets[rp] & zero_sets[rm]
                adjacent = not any(
                    w is not rp and w is not rm and common <= zero_sets[w] for w in rays
                )
                if not adjacent:
                    continue
                combined = tuple(vp * b - vm * a for a, b in zip(rp, rm))
                new_rays.append(_canonical_ray(combined))
        rays = sorted(set(new_rays))
        if not rays:
            return VertexSet((), ())

    vertices: list[tuple[tuple[int, ...], Payoff]] = []
    for ray in rays:
        t = ray[-1]
        assert t > 0, "normalization row must bound every surviving ray"
        weights = [ZERO] * cs.n_cells
        for c, x in zip(cols, ray[:-1]):
            weights[c] = x / t
        vec = tuple(weights)
        support = tuple(a for a, w in enumerate(vec) if w > 0)
        vertices.append((support, vec))
    vertices.sort()

    measures = tuple(Measure(weights) for _, weights in vertices)
    certificates = tuple(is_extreme(m, cs)[1] for m in measures)
    return VertexSet(measures, certificates)
