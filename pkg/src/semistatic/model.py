"""Finite filtered market models.

A model is a finite outcome set, a refining-partition filtration on a rational
time grid, an adapted price vector started at zero, a list of statically
traded claims with zero initial price, and a support mask saying which
terminal atoms priors may charge.  Probability measures live on the cells of
the terminal partition; payoff vectors are indexed the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ShapeError
from .rationals import fmt

ZERO = Fraction(0)

Cell = tuple[int, ...]
Payoff = tuple[Fraction, ...]


def _canonical_cells(cells: Iterable[Iterable[int]]) -> tuple[Cell, ...]:
    return tuple(sorted(tuple(sorted(set(c))) for c in cells))


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing rational time labels t_0 = 0 < ... < t_K."""

    times: tuple[Fraction, ...]

    @property
    def steps(self) -> int:
        return len(self.times) - 1


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty cells of outcome indices covering the outcome set."""

    cells: tuple[Cell, ...]

    def __init__(self, cells: Iterable[Iterable[int]]):
        object.__setattr__(self, "cells", _canonical_cells(cells))

    @cached_property
    def cell_of(self) -> dict[int, int]:
        return {w: i for i, cell in enumerate(self.cells) for w in cell}

    def outcomes(self) -> frozenset[int]:
        return frozenset(w for cell in self.cells for w in cell)

    def refines(self, coarser: "Partition") -> bool:
        lookup = coarser.cell_of
        for cell in self.cells:
            parents = {lookup.get(w) for w in cell}
            if len(parents) != 1 or None in parents:
                return False
        return True


@dataclass(frozen=True)
class Filtration:
    """Partitions P_0, ..., P_K, each refining its predecessor."""

    partitions: tuple[Partition, ...]

    def __init__(self, partitions: Iterable[Partition]):
        object.__setattr__(self, "partitions", tuple(partitions))

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1


@dataclass(frozen=True)
class PriceProcess:
    """Rational price paths, indexed (asset, time index, outcome)."""

    values: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def assets(self) -> int:
        return len(self.values)

    @property
    def periods(self) -> int:
        return len(self.values[0]) - 1 if self.values else 0

    @property
    def n_outcomes(self) -> int:
        return len(self.values[0][0]) if self.values and self.values[0] else 0


@dataclass(frozen=True)
class StaticClaim:
    """Terminal payoff over cells of the last partition; initial price zero."""

    payoff: Payoff


@dataclass(frozen=True)
class PriorSupport:
    """Terminal cells that priors may charge."""

    allowed: frozenset[int]


@dataclass(frozen=True)
class FilteredModel:
    outcomes: tuple[str, ...]
    grid: TimeGrid
    filtration: Filtration
    prices: PriceProcess
    claims: tuple[StaticClaim, ...]
    priors: PriorSupport

    @property
    def horizon(self) -> int:
        return self.grid.steps

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    @cached_property
    def terminal_cells(self) -> tuple[Cell, ...]:
        return self.filtration.partitions[-1].cells

    @property
    def n_cells(self) -> int:
        return len(self.terminal_cells)

    @cached_property
    def terminal_cell_of_outcome(self) -> dict[int, int]:
        return self.filtration.partitions[-1].cell_of

    @cached_property
    def coarse_cell_of(self) -> tuple[tuple[int, ...], ...]:
        """For each time k, map terminal cell index -> index of its P_k cell."""
        table = []
        for partition in self.filtration.partitions:
            lookup = partition.cell_of
            table.append(tuple(lookup[cell[0]] for cell in self.terminal_cells))
        return tuple(table)

    @cached_property
    def coarse_groups(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """For each time k, the P_k cells as groups of terminal cell indices."""
        table = []
        for k, partition in enumerate(self.filtration.partitions):
            groups: list[list[int]] = [[] for _ in partition.cells]
            for a, coarse in enumerate(self.coarse_cell_of[k]):
                groups[coarse].append(a)
            table.append(tuple(tuple(g) for g in groups))
        return tuple(table)

    def price(self, asset: int, k: int, terminal_cell: int) -> Fraction:
        """Price value on a terminal cell (well defined by adaptedness)."""
        outcome = self.terminal_cells[terminal_cell][0]
        return self.prices.values[asset][k][outcome]

    def price_vector(self, asset: int, k: int) -> Payoff:
        return tuple(self.price(asset, k, a) for a in range(self.n_cells))

    def claim_vector(self, i: int) -> Payoff:
        return self.claims[i].payoff

    def cell_label(self, cell: Iterable[int]) -> str:
        return "|".join(self.outcomes[w] for w in sorted(cell))

    def terminal_label(self, index: int) -> str:
        return self.cell_label(self.terminal_cells[index])

    def measure(self, weights: Sequence[Fraction | int | str]) -> "Measure":
        from .rationals import rat

        return Measure(tuple(rat(w) for w in weights), _model=self)


@dataclass(frozen=True)
class Measure:
    """Nonnegative rational weights over terminal cells summing to one."""

    weights: Payoff
    _model: FilteredModel | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights):
            raise ValueError("measure weights must be nonnegative")
        if sum(self.weights, ZERO) != 1:
            raise ValueError("measure weights must sum to exactly 1")
        if self._model is not None:
            if len(self.weights) != self._model.n_cells:
                raise ShapeError("measure has wrong number of terminal cells")
            bad = [a for a, w in enumerate(self.weights) if w > 0 and a not in self._model.priors.allowed]
            if bad:
                raise ValueError(f"measure charges terminal cells outside the prior support: {bad}")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(a for a, w in enumerate(self.weights) if w > 0)

    def expectation(self, payoff: Sequence[Fraction]) -> Fraction:
        return sum((w * x for w, x in zip(self.weights, payoff)), ZERO)

    def to_json(self, model: FilteredModel) -> dict:
        return {
            "weights": [fmt(w) for w in self.weights],
            "support": [model.terminal_label(a) for a in self.support],
        }


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"code": v.code, "where": v.where, "message": v.message} for v in self.violations
            ],
        }


def validate_model(model: FilteredModel) -> ValidationReport:
    """Check every structural invariant; an empty report means valid."""
    bad: list[Violation] = []
    n = model.n_outcomes
    times = model.grid.times

    if model.grid.steps < 1:
        bad.append(Violation("grid", "times", "need at least one period"))
    if times and times[0] != 0:
        bad.append(Violation("grid", "times[0]", "time grid must start at 0"))
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            bad.append(Violation("grid", f"times[{i}]", "times must be strictly increasing"))

    partitions = model.filtration.partitions
    if len(partitions) != model.grid.steps + 1:
        bad.append(Violation("filtration", "partitions", "need one partition per time index"))
    universe = frozenset(range(n))
    for k, partition in enumerate(partitions):
        seen: set[int] = set()
        for cell in partition.cells:
            if not cell:
                bad.append(Violation("partition", f"P_{k}", "empty cell"))
            if seen.intersection(cell):
                bad.append(Violation("partition", f"P_{k}", "cells are not disjoint"))
            seen.update(cell)
        if frozenset(seen) != universe:
            bad.append(Violation("partition", f"P_{k}", "cells do not cover the outcome set"))
    for k in range(1, len(partitions)):
        if not partitions[k].refines(partitions[k - 1]):
            bad.append(Violation("refinement", f"P_{k}", f"P_{k} does not refine P_{k - 1}"))

    values = model.prices.values
    if not values:
        bad.append(Violation("prices", "assets", "need at least one asset"))
    for j, asset_path in enumerate(values):
        if len(asset_path) != model.grid.steps + 1:
            bad.append(Violation("prices", f"asset {j}", "wrong number of time slices"))
            continue
        for k, slice_k in enumerate(asset_path):
            if len(slice_k) != n:
                bad.append(Violation("prices", f"asset {j}, k={k}", "wrong number of outcomes"))
                continue
            if k == 0 and any(x != 0 for x in slice_k):
                bad.append(Violation("prices", f"asset {j}, k=0", "initial price must be 0"))
            if k < len(partitions):
                for cell in partitions[k].cells:
                    base = slice_k[cell[0]]
                    if any(slice_k[w] != base for w in cell):
                        bad.append(
                            Violation(
                                "adapted",
                                f"asset {j}, k={k}, cell {model.cell_label(cell)}",
                                "price is not constant on a partition cell",
                            )
                        )
                        break

    for i, claim in enumerate(model.claims):
        if len(claim.payoff) != model.n_cells:
            bad.append(Violation("claim", f"claim {i}", "payoff length must match terminal cells"))

    if not model.priors.allowed:
        bad.append(Violation("priors", "allowed", "prior support must be nonempty"))
    for a in model.priors.allowed:
        if not 0 <= a < model.n_cells:
            bad.append(Violation("priors", "allowed", f"unknown terminal cell index {a}"))

    return ValidationReport(tuple(bad))


def natural_filtration(prices: PriceProcess) -> Filtration:
    """Coarsest refining filtration making the prices adapted.

    P_k groups outcomes by the tuple of all asset values up to time k; groups
    by a longer prefix automatically refine groups by a shorter one.
    """
    n = prices.n_outcomes
    partitions = []
    for k in range(prices.periods + 1):
        groups: dict[tuple, list[int]] = {}
        for w in range(n):
            key = tuple(prices.values[j][t][w] for t in range(k + 1) for j in range(prices.assets))
            groups.setdefault(key, []).append(w)
        partitions.append(Partition(groups.values()))
    return Filtration(partitions)


def condexp_groups(
    payoff: Sequence[Fraction],
    groups: Sequence[Sequence[int]],
    weights: Sequence[Fraction],
) -> Payoff:
    """Groupwise conditional expectation; zero on null groups by convention."""
    result = [ZERO] * len(payoff)
    for group in groups:
        mass = sum((weights[a] for a in group), ZERO)
        if mass == 0:
            continue
        mean = sum((weights[a] * payoff[a] for a in group), ZERO) / mass
        for a in group:
            result[a] = mean
    return tuple(result)


def conditional_expectation(
    model: FilteredModel, payoff: Sequence[Fraction], k: int, measure: Measure
) -> Payoff:
    """E[payoff | P_k] under the measure, as a vector over terminal cells."""
    if len(payoff) != model.n_cells:
        raise ShapeError("payoff length must match terminal cells")
    return condexp_groups(payoff, model.coarse_groups[k], measure.weights)


def indicator(model: FilteredModel, cells: Iterable[int]) -> Payoff:
    vec = [ZERO] * model.n_cells
    for a in cells:
        vec[a] = Fraction(1)
    return tuple(vec)
