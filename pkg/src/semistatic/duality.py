"""Quasi-sure superhedging, robust pricing, and exact duality certification.

The superhedging price is a linear program: minimize initial cash subject to
pointwise domination on every prior-allowed terminal cell.  Its dual is the
maximization of the expected payoff over calibrated martingale measures, which
reduces to a scan of the enumerated extreme points; finite LP strong duality
makes the two sides match exactly, instance by instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import EmptyMeasureSet, ShapeError
from .hedging import SemiStaticStrategy, gain_basis, strategy_payoff
from .model import FilteredModel, Measure, Payoff
from .polytope import VertexSet, build_constraints, enumerate_extreme_points
from .rationals import fmt
from .simplex import solve_lp

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SuperhedgeResult:
    price: Fraction | None  # None signals an unbounded (arbitrage) problem
    strategy: SemiStaticStrategy
    tight: tuple[int, ...]  # allowed terminal cells where the hedge binds

    @property
    def unbounded(self) -> bool:
        return self.price is None

    def to_json(self, model: FilteredModel) -> dict:
        return {
            "price": "-inf" if self.unbounded else fmt(self.price),
            "strategy": self.strategy.to_json(model),
            "tight": [model.terminal_label(a) for a in self.tight],
        }


@dataclass(frozen=True)
class RobustPriceResult:
    value: Fraction | None  # None encodes the empty measure set (-inf)
    argmax: tuple[Measure, ...]

    @property
    def empty(self) -> bool:
        return self.value is None

    def to_json(self, model: FilteredModel) -> dict:
        return {
            "value": "-inf" if self.empty else fmt(self.value),
            "argmax": [m.to_json(model) for m in self.argmax],
        }


def _lp_columns(model: FilteredModel) -> tuple[list[tuple], list[Payoff]]:
    """Free strategy coordinates in column order: cash, claims, gains."""
    labels: list[tuple] = [("const",)]
    vectors: list[Payoff] = [tuple([ONE] * model.n_cells)]
    for i in range(len(model.claims)):
        labels.append(("claim", i))
        vectors.append(model.claim_vector(i))
    for label, vec in gain_basis(model):
        labels.append(label)
        vectors.append(vec)
    return labels, vectors


def _strategy_from_coeffs(coeffs: Sequence[Fraction], labels: Sequence[tuple], model: FilteredModel) -> SemiStaticStrategy:
    cash = ZERO
    static = [ZERO] * len(model.claims)
    dynamic = [
        [[ZERO for _ in range(model.prices.assets)] for _ in model.filtration.partitions[k - 1].cells]
        for k in range(1, model.horizon + 1)
    ]
    for label, value in zip(labels, coeffs):
        if label[0] == "const":
            cash = value
        elif label[0] == "claim":
            static[label[1]] = value
        else:
            _, k, c, j = label
            dynamic[k - 1][c][j] = value
    return SemiStaticStrategy(cash, tuple(static), tuple(tuple(tuple(r) for r in row) for row in dynamic))


def superhedge(payoff: Sequence[Fraction], model: FilteredModel) -> SuperhedgeResult:
    """Cheapest semi-static strategy dominating the payoff on allowed cells.

    Strategy coordinates are free, so each is split into a positive and a
    negative part; one surplus variable per allowed cell turns domination into
    equality.  An unbounded program means the statics admit model-free
    arbitrage, reported through the improving ray (negative cash, nonnegative
    total payoff).
    """
    if len(payoff) != model.n_cells:
        raise ShapeError("payoff length must match terminal cells")
    labels, vectors = _lp_columns(model)
    allowed = sorted(model.priors.allowed)
    n_free = len(labels)
    n_vars = 2 * n_free + len(allowed)
    matrix: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for slot, a in enumerate(allowed):
        row = [ZERO] * n_vars
        for j, vec in enumerate(vectors):
            row[2 * j] = vec[a]
            row[2 * j + 1] = -vec[a]
        row[2 * n_free + slot] = -ONE
        matrix.append(row)
        rhs.append(payoff[a])
    cost = [ZERO] * n_vars
    cost[0] = ONE
    cost[1] = -ONE

    result = solve_lp(cost, matrix, rhs)
    assert result.status != "infeasible", "cash can always dominate a finite payoff"
    if result.status == "unbounded":
        coeffs = [result.ray[2 * j] - result.ray[2 * j + 1] for j in range(n_free)]
        return SuperhedgeResult(None, _strategy_from_coeffs(coeffs, labels, model), ())
    coeffs = [result.solution[2 * j] - result.solution[2 * j + 1] for j in range(n_free)]
    strategy = _strategy_from_coeffs(coeffs, labels, model)
    tight = tuple(a for slot, a in enumerate(allowed) if result.solution[2 * n_free + slot] == 0)
    return SuperhedgeResult(result.objective, strategy, tight)


def robust_price(
    payoff: Sequence[Fraction], model: FilteredModel, vertex_set: VertexSet | None = None
) -> RobustPriceResult:
    """Maximal expected payoff over the enumerated extreme measures."""
    if len(payoff) != model.n_cells:
        raise ShapeError("payoff length must match terminal cells")
    if vertex_set is None:
        vertex_set = enumerate_extreme_points(build_constraints(model))
    if not vertex_set.vertices:
        return RobustPriceResult(None, ())
    values = [m.expectation(payoff) for m in vertex_set.vertices]
    best = max(values)
    argmax = tuple(m for m, v in zip(vertex_set.vertices, values) if v == best)
    return RobustPriceResult(best, argmax)


@dataclass(frozen=True)
class DualityReport:
    primal: Fraction  # superhedging price
    dual: Fraction  # robust price
    strategy: SemiStaticStrategy
    argmax: tuple[Measure, ...]
    tight: tuple[int, ...]
    slackness_ok: bool

    @property
    def gap(self) -> Fraction:
        return self.primal - self.dual

    @property
    def ok(self) -> bool:
        return self.gap == 0 and self.slackness_ok

    def to_json(self, model: FilteredModel) -> dict:
        return {
            "primal": fmt(self.primal),
            "dual": fmt(self.dual),
            "gap": fmt(self.gap),
            "strategy": self.strategy.to_json(model),
            "argmax": [m.to_json(model) for m in self.argmax],
            "tight": [model.terminal_label(a) for a in self.tight],
            "slackness_ok": self.slackness_ok,
            "ok": self.ok,
        }


def verify_duality(
    payoff: Sequence[Fraction], model: FilteredModel, vertex_set: VertexSet | None = None
) -> DualityReport:
    """Assert primal = dual exactly and check complementary slackness."""
    if vertex_set is None:
        vertex_set = enumerate_extreme_points(build_constraints(model))
    if not vertex_set.vertices:
        raise EmptyMeasureSet("empty calibrated measure set; run detect_arbitrage for a certificate")
    primal = superhedge(payoff, model)
    dual = robust_price(payoff, model, vertex_set)
    assert primal.price is not None, "nonempty measure set bounds the superhedge below"
    tight_set = set(primal.tight)
    slackness = all(
        a in tight_set for measure in dual.argmax for a in measure.support
    )
    return DualityReport(primal.price, dual.value, primal.strategy, dual.argmax, primal.tight, slackness)


@dataclass(frozen=True)
class ArbitrageReport:
    feasible: bool
    vertex_count: int
    certificate: SemiStaticStrategy | None = None
    certificate_payoff: Payoff | None = None

    def to_json(self, model: FilteredModel) -> dict:
        out: dict = {"feasible": self.feasible, "vertex_count": self.vertex_count}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json(model)
            out["certificate_payoff"] = [fmt(x) for x in self.certificate_payoff]
        return out


def detect_arbitrage(model: FilteredModel, vertex_set: VertexSet | None = None) -> ArbitrageReport:
    """Feasibility of the calibrated measure set, with a Farkas certificate.

    When the set is empty, a zero-cost strategy whose payoff is at least one
    on every allowed cell is produced by maximizing the guaranteed floor of a
    cash-free strategy (capped at one to keep the program bounded).
    """
    if vertex_set is None:
        vertex_set = enumerate_extreme_points(build_constraints(model))
    if vertex_set.vertices:
        return ArbitrageReport(True, len(vertex_set.vertices))

    labels, vectors = _lp_columns(model)
    labels = labels[1:]  # drop cash: the certificate must be zero-cost
    vectors = vectors[1:]
    allowed = sorted(model.priors.allowed)
    n_free = len(labels)
    # variables: free coordinates split, floor t split, cap slack u, surpluses s
    n_vars = 2 * n_free + 2 + 1 + len(allowed)
    t_pos, t_neg, u_idx = 2 * n_free, 2 * n_free + 1, 2 * n_free + 2
    matrix: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for slot, a in enumerate(allowed):
        row = [ZERO] * n_vars
        for j, vec in enumerate(vectors):
            row[2 * j] = vec[a]
            row[2 * j + 1] = -vec[a]
        row[t_pos] = -ONE
        row[t_neg] = ONE
        row[u_idx + 1 + slot] = -ONE
        matrix.append(row)
        rhs.append(ZERO)
    cap = [ZERO] * n_vars
    cap[t_pos] = ONE
    cap[t_neg] = -ONE
    cap[u_idx] = ONE
    matrix.append(cap)
    rhs.append(ONE)
    cost = [ZERO] * n_vars
    cost[t_pos] = -ONE
    cost[t_neg] = ONE

    result = solve_lp(cost, matrix, rhs)
    assert result.status == "optimal", "floor program is feasible and capped"
    floor = -result.objective
    assert floor > 0, "empty measure set must produce a positive floor"
    coeffs = [result.solution[2 * j] - result.solution[2 * j + 1] for j in range(n_free)]
    strategy = _strategy_from_coeffs([ZERO] + coeffs, [("const",)] + labels, model)
    return ArbitrageReport(False, 0, strategy, strategy_payoff(strategy, model))
