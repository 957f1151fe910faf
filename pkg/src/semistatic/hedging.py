"""Semi-static replication and completeness certificates.

A semi-static strategy is cash, static positions in the claims, and a
predictable dynamic integrand.  Completeness under a measure Q is a rank
fact: the span of {1, claims, elementary gains} restricted to the Q-support
must fill the whole support.  The unhedgeable-part decomposition projects each
claim off the gain span and splits the resulting span by single-jump times.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import EmptyMeasureSet, NotCalibrated, NotComplete, ShapeError
from .model import FilteredModel, Measure, Payoff, conditional_expectation
from .polytope import ConstraintSystem, build_constraints, enumerate_extreme_points, is_extreme, member
from .rationals import fmt

ZERO = Fraction(0)
ONE = Fraction(1)

Dynamic = tuple[tuple[tuple[Fraction, ...], ...], ...]  # [k-1][cell of P_{k-1}][asset]


@dataclass(frozen=True)
class SemiStaticStrategy:
    cash: Fraction
    static: tuple[Fraction, ...]
    dynamic: Dynamic

    def to_json(self, model: FilteredModel) -> dict:
        entries = []
        for k_index, per_cell in enumerate(self.dynamic):
            for c, per_asset in enumerate(per_cell):
                for j, value in enumerate(per_asset):
                    if value != 0:
                        cell = model.filtration.partitions[k_index].cells[c]
                        entries.append(
                            {
                                "k": k_index + 1,
                                "cell": model.cell_label(cell),
                                "asset": j,
                                "value": fmt(value),
                            }
                        )
        return {"cash": fmt(self.cash), "static": [fmt(a) for a in self.static], "dynamic": entries}


def zero_dynamic(model: FilteredModel) -> Dynamic:
    return tuple(
        tuple(
            tuple(ZERO for _ in range(model.prices.assets))
            for _ in model.filtration.partitions[k - 1].cells
        )
        for k in range(1, model.horizon + 1)
    )


def terminal_gain(dynamic: Dynamic, model: FilteredModel) -> Payoff:
    """Terminal value of the dynamic part, sum of H_k (S_k - S_{k-1})."""
    if len(dynamic) != model.horizon:
        raise ShapeError("dynamic part must have one slice per period")
    totals = [ZERO] * model.n_cells
    for k in range(1, model.horizon + 1):
        per_cell = dynamic[k - 1]
        cells = model.filtration.partitions[k - 1].cells
        if len(per_cell) != len(cells):
            raise ShapeError(f"period {k} has {len(per_cell)} cells, expected {len(cells)}")
        for a in range(model.n_cells):
            c = model.coarse_cell_of[k - 1][a]
            holdings = per_cell[c]
            if len(holdings) != model.prices.assets:
                raise ShapeError("holdings must have one entry per asset")
            for j, h in enumerate(holdings):
                totals[a] += h * (model.price(j, k, a) - model.price(j, k - 1, a))
    return tuple(totals)


def strategy_payoff(strategy: SemiStaticStrategy, model: FilteredModel) -> Payoff:
    base = terminal_gain(strategy.dynamic, model)
    out = list(base)
    for a in range(model.n_cells):
        out[a] += strategy.cash
        for i, pos in enumerate(strategy.static):
            out[a] += pos * model.claim_vector(i)[a]
    return tuple(out)


GainLabel = tuple  # ("gain", k, cell index in P_{k-1}, asset)


def gain_basis(model: FilteredModel) -> list[tuple[GainLabel, Payoff]]:
    """Elementary gains 1_A (S^j_k - S^j_{k-1}) in canonical column order."""
    columns: list[tuple[GainLabel, Payoff]] = []
    for k in range(1, model.horizon + 1):
        groups = model.coarse_groups[k - 1]
        for c, group in enumerate(groups):
            for j in range(model.prices.assets):
                vec = [ZERO] * model.n_cells
                for a in group:
                    vec[a] = model.price(j, k, a) - model.price(j, k - 1, a)
                columns.append((("gain", k, c, j), tuple(vec)))
    return columns


@dataclass(frozen=True)
class HedgingSpan:
    """Realizable terminal payoffs: constant, claims, and elementary gains."""

    columns: tuple[tuple[tuple, Payoff], ...]
    rank: int
    support: tuple[int, ...]


def hedging_span(model: FilteredModel, measure: Measure) -> HedgingSpan:
    columns: list[tuple[tuple, Payoff]] = [(("const",), tuple([ONE] * model.n_cells))]
    for i in range(len(model.claims)):
        columns.append((("claim", i), model.claim_vector(i)))
    columns.extend(gain_basis(model))
    support = measure.support
    restricted = [[vec[a] for a in support] for _, vec in columns]
    return HedgingSpan(tuple(columns), linalg.rank(restricted), support)


def _require_calibrated(measure: Measure, model: FilteredModel, cs: ConstraintSystem | None = None) -> ConstraintSystem:
    cs = cs or build_constraints(model)
    if not member(measure, cs):
        raise NotCalibrated("measure is not a calibrated martingale measure")
    return cs


@dataclass(frozen=True)
class CompletenessReport:
    complete: bool
    rank: int
    support_size: int

    def to_json(self) -> dict:
        return {"complete": self.complete, "rank": self.rank, "support_size": self.support_size}


def is_semistatically_complete(
    measure: Measure, model: FilteredModel, cs: ConstraintSystem | None = None
) -> CompletenessReport:
    """True iff every payoff is replicable Q-a.s., i.e. the span fills the support."""
    _require_calibrated(measure, model, cs)
    span = hedging_span(model, measure)
    return CompletenessReport(span.rank == len(span.support), span.rank, len(span.support))


@dataclass(frozen=True)
class NotReplicable:
    residual: Payoff

    def to_json(self) -> dict:
        return {"replicable": False, "residual": [fmt(x) for x in self.residual]}


def replicate(
    payoff: Sequence[Fraction],
    measure: Measure,
    model: FilteredModel,
    cs: ConstraintSystem | None = None,
) -> SemiStaticStrategy | NotReplicable:
    """Solve for a semi-static strategy matching the payoff on the Q-support.

    The system is underdetermined in general; the minimum-norm coefficient
    vector is returned, which is deterministic.  On failure the residual is
    the component of the payoff orthogonal to the span under the Q-weighted
    inner product, reported as zero off the support.
    """
    _require_calibrated(measure, model, cs)
    if len(payoff) != model.n_cells:
        raise ShapeError("payoff length must match terminal cells")
    span = hedging_span(model, measure)
    support = span.support
    rows = [[vec[a] for _, vec in span.columns] for a in support]
    rhs = [payoff[a] for a in support]
    coeffs = linalg.min_norm_solution(rows, rhs)
    if coeffs is None:
        vectors = [[vec[a] for a in support] for _, vec in span.columns]
        proj = linalg.project_onto_span(rhs, vectors, [measure.weights[a] for a in support])
        residual = [ZERO] * model.n_cells
        for a, x, p in zip(support, rhs, proj):
            residual[a] = x - p
        return NotReplicable(tuple(residual))
    return _unpack_strategy(coeffs, span, model)


def _unpack_strategy(
    coeffs: Sequence[Fraction], span: HedgingSpan, model: FilteredModel
) -> SemiStaticStrategy:
    cash = ZERO
    static = [ZERO] * len(model.claims)
    dynamic = [
        [
            [ZERO for _ in range(model.prices.assets)]
            for _ in model.filtration.partitions[k - 1].cells
        ]
        for k in range(1, model.horizon + 1)
    ]
    for (label, _), value in zip(span.columns, coeffs):
        if label[0] == "const":
            cash = value
        elif label[0] == "claim":
            static[label[1]] = value
        else:
            _, k, c, j = label
            dynamic[k - 1][c][j] = value
    return SemiStaticStrategy(cash, tuple(static), tuple(tuple(tuple(r) for r in s) for s in dynamic))


@dataclass(frozen=True)
class EquivalenceCheck:
    description: str
    weights: Payoff
    expected: bool
    extreme: bool
    complete: bool

    @property
    def passed(self) -> bool:
        return self.extreme == self.expected and self.complete == self.expected


@dataclass(frozen=True)
class EquivalenceReport:
    checks: tuple[EquivalenceCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {
                    "case": c.description,
                    "weights": [fmt(w) for w in c.weights],
                    "expected": c.expected,
                    "extreme": c.extreme,
                    "complete": c.complete,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def _mix(measures: Sequence[Measure], coeffs: Sequence[Fraction]) -> Measure:
    n = len(measures[0].weights)
    weights = [ZERO] * n
    for m, lam in zip(measures, coeffs):
        for a, w in enumerate(m.weights):
            weights[a] += lam * w
    return Measure(tuple(weights))


def verify_jacod_yor(model: FilteredModel) -> EquivalenceReport:
    """Instance check of the extremality/completeness equivalence.

    Every enumerated vertex must be extreme and complete; every pairwise
    midpoint and the barycenter (when they are not vertices themselves) must
    be neither.
    """
    cs = build_constraints(model)
    vertex_set = enumerate_extreme_points(cs)
    if not vertex_set.vertices:
        raise EmptyMeasureSet("no calibrated martingale measure exists")
    checks: list[EquivalenceCheck] = []
    vertices = vertex_set.vertices
    for i, v in enumerate(vertices):
        extreme, _ = is_extreme(v, cs)
        complete = is_semistatically_complete(v, model, cs).complete
        checks.append(EquivalenceCheck(f"vertex {i}", v.weights, True, extreme, complete))
    mixtures: list[tuple[str, Measure]] = []
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            mixtures.append((f"midpoint {i},{j}", _mix([vertices[i], vertices[j]], [Fraction(1, 2)] * 2)))
    if len(vertices) > 1:
        lam = Fraction(1, len(vertices))
        mixtures.append(("barycenter", _mix(list(vertices), [lam] * len(vertices))))
    vertex_weights = {v.weights for v in vertices}
    for name, mixture in mixtures:
        if mixture.weights in vertex_weights:
            continue
        extreme, _ = is_extreme(mixture, cs)
        complete = is_semistatically_complete(mixture, model, cs).complete
        checks.append(EquivalenceCheck(name, mixture.weights, False, extreme, complete))
    return EquivalenceReport(tuple(checks))


@dataclass(frozen=True)
class JumpBlock:
    """Orthogonal residual-span directions that jump at one time index.

    ``atom_cells`` indexes the cells of P_{time-1} (P_0 when time is 0) that
    carry the jump; they are pairwise disjoint by construction.
    """

    time: int
    vectors: tuple[Payoff, ...]
    atom_cells: tuple[int, ...]


@dataclass(frozen=True)
class UnhedgeableDecomposition:
    residual_terminals: tuple[Payoff, ...]
    residual_martingales: tuple[tuple[Payoff, ...], ...]
    blocks: tuple[JumpBlock, ...]


def _mask_to_support(vec: Sequence[Fraction], weights: Sequence[Fraction]) -> Payoff:
    return tuple(x if w > 0 else ZERO for x, w in zip(vec, weights))


def decompose_unhedgeable(
    measure: Measure, model: FilteredModel, cs: ConstraintSystem | None = None
) -> UnhedgeableDecomposition:
    """Residual martingales of the claims and their single-jump block basis.

    Each claim is projected off the elementary-gain span under the Q-weighted
    inner product.  Under completeness the residual span decomposes into
    orthogonal pieces, one per time index k, whose martingales vanish strictly
    before k and are constant from k on; each piece is carried by disjoint
    atoms of the previous partition.
    """
    cs = _require_calibrated(measure, model, cs)
    if not is_semistatically_complete(measure, model, cs).complete:
        raise NotComplete("unhedgeable decomposition requires semi-static completeness")
    weights = measure.weights
    support = measure.support
    gains = [vec for _, vec in gain_basis(model)]

    residuals: list[Payoff] = []
    for i in range(len(model.claims)):
        psi = model.claim_vector(i)
        proj = linalg.project_onto_span(psi, gains, weights)
        residuals.append(_mask_to_support([x - p for x, p in zip(psi, proj)], weights))

    martingales = tuple(
        tuple(conditional_expectation(model, v, k, measure) for k in range(model.horizon + 1))
        for v in residuals
    )

    span_basis: list[Payoff] = []
    for v in residuals:
        if linalg.rank(span_basis + [list(v)]) > len(span_basis):
            span_basis.append(v)

    blocks: list[JumpBlock] = []
    previous_basis: list[Payoff] = []
    for k in range(model.horizon + 1):
        measurable = _measurable_combinations(span_basis, model, k, weights)
        fresh = []
        for v in measurable:
            proj = linalg.project_onto_span(v, previous_basis, weights) if previous_basis else tuple([ZERO] * len(v))
            fresh.append(tuple(x - p for x, p in zip(v, proj)))
        block_vectors = linalg.gram_schmidt(fresh, weights)
        block_vectors = [_mask_to_support(v, weights) for v in block_vectors]
        if block_vectors:
            if k >= 1:
                for v in block_vectors:
                    prior = conditional_expectation(model, v, k - 1, measure)
                    assert all(prior[a] == 0 for a in support), "block martingale must vanish before its jump"
            prev = max(k - 1, 0)
            carrying = []
            for c, group in enumerate(model.coarse_groups[prev]):
                charged = [a for a in group if weights[a] > 0]
                if any(v[a] != 0 for v in block_vectors for a in charged):
                    carrying.append(c)
            blocks.append(JumpBlock(k, tuple(block_vectors), tuple(carrying)))
        previous_basis = measurable

    return UnhedgeableDecomposition(tuple(residuals), martingales, tuple(blocks))


def _measurable_combinations(
    span_basis: Sequence[Payoff], model: FilteredModel, k: int, weights: Sequence[Fraction]
) -> list[Payoff]:
    """Basis of the span elements constant on each charged P_k cell."""
    if not span_basis:
        return []
    constraints: list[list[Fraction]] = []
    for group in model.coarse_groups[k]:
        charged = [a for a in group if weights[a] > 0]
        for a, b in zip(charged, charged[1:]):
            constraints.append([vec[a] - vec[b] for vec in span_basis])
    if not constraints:
        coeff_basis = [tuple(ONE if i == j else ZERO for j in range(len(span_basis))) for i in range(len(span_basis))]
    else:
        coeff_basis = linalg.nullspace(constraints)
    combined = []
    for coeffs in coeff_basis:
        vec = [ZERO] * model.n_cells
        for coef, base in zip(coeffs, span_basis):
            for a, x in enumerate(base):
                vec[a] += coef * x
        combined.append(tuple(vec))
    return combined
