"""Progressive enlargement with single-jump processes.

The informed filtration G refines F by the level sets of the processes
``mark * 1_{tau <= k}``; initial enlargement with a random variable is the
special case tau = 0 on {mark > 0}.  Measures for the enlarged market live on
the cells of G_K; the comparison with the base market goes through the
canonical pushforward onto F_K cells.  All survival, compensator, and
enlarged-martingale identities are verified cellwise with exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import ShapeError, SingularCompensator
from .model import (
    FilteredModel,
    Filtration,
    Measure,
    Partition,
    Payoff,
    condexp_groups,
)
from .polytope import VertexSet, build_constraints, enumerate_extreme_points
from .duality import robust_price
from .rationals import fmt

ZERO = Fraction(0)
ONE = Fraction(1)

NO_JUMP = None  # tau value for "never", paired with a zero mark


@dataclass(frozen=True)
class SingleJump:
    """A random time and a nonnegative mark, with tau = never exactly on {mark = 0}."""

    tau: tuple[int | None, ...]  # per outcome; None means the jump never occurs
    mark: tuple[Fraction, ...]  # per outcome

    def __post_init__(self) -> None:
        if len(self.tau) != len(self.mark):
            raise ShapeError("tau and mark must have one entry per outcome")
        for t, x in zip(self.tau, self.mark):
            if x < 0:
                raise ValueError("marks must be nonnegative")
            if (t is None) != (x == 0):
                raise ValueError("tau must be infinite exactly where the mark vanishes")

    def to_json(self, model: FilteredModel) -> dict:
        return {
            "tau": {model.outcomes[w]: ("inf" if t is None else t) for w, t in enumerate(self.tau)},
            "mark": {model.outcomes[w]: fmt(x) for w, x in enumerate(self.mark)},
        }


def _jump_key(jump: SingleJump, outcome: int, k: int):
    """What the level sets of mark * 1_{tau <= l}, l <= k, reveal at time k."""
    t = jump.tau[outcome]
    if t is not None and t <= k:
        return (t, jump.mark[outcome])
    return ("pending",)


@dataclass(frozen=True)
class EnlargedModel:
    base: FilteredModel
    jumps: tuple[SingleJump, ...]
    model: FilteredModel  # the same market carried by the enlarged filtration

    @property
    def enlarged_filtration(self) -> Filtration:
        return self.model.filtration

    def base_cell_of(self, g: int, k: int | None = None) -> int:
        """Base P_k cell index containing the enlarged terminal cell g."""
        outcome = self.model.terminal_cells[g][0]
        if k is None:
            return self.base.terminal_cell_of_outcome[outcome]
        return self.base.filtration.partitions[k].cell_of[outcome]

    def base_groups(self, k: int) -> list[list[int]]:
        """Base P_k cells as groups of enlarged terminal cell indices."""
        groups: list[list[int]] = [[] for _ in self.base.filtration.partitions[k].cells]
        for g in range(self.model.n_cells):
            groups[self.base_cell_of(g, k)].append(g)
        return groups

    def tau_of_cell(self, jump: SingleJump, g: int) -> int | None:
        cell = self.model.terminal_cells[g]
        values = {jump.tau[w] for w in cell}
        if len(values) != 1:
            raise ShapeError("jump time is not measurable on the enlarged terminal cells")
        return next(iter(values))

    def mark_of_cell(self, jump: SingleJump, g: int) -> Fraction:
        cell = self.model.terminal_cells[g]
        values = {jump.mark[w] for w in cell}
        if len(values) != 1:
            raise ShapeError("jump mark is not measurable on the enlarged terminal cells")
        return next(iter(values))

    def expand(self, payoff: Sequence[Fraction]) -> Payoff:
        """Lift a base terminal payoff to the enlarged terminal cells."""
        if len(payoff) != self.base.n_cells:
            raise ShapeError("payoff length must match base terminal cells")
        return tuple(payoff[self.base_cell_of(g)] for g in range(self.model.n_cells))

    def pushforward(self, measure: Measure) -> Measure:
        """Restrict an enlarged measure to the base terminal algebra."""
        weights = [ZERO] * self.base.n_cells
        for g, w in enumerate(measure.weights):
            weights[self.base_cell_of(g)] += w
        return Measure(tuple(weights))


def enlarge(model: FilteredModel, jumps: Iterable[SingleJump]) -> EnlargedModel:
    """Coarsest refining filtration carrying the base and every jump process."""
    jumps = tuple(jumps)
    for jump in jumps:
        if len(jump.tau) != model.n_outcomes:
            raise ShapeError("jump must assign a time to every outcome")
        for t in jump.tau:
            if t is not None and not 0 <= t <= model.horizon:
                raise ValueError(f"jump time {t} outside the grid")
    partitions = []
    for k, base_partition in enumerate(model.filtration.partitions):
        cells: list[list[int]] = []
        for cell in base_partition.cells:
            split: dict[tuple, list[int]] = {}
            for w in cell:
                key = tuple(_jump_key(j, w, k) for j in jumps)
                split.setdefault(key, []).append(w)
            cells.extend(split.values())
        partitions.append(Partition(cells))
    filtration = Filtration(partitions)

    terminal = partitions[-1]
    base_lookup = model.terminal_cell_of_outcome
    claims = []
    for claim in model.claims:
        claims.append(
            type(claim)(tuple(claim.payoff[base_lookup[cell[0]]] for cell in terminal.cells))
        )
    allowed = frozenset(
        g for g, cell in enumerate(terminal.cells) if base_lookup[cell[0]] in model.priors.allowed
    )
    enlarged = FilteredModel(
        outcomes=model.outcomes,
        grid=model.grid,
        filtration=filtration,
        prices=model.prices,
        claims=tuple(claims),
        priors=type(model.priors)(allowed),
    )
    return EnlargedModel(model, jumps, enlarged)


def first_move_time(model: FilteredModel) -> tuple[int | None, ...]:
    """Per outcome, the first time any asset leaves its start value."""
    out: list[int | None] = []
    for w in range(model.n_outcomes):
        hit = next(
            (
                k
                for k in range(model.horizon + 1)
                if any(model.prices.values[j][k][w] != 0 for j in range(model.prices.assets))
            ),
            None,
        )
        out.append(hit)
    return tuple(out)


@dataclass(frozen=True)
class AzemaResult:
    """Survival process Z_k = Q(tau > k | F_k) over enlarged terminal cells."""

    values: tuple[Payoff, ...]  # index k = 0..K
    supermartingale_ok: bool


def azema(measure: Measure, jump: SingleJump, enlarged: EnlargedModel) -> AzemaResult:
    model = enlarged.model
    taus = [enlarged.tau_of_cell(jump, g) for g in range(model.n_cells)]
    horizon = model.horizon
    values = []
    for k in range(horizon + 1):
        survival = tuple(ONE if (t is None or t > k) else ZERO for t in taus)
        values.append(condexp_groups(survival, enlarged.base_groups(k), measure.weights))
    ok = True
    for k in range(horizon):
        next_mean = condexp_groups(values[k + 1], enlarged.base_groups(k), measure.weights)
        if any(measure.weights[g] > 0 and next_mean[g] > values[k][g] for g in range(model.n_cells)):
            ok = False
    return AzemaResult(tuple(values), ok)


@dataclass(frozen=True)
class CompensatorResult:
    """Dual predictable projection of mark * 1_{tau <= k} along the base filtration."""

    increments: tuple[Payoff, ...]  # Delta A_k, k = 0..K; Delta A_0 is the F_0 term
    cumulative: tuple[Payoff, ...]
    predictable_ok: bool
    martingale_ok: bool


def compensator(measure: Measure, jump: SingleJump, enlarged: EnlargedModel) -> CompensatorResult:
    model = enlarged.model
    horizon = model.horizon
    taus = [enlarged.tau_of_cell(jump, g) for g in range(model.n_cells)]
    marks = [enlarged.mark_of_cell(jump, g) for g in range(model.n_cells)]
    increments: list[Payoff] = []
    for k in range(horizon + 1):
        jump_now = tuple(marks[g] if taus[g] == k else ZERO for g in range(model.n_cells))
        groups = enlarged.base_groups(max(k - 1, 0))
        increments.append(condexp_groups(jump_now, groups, measure.weights))
    cumulative = []
    running = tuple([ZERO] * model.n_cells)
    for inc in increments:
        running = tuple(a + d for a, d in zip(running, inc))
        cumulative.append(running)

    predictable = True
    for k in range(horizon + 1):
        groups = enlarged.base_groups(max(k - 1, 0))
        for group in groups:
            vals = {increments[k][g] for g in group}
            if len(vals) > 1:
                predictable = False

    martingale = True
    weights = measure.weights
    for k in range(horizon + 1):
        jumped = tuple(
            (marks[g] if (taus[g] is not None and taus[g] <= k) else ZERO) for g in range(model.n_cells)
        )
        delta_n = (
            jumped
            if k == 0
            else tuple(
                jumped[g]
                - (marks[g] if (taus[g] is not None and taus[g] <= k - 1) else ZERO)
                for g in range(model.n_cells)
            )
        )
        centered = tuple(delta_n[g] - increments[k][g] for g in range(model.n_cells))
        mean = condexp_groups(centered, enlarged.base_groups(max(k - 1, 0)), weights)
        if any(weights[g] > 0 and mean[g] != 0 for g in range(model.n_cells)):
            martingale = False
    return CompensatorResult(tuple(increments), tuple(cumulative), predictable, martingale)


@dataclass(frozen=True)
class JeulinYorResult:
    """Compensated jump martingale in the enlarged filtration."""

    values: tuple[Payoff, ...]  # M_k over enlarged terminal cells, k = 0..K
    martingale_ok: bool


def jeulin_yor(measure: Measure, jump: SingleJump, enlarged: EnlargedModel) -> JeulinYorResult:
    """M_k = mark 1_{tau <= k} - sum_{l <= k and tau} Delta A_l / Z_{l-1}, Z_{-1} = 1.

    The division is taken cellwise along the base filtration; an increment
    charged where the survival process vanishes is only tolerated on null
    cells (the dA-null convention), anywhere else it is an error.
    """
    model = enlarged.model
    horizon = model.horizon
    taus = [enlarged.tau_of_cell(jump, g) for g in range(model.n_cells)]
    marks = [enlarged.mark_of_cell(jump, g) for g in range(model.n_cells)]
    z = azema(measure, jump, enlarged)
    comp = compensator(measure, jump, enlarged)
    weights = measure.weights

    hazard: list[Payoff] = []  # Delta A_l / Z_{l-1} per enlarged terminal cell
    for l in range(horizon + 1):
        out = []
        for g in range(model.n_cells):
            inc = comp.increments[l][g]
            z_prev = ONE if l == 0 else z.values[l - 1][g]
            if inc == 0:
                out.append(ZERO)
            elif z_prev == 0:
                if weights[g] > 0:
                    raise SingularCompensator(
                        f"compensator increment at k={l} charged where the survival process vanishes"
                    )
                out.append(ZERO)
            else:
                out.append(inc / z_prev)
        hazard.append(tuple(out))

    values: list[Payoff] = []
    for k in range(horizon + 1):
        out = []
        for g in range(model.n_cells):
            t = taus[g]
            jumped = marks[g] if (t is not None and t <= k) else ZERO
            stop = k if t is None else min(k, t)
            drift = sum((hazard[l][g] for l in range(stop + 1)), ZERO)
            out.append(jumped - drift)
        values.append(tuple(out))

    ok = True
    for k in range(1, horizon + 1):
        delta = tuple(values[k][g] - values[k - 1][g] for g in range(model.n_cells))
        groups = [
            [g for g in range(model.n_cells) if model.coarse_cell_of[k - 1][g] == c]
            for c in range(len(model.filtration.partitions[k - 1].cells))
        ]
        mean = condexp_groups(delta, groups, weights)
        if any(weights[g] > 0 and mean[g] != 0 for g in range(model.n_cells)):
            ok = False
    mean0 = condexp_groups(values[0], enlarged.base_groups(0), weights)
    if any(weights[g] > 0 and mean0[g] != 0 for g in range(model.n_cells)):
        ok = False
    return JeulinYorResult(tuple(values), ok)


PredictableArray = tuple[tuple[tuple[Fraction, ...], ...], ...]


def predictable_reduction(
    holdings: PredictableArray, jump: SingleJump, enlarged: EnlargedModel
) -> PredictableArray:
    """Base-predictable process agreeing with the enlarged one up to the jump.

    Existence rests on the trace identity: before the jump, the enlarged
    algebra adds nothing, so the value on the pre-jump part of each base cell
    is well defined; cells with no pre-jump part get zero.
    """
    base = enlarged.base
    model = enlarged.model
    if len(holdings) != base.horizon:
        raise ShapeError("need one slice per period")
    reduced: list[list[list[Fraction]]] = []
    for k in range(1, base.horizon + 1):
        g_cells = model.filtration.partitions[k - 1].cells
        if len(holdings[k - 1]) != len(g_cells):
            raise ShapeError(f"period {k} slice does not match the enlarged partition")
        slice_out: list[list[Fraction]] = []
        for cell in base.filtration.partitions[k - 1].cells:
            values = []
            for w in cell:
                t = jump.tau[w]
                if t is None or t >= k:
                    g = model.filtration.partitions[k - 1].cell_of[w]
                    values.append(tuple(holdings[k - 1][g]))
            if not values:
                slice_out.append([ZERO] * len(holdings[k - 1][0]))
                continue
            if len(set(values)) > 1:
                raise ValueError(
                    "pre-jump holdings differ inside one base cell; the enlargement "
                    "must be generated by this jump alone for the reduction to exist"
                )
            slice_out.append(list(values[0]))
        reduced.append(slice_out)
    return tuple(tuple(tuple(v) for v in s) for s in reduced)


def filtrations_coincide(measure: Measure, enlarged: EnlargedModel) -> bool:
    """True iff charged cells of G_k and F_k agree, timewise, up to null sets."""
    model = enlarged.model
    charged = [g for g in range(model.n_cells) if measure.weights[g] > 0]
    for k in range(model.horizon + 1):
        for a in charged:
            for b in charged:
                same_base = enlarged.base_cell_of(a, k) == enlarged.base_cell_of(b, k)
                same_fine = model.coarse_cell_of[k][a] == model.coarse_cell_of[k][b]
                if same_base != same_fine:
                    return False
    return True


@dataclass(frozen=True)
class InformedCompareReport:
    claims_empty: bool
    ext_base: VertexSet
    ext_enlarged: VertexSet
    coincide_flags: tuple[bool, ...]
    expected_enlarged: tuple[Measure, ...] | None  # lifts of base vertices, claims-empty case
    corollary_equal: bool | None
    prices: dict[str, tuple[Fraction | None, Fraction | None]]
    uninformed_arbitrage: bool
    informed_arbitrage: bool

    def to_json(self, enlarged: EnlargedModel) -> dict:
        base, fine = enlarged.base, enlarged.model
        prices = {
            name: {
                "base": "-inf" if pf is None else fmt(pf),
                "enlarged": "-inf" if pg is None else fmt(pg),
            }
            for name, (pf, pg) in sorted(self.prices.items())
        }
        return {
            "claims_empty": self.claims_empty,
            "ext_F": self.ext_base.to_json(base),
            "ext_G": self.ext_enlarged.to_json(fine),
            "coincide_flags": list(self.coincide_flags),
            "expected_from_F": None
            if self.expected_enlarged is None
            else [m.to_json(fine) for m in self.expected_enlarged],
            "corollary_equal": self.corollary_equal,
            "prices": prices,
            "uninformed_arbitrage": self.uninformed_arbitrage,
            "informed_arbitrage": self.informed_arbitrage,
        }


def _coinciding_lifts(vertex: Measure, enlarged: EnlargedModel) -> list[Measure]:
    """Enlarged measures restricting to the vertex under which F and G coincide.

    Coincidence at the terminal date forces each charged base cell to push its
    whole mass onto a single enlarged subcell, so the finitely many subcell
    assignments exhaust the candidates.
    """
    model = enlarged.model
    subcells: dict[int, list[int]] = {}
    for g in range(model.n_cells):
        subcells.setdefault(enlarged.base_cell_of(g), []).append(g)
    charged = [c for c, w in enumerate(vertex.weights) if w > 0]
    out: list[Measure] = []
    for choice in product(*[subcells[c] for c in charged]):
        weights = [ZERO] * model.n_cells
        for c, g in zip(charged, choice):
            weights[g] = vertex.weights[c]
        if any(w > 0 and g not in model.priors.allowed for g, w in enumerate(weights)):
            continue
        candidate = Measure(tuple(weights))
        if filtrations_coincide(candidate, enlarged):
            out.append(candidate)
    return out


def informed_compare(
    model: FilteredModel,
    jumps: Iterable[SingleJump],
    payoffs: dict[str, Sequence[Fraction]] | None = None,
) -> tuple[InformedCompareReport, EnlargedModel]:
    """Enumerate both extreme-point sets and compare informed pricing.

    With no statically traded claims the enlarged extreme points must be
    exactly the coinciding lifts of the base extreme points; that set equality
    is asserted.  With claims present both sides are reported without an
    assertion.  An empty enlarged measure set is informed arbitrage.
    """
    enlarged = enlarge(model, jumps)
    ext_base = enumerate_extreme_points(build_constraints(model))
    ext_fine = enumerate_extreme_points(build_constraints(enlarged.model))
    coincide_flags = tuple(filtrations_coincide(v, enlarged) for v in ext_fine.vertices)

    claims_empty = len(model.claims) == 0
    expected: tuple[Measure, ...] | None = None
    corollary_equal: bool | None = None
    if claims_empty:
        lifted: list[Measure] = []
        for vertex in ext_base.vertices:
            lifted.extend(_coinciding_lifts(vertex, enlarged))
        expected = tuple(sorted(set(lifted), key=lambda m: (m.support, m.weights)))
        corollary_equal = [m.weights for m in expected] == [
            m.weights for m in ext_fine.vertices
        ]

    prices: dict[str, tuple[Fraction | None, Fraction | None]] = {}
    for name, payoff in sorted((payoffs or {}).items()):
        base_price = robust_price(payoff, model, ext_base)
        fine_price = robust_price(enlarged.expand(payoff), enlarged.model, ext_fine)
        prices[name] = (base_price.value, fine_price.value)

    report = InformedCompareReport(
        claims_empty=claims_empty,
        ext_base=ext_base,
        ext_enlarged=ext_fine,
        coincide_flags=coincide_flags,
        expected_enlarged=expected,
        corollary_equal=corollary_equal,
        prices=prices,
        uninformed_arbitrage=not ext_base.vertices,
        informed_arbitrage=not ext_fine.vertices,
    )
    return report, enlarged
