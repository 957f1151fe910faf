import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semistatic import linalg
from semistatic.errors import EmptyMeasureSet, NotCalibrated, NotComplete
from semistatic.hedging import (
    NotReplicable,
    decompose_unhedgeable,
    is_semistatically_complete,
    replicate,
    strategy_payoff,
    terminal_gain,
    verify_jacod_yor,
    zero_dynamic,
)
from semistatic.model import conditional_expectation
from semistatic.polytope import build_constraints, enumerate_extreme_points
from semistatic.sampling import random_model

F = Fraction


def _dynamic(model, entries):
    base = [list(map(list, slice_k)) for slice_k in zero_dynamic(model)]
    for (k, c, j), value in entries.items():
        base[k - 1][c][j] = value
    return tuple(tuple(tuple(r) for r in s) for s in base)


def test_terminal_gain_zero(trinomial):
    model = trinomial.model
    assert terminal_gain(zero_dynamic(model), model) == (F(0), F(0), F(0))


def test_terminal_gain_unit_holding(trinomial):
    model = trinomial.model
    gains = terminal_gain(_dynamic(model, {(1, 0, 0): F(1)}), model)
    assert gains == (F(1), F(0), F(-1))


def test_terminal_gain_two_period_masked(glued_two_vol):
    model = glued_two_vol.model
    # hold one unit over the second period on the high-move branch only
    gains = terminal_gain(_dynamic(model, {(2, 0, 0): F(1)}), model)
    assert gains == (F(2), F(-2), F(0), F(0))


def test_span_columns_are_strategy_payoffs(trinomial_calibrated):
    # every span column is the payoff of an explicit semi-static strategy
    from semistatic.hedging import SemiStaticStrategy, hedging_span

    model = trinomial_calibrated.model
    q = model.measure(["1/4", "1/2", "1/4"])
    span = hedging_span(model, q)
    for label, vec in span.columns:
        cash = F(1) if label[0] == "const" else F(0)
        static = [F(0)] * len(model.claims)
        dynamic = [list(map(list, s)) for s in zero_dynamic(model)]
        if label[0] == "claim":
            static[label[1]] = F(1)
        elif label[0] == "gain":
            _, k, c, j = label
            dynamic[k - 1][c][j] = F(1)
        strategy = SemiStaticStrategy(
            cash, tuple(static), tuple(tuple(tuple(r) for r in s) for s in dynamic)
        )
        assert strategy_payoff(strategy, model) == vec


def test_completeness_examples(trinomial, trinomial_calibrated):
    model = trinomial.model
    assert is_semistatically_complete(model.measure(["1/2", "0", "1/2"]), model).complete
    report = is_semistatically_complete(model.measure(["1/4", "1/2", "1/4"]), model)
    assert not report.complete and report.rank == 2 and report.support_size == 3
    calibrated = trinomial_calibrated.model
    assert is_semistatically_complete(calibrated.measure(["1/4", "1/2", "1/4"]), calibrated).complete


def test_completeness_requires_calibration(trinomial):
    with pytest.raises(NotCalibrated):
        is_semistatically_complete(trinomial.model.measure(["1", "0", "0"]), trinomial.model)


def test_replicate_claim_itself(trinomial_calibrated):
    model = trinomial_calibrated.model
    q = model.measure(["1/4", "1/2", "1/4"])
    strategy = replicate(model.claim_vector(0), q, model)
    assert strategy_payoff(strategy, model) == model.claim_vector(0)


def test_replicate_indicator(trinomial_calibrated):
    model = trinomial_calibrated.model
    q = model.measure(["1/4", "1/2", "1/4"])
    strategy = replicate((F(0), F(1), F(0)), q, model)
    assert strategy.cash == F(1, 2)
    assert strategy.static == (F(-1),)
    assert strategy.dynamic == ((((F(0),),),))


def test_replicate_failure_residual(trinomial):
    model = trinomial.model
    q = model.measure(["1/4", "1/2", "1/4"])
    outcome = replicate((F(0), F(1), F(0)), q, model)
    assert isinstance(outcome, NotReplicable)
    assert outcome.residual == (F(-1, 2), F(1, 2), F(-1, 2))
    # residual is Q-orthogonal to the span
    for vec in [(F(1), F(1), F(1)), (F(1), F(0), F(-1))]:
        assert linalg.weighted_dot(outcome.residual, vec, q.weights) == 0


def test_verify_jacod_yor_scenarios(trinomial, binomial, trinomial_calibrated):
    for scenario in (trinomial, binomial, trinomial_calibrated):
        assert verify_jacod_yor(scenario.model).ok


def test_verify_jacod_yor_empty(informed_arbitrage):
    from semistatic.enlargement import enlarge

    enlarged = enlarge(informed_arbitrage.model, informed_arbitrage.jumps)
    with pytest.raises(EmptyMeasureSet):
        verify_jacod_yor(enlarged.model)


def test_decompose_no_claims(trinomial):
    model = trinomial.model
    q = model.measure(["1/2", "0", "1/2"])
    decomposition = decompose_unhedgeable(q, model)
    assert decomposition.residual_terminals == ()
    assert decomposition.blocks == ()


def test_decompose_requires_completeness(trinomial):
    model = trinomial.model
    with pytest.raises(NotComplete):
        decompose_unhedgeable(model.measure(["1/4", "1/2", "1/4"]), model)


def test_decompose_calibrated_trinomial(trinomial_calibrated):
    model = trinomial_calibrated.model
    q = model.measure(["1/4", "1/2", "1/4"])
    decomposition = decompose_unhedgeable(q, model)
    # psi is orthogonal to the single gain, so the residual is psi itself
    assert decomposition.residual_terminals == (model.claim_vector(0),)
    assert len(decomposition.blocks) == 1
    block = decomposition.blocks[0]
    assert block.time == 1 and block.atom_cells == (0,)


def test_decompose_glued_block(glued_two_vol):
    model = glued_two_vol.model
    q = enumerate_extreme_points(build_constraints(model)).vertices[0]
    decomposition = decompose_unhedgeable(q, model)
    assert [b.time for b in decomposition.blocks] == [1]
    martingales = decomposition.residual_martingales[0]
    # residual vanishes at time 0 and is constant from the jump on
    assert all(x == 0 for x in martingales[0])
    assert martingales[1] == martingales[2] == decomposition.residual_terminals[0]


def test_decompose_jump_counterexample(jump_counterexample):
    model = jump_counterexample.model
    q = enumerate_extreme_points(build_constraints(model)).vertices[0]
    decomposition = decompose_unhedgeable(q, model)
    assert [b.time for b in decomposition.blocks] == [2]
    block = decomposition.blocks[0]
    # carried by the no-jump cell of P_1 only
    cells = model.filtration.partitions[1].cells
    assert [cells[c] for c in block.atom_cells] == [(1, 2, 3, 4)]
    v = decomposition.residual_terminals[0]
    assert v[0] == 0 and v[1] == F(72, 35) and v[2] == F(12, 35) and v[3] == F(-48, 35)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_gain_expectation_zero(seed):
    rng = random.Random(seed)
    model, reference = random_model(rng)
    dynamic = tuple(
        tuple(
            tuple(F(rng.randint(-2, 2)) for _ in range(model.prices.assets))
            for _ in model.filtration.partitions[k - 1].cells
        )
        for k in range(1, model.horizon + 1)
    )
    gains = terminal_gain(dynamic, model)
    vs = enumerate_extreme_points(build_constraints(model))
    for v in vs.vertices:
        assert v.expectation(gains) == 0
    assert reference.expectation(gains) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_replication_soundness(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    vs = enumerate_extreme_points(build_constraints(model))
    q = vs.vertices[rng.randrange(len(vs.vertices))]
    payoff = tuple(F(rng.randint(-3, 3)) for _ in range(model.n_cells))
    outcome = replicate(payoff, q, model)
    if isinstance(outcome, NotReplicable):
        pytest.skip("vertex measures are complete; replication cannot fail")
    produced = strategy_payoff(outcome, model)
    for a in q.support:
        assert produced[a] == payoff[a]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_equivalence_on_random_models(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    assert verify_jacod_yor(model).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_residual_orthogonality_and_martingale(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng, n_claims=2)
    cs = build_constraints(model)
    vs = enumerate_extreme_points(cs)
    q = vs.vertices[rng.randrange(len(vs.vertices))]
    decomposition = decompose_unhedgeable(q, model, cs)
    from semistatic.hedging import gain_basis

    gains = [vec for _, vec in gain_basis(model)]
    for i, residual in enumerate(decomposition.residual_terminals):
        for g in gains:
            assert linalg.weighted_dot(residual, g, q.weights) == 0
        marts = decomposition.residual_martingales[i]
        for k in range(model.horizon):
            step = conditional_expectation(model, marts[k + 1], k, q)
            for a in q.support:
                assert step[a] == marts[k][a]
    for block in decomposition.blocks:
        for vec in block.vectors:
            if block.time >= 1:
                prior = conditional_expectation(model, vec, block.time - 1, q)
                assert all(prior[a] == 0 for a in q.support)
            later = conditional_expectation(model, vec, block.time, q)
            for a in q.support:
                assert later[a] == vec[a]
