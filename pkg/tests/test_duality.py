import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semistatic.duality import detect_arbitrage, robust_price, superhedge, verify_duality
from semistatic.errors import EmptyMeasureSet
from semistatic.hedging import strategy_payoff
from semistatic.model import FilteredModel, StaticClaim
from semistatic.polytope import build_constraints, enumerate_extreme_points
from semistatic.sampling import random_model, random_payoff

F = Fraction


def test_superhedge_abs(trinomial):
    model = trinomial.model
    result = superhedge(trinomial.payoffs["abs_S1"], model)
    assert result.price == 1
    assert result.strategy.cash == 1
    assert set(result.tight) == {0, 2}
    payoff = strategy_payoff(result.strategy, model)
    assert all(payoff[a] >= trinomial.payoffs["abs_S1"][a] for a in model.priors.allowed)


def test_superhedge_replicable_claim(trinomial_calibrated):
    model = trinomial_calibrated.model
    result = superhedge(model.claim_vector(0), model)
    assert result.price == 0


def test_superhedge_constant(trinomial):
    result = superhedge((F(5), F(5), F(5)), trinomial.model)
    assert result.price == 5


def test_robust_price_examples(trinomial, trinomial_calibrated):
    result = robust_price(trinomial.payoffs["abs_S1"], trinomial.model)
    assert result.value == 1
    assert [m.weights for m in result.argmax] == [(F(1, 2), F(0), F(1, 2))]
    result = robust_price(trinomial_calibrated.payoffs["abs_S1"], trinomial_calibrated.model)
    assert result.value == F(1, 2)
    assert robust_price((F(0),) * 3, trinomial.model).value == 0


def test_verify_duality_examples(trinomial, trinomial_calibrated):
    report = verify_duality(trinomial.payoffs["abs_S1"], trinomial.model)
    assert report.ok and report.primal == 1 == report.dual
    report = verify_duality(trinomial_calibrated.payoffs["abs_S1"], trinomial_calibrated.model)
    assert report.ok and report.primal == F(1, 2)
    assert report.strategy.cash == F(1, 2) and report.strategy.static == (F(1),)
    replicable = verify_duality(trinomial_calibrated.model.claim_vector(0), trinomial_calibrated.model)
    assert replicable.ok and replicable.primal == 0


def test_duality_on_empty_set_raises(informed_arbitrage):
    from semistatic.enlargement import enlarge

    enlarged = enlarge(informed_arbitrage.model, informed_arbitrage.jumps)
    with pytest.raises(EmptyMeasureSet):
        verify_duality((F(0),) * enlarged.model.n_cells, enlarged.model)


def test_detect_arbitrage_feasible(trinomial):
    report = detect_arbitrage(trinomial.model)
    assert report.feasible and report.vertex_count == 2


def test_disallowed_coordinates_unconstrained(trinomial):
    from semistatic.model import PriorSupport

    base = trinomial.model
    model = FilteredModel(
        outcomes=base.outcomes,
        grid=base.grid,
        filtration=base.filtration,
        prices=base.prices,
        claims=(),
        priors=PriorSupport(frozenset({0, 2})),
    )
    spike_on_m = (F(0), F(100), F(0))
    result = superhedge(spike_on_m, model)
    assert result.price == 0  # the excluded cell imposes no constraint
    assert robust_price(spike_on_m, model).value == 0


def test_detect_arbitrage_miscalibrated(trinomial):
    base = trinomial.model
    # claim S_1 + 1 has expectation 1 under every martingale measure
    model = FilteredModel(
        outcomes=base.outcomes,
        grid=base.grid,
        filtration=base.filtration,
        prices=base.prices,
        claims=(StaticClaim((F(2), F(1), F(0))),),
        priors=base.priors,
    )
    assert not enumerate_extreme_points(build_constraints(model)).vertices
    report = detect_arbitrage(model)
    assert not report.feasible
    assert report.certificate.cash == 0
    payoff = report.certificate_payoff
    assert all(payoff[a] >= 1 for a in model.priors.allowed)


def test_detect_arbitrage_informed(informed_arbitrage):
    from semistatic.enlargement import enlarge

    enlarged = enlarge(informed_arbitrage.model, informed_arbitrage.jumps)
    report = detect_arbitrage(enlarged.model)
    assert not report.feasible
    payoff = report.certificate_payoff
    assert report.certificate.cash == 0
    assert all(payoff[a] >= 1 for a in enlarged.model.priors.allowed)


def test_unbounded_superhedge_signals_statics_arbitrage(informed_arbitrage):
    from semistatic.enlargement import enlarge

    enlarged = enlarge(informed_arbitrage.model, informed_arbitrage.jumps)
    result = superhedge((F(0),) * enlarged.model.n_cells, enlarged.model)
    assert result.unbounded
    direction = strategy_payoff(result.strategy, enlarged.model)
    assert result.strategy.cash < 0
    assert all(direction[a] >= 0 for a in enlarged.model.priors.allowed)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_strong_duality_random(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    vertex_set = enumerate_extreme_points(build_constraints(model))
    payoff = random_payoff(rng, model)
    primal = superhedge(payoff, model)
    dual = robust_price(payoff, model, vertex_set)
    assert primal.price == dual.value
    tight = set(primal.tight)
    assert all(a in tight for m in dual.argmax for a in m.support)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_monotonicity(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    vertex_set = enumerate_extreme_points(build_constraints(model))
    low = random_payoff(rng, model)
    bump = [F(rng.randint(0, 2)) for _ in range(model.n_cells)]
    high = tuple(a + b for a, b in zip(low, bump))
    assert superhedge(low, model).price <= superhedge(high, model).price
    assert robust_price(low, model, vertex_set).value <= robust_price(high, model, vertex_set).value


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_replication_collapse(seed):
    # the payoff of any explicit strategy prices at exactly its cash leg
    rng = random.Random(seed)
    model, _ = random_model(rng)
    vertex_set = enumerate_extreme_points(build_constraints(model))
    from semistatic.hedging import SemiStaticStrategy, zero_dynamic

    cash = F(rng.randint(-3, 3))
    static = tuple(F(rng.randint(-2, 2)) for _ in model.claims)
    dynamic = tuple(
        tuple(
            tuple(F(rng.randint(-2, 2)) for _ in range(model.prices.assets))
            for _ in model.filtration.partitions[k - 1].cells
        )
        for k in range(1, model.horizon + 1)
    ) or zero_dynamic(model)
    strategy = SemiStaticStrategy(cash, static, dynamic)
    payoff = strategy_payoff(strategy, model)
    assert superhedge(payoff, model).price == cash
    assert robust_price(payoff, model, vertex_set).value == cash


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_weak_duality_via_feasible_mixtures(seed):
    from semistatic.sampling import random_mixture

    rng = random.Random(seed)
    model, _ = random_model(rng)
    vertex_set = enumerate_extreme_points(build_constraints(model))
    payoff = random_payoff(rng, model)
    price = superhedge(payoff, model).price
    mixture = random_mixture(rng, vertex_set)
    assert mixture.expectation(payoff) <= price
