import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semistatic.model import (
    FilteredModel,
    Filtration,
    Measure,
    Partition,
    PriceProcess,
    PriorSupport,
    TimeGrid,
    conditional_expectation,
    natural_filtration,
    validate_model,
)
from semistatic.sampling import random_measure, random_model, random_payoff

F = Fraction


def test_validate_binomial(binomial):
    assert validate_model(binomial.model).ok


def test_validate_flags_non_adapted():
    prices = PriceProcess(((  # S_1 not constant on the trivial partition
        (F(0), F(0)),
        (F(1), F(-1)),
    ),))
    model = FilteredModel(
        outcomes=("u", "d"),
        grid=TimeGrid((F(0), F(1))),
        filtration=Filtration([Partition([[0, 1]]), Partition([[0, 1]])]),
        prices=prices,
        claims=(),
        priors=PriorSupport(frozenset({0})),
    )
    report = validate_model(model)
    assert any(v.code == "adapted" for v in report.violations)


def test_validate_flags_refinement_failure():
    prices = PriceProcess((((F(0), F(0)), (F(0), F(0))),))
    model = FilteredModel(
        outcomes=("u", "d"),
        grid=TimeGrid((F(0), F(1))),
        filtration=Filtration([Partition([[0], [1]]), Partition([[0, 1]])]),
        prices=prices,
        claims=(),
        priors=PriorSupport(frozenset({0})),
    )
    report = validate_model(model)
    assert any(v.code == "refinement" for v in report.violations)


def test_natural_filtration_trinomial(trinomial):
    filtration = natural_filtration(trinomial.model.prices)
    assert filtration.partitions[0].cells == ((0, 1, 2),)
    assert filtration.partitions[1].cells == ((0,), (1,), (2,))


def test_natural_filtration_constant_price():
    prices = PriceProcess((((F(0),) * 3, (F(0),) * 3, (F(0),) * 3),))
    filtration = natural_filtration(prices)
    assert all(p.cells == ((0, 1, 2),) for p in filtration.partitions)


def test_natural_filtration_groups_by_prefix():
    # two-period recombining values (0; 1,-1; 0,0): terminal value equal but paths differ
    prices = PriceProcess((((F(0), F(0)), (F(1), F(-1)), (F(0), F(0))),))
    filtration = natural_filtration(prices)
    assert filtration.partitions[0].cells == ((0, 1),)
    assert filtration.partitions[1].cells == ((0,), (1,))
    assert filtration.partitions[2].cells == ((0,), (1,))


def test_conditional_expectation_examples(trinomial):
    model = trinomial.model
    q = model.measure([F(1, 4), F(1, 2), F(1, 4)])
    x = (F(1), F(0), F(-1))
    assert conditional_expectation(model, x, 0, q) == (F(0), F(0), F(0))
    assert conditional_expectation(model, x, 1, q) == x
    ones = (F(1), F(1), F(1))
    assert conditional_expectation(model, ones, 0, q) == ones


def test_conditional_expectation_null_cells(trinomial):
    model = trinomial.model
    q = model.measure([F(1, 2), F(0), F(1, 2)])
    x = (F(3), F(7), F(5))
    out = conditional_expectation(model, x, 1, q)
    assert out == (F(3), F(0), F(5))  # null cell pinned to zero by convention


def test_measure_invariants(trinomial):
    model = trinomial.model
    with pytest.raises(ValueError):
        Measure((F(1, 2), F(1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        Measure((F(-1, 2), F(1), F(1, 2)))
    restricted = FilteredModel(
        outcomes=model.outcomes,
        grid=model.grid,
        filtration=model.filtration,
        prices=model.prices,
        claims=model.claims,
        priors=PriorSupport(frozenset({0, 2})),
    )
    with pytest.raises(ValueError):
        restricted.measure([F(0), F(1), F(0)])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_tower_property(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    q = random_measure(rng, model)
    x = random_payoff(rng, model)
    k2 = rng.randint(0, model.horizon)
    k1 = rng.randint(0, k2)
    inner = conditional_expectation(model, x, k2, q)
    lhs = conditional_expectation(model, inner, k1, q)
    rhs = conditional_expectation(model, x, k1, q)
    for a in q.support:
        assert lhs[a] == rhs[a]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_condexp_linearity(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    q = random_measure(rng, model)
    x = random_payoff(rng, model)
    y = random_payoff(rng, model)
    k = rng.randint(0, model.horizon)
    lam = F(rng.randint(-3, 3), rng.randint(1, 4))
    combo = tuple(a + lam * b for a, b in zip(x, y))
    lhs = conditional_expectation(model, combo, k, q)
    ex = conditional_expectation(model, x, k, q)
    ey = conditional_expectation(model, y, k, q)
    assert lhs == tuple(a + lam * b for a, b in zip(ex, ey))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_natural_filtration_always_valid(seed):
    rng = random.Random(seed)
    model, _ = random_model(rng)
    rebuilt = FilteredModel(
        outcomes=model.outcomes,
        grid=model.grid,
        filtration=natural_filtration(model.prices),
        prices=model.prices,
        claims=(),
        priors=PriorSupport(frozenset(range(len(natural_filtration(model.prices).partitions[-1].cells)))),
    )
    assert validate_model(rebuilt).ok
