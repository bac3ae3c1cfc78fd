import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiblotto import GameSpec, RngStream, Variant, boolean_lotto_expected_payoff, payoff, validate_game
from multiblotto.errors import (
    BudgetOutOfRange,
    BudgetViolation,
    DimensionMismatch,
    EmptyGame,
    NonPositiveValueBoolean,
    ProbabilityOutOfRange,
    TooFewPlayers,
)
from multiblotto.game import symmetric_boolean_payoff


def test_validate_continuous_total_value():
    spec = validate_game(GameSpec(3, 2, 1.0, (1, 1), Variant.CONTINUOUS))
    assert spec.total_value == 2


@pytest.mark.parametrize(
    "spec, error",
    [
        (GameSpec(3, 2, 3, (1, 1), Variant.BOOLEAN), BudgetOutOfRange),
        (GameSpec(3, 2, 1, (1, 0), Variant.BOOLEAN), NonPositiveValueBoolean),
        (GameSpec(1, 2, 1.0, (1, 1)), TooFewPlayers),
        (GameSpec(3, 0, 1.0, ()), EmptyGame),
        (GameSpec(3, 2, 1.0, (0, 0)), EmptyGame),
        (GameSpec(3, 2, 0.0, (1, 1)), BudgetOutOfRange),
        (GameSpec(3, 2, 1.5, (1, 1), Variant.BOOLEAN), BudgetOutOfRange),
        (GameSpec(3, 3, 1.0, (1, 1)), DimensionMismatch),
    ],
)
def test_validate_rejections(spec, error):
    with pytest.raises(error):
        validate_game(spec)


def test_payoff_three_way_tie_split():
    spec = GameSpec.continuous(3, [1, 1])
    u = payoff(spec, [[0.5, 0.5], [0.5, 0.5], [1.0, 0.0]])
    np.testing.assert_array_equal(u, [0.5, 0.5, 1.0])


def test_payoff_hand_evaluated():
    spec = GameSpec.continuous(2, [1, 2, 3])
    u = payoff(spec, [[1, 0, 0], [0, 0, 1]])
    np.testing.assert_array_equal(u, [2.0, 4.0])


@pytest.mark.parametrize("k", [2, 3, 7])
def test_payoff_all_zero_bids(k):
    spec = GameSpec.continuous(k, [3.0, 1.5, 0.25])
    np.testing.assert_allclose(payoff(spec, np.zeros((k, 3))), spec.total_value / k)


def test_payoff_rejects_overspend_with_player_index():
    spec = GameSpec.continuous(2, [1, 1])
    with pytest.raises(BudgetViolation) as err:
        payoff(spec, [[0.5, 0.5], [0.7, 0.4]])
    assert err.value.player == 1


def test_payoff_budget_tolerance():
    spec = GameSpec.continuous(2, [1, 1])
    payoff(spec, [[0.5, 0.5 + 5e-10], [1, 0]])


def test_payoff_dimension_mismatch():
    spec = GameSpec.continuous(2, [1, 1])
    with pytest.raises(DimensionMismatch):
        payoff(spec, [[0.5, 0.5, 0.0], [1, 0, 0]])


def test_boolean_payoff_rejects_fractional_or_overspent():
    spec = GameSpec.boolean(3, [1, 2, 3], 1)
    with pytest.raises(Exception):
        payoff(spec, [[0.5, 0, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(BudgetViolation):
        payoff(spec, [[1, 1, 0], [1, 0, 0], [0, 1, 0]])


games = st.integers(2, 5).flatmap(
    lambda k: st.integers(1, 6).flatmap(
        lambda n: st.tuples(
            st.just(k),
            st.lists(st.floats(0.0, 10.0), min_size=n, max_size=n).filter(lambda v: sum(v) > 0),
            st.lists(
                st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n), min_size=k, max_size=k
            ),
        )
    )
)


def _feasible(raw):
    bids = np.asarray(raw, dtype=float)
    totals = bids.sum(axis=1, keepdims=True)
    return np.where(totals > 1, bids / np.maximum(totals, 1) * (1 - 1e-12), bids)


@settings(max_examples=200, deadline=None)
@given(games)
def test_payoff_conserves_total_value(game):
    k, values, raw = game
    spec = GameSpec.continuous(k, values)
    u = payoff(spec, _feasible(raw))
    assert abs(u.sum() - spec.total_value) <= 1e-9
    assert np.all(u >= 0)


@settings(max_examples=100, deadline=None)
@given(games, st.randoms())
def test_payoff_player_permutation_equivariant(game, rnd):
    k, values, raw = game
    spec = GameSpec.continuous(k, values)
    bids = _feasible(raw)
    perm = list(range(k))
    rnd.shuffle(perm)
    np.testing.assert_array_equal(payoff(spec, bids[perm]), payoff(spec, bids)[perm])


@settings(max_examples=100, deadline=None)
@given(games, st.sampled_from([0.5, 2.0, 8.0]))
def test_payoff_scales_with_values(game, c):
    k, values, raw = game
    bids = _feasible(raw)
    base = payoff(GameSpec.continuous(k, values), bids)
    scaled = payoff(GameSpec.continuous(k, [c * v for v in values]), bids)
    np.testing.assert_allclose(scaled, c * base, rtol=1e-12, atol=1e-300)


def test_expected_payoff_certain_tie():
    spec = GameSpec.boolean(3, [1.0], 1)
    res = boolean_lotto_expected_payoff(spec, np.ones((3, 1)))
    np.testing.assert_allclose(res.mean, 1 / 3)


def test_expected_payoff_lone_competitor_takes_all():
    spec = GameSpec.boolean(3, [1.0], 1)
    res = boolean_lotto_expected_payoff(spec, [[1.0], [0.0], [0.0]])
    assert res.mean[0] == pytest.approx(1.0)
    assert res.mean[1] == pytest.approx(0.0)


def test_expected_payoff_symmetric_half():
    spec = GameSpec.boolean(3, [1.0], 1)
    res = boolean_lotto_expected_payoff(spec, np.full((3, 1), 0.5))
    np.testing.assert_allclose(res.mean, 1 / 3)


def test_expected_payoff_rejects_bad_probability():
    spec = GameSpec.boolean(3, [1.0], 1)
    with pytest.raises(ProbabilityOutOfRange):
        boolean_lotto_expected_payoff(spec, [[1.2], [0], [0]])


@pytest.mark.parametrize("k", [3, 4, 6])
@pytest.mark.parametrize("p, q", [(0.0, 1.0), (0.3, 0.8), (1.0, 0.0), (0.65, 0.65)])
def test_expected_payoff_matches_symmetric_closed_form(k, p, q):
    spec = GameSpec.boolean(k, [2.5], 1)
    probs = np.full((k, 1), p)
    probs[0] = q
    exact = boolean_lotto_expected_payoff(spec, probs, method="exact").mean[0]
    assert exact == pytest.approx(symmetric_boolean_payoff(2.5, k, p, q), abs=1e-12)


def test_exact_enumeration_agrees_with_monte_carlo():
    rng = np.random.default_rng(7)
    stream = RngStream(11)
    for trial in range(12):
        k = int(rng.integers(2, 5))
        n = int(rng.integers(1, 4))
        values = rng.uniform(0.1, 3.0, n)
        spec = GameSpec.boolean(k, values, int(rng.integers(0, n + 1)))
        probs = rng.uniform(0, 1, (k, n))
        exact = boolean_lotto_expected_payoff(spec, probs, method="exact")
        mc = boolean_lotto_expected_payoff(
            spec, probs, method="montecarlo", samples=50_000, stream=stream.fork(trial)
        )
        assert np.all(np.abs(exact.mean - mc.mean) <= 4 * mc.stderr + 1e-12)
        assert exact.mean.sum() == pytest.approx(values.sum())


def test_auto_switches_to_monte_carlo_above_cutoff():
    spec = GameSpec.boolean(13, [1.0, 2.0], 1)
    res = boolean_lotto_expected_payoff(
        spec, np.full((13, 2), 0.5), samples=2000, stream=RngStream(1)
    )
    assert res.method == "montecarlo"
    assert np.all(res.stderr > 0)
