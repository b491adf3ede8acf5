"""Rating-engine unit tests: update algebra, sequencing, replication."""

import numpy as np
import pytest

from chiprank.elo import (
    Comparison,
    EloConfig,
    Outcome,
    RatingState,
    confidence_interval,
    expected_score,
    outcome_weight,
    run_replicated,
    run_sequence,
    update_pair,
)
from chiprank.errors import ReferentialError

from oracles import percentile_interp


def comp(left, right, outcome=Outcome.LEFT_MORE_COMPLEX):
    return Comparison(left=left, right=right, outcome=outcome)


class TestExpectedScore:
    def test_equal_ratings_is_exactly_half(self):
        assert expected_score(1000, 1000, 400) == 0.5

    def test_one_scale_unit_apart(self):
        assert expected_score(1400, 1000, 400) == pytest.approx(10 / 11, abs=1e-12)

    def test_complementarity(self):
        assert expected_score(1273, 925, 400) + expected_score(925, 1273, 400) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_complementarity_sweep(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b = rng.uniform(-3000, 3000, 2)
            assert expected_score(a, b, 400) + expected_score(b, a, 400) == pytest.approx(1.0, abs=1e-12)

    def test_strictly_increasing_in_difference(self):
        diffs = np.linspace(-900, 900, 61)
        scores = [expected_score(1000 + d, 1000, 400) for d in diffs]
        assert all(s2 > s1 for s1, s2 in zip(scores, scores[1:]))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            expected_score(float("nan"), 1000, 400)
        with pytest.raises(ValueError):
            expected_score(1000, float("inf"), 400)
        with pytest.raises(ValueError):
            expected_score(1000, 1000, 0.0)
        with pytest.raises(ValueError):
            expected_score(1000, 1000, -400)


class TestOutcomeWeight:
    def test_win_loss_draw_values(self):
        assert outcome_weight(Outcome.LEFT_MORE_COMPLEX, "left") == 1.0
        assert outcome_weight(Outcome.NEUTRAL, "left") == 0.5
        assert outcome_weight(Outcome.LEFT_MORE_COMPLEX, "right") == 0.0

    @pytest.mark.parametrize("outcome", list(Outcome))
    def test_perspectives_sum_to_one(self, outcome):
        assert outcome_weight(outcome, "left") + outcome_weight(outcome, "right") == 1.0

    def test_rejects_unknown_perspective(self):
        with pytest.raises(ValueError):
            outcome_weight(Outcome.NEUTRAL, "top")


class TestUpdatePair:
    def test_win_from_equal_ratings(self):
        state = RatingState(ratings={"a": 1000.0, "b": 1000.0})
        out = update_pair(state, comp("a", "b"), EloConfig())
        assert out.ratings == {"a": 1016.0, "b": 984.0}
        assert out.events_applied == 1

    def test_neutral_between_equals_is_noop(self):
        state = RatingState(ratings={"a": 1000.0, "b": 1000.0})
        out = update_pair(state, comp("a", "b", Outcome.NEUTRAL), EloConfig())
        assert out.ratings == {"a": 1000.0, "b": 1000.0}

    def test_pair_sum_preserved(self):
        rng = np.random.default_rng(3)
        state = RatingState(ratings={"a": 1234.5, "b": 876.25})
        cfg = EloConfig()
        for _ in range(100):
            outcome = list(Outcome)[rng.integers(3)]
            before = state.ratings["a"] + state.ratings["b"]
            state = update_pair(state, comp("a", "b", outcome), cfg)
            after = state.ratings["a"] + state.ratings["b"]
            assert after == pytest.approx(before, abs=1e-9)

    def test_inserts_absent_images_at_initial(self):
        state = RatingState(ratings={})
        out = update_pair(state, comp("a", "b", Outcome.NEUTRAL), EloConfig(initial_rating=900))
        assert out.ratings == {"a": 900.0, "b": 900.0}

    def test_rejects_self_pair(self):
        with pytest.raises(ValueError):
            comp("a", "a")

    def test_input_state_unchanged(self):
        state = RatingState(ratings={"a": 1000.0, "b": 1000.0})
        update_pair(state, comp("a", "b"), EloConfig())
        assert state.ratings == {"a": 1000.0, "b": 1000.0}


class TestRunSequence:
    def test_empty_list_gives_initial_everywhere(self):
        state = run_sequence([], {"a", "b", "c"}, EloConfig(initial_rating=1000))
        assert state.ratings == {"a": 1000.0, "b": 1000.0, "c": 1000.0}
        assert state.events_applied == 0

    def test_repeated_wins_dominate(self):
        comps = [comp("a", "b") for _ in range(10)]
        state = run_sequence(comps, {"a", "b"}, EloConfig())
        assert state.ratings["a"] > state.ratings["b"]

    def test_order_matters(self):
        comps = [comp("a", "b"), comp("b", "c"), comp("c", "a")]
        forward = run_sequence(comps, {"a", "b", "c"}, EloConfig())
        backward = run_sequence(comps[::-1], {"a", "b", "c"}, EloConfig())
        assert forward.ratings != backward.ratings

    def test_deterministic_for_fixed_order(self):
        comps = [comp("a", "b"), comp("b", "c", Outcome.NEUTRAL), comp("c", "a")]
        first = run_sequence(comps, {"a", "b", "c"}, EloConfig())
        second = run_sequence(comps, {"a", "b", "c"}, EloConfig())
        assert first.ratings == second.ratings

    def test_unknown_id_is_referential_error(self):
        with pytest.raises(ReferentialError):
            run_sequence([comp("a", "zz")], {"a", "b"}, EloConfig())

    def test_total_mass_conserved(self):
        rng = np.random.default_rng(17)
        ids = [f"i{k}" for k in range(20)]
        comps = []
        for _ in range(2000):
            i, j = rng.choice(len(ids), 2, replace=False)
            comps.append(comp(ids[i], ids[j], list(Outcome)[rng.integers(3)]))
        state = run_sequence(comps, ids, EloConfig())
        assert sum(state.ratings.values()) == pytest.approx(20 * 1000.0, abs=1e-6)


class TestConfidenceInterval:
    def test_constant_sample(self):
        assert confidence_interval([5, 5, 5, 5], 0.95) == (5.0, 5.0)

    def test_1_to_100_matches_oracle(self):
        values = list(range(1, 101))
        low, high = confidence_interval(values, 0.95)
        ordered = np.sort(np.array(values, dtype=float))
        assert low == pytest.approx(percentile_interp(ordered, 0.025), abs=1e-9)
        assert high == pytest.approx(percentile_interp(ordered, 0.975), abs=1e-9)
        assert low == pytest.approx(3.475, abs=1e-9)
        assert high == pytest.approx(97.525, abs=1e-9)

    def test_symmetric_sample_symmetric_about_median(self):
        values = [-4, -2, -1, 0, 1, 2, 4]
        low, high = confidence_interval(values, 0.5)
        assert low == pytest.approx(-high, abs=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            confidence_interval([], 0.95)
        with pytest.raises(ValueError):
            confidence_interval([1.0], 1.0)


class TestEloConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k_factor": 0.0},
            {"k_factor": -1.0},
            {"logistic_scale": 0.0},
            {"num_replications": 0},
            {"ci_level": 0.0},
            {"ci_level": 1.0},
        ],
    )
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ValueError):
            EloConfig(**kwargs)


class TestRunReplicated:
    def test_single_replication_has_zero_spread(self):
        comps = [comp("a", "b"), comp("b", "c")]
        result = run_replicated(comps, {"a", "b", "c"}, EloConfig(num_replications=1, seed=9))
        for summary in result.per_image.values():
            assert summary.std_rating == 0.0
            assert summary.ci_low == summary.ci_high == summary.mean_rating

    def test_single_comparison_gap_is_k(self):
        result = run_replicated([comp("a", "b")], {"a", "b"}, EloConfig(num_replications=5, seed=1))
        gap = result.per_image["a"].mean_rating - result.per_image["b"].mean_rating
        assert gap == pytest.approx(32.0, abs=1e-12)

    def test_comparison_counts(self):
        comps = [comp("a", "b"), comp("a", "c"), comp("b", "a", Outcome.NEUTRAL)]
        result = run_replicated(comps, {"a", "b", "c"}, EloConfig(num_replications=2, seed=0))
        assert result.per_image["a"].comparisons_count == 3
        assert result.per_image["b"].comparisons_count == 2
        assert result.per_image["c"].comparisons_count == 1

    def test_ci_brackets_mean(self):
        rng = np.random.default_rng(5)
        ids = [f"i{k}" for k in range(8)]
        comps = []
        for _ in range(300):
            i, j = rng.choice(len(ids), 2, replace=False)
            comps.append(comp(ids[i], ids[j], list(Outcome)[rng.integers(3)]))
        result = run_replicated(comps, ids, EloConfig(num_replications=64, seed=2))
        for summary in result.per_image.values():
            assert summary.ci_low <= summary.mean_rating <= summary.ci_high

    def test_bitwise_deterministic_across_runs(self):
        rng = np.random.default_rng(23)
        ids = [f"i{k}" for k in range(10)]
        comps = []
        for _ in range(400):
            i, j = rng.choice(len(ids), 2, replace=False)
            comps.append(comp(ids[i], ids[j], list(Outcome)[rng.integers(3)]))
        cfg = EloConfig(num_replications=32, seed=77)
        assert run_replicated(comps, ids, cfg) == run_replicated(comps, ids, cfg)

    def test_bitwise_deterministic_across_worker_counts(self):
        rng = np.random.default_rng(29)
        ids = [f"i{k}" for k in range(10)]
        comps = []
        for _ in range(300):
            i, j = rng.choice(len(ids), 2, replace=False)
            comps.append(comp(ids[i], ids[j], list(Outcome)[rng.integers(3)]))
        cfg = EloConfig(num_replications=24, seed=5)
        serial = run_replicated(comps, ids, cfg, workers=1)
        parallel = run_replicated(comps, ids, cfg, workers=4)
        assert serial == parallel

    def test_translation_equivariance(self):
        rng = np.random.default_rng(31)
        ids = [f"i{k}" for k in range(6)]
        comps = []
        for _ in range(150):
            i, j = rng.choice(len(ids), 2, replace=False)
            comps.append(comp(ids[i], ids[j], list(Outcome)[rng.integers(3)]))
        base = run_replicated(comps, ids, EloConfig(num_replications=16, seed=4))
        shifted = run_replicated(
            comps, ids, EloConfig(num_replications=16, seed=4, initial_rating=1512.0)
        )
        for image_id in ids:
            delta = shifted.per_image[image_id].mean_rating - base.per_image[image_id].mean_rating
            assert delta == pytest.approx(512.0, abs=1e-9)

    def test_empty_image_set_rejected(self):
        with pytest.raises(ValueError):
            run_replicated([], set(), EloConfig())

    def test_unknown_reference_rejected(self):
        with pytest.raises(ReferentialError):
            run_replicated([comp("a", "x")], {"a", "b"}, EloConfig(num_replications=2))

    def test_recovers_latent_order_small(self):
        # small-scale Bradley-Terry recovery; the full-size run lives in the
        # acceptance suite
        rng = np.random.default_rng(41)
        ids = [f"i{k:02d}" for k in range(30)]
        latent = {image_id: rng.uniform(800, 1300) for image_id in ids}
        comps = []
        for _ in range(1500):
            i, j = rng.choice(len(ids), 2, replace=False)
            a, b = ids[i], ids[j]
            p = 1.0 / (1.0 + 10.0 ** (-(latent[a] - latent[b]) / 400.0))
            comps.append(comp(a, b, Outcome.LEFT_MORE_COMPLEX if rng.random() < p else Outcome.RIGHT_MORE_COMPLEX))
        result = run_replicated(comps, ids, EloConfig(num_replications=50, seed=8))
        from chiprank.stats import spearman

        rho = spearman([latent[i] for i in ids], [result.per_image[i].mean_rating for i in ids])
        assert rho >= 0.9
