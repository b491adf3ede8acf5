"""Simulated-rater model behavior."""

import pytest

from chiprank.elo import Outcome
from chiprank.simulate import RaterModel, draw_latents, simulate_judgments


class TestDrawLatents:
    def test_deterministic_and_order_free(self):
        a = draw_latents(["x", "y", "z"], seed=4)
        b = draw_latents(["z", "x", "y"], seed=4)
        assert a == b

    def test_range(self):
        latents = draw_latents([f"i{k}" for k in range(200)], seed=1)
        assert all(800 <= v <= 1300 for v in latents.values())


class TestSimulateJudgments:
    def test_zero_noise_zero_band_follows_latent_order(self):
        latents = draw_latents([f"i{k}" for k in range(10)], seed=2)
        model = RaterModel(n_raters=3, noise_scale=0.0, neutral_band=0.0, p_repeat=0.0)
        for record in simulate_judgments(latents, 400, model, seed=3):
            expected = (
                Outcome.LEFT_MORE_COMPLEX
                if latents[record.left] > latents[record.right]
                else Outcome.RIGHT_MORE_COMPLEX
            )
            assert record.outcome is expected

    def test_deterministic(self):
        latents = draw_latents([f"i{k}" for k in range(8)], seed=5)
        model = RaterModel()
        assert simulate_judgments(latents, 100, model, seed=6) == simulate_judgments(
            latents, 100, model, seed=6
        )

    def test_repeats_are_tagged_and_resolvable(self):
        latents = draw_latents([f"i{k}" for k in range(8)], seed=7)
        model = RaterModel(n_raters=2, p_repeat=0.5)
        records = simulate_judgments(latents, 300, model, seed=8)
        by_id = {r.comparison_id: r for r in records}
        repeats = [r for r in records if r.repeat_of is not None]
        assert repeats, "expected some injected repeats at p_repeat=0.5"
        for rep in repeats:
            original = by_id[rep.repeat_of]
            assert original.operator_id == rep.operator_id
            assert {original.left, original.right} == {rep.left, rep.right}
            assert original.repeat_of is None

    def test_timestamps_nondecreasing_and_counts(self):
        latents = draw_latents([f"i{k}" for k in range(5)], seed=9)
        records = simulate_judgments(latents, 50, RaterModel(n_raters=2), seed=10)
        assert len(records) == 50
        stamps = [r.unix_timestamp_ms for r in records]
        assert stamps == sorted(stamps)
        assert len({r.comparison_id for r in records}) == 50

    def test_neutral_band_produces_neutrals(self):
        latents = {f"i{k}": 1000.0 + k for k in range(6)}  # tiny gaps
        model = RaterModel(n_raters=1, noise_scale=0.0, neutral_band=10.0, p_repeat=0.0)
        records = simulate_judgments(latents, 100, model, seed=11)
        assert any(r.outcome is Outcome.NEUTRAL for r in records)

    def test_validation(self):
        with pytest.raises(ValueError):
            RaterModel(n_raters=0)
        with pytest.raises(ValueError):
            simulate_judgments({"a": 1.0}, 10, RaterModel(), seed=0)
