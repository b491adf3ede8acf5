"""Simulated raters: Bradley-Terry choices over latent complexities.

Each judgment perceives the latent quality difference through logistic
noise (same base-10 form as the rating update's expectation) plus a
per-rater bias, and reports NEUTRAL when the perceived difference falls
inside the neutral band. A zero-noise, zero-band rater reproduces the
latent order exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .elo import Outcome
from .judgment_log import JudgmentRecord


@dataclass(frozen=True)
class RaterModel:
    n_raters: int = 6
    noise_scale: float = 400.0
    bias_sigma: float = 0.0
    neutral_band: float = 25.0
    p_repeat: float = 0.05

    def __post_init__(self) -> None:
        if self.n_raters < 1:
            raise ValueError("n_raters must be >= 1")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be non-negative")
        if self.neutral_band < 0:
            raise ValueError("neutral_band must be non-negative")
        if not (0.0 <= self.p_repeat <= 1.0):
            raise ValueError("p_repeat must lie in [0, 1]")


def draw_latents(
    image_ids: Sequence[str], seed: int, low: float = 800.0, high: float = 1300.0
) -> dict[str, float]:
    """Latent complexity per image, uniform over [low, high], keyed by
    sorted id so the draw is independent of input order."""
    if not image_ids:
        raise ValueError("image_ids must be non-empty")
    ids = sorted(image_ids)
    rng = np.random.default_rng(seed)
    values = rng.uniform(low, high, len(ids))
    return {image_id: float(v) for image_id, v in zip(ids, values)}


def _logistic_noise(rng: np.random.Generator, scale: float) -> float:
    # base-10 logistic: P(latent diff + noise > 0) = 1/(1+10^(-diff/scale))
    if scale == 0.0:
        return 0.0
    u = float(rng.uniform())
    while u <= 0.0 or u >= 1.0:
        u = float(rng.uniform())
    return scale * np.log10(u / (1.0 - u))


def simulate_judgments(
    latents: Mapping[str, float],
    n_comparisons: int,
    model: RaterModel,
    seed: int,
    start_time_ms: int = 1_700_000_000_000,
) -> list[JudgmentRecord]:
    """A synthetic judgment log over the given latent complexities.

    Pairs are sampled uniformly with replacement, sides randomized; each
    judgment is assigned to a random rater; with probability ``p_repeat``
    a rater replays one of their earlier pairs (tagged ``repeat_of``).
    Deterministic per seed; timestamps increase by 1 ms per record.
    """
    if n_comparisons < 0:
        raise ValueError("n_comparisons must be non-negative")
    ids = sorted(latents)
    if len(ids) < 2:
        raise ValueError("need at least two images to simulate comparisons")
    rng = np.random.default_rng(seed)
    biases = rng.normal(0.0, model.bias_sigma, model.n_raters) if model.bias_sigma > 0 else np.zeros(model.n_raters)

    history: dict[int, list[JudgmentRecord]] = {r: [] for r in range(model.n_raters)}
    records: list[JudgmentRecord] = []
    for k in range(n_comparisons):
        rater = int(rng.integers(model.n_raters))
        repeat_of = None
        if history[rater] and float(rng.random()) < model.p_repeat:
            original = history[rater][int(rng.integers(len(history[rater])))]
            left, right = original.left, original.right
            repeat_of = original.comparison_id
        else:
            i = int(rng.integers(len(ids)))
            j = int(rng.integers(len(ids)))
            while j == i:
                j = int(rng.integers(len(ids)))
            left, right = ids[i], ids[j]
        if float(rng.random()) < 0.5:
            left, right = right, left

        perceived = latents[left] - latents[right] + biases[rater] + _logistic_noise(rng, model.noise_scale)
        if abs(perceived) < model.neutral_band:
            outcome = Outcome.NEUTRAL
        elif perceived > 0:
            outcome = Outcome.LEFT_MORE_COMPLEX
        else:
            outcome = Outcome.RIGHT_MORE_COMPLEX

        record = JudgmentRecord(
            comparison_id=f"sim{k:06d}",
            operator_id=f"op{rater + 1}",
            left=left,
            right=right,
            outcome=outcome,
            unix_timestamp_ms=start_time_ms + k,
            repeat_of=repeat_of,
        )
        records.append(record)
        if repeat_of is None:
            history[rater].append(record)
    return records
