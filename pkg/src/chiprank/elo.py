"""Elo rating engine for pairwise image-complexity judgments.

Ratings are updated per comparison with the classic logistic expectation.
Because the final ratings depend on the order the comparisons are applied,
the headline estimate is the mean over many replications, each run on an
independently shuffled copy of the comparison list.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import ReferentialError


class Outcome(str, Enum):
    """One human judgment on an image pair; values are the wire names."""

    LEFT_MORE_COMPLEX = "LEFT"
    RIGHT_MORE_COMPLEX = "RIGHT"
    NEUTRAL = "NEUTRAL"


@dataclass(frozen=True)
class Comparison:
    """A single judged pair. ``repeat_of`` links deliberate re-presentations
    back to the original comparison id for self-consistency analysis."""

    left: str
    right: str
    outcome: Outcome
    operator_id: str = ""
    timestamp: datetime | None = None
    comparison_id: str | None = None
    repeat_of: str | None = None

    def __post_init__(self) -> None:
        if self.left == self.right:
            raise ValueError(f"comparison pairs an image with itself: {self.left!r}")


@dataclass(frozen=True)
class EloConfig:
    k_factor: float = 32.0
    initial_rating: float = 1000.0
    logistic_scale: float = 400.0
    num_replications: int = 1000
    seed: int = 0
    ci_level: float = 0.95

    def __post_init__(self) -> None:
        if not (self.k_factor > 0):
            raise ValueError("k_factor must be positive")
        if not (self.logistic_scale > 0):
            raise ValueError("logistic_scale must be positive")
        if self.num_replications < 1:
            raise ValueError("num_replications must be >= 1")
        if not (0.0 < self.ci_level < 1.0):
            raise ValueError("ci_level must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass
class RatingState:
    """Current ratings plus how many comparisons produced them."""

    ratings: dict[str, float]
    events_applied: int = 0


@dataclass(frozen=True)
class RatingSummary:
    mean_rating: float
    std_rating: float
    ci_low: float
    ci_high: float
    comparisons_count: int


@dataclass(frozen=True)
class EloResult:
    """Per-image rating distribution over shuffled replications."""

    per_image: dict[str, RatingSummary]
    num_replications: int

    def ids(self) -> list[str]:
        return sorted(self.per_image)

    def mean_ratings(self) -> dict[str, float]:
        return {i: s.mean_rating for i, s in self.per_image.items()}


def expected_score(r_i: float, r_j: float, scale: float = 400.0) -> float:
    """Expected outcome for the first participant given both ratings."""
    if not (math.isfinite(r_i) and math.isfinite(r_j)):
        raise ValueError("ratings must be finite")
    if not (math.isfinite(scale) and scale > 0):
        raise ValueError("scale must be a positive finite number")
    return 1.0 / (10.0 ** (-(r_i - r_j) / scale) + 1.0)


def outcome_weight(outcome: Outcome, perspective: Literal["left", "right"]) -> float:
    """Realized score for one side of a judgment: win 1, draw 0.5, loss 0."""
    if perspective not in ("left", "right"):
        raise ValueError(f"perspective must be 'left' or 'right', got {perspective!r}")
    if outcome is Outcome.NEUTRAL:
        return 0.5
    won = (outcome is Outcome.LEFT_MORE_COMPLEX) == (perspective == "left")
    return 1.0 if won else 0.0


def _apply(ratings: dict[str, float], comp: Comparison, config: EloConfig) -> None:
    # Single zero-sum update, in place. Both deltas come from the same number
    # so the pair's rating mass is conserved exactly.
    r_left = ratings.setdefault(comp.left, config.initial_rating)
    r_right = ratings.setdefault(comp.right, config.initial_rating)
    expected = expected_score(r_left, r_right, config.logistic_scale)
    delta = config.k_factor * (outcome_weight(comp.outcome, "left") - expected)
    ratings[comp.left] = r_left + delta
    ratings[comp.right] = r_right - delta


def update_pair(state: RatingState, comparison: Comparison, config: EloConfig) -> RatingState:
    """Apply one comparison and return the successor state."""
    if comparison.left == comparison.right:
        raise ValueError("comparison pairs an image with itself")
    ratings = dict(state.ratings)
    _apply(ratings, comparison, config)
    return RatingState(ratings=ratings, events_applied=state.events_applied + 1)


def run_sequence(
    comparisons: Sequence[Comparison],
    image_ids: Iterable[str],
    config: EloConfig,
) -> RatingState:
    """Fold the comparisons over a fresh state, in the given order."""
    ratings = {image_id: config.initial_rating for image_id in sorted(set(image_ids))}
    for comp in comparisons:
        for image_id in (comp.left, comp.right):
            if image_id not in ratings:
                raise ReferentialError(f"comparison references unknown image {image_id!r}")
        _apply(ratings, comp, config)
    return RatingState(ratings=ratings, events_applied=len(comparisons))


def _replication_block(
    left: list[int],
    right: list[int],
    weights: list[float],
    n_images: int,
    seed: int,
    rep_start: int,
    rep_count: int,
    k_factor: float,
    initial_rating: float,
    logistic_scale: float,
) -> np.ndarray:
    """Final ratings for replications [rep_start, rep_start+rep_count).

    Each replication shuffles with its own RNG stream keyed on
    (seed, replication index), so results do not depend on which worker
    or chunk computed them.
    """
    n_events = len(left)
    inv_scale = 1.0 / logistic_scale
    out = np.empty((rep_count, n_images), dtype=np.float64)
    for row in range(rep_count):
        rep = rep_start + row
        order = np.random.default_rng([seed, rep]).permutation(n_events).tolist()
        r = [initial_rating] * n_images
        for t in order:
            i = left[t]
            j = right[t]
            e = 1.0 / (10.0 ** ((r[j] - r[i]) * inv_scale) + 1.0)
            d = k_factor * (weights[t] - e)
            r[i] += d
            r[j] -= d
        out[row] = r
    return out


def confidence_interval(samples: Sequence[float], level: float) -> tuple[float, float]:
    """Empirical percentile interval, linear interpolation between order stats."""
    if len(samples) == 0:
        raise ValueError("samples must be non-empty")
    if not (0.0 < level < 1.0):
        raise ValueError("level must lie in (0, 1)")
    tail = 100.0 * (1.0 - level) / 2.0
    low, high = np.percentile(np.asarray(samples, dtype=np.float64), [tail, 100.0 - tail], method="linear")
    return float(low), float(high)


def run_replicated(
    comparisons: Sequence[Comparison],
    image_ids: Iterable[str],
    config: EloConfig,
    workers: int = 1,
) -> EloResult:
    """Mean/spread/CI of final ratings over ``num_replications`` shuffles.

    Bit-identical for a fixed (comparisons, seed, config) regardless of
    ``workers``: every replication derives its shuffle from (seed, index)
    and the sample matrix is assembled in replication order before any
    statistic is taken.
    """
    ids = sorted(set(image_ids))
    if not ids:
        raise ValueError("image set must be non-empty")
    index = {image_id: k for k, image_id in enumerate(ids)}
    for comp in comparisons:
        for image_id in (comp.left, comp.right):
            if image_id not in index:
                raise ReferentialError(f"comparison references unknown image {image_id!r}")

    left = [index[c.left] for c in comparisons]
    right = [index[c.right] for c in comparisons]
    weights = [outcome_weight(c.outcome, "left") for c in comparisons]

    n_reps = config.num_replications
    args = (left, right, weights, len(ids), config.seed)
    tail = (config.k_factor, config.initial_rating, config.logistic_scale)
    if workers <= 1 or n_reps == 1:
        samples = _replication_block(*args, 0, n_reps, *tail)
    else:
        n_chunks = min(workers, n_reps)
        bounds = np.linspace(0, n_reps, n_chunks + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_replication_block, *args, int(lo), int(hi - lo), *tail)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            samples = np.vstack([f.result() for f in futures])

    counts = Counter()
    for comp in comparisons:
        counts[comp.left] += 1
        counts[comp.right] += 1

    means = samples.mean(axis=0)
    stds = samples.std(axis=0)
    tail_pct = 100.0 * (1.0 - config.ci_level) / 2.0
    lows, highs = np.percentile(samples, [tail_pct, 100.0 - tail_pct], axis=0, method="linear")

    per_image = {
        image_id: RatingSummary(
            mean_rating=float(means[k]),
            std_rating=float(stds[k]),
            ci_low=float(lows[k]),
            ci_high=float(highs[k]),
            comparisons_count=counts[image_id],
        )
        for image_id, k in index.items()
    }
    return EloResult(per_image=per_image, num_replications=n_reps)
