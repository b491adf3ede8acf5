"""chiprank: perception-grounded image complexity.

Pairwise human judgments are collected by a rating service, folded into
per-image ratings by an order-shuffled Elo estimator, and compared against
texture and information-content metrics computed from the imagery itself.
"""

__version__ = "0.1.0"

from .elo import (
    Comparison,
    EloConfig,
    EloResult,
    Outcome,
    RatingState,
    confidence_interval,
    expected_score,
    outcome_weight,
    run_replicated,
    run_sequence,
    update_pair,
)
from .metrics import (
    Image2D,
    MetricConfig,
    MetricVector,
    compute_metric_vector,
    dynamic_range_compress,
    edge_intensity,
    integral_image,
    lacunarity,
    median_filter,
    normalize_unit,
    structural_entropy,
)

__all__ = [
    "__version__",
    "Comparison",
    "EloConfig",
    "EloResult",
    "Outcome",
    "RatingState",
    "confidence_interval",
    "expected_score",
    "outcome_weight",
    "run_replicated",
    "run_sequence",
    "update_pair",
    "Image2D",
    "MetricConfig",
    "MetricVector",
    "compute_metric_vector",
    "dynamic_range_compress",
    "edge_intensity",
    "integral_image",
    "lacunarity",
    "median_filter",
    "normalize_unit",
    "structural_entropy",
]
