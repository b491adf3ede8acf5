"""Report emission: CSV tables (stable 9-significant-digit floats, so equal
runs produce byte-identical files) and SVG figures."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "chiprank"

import matplotlib.pyplot as plt

from .elo import EloResult
from .stats import ConsistencyMatrix, RegressionResult, SiteSummary

METRIC_COLUMNS = (
    "lacunarity",
    "edge_intensity",
    "entropy",
    "compression_ratio",
    "compression_ratio_rmse",
)


def fmt_float(value: float | None) -> str:
    return "" if value is None else format(value, ".9g")


def write_sidecar(artifact_path: Path, config: Mapping[str, Any]) -> Path:
    """Write `<artifact>.config.json` recording everything that produced it."""
    artifact_path = Path(artifact_path)
    sidecar = artifact_path.with_name(artifact_path.name + ".config.json")
    sidecar.write_text(json.dumps(config, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return sidecar


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_metrics_csv(path: Path, rows: Sequence[dict]) -> None:
    """One row per chip: id, site, the five metrics, and a reason column
    explaining any empty cells."""
    header = ["id", "site", *METRIC_COLUMNS, "reason"]
    out = []
    for row in rows:
        out.append(
            [row["id"], row["site"]]
            + [fmt_float(row.get(col)) for col in METRIC_COLUMNS]
            + [row.get("reason", "")]
        )
    _write_csv(path, header, out)


def write_elo_csv(path: Path, elo: EloResult) -> None:
    from .stats import rank_order

    header = ["rank", "id", "mean_rating", "std_rating", "ci_low", "ci_high", "comparisons_count"]
    rows = []
    for rank, (image_id, mean, ci_low, ci_high) in enumerate(rank_order(elo), start=1):
        summary = elo.per_image[image_id]
        rows.append(
            [
                str(rank),
                image_id,
                fmt_float(mean),
                fmt_float(summary.std_rating),
                fmt_float(ci_low),
                fmt_float(ci_high),
                str(summary.comparisons_count),
            ]
        )
    _write_csv(path, header, rows)


def write_regressions_csv(path: Path, results: Sequence[RegressionResult]) -> None:
    header = ["metric", "slope", "intercept", "r_squared", "n"]
    rows = [
        [r.metric_name, fmt_float(r.slope), fmt_float(r.intercept), fmt_float(r.r_squared), str(r.n)]
        for r in results
    ]
    _write_csv(path, header, rows)


def write_consistency_csv(path: Path, matrix: ConsistencyMatrix, excluded: Sequence[str] = ()) -> None:
    """Upper-triangular agreement matrix with the diagonal self-consistency,
    followed by overlap counts and exclusion flags."""
    ops = matrix.operator_ids
    header = ["operator", *ops, "judged_overlaps", "flag"]
    rows = []
    for i, op in enumerate(ops):
        cells = []
        for j in range(len(ops)):
            if j < i:
                cells.append("")
            else:
                cells.append(fmt_float(matrix.matrix[i][j]))
        counts = ";".join(f"{ops[j]}={matrix.pair_counts[i][j]}" for j in range(len(ops)))
        rows.append([op, *cells, counts, "EXCLUDED" if op in excluded else ""])
    _write_csv(path, header, rows)


def write_truth_csv(path: Path, latents: Mapping[str, float], sites: Mapping[str, str]) -> None:
    header = ["id", "site", "latent_quality"]
    rows = [[image_id, sites.get(image_id, ""), fmt_float(q)] for image_id, q in sorted(latents.items())]
    _write_csv(path, header, rows)


def _save_svg(fig, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_rank_order(path: Path, ranked: Sequence[tuple[str, float, float, float]]) -> None:
    """Mean rating in rank order with CI whiskers."""
    fig, ax = plt.subplots(figsize=(9, 4.5))
    xs = range(1, len(ranked) + 1)
    means = [r[1] for r in ranked]
    err_low = [r[1] - r[2] for r in ranked]
    err_high = [r[3] - r[1] for r in ranked]
    ax.errorbar(xs, means, yerr=[err_low, err_high], fmt="o", markersize=2.5, linewidth=0.6, capsize=1.5)
    ax.set_xlabel("rank")
    ax.set_ylabel("rating")
    ax.set_title("Images in rank order with confidence intervals")
    ax.grid(True, alpha=0.3)
    _save_svg(fig, path)


def plot_site_boxes(path: Path, summaries: Sequence[SiteSummary]) -> None:
    """Box plot per site from precomputed box statistics."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    boxes = [
        {
            "label": s.site,
            "med": s.median,
            "q1": s.q1,
            "q3": s.q3,
            "whislo": s.whisker_low,
            "whishi": s.whisker_high,
            "fliers": [score for _, score in s.outliers],
        }
        for s in summaries
    ]
    ax.bxp(boxes, showfliers=True)
    ax.set_xlabel("site")
    ax.set_ylabel("rating")
    ax.set_title("Rating distribution by site")
    ax.grid(True, axis="y", alpha=0.3)
    _save_svg(fig, path)


def plot_scatter_fit(
    path: Path,
    x: Sequence[float],
    y: Sequence[float],
    fit: RegressionResult,
    x_label: str = "rating",
    y_label: str = "",
) -> None:
    """Metric vs rating scatter with the fitted line and R^2 annotation."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(x, y, s=12, alpha=0.75)
    if x:
        lo, hi = min(x), max(x)
        ax.plot(
            [lo, hi],
            [fit.slope * lo + fit.intercept, fit.slope * hi + fit.intercept],
            color="crimson",
            linewidth=1.2,
            label=f"$R^2$ = {fit.r_squared:.3f}",
        )
        ax.legend()
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label or fit.metric_name)
    ax.set_title(f"{y_label or fit.metric_name} vs {x_label}")
    ax.grid(True, alpha=0.3)
    _save_svg(fig, path)
