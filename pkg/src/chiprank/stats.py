"""Statistics over ratings and judgments: correlation, regression,
operator agreement, and the summaries behind the rank and box reports."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .elo import Comparison, EloResult, Outcome
from .errors import DegenerateRegressorError, ReferentialError


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r_squared: float
    n: int
    metric_name: str = ""


@dataclass(frozen=True)
class SiteSummary:
    site: str
    n: int
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: list[tuple[str, float]]


@dataclass
class ConsistencyMatrix:
    """Pearson agreement between operators; the diagonal is self-consistency
    from deliberately repeated pairs. Entries with fewer than two matched
    judgments are None."""

    operator_ids: list[str]
    matrix: list[list[float | None]]
    pair_counts: list[list[int]]

    def entry(self, op_a: str, op_b: str) -> float | None:
        i = self.operator_ids.index(op_a)
        j = self.operator_ids.index(op_b)
        return self.matrix[i][j]


def pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Sample Pearson correlation; None when either vector is constant."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise ValueError("inputs must be 1-D and of equal length")
    if xa.size < 2:
        raise ValueError("need at least two points")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = np.sqrt((dx * dx).sum())
    sy = np.sqrt((dy * dy).sum())
    if sx == 0.0 or sy == 0.0:
        return None
    r = float((dx * dy).sum() / (sx * sy))
    return min(1.0, max(-1.0, r))


def _midranks(a: np.ndarray) -> np.ndarray:
    order = np.argsort(a, kind="stable")
    ranks = np.empty(a.size, dtype=np.float64)
    sorted_a = a[order]
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Pearson correlation of midranks (average ranks for ties)."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise ValueError("inputs must be 1-D and of equal length")
    if xa.size < 2:
        raise ValueError("need at least two points")
    return pearson(_midranks(xa), _midranks(ya))


def linear_regression(
    x: Sequence[float], y: Sequence[float], metric_name: str = ""
) -> RegressionResult:
    """Ordinary least squares of y on x with coefficient of determination.

    A constant y is the defined degenerate case (slope 0, R^2 = 0); a
    constant x has no defined slope and raises.
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise ValueError("inputs must be 1-D and of equal length")
    if xa.size < 2:
        raise ValueError("need at least two points")
    dx = xa - xa.mean()
    if not np.any(dx != 0.0):
        raise DegenerateRegressorError("independent variable is constant")
    dy = ya - ya.mean()
    slope = float((dx * dy).sum() / (dx * dx).sum())
    intercept = float(ya.mean() - slope * xa.mean())
    ss_tot = float((dy * dy).sum())
    if ss_tot == 0.0:
        r_squared = 0.0
    else:
        resid = ya - (slope * xa + intercept)
        r_squared = 1.0 - float((resid * resid).sum()) / ss_tot
        r_squared = min(1.0, max(0.0, r_squared))
    return RegressionResult(
        slope=slope, intercept=intercept, r_squared=r_squared, n=int(xa.size), metric_name=metric_name
    )


def encode_outcome(c: Comparison, canonical_order: tuple[str, str]) -> float:
    """Signed judgment under a canonical pair orientation: +1 means the
    first id of ``canonical_order`` was judged more complex."""
    id_a, id_b = canonical_order
    if {c.left, c.right} != {id_a, id_b}:
        raise ValueError(f"comparison ({c.left!r}, {c.right!r}) does not match {canonical_order!r}")
    if c.outcome is Outcome.NEUTRAL:
        return 0.0
    winner = c.left if c.outcome is Outcome.LEFT_MORE_COMPLEX else c.right
    return 1.0 if winner == id_a else -1.0


def operator_consistency(comparisons: Sequence[Comparison]) -> ConsistencyMatrix:
    """Agreement matrix over all operators seen in the judgment list.

    Off-diagonal (p, q): image pairs judged by both operators, each
    co-rated instance matched in order of occurrence, encoded +1/0/-1
    under the sorted-pair orientation, then Pearson over the two vectors.
    Diagonal (p, p): Pearson between original and repeated judgments,
    matched through ``repeat_of``.
    """
    operators = sorted({c.operator_id for c in comparisons})
    op_index = {op: i for i, op in enumerate(operators)}
    n = len(operators)

    # judgments per (operator, unordered pair), in order of occurrence
    by_op_pair: dict[str, dict[tuple[str, str], list[float]]] = defaultdict(lambda: defaultdict(list))
    originals_by_id: dict[str, Comparison] = {}
    repeats: list[Comparison] = []
    for c in comparisons:
        key = (min(c.left, c.right), max(c.left, c.right))
        by_op_pair[c.operator_id][key].append(encode_outcome(c, key))
        if c.repeat_of is None:
            if c.comparison_id is not None:
                originals_by_id[c.comparison_id] = c
        else:
            repeats.append(c)

    matrix: list[list[float | None]] = [[None] * n for _ in range(n)]
    counts: list[list[int]] = [[0] * n for _ in range(n)]

    for i, op_p in enumerate(operators):
        for j in range(i + 1, n):
            op_q = operators[j]
            xs: list[float] = []
            ys: list[float] = []
            shared = sorted(set(by_op_pair[op_p]) & set(by_op_pair[op_q]))
            for key in shared:
                for vx, vy in zip(by_op_pair[op_p][key], by_op_pair[op_q][key]):
                    xs.append(vx)
                    ys.append(vy)
            counts[i][j] = counts[j][i] = len(xs)
            if len(xs) >= 2:
                r = pearson(xs, ys)
                matrix[i][j] = matrix[j][i] = r

    # self-consistency from injected repeats
    diag_x: dict[str, list[float]] = defaultdict(list)
    diag_y: dict[str, list[float]] = defaultdict(list)
    for rep in repeats:
        orig = originals_by_id.get(rep.repeat_of)
        if orig is None or orig.operator_id != rep.operator_id:
            continue
        key = (min(orig.left, orig.right), max(orig.left, orig.right))
        diag_x[rep.operator_id].append(encode_outcome(orig, key))
        diag_y[rep.operator_id].append(encode_outcome(rep, key))
    for op, i in op_index.items():
        counts[i][i] = len(diag_x[op])
        if counts[i][i] >= 2:
            matrix[i][i] = pearson(diag_x[op], diag_y[op])

    return ConsistencyMatrix(operator_ids=operators, matrix=matrix, pair_counts=counts)


def rank_order(elo: EloResult) -> list[tuple[str, float, float, float]]:
    """(image id, mean, ci_low, ci_high) descending by mean, ties by id."""
    rows = [
        (image_id, s.mean_rating, s.ci_low, s.ci_high)
        for image_id, s in elo.per_image.items()
    ]
    return sorted(rows, key=lambda row: (-row[1], row[0]))


def site_summary(elo: EloResult, site_of: Mapping[str, str]) -> list[SiteSummary]:
    """Box statistics of mean ratings per site: quartiles by the (n+1)
    interpolation convention, whiskers at the most extreme data within
    1.5 IQR of the box, points beyond listed as outliers."""
    groups: dict[str, list[tuple[str, float]]] = defaultdict(list)
    for image_id, summary in elo.per_image.items():
        if image_id not in site_of:
            raise ReferentialError(f"image {image_id!r} has no site label")
        groups[site_of[image_id]].append((image_id, summary.mean_rating))

    out = []
    for site in sorted(groups):
        members = sorted(groups[site], key=lambda m: (m[1], m[0]))
        scores = np.array([m[1] for m in members], dtype=np.float64)
        q1, med, q3 = (float(q) for q in np.percentile(scores, [25, 50, 75], method="weibull"))
        iqr = q3 - q1
        lo_fence = q1 - 1.5 * iqr
        hi_fence = q3 + 1.5 * iqr
        inside = scores[(scores >= lo_fence) & (scores <= hi_fence)]
        outliers = [(i, s) for i, s in members if s < lo_fence or s > hi_fence]
        out.append(
            SiteSummary(
                site=site,
                n=len(members),
                q1=q1,
                median=med,
                q3=q3,
                whisker_low=float(inside.min()),
                whisker_high=float(inside.max()),
                outliers=outliers,
            )
        )
    return out
