"""Brute-force reference implementations the fast paths are checked against.

Everything here trades speed for obviousness: explicit loops, no shared
code with the package under test.
"""

from __future__ import annotations

import numpy as np


def naive_box_sum(values: np.ndarray, top: int, left: int, bottom: int, right: int) -> float:
    total = 0.0
    for r in range(top, bottom + 1):
        for c in range(left, right + 1):
            total += values[r, c]
    return total


def naive_lacunarity(values: np.ndarray, b: int) -> float:
    """Gliding-box E[M^2]/E[M]^2 by direct window summation."""
    h, w = values.shape
    masses = []
    for r in range(h - b + 1):
        for c in range(w - b + 1):
            masses.append(values[r : r + b, c : c + b].sum())
    masses = np.array(masses)
    return float((masses**2).mean() / masses.mean() ** 2)


def direct_convolve2d_valid(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Plain 2-D convolution (kernel flipped), valid region only."""
    kh, kw = kernel.shape
    h, w = values.shape
    out = np.zeros((h - kh + 1, w - kw + 1))
    flipped = kernel[::-1, ::-1]
    for r in range(out.shape[0]):
        for c in range(out.shape[1]):
            out[r, c] = (values[r : r + kh, c : c + kw] * flipped).sum()
    return out


def naive_median_filter(values: np.ndarray, k: int) -> np.ndarray:
    """Per-pixel neighborhood sort over a symmetric-reflection padding."""
    pad = k // 2
    padded = np.pad(values, pad, mode="symmetric")
    out = np.zeros_like(values)
    for r in range(values.shape[0]):
        for c in range(values.shape[1]):
            window = padded[r : r + k, c : c + k].ravel()
            out[r, c] = np.sort(window)[window.size // 2]
    return out


def normal_equation_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """(slope, intercept, r_squared) via the normal equations."""
    design = np.column_stack([x, np.ones_like(x)])
    coef = np.linalg.solve(design.T @ design, design.T @ y)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = y - (slope * x + intercept)
    ss_res = float((resid**2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    return slope, intercept, 1.0 - ss_res / ss_tot


def percentile_interp(sorted_values: np.ndarray, q: float) -> float:
    """Linear interpolation between order statistics at fraction q (R-7)."""
    position = q * (len(sorted_values) - 1)
    lo = int(np.floor(position))
    hi = int(np.ceil(position))
    frac = position - lo
    return float(sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac)


def quartiles_weibull(values: np.ndarray) -> tuple[float, float, float]:
    """25/50/75 quantiles at (n+1)-scaled positions, clamped to the data."""
    ordered = np.sort(values)
    n = len(ordered)
    out = []
    for p in (0.25, 0.5, 0.75):
        position = p * (n + 1) - 1  # 0-indexed
        position = min(max(position, 0.0), n - 1.0)
        lo = int(np.floor(position))
        hi = int(np.ceil(position))
        frac = position - lo
        out.append(float(ordered[lo] * (1 - frac) + ordered[hi] * frac))
    return tuple(out)


def midrank(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mean rank."""
    n = len(values)
    ranks = np.zeros(n)
    for i in range(n):
        less = int((values < values[i]).sum())
        equal = int((values == values[i]).sum())
        ranks[i] = less + (equal + 1) / 2.0
    return ranks
