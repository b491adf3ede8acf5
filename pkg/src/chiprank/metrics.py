"""Complexity metrics for intensity images.

Four metrics (gliding-box lacunarity, multi-scale Sobel edge intensity,
neighbor-pair structural entropy, and a lossy/lossless compression ratio)
plus the dB dynamic-range compression used to prepare imagery for display
and for the information-style metrics.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from PIL import Image as PILImage
from scipy import ndimage

from .errors import MetricUnavailableError, UndefinedLacunarityError

if TYPE_CHECKING:
    from .dataset import ImageChip


@dataclass(eq=False)
class Image2D:
    """A single-channel raster with a physical pixel size in meters."""

    values: np.ndarray
    meters_per_pixel: float

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("image must be a non-empty 2-D array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("image contains non-finite values")
        if not (self.meters_per_pixel > 0):
            raise ValueError("meters_per_pixel must be positive")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class MetricConfig:
    drc_epsilon: float = 1e-10
    lacunarity_box_m: float = 0.5
    sobel_kernel_m: float = 1.5
    entropy_bins: int = 64
    median_kernel_px: int = 15
    jpeg_quality: int = 75
    colormap: str = "grayscale"

    def __post_init__(self) -> None:
        if not (self.drc_epsilon > 0):
            raise ValueError("drc_epsilon must be positive")
        if not (self.lacunarity_box_m > 0):
            raise ValueError("lacunarity_box_m must be positive")
        if not (self.sobel_kernel_m > 0):
            raise ValueError("sobel_kernel_m must be positive")
        if self.entropy_bins < 2:
            raise ValueError("entropy_bins must be >= 2")
        if self.median_kernel_px < 1 or self.median_kernel_px % 2 == 0:
            raise ValueError("median_kernel_px must be an odd positive integer")
        if not (1 <= self.jpeg_quality <= 100):
            raise ValueError("jpeg_quality must lie in [1, 100]")


@dataclass
class MetricVector:
    """All complexity metrics for one chip; a field is None when its
    computation failed, with the reason recorded in ``failures``."""

    lacunarity: float | None = None
    edge_intensity: float | None = None
    entropy: float | None = None
    compression_ratio: float | None = None
    compression_ratio_rmse: float | None = None
    failures: dict[str, str] = field(default_factory=dict)


def normalize_unit(img: Image2D) -> Image2D:
    """Affinely map values onto [0, 1]; a constant image maps to all zeros."""
    v = img.values
    lo = float(v.min())
    hi = float(v.max())
    if hi > lo:
        out = (v - lo) / (hi - lo)
    else:
        out = np.zeros_like(v)
    return Image2D(values=out, meters_per_pixel=img.meters_per_pixel)


def dynamic_range_compress(img: Image2D, epsilon: float = 1e-10) -> Image2D:
    """Per-pixel 20*log10(v + eps), in dB. Expects values in [0, 1]; the
    epsilon keeps zero pixels finite (floor 20*log10(eps))."""
    if not (epsilon > 0):
        raise ValueError("epsilon must be positive")
    out = 20.0 * np.log10(img.values + epsilon)
    return Image2D(values=out, meters_per_pixel=img.meters_per_pixel)


def integral_image(img: Image2D) -> tuple[np.ndarray, np.ndarray]:
    """Summed-area tables of the values and of their squares.

    T[r, c] holds the sum over the inclusive rectangle [0..r, 0..c], so any
    box sum is four lookups.
    """
    v = img.values
    return (
        np.cumsum(np.cumsum(v, axis=0), axis=1),
        np.cumsum(np.cumsum(v * v, axis=0), axis=1),
    )


def box_sum(table: np.ndarray, top: int, left: int, bottom: int, right: int) -> float:
    """Sum over the inclusive box [top..bottom, left..right] from a summed-area table."""
    total = table[bottom, right]
    if top > 0:
        total = total - table[top - 1, right]
    if left > 0:
        total = total - table[bottom, left - 1]
    if top > 0 and left > 0:
        total = total + table[top - 1, left - 1]
    return float(total)


def _box_masses(values: np.ndarray, b: int) -> np.ndarray:
    # All gliding-box sums at unit stride via a zero-padded summed-area table.
    h, w = values.shape
    t = np.zeros((h + 1, w + 1), dtype=np.float64)
    t[1:, 1:] = np.cumsum(np.cumsum(values, axis=0), axis=1)
    return t[b:, b:] - t[:-b, b:] - t[b:, :-b] + t[:-b, :-b]


def lacunarity(img: Image2D, box_m: float) -> float:
    """Gliding-box lacunarity E[M^2]/E[M]^2 at the given physical box size.

    M is the pixel-value mass of a b x b box slid at unit stride; >= 1 by
    Jensen's inequality for any non-negative, not-all-zero image.
    """
    if not (box_m > 0):
        raise ValueError("box size must be positive")
    v = img.values
    if np.any(v < 0):
        raise ValueError("lacunarity requires non-negative pixel values (linear intensity)")
    b = int(round(box_m / img.meters_per_pixel))
    if b < 1 or b > min(img.height, img.width):
        raise ValueError(
            f"box of {box_m} m is {b} px; must lie in [1, {min(img.height, img.width)}] px"
        )
    if not np.any(v > 0):
        raise UndefinedLacunarityError("image has no positive mass")
    masses = _box_masses(v, b)
    mean = masses.mean()
    mean_sq = (masses * masses).mean()
    return float(mean_sq / (mean * mean))


def _binomial(n_taps: int) -> np.ndarray:
    row = np.array([math.comb(n_taps - 1, i) for i in range(n_taps)], dtype=np.float64)
    return row


def sobel_kernels(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Smoothing and derivative vectors for a size-k separable Sobel filter.

    The smoothing vector is the binomial row normalized to unit sum; the
    derivative vector is the binomial-smoothed central difference scaled so
    its positive taps sum to 1, which keeps step responses comparable
    across kernel sizes.
    """
    if k < 3 or k % 2 == 0:
        raise ValueError("kernel size must be an odd integer >= 3")
    smooth = _binomial(k) / 2.0 ** (k - 1)
    deriv = np.convolve(_binomial(k - 2), np.array([1.0, 0.0, -1.0]))
    deriv = deriv / deriv[deriv > 0].sum()
    return smooth, deriv


def _conv1d_valid(values: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    win = sliding_window_view(values, len(taps), axis=axis)
    return win @ taps[::-1]


def edge_intensity(img: Image2D, kernel_m: float) -> float:
    """Mean gradient magnitude from a size-k separable Sobel pair, where k
    is the physical kernel size rounded to the nearest odd pixel count >= 3.
    Only the fully-covered interior contributes (no padding)."""
    if not (kernel_m > 0):
        raise ValueError("kernel size must be positive")
    k = int(round(kernel_m / img.meters_per_pixel))
    if k % 2 == 0:
        k += 1
    k = max(k, 3)
    if k > min(img.height, img.width):
        raise ValueError(f"kernel of {k} px exceeds image of {img.height}x{img.width}")
    smooth, deriv = sobel_kernels(k)
    v = img.values
    g_x = _conv1d_valid(_conv1d_valid(v, smooth, axis=0), deriv, axis=1)
    g_y = _conv1d_valid(_conv1d_valid(v, smooth, axis=1), deriv, axis=0)
    return float(np.sqrt(g_x * g_x + g_y * g_y).mean())


def structural_entropy(img: Image2D, bins: int = 64) -> float:
    """Normalized joint-minus-mutual entropy of adjacent pixel pairs, in [0, 1].

    Values are min-max normalized and quantized into equal-width bins; all
    horizontally and vertically adjacent ordered pairs are pooled into one
    joint histogram. The normalizer 2*log2(bins) is the largest possible
    joint entropy, so independent uniform noise scores near 1 and constant
    images score exactly 0.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if img.height < 2 or img.width < 2:
        raise ValueError("image must be at least 2x2 for neighbor pairs")
    v = img.values
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        q = np.minimum(((v - lo) / (hi - lo) * bins).astype(np.int64), bins - 1)
    else:
        q = np.zeros(v.shape, dtype=np.int64)

    x = np.concatenate([q[:, :-1].ravel(), q[:-1, :].ravel()])
    y = np.concatenate([q[:, 1:].ravel(), q[1:, :].ravel()])
    joint = np.bincount(x * bins + y, minlength=bins * bins).astype(np.float64)
    joint = joint.reshape(bins, bins) / joint.sum()

    def _entropy(p: np.ndarray) -> float:
        p = p[p > 0]
        return float(-(p * np.log2(p)).sum())

    h_joint = _entropy(joint.ravel())
    mutual = _entropy(joint.sum(axis=1)) + _entropy(joint.sum(axis=0)) - h_joint
    gamma = (h_joint - mutual) / (2.0 * math.log2(bins))
    return float(min(max(gamma, 0.0), 1.0)) + 0.0  # normalizes -0.0


def median_filter(img: Image2D, kernel_px: int) -> Image2D:
    """Median over a kernel_px x kernel_px neighborhood with reflected edges."""
    if kernel_px < 1 or kernel_px % 2 == 0:
        raise ValueError("median kernel must be an odd positive integer")
    if kernel_px > min(img.height, img.width):
        raise ValueError("median kernel exceeds image size")
    out = ndimage.median_filter(img.values, size=kernel_px, mode="reflect")
    return Image2D(values=out, meters_per_pixel=img.meters_per_pixel)


_GRAYSCALE_NAMES = {"grayscale", "gray", "grey"}


def colorize(values: np.ndarray, colormap: str = "grayscale") -> np.ndarray:
    """Min-max normalize and render to 8-bit RGB via the named palette."""
    lo, hi = float(values.min()), float(values.max())
    unit = (values - lo) / (hi - lo) if hi > lo else np.zeros_like(values)
    if colormap.lower() in _GRAYSCALE_NAMES:
        gray = np.rint(unit * 255.0).astype(np.uint8)
        return np.stack([gray, gray, gray], axis=-1)
    import matplotlib

    cmap = matplotlib.colormaps[colormap]
    rgba = cmap(unit)
    return np.rint(rgba[..., :3] * 255.0).astype(np.uint8)


def compression_ratio(img: Image2D, cfg: MetricConfig) -> tuple[float, float]:
    """Lossy/lossless encoded-size ratio of the despeckled, colorized image.

    The image is median filtered, colorized to RGB, then encoded once as
    PNG (lossless) and once as JPEG at ``cfg.jpeg_quality``. Returns
    (ratio, ratio / RMSE) where RMSE compares the decoded JPEG against the
    pre-compression RGB in [0, 255] units, floored at 1e-6 so lossless-clean
    reconstructions cannot divide by zero.
    """
    filtered = median_filter(img, cfg.median_kernel_px)
    try:
        rgb = colorize(filtered.values, cfg.colormap)
        pil = PILImage.fromarray(rgb, mode="RGB")
        png_buf = io.BytesIO()
        pil.save(png_buf, format="PNG")
        jpeg_buf = io.BytesIO()
        pil.save(jpeg_buf, format="JPEG", quality=cfg.jpeg_quality)
        jpeg_buf.seek(0)
        decoded = np.asarray(PILImage.open(jpeg_buf).convert("RGB"), dtype=np.float64)
    except Exception as exc:  # codec failures surface as a metric error
        raise MetricUnavailableError(f"compression codec failed: {exc}") from exc
    ratio = jpeg_buf.getbuffer().nbytes / png_buf.getbuffer().nbytes
    rmse = float(np.sqrt(np.mean((decoded - rgb.astype(np.float64)) ** 2)))
    return float(ratio), float(ratio / max(rmse, 1e-6))


def compute_metric_vector(chip: "ImageChip", cfg: MetricConfig | None = None) -> MetricVector:
    """All metrics for one chip.

    Edge intensity, entropy, and the compression ratio are computed on the
    normalized + dynamic-range-compressed image; lacunarity runs on the
    normalized linear intensity since box masses must be non-negative.
    Per-metric failures are recorded instead of raised.
    """
    cfg = cfg or MetricConfig()
    out = MetricVector()
    unit = normalize_unit(chip.image)
    drc = dynamic_range_compress(unit, cfg.drc_epsilon)

    try:
        out.lacunarity = lacunarity(unit, cfg.lacunarity_box_m)
    except (UndefinedLacunarityError, ValueError) as exc:
        out.failures["lacunarity"] = _failure_reason(exc)
    try:
        out.edge_intensity = edge_intensity(drc, cfg.sobel_kernel_m)
    except ValueError as exc:
        out.failures["edge_intensity"] = _failure_reason(exc)
    try:
        out.entropy = structural_entropy(drc, cfg.entropy_bins)
    except ValueError as exc:
        out.failures["entropy"] = _failure_reason(exc)
    try:
        cr, cr_rmse = compression_ratio(drc, cfg)
        out.compression_ratio = cr
        out.compression_ratio_rmse = cr_rmse
    except (MetricUnavailableError, ValueError) as exc:
        out.failures["compression_ratio"] = _failure_reason(exc)
        out.failures["compression_ratio_rmse"] = _failure_reason(exc)
    return out


def _failure_reason(exc: Exception) -> str:
    if isinstance(exc, UndefinedLacunarityError):
        return "UNDEFINED_LACUNARITY"
    if isinstance(exc, MetricUnavailableError):
        return f"METRIC_UNAVAILABLE: {exc}"
    return str(exc)
