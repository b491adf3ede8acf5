"""Synthetic seabed-texture chips for tests and demos.

Every generator is a deterministic function of its seed. Intensities model
fully-developed speckle: a smooth scene mean multiplied by unit-mean
exponential noise, so values are non-negative linear intensity.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path

import numpy as np
from scipy import ndimage

from .dataset import DatasetManifest, ImageChip, ManifestEntry, write_manifest, save_chip_raster
from .metrics import Image2D


class ChipKind(str, Enum):
    FLAT_SPECKLE = "FLAT_SPECKLE"
    RIPPLES = "RIPPLES"
    CLUTTER = "CLUTTER"
    BIOTURBATION = "BIOTURBATION"
    MIXED = "MIXED"


_DEFAULT_SITE = {
    ChipKind.FLAT_SPECKLE: "A",
    ChipKind.RIPPLES: "B",
    ChipKind.CLUTTER: "C",
    ChipKind.BIOTURBATION: "D",
    ChipKind.MIXED: "D",
}


def _ripple_mean(size: int, mpp: float, wavelength_m: float, orientation: float, amplitude: float) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    u = (xx * np.cos(orientation) + yy * np.sin(orientation)) * mpp
    return 1.0 + amplitude * np.sin(2.0 * np.pi * u / wavelength_m)


def _clutter_mean(size: int, rng: np.random.Generator, count: int) -> np.ndarray:
    mean = np.ones((size, size))
    yy, xx = np.mgrid[0:size, 0:size]
    for _ in range(count):
        cy, cx = rng.uniform(0, size, 2)
        amp = rng.uniform(10.0, 25.0)
        sigma = rng.uniform(0.8, 2.0)
        d2 = (yy - cy) ** 2 + (xx - cx) ** 2
        mean += amp * np.exp(-d2 / (2.0 * sigma * sigma))
        # acoustic shadow trailing the scatterer in +x
        sx = cx + rng.uniform(3.0, 6.0)
        shadow = np.exp(-(((xx - sx) / (4.0 * sigma)) ** 2 + ((yy - cy) / (1.5 * sigma)) ** 2))
        mean *= 1.0 - 0.85 * shadow
    return mean


def _bioturbation_mean(size: int, rng: np.random.Generator, patch_density: float) -> np.ndarray:
    rough = ndimage.gaussian_filter(rng.normal(0.0, 1.0, (size, size)), sigma=size / 24.0)
    cut = np.quantile(rough, 1.0 - patch_density)
    patches = ndimage.gaussian_filter((rough > cut).astype(np.float64), sigma=1.5)
    return 1.0 + 2.0 * patches


def synthesize_chip(
    kind: ChipKind,
    size_px: int = 128,
    meters_per_pixel: float | None = None,
    seed: int = 0,
    *,
    wavelength_m: float = 1.0,
    orientation: float = 0.55,
    ripple_amplitude: float = 0.85,
    clutter_count: int = 12,
    patch_density: float = 0.12,
    chip_id: str | None = None,
    site: str | None = None,
    range_m: float = 25.0,
) -> ImageChip:
    """One synthetic chip of the requested texture, deterministic per seed.

    ``meters_per_pixel`` defaults to a 10 m chip extent.
    """
    kind = ChipKind(kind)
    if size_px < 32:
        raise ValueError("size_px must be >= 32")
    mpp = meters_per_pixel if meters_per_pixel is not None else 10.0 / size_px
    if not (mpp > 0):
        raise ValueError("meters_per_pixel must be positive")
    if kind in (ChipKind.RIPPLES, ChipKind.MIXED) and wavelength_m < 2.0 * mpp:
        raise ValueError("ripple wavelength must be at least two pixels")
    if not (0.0 < patch_density < 1.0):
        raise ValueError("patch_density must lie in (0, 1)")

    rng = np.random.default_rng(seed)
    if kind is ChipKind.FLAT_SPECKLE:
        mean = np.ones((size_px, size_px))
    elif kind is ChipKind.RIPPLES:
        mean = _ripple_mean(size_px, mpp, wavelength_m, orientation, ripple_amplitude)
    elif kind is ChipKind.CLUTTER:
        mean = _clutter_mean(size_px, rng, clutter_count)
    elif kind is ChipKind.BIOTURBATION:
        mean = _bioturbation_mean(size_px, rng, patch_density)
    else:  # MIXED
        mean = _ripple_mean(size_px, mpp, wavelength_m, orientation, 0.5 * ripple_amplitude)
        mean *= _clutter_mean(size_px, rng, max(clutter_count // 2, 1))
        mean *= _bioturbation_mean(size_px, rng, patch_density)

    values = mean * rng.exponential(1.0, (size_px, size_px))
    return ImageChip(
        id=chip_id or f"{kind.value.lower()}-{seed:04d}",
        image=Image2D(values=values, meters_per_pixel=mpp),
        site=site if site is not None else _DEFAULT_SITE[kind],
        range_m=range_m,
    )


_DEMO_CYCLE = (
    (ChipKind.FLAT_SPECKLE, {}),
    (ChipKind.RIPPLES, {"wavelength_m": 1.0}),
    (ChipKind.CLUTTER, {}),
    (ChipKind.BIOTURBATION, {}),
    (ChipKind.RIPPLES, {"wavelength_m": 0.4, "site": "E", "orientation": 1.2}),
    (ChipKind.MIXED, {}),
)


def make_demo_dataset(
    root: Path,
    n_chips: int,
    seed: int = 0,
    size_px: int = 128,
    meters_per_pixel: float | None = None,
) -> DatasetManifest:
    """Write a ready-to-load dataset of varied synthetic textures.

    Chips cycle through the texture kinds, ranges are spread over the
    accepted window, and ids carry no site hints.
    """
    root = Path(root)
    chips_dir = root / "chips"
    entries = []
    rng = np.random.default_rng(seed)
    mpp = meters_per_pixel if meters_per_pixel is not None else 10.0 / size_px
    for k in range(n_chips):
        kind, extra = _DEMO_CYCLE[k % len(_DEMO_CYCLE)]
        extra = dict(extra)
        if "wavelength_m" in extra:  # coarse chips cannot carry the finest ripples
            extra["wavelength_m"] = max(extra["wavelength_m"], 2.5 * mpp)
        chip = synthesize_chip(
            kind,
            size_px=size_px,
            meters_per_pixel=mpp,
            seed=int(rng.integers(0, 2**32)),
            chip_id=f"chip-{k:04d}",
            range_m=float(10.0 + 30.0 * k / max(n_chips, 1)),
            **extra,
        )
        rel = f"chips/chip-{k:04d}.png"
        save_chip_raster(chip.image.values, root / rel)
        entries.append(
            ManifestEntry(
                id=chip.id,
                path=rel,
                site=chip.site,
                range_m=chip.range_m,
                width=size_px,
                height=size_px,
            )
        )
    manifest = DatasetManifest(meters_per_pixel=mpp, chips=entries, notes="synthetic demo dataset")
    write_manifest(root, manifest)
    return manifest
