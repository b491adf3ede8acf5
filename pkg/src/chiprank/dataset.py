"""Dataset loading: a JSON manifest pointing at single-channel rasters,
per-chip sidecar metadata overrides, and the QC rules that gate which
chips are eligible for rating."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import DatasetError
from .metrics import Image2D

MANIFEST_NAME = "manifest.json"

RANGE_MIN_M = 10.0
RANGE_MAX_M = 40.0


class QcFlag(str, Enum):
    CROSSTALK = "CROSSTALK"
    UNCOMPENSATED_MOTION = "UNCOMPENSATED_MOTION"
    NO_SPECTRAL_SUPPORT = "NO_SPECTRAL_SUPPORT"
    MANUAL_EXCLUDE = "MANUAL_EXCLUDE"


@dataclass(eq=False)
class ImageChip:
    """A georeferenced intensity raster plus the metadata used for QC."""

    id: str
    image: Image2D
    site: str
    range_m: float
    qc_flags: frozenset[QcFlag] = frozenset()


@dataclass
class ManifestEntry:
    id: str
    path: str
    site: str
    range_m: float
    qc_flags: list[str] = field(default_factory=list)
    width: int | None = None
    height: int | None = None


@dataclass
class DatasetManifest:
    meters_per_pixel: float
    chips: list[ManifestEntry]
    created: str = ""
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "meters_per_pixel": self.meters_per_pixel,
            "created": self.created,
            "notes": self.notes,
            "chips": [
                {
                    "id": e.id,
                    "path": e.path,
                    "site": e.site,
                    "range_m": e.range_m,
                    "qc_flags": list(e.qc_flags),
                    **({"width": e.width, "height": e.height} if e.width is not None else {}),
                }
                for e in self.chips
            ],
        }


@dataclass
class RejectedChip:
    id: str
    reasons: list[str]


@dataclass
class LoadError:
    id: str
    message: str


@dataclass
class LoadResult:
    """Accepted chips plus an itemized account of everything that was not."""

    accepted: list[ImageChip]
    rejected: list[RejectedChip]
    errors: list[LoadError]

    @property
    def ok(self) -> bool:
        return not self.errors


def read_manifest(root: Path) -> DatasetManifest:
    path = Path(root) / MANIFEST_NAME
    if not path.is_file():
        raise DatasetError(f"no {MANIFEST_NAME} in {root}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError(f"unreadable manifest {path}: {exc}") from exc
    try:
        mpp = float(raw["meters_per_pixel"])
        chips = [
            ManifestEntry(
                id=str(c["id"]),
                path=str(c["path"]),
                site=str(c.get("site", "")),
                range_m=float(c.get("range_m", 0.0)),
                qc_flags=[str(f) for f in c.get("qc_flags", [])],
                width=c.get("width"),
                height=c.get("height"),
            )
            for c in raw["chips"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"malformed manifest {path}: {exc}") from exc
    if not (mpp > 0):
        raise DatasetError("meters_per_pixel must be positive")
    return DatasetManifest(
        meters_per_pixel=mpp,
        chips=chips,
        created=str(raw.get("created", "")),
        notes=str(raw.get("notes", "")),
    )


def write_manifest(root: Path, manifest: DatasetManifest) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    if not manifest.created:
        manifest.created = datetime.now(timezone.utc).isoformat(timespec="seconds")
    path = root / MANIFEST_NAME
    path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def _decode_raster(path: Path) -> np.ndarray:
    with PILImage.open(path) as im:
        if im.mode not in ("F", "I", "I;16", "L"):
            im = im.convert("F")
        arr = np.asarray(im, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected single-channel raster, got shape {arr.shape}")
    return arr


def save_chip_raster(values: np.ndarray, path: Path) -> None:
    """Write a float raster: 16-bit grayscale PNG (scaled to full range)
    for .png, raw float32 for .tif/.tiff."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    suffix = path.suffix.lower()
    if suffix in (".tif", ".tiff"):
        PILImage.fromarray(values.astype(np.float32), mode="F").save(path)
    elif suffix == ".png":
        peak = float(values.max())
        scaled = values / peak * 65535.0 if peak > 0 else np.zeros_like(values)
        PILImage.fromarray(np.rint(scaled).astype(np.uint16)).save(path)
    else:
        raise ValueError(f"unsupported raster format {suffix!r}")


def _apply_sidecar(entry: ManifestEntry, chip_path: Path) -> ManifestEntry:
    sidecar = chip_path.with_name(chip_path.stem + ".meta.json")
    if not sidecar.is_file():
        return entry
    raw = json.loads(sidecar.read_text(encoding="utf-8"))
    return ManifestEntry(
        id=str(raw.get("id", entry.id)),
        path=entry.path,
        site=str(raw.get("site", entry.site)),
        range_m=float(raw.get("range_m", entry.range_m)),
        qc_flags=[str(f) for f in raw.get("qc_flags", entry.qc_flags)],
        width=raw.get("width", entry.width),
        height=raw.get("height", entry.height),
    )


def load_dataset(root: Path) -> LoadResult:
    """Decode every manifest entry, apply sidecar overrides, then QC.

    Chips failing QC (any flag set, or range outside [10, 40] m) are
    reported in ``rejected``; undecodable or inconsistent entries land in
    ``errors``. Accepted chips come back sorted by id.
    """
    root = Path(root)
    manifest = read_manifest(root)
    accepted: list[ImageChip] = []
    rejected: list[RejectedChip] = []
    errors: list[LoadError] = []
    seen: set[str] = set()

    for entry in manifest.chips:
        chip_path = root / entry.path
        try:
            entry = _apply_sidecar(entry, chip_path)
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
            errors.append(LoadError(entry.id, f"bad sidecar: {exc}"))
            continue
        if entry.id in seen:
            errors.append(LoadError(entry.id, "duplicate chip id"))
            continue
        seen.add(entry.id)
        if not chip_path.is_file():
            errors.append(LoadError(entry.id, f"missing file {entry.path}"))
            continue
        try:
            values = _decode_raster(chip_path)
        except Exception as exc:
            errors.append(LoadError(entry.id, f"undecodable raster: {exc}"))
            continue
        if entry.width is not None and (values.shape[1] != entry.width or values.shape[0] != entry.height):
            errors.append(
                LoadError(
                    entry.id,
                    f"declared {entry.width}x{entry.height} but decoded "
                    f"{values.shape[1]}x{values.shape[0]}",
                )
            )
            continue

        reasons = []
        flags = []
        for name in entry.qc_flags:
            try:
                flags.append(QcFlag(name))
                reasons.append(name)
            except ValueError:
                errors.append(LoadError(entry.id, f"unknown qc flag {name!r}"))
                break
        else:
            if not (RANGE_MIN_M <= entry.range_m <= RANGE_MAX_M):
                reasons.append("RANGE_OUT_OF_BOUNDS")
            if reasons:
                rejected.append(RejectedChip(entry.id, reasons))
                continue
            accepted.append(
                ImageChip(
                    id=entry.id,
                    image=Image2D(values=values, meters_per_pixel=manifest.meters_per_pixel),
                    site=entry.site,
                    range_m=entry.range_m,
                    qc_flags=frozenset(flags),
                )
            )

    accepted.sort(key=lambda c: c.id)
    return LoadResult(accepted=accepted, rejected=rejected, errors=errors)


def count_possible_pairs(n_images: int) -> int:
    """Unordered pairs among n images."""
    if n_images < 2:
        raise ValueError("need at least two images to form a pair")
    return n_images * (n_images - 1) // 2
