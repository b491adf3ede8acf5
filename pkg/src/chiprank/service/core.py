"""Rating-service state: per-operator sessions, pair sampling, the
durable judgment log, and rendered imagery.

All mutation goes through one lock; log writes use a single append
handle, so acknowledged judgments are on disk exactly once.
"""

from __future__ import annotations

import hashlib
import io
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from ..dataset import ImageChip
from ..elo import Outcome
from ..errors import ConflictError, ServiceUnavailableError
from ..judgment_log import JudgmentLogWriter, JudgmentRecord, replay_log
from ..metrics import dynamic_range_compress, normalize_unit


@dataclass(frozen=True)
class PairAssignment:
    comparison_id: str
    left: str
    right: str
    repeat_of: str | None = None


@dataclass
class ProgressStats:
    total_judgments: int
    per_operator: dict[str, int]
    per_image: dict[str, int]
    image_count_mean: float
    image_count_min: int
    image_count_max: int


@dataclass
class _Session:
    operator_id: str
    rng: np.random.Generator
    served_pairs: int = 0
    pending: PairAssignment | None = None
    history: list[PairAssignment] = field(default_factory=list)


def _operator_stream(seed: int, operator_id: str) -> np.random.Generator:
    digest = hashlib.sha256(operator_id.encode("utf-8")).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "big")])


class RatingService:
    """Backend for the pairwise rating tool."""

    def __init__(
        self,
        chips: list[ImageChip],
        log_path: Path,
        p_repeat: float = 0.1,
        seed: int = 0,
        drc_epsilon: float = 1e-10,
    ):
        if not (0.0 <= p_repeat <= 1.0):
            raise ValueError("p_repeat must lie in [0, 1]")
        self._chips = {chip.id: chip for chip in chips}
        self._ids = sorted(self._chips)
        self._p_repeat = p_repeat
        self._seed = seed
        self._drc_epsilon = drc_epsilon
        self._lock = threading.Lock()
        self._sessions: dict[str, _Session] = {}
        self._pending_owner: dict[str, str] = {}
        self._render_cache: dict[str, bytes] = {}

        # resume counters and id sequence from whatever is already logged
        self._per_image = {chip_id: 0 for chip_id in self._ids}
        self._per_operator: dict[str, int] = {}
        self._total = 0
        self._next_seq = 0
        log_path = Path(log_path)
        if log_path.is_file():
            for record in replay_log(log_path).records:
                self._count(record)
                self._next_seq += 1
        self._log = JudgmentLogWriter(log_path)

    @property
    def log_path(self) -> Path:
        return self._log.path

    def close(self) -> None:
        self._log.close()

    def _count(self, record: JudgmentRecord) -> None:
        self._total += 1
        self._per_operator[record.operator_id] = self._per_operator.get(record.operator_id, 0) + 1
        for image_id in (record.left, record.right):
            if image_id in self._per_image:
                self._per_image[image_id] += 1

    def next_pair(self, operator_id: str) -> PairAssignment:
        """Sample the operator's next pair; replaces any pending pair.

        With probability ``p_repeat`` (once the operator has history) a
        previously judged pair is replayed with freshly randomized sides
        and tagged with the original comparison id.
        """
        with self._lock:
            if len(self._ids) < 2:
                raise ServiceUnavailableError("dataset holds fewer than two rateable images")
            session = self._sessions.get(operator_id)
            if session is None:
                session = _Session(operator_id=operator_id, rng=_operator_stream(self._seed, operator_id))
                self._sessions[operator_id] = session
            rng = session.rng

            repeat_of = None
            if session.history and float(rng.random()) < self._p_repeat:
                original = session.history[int(rng.integers(len(session.history)))]
                left, right = original.left, original.right
                repeat_of = original.comparison_id
            else:
                i = int(rng.integers(len(self._ids)))
                j = int(rng.integers(len(self._ids)))
                while j == i:
                    j = int(rng.integers(len(self._ids)))
                left, right = self._ids[i], self._ids[j]
            if float(rng.random()) < 0.5:
                left, right = right, left

            comparison_id = f"j{self._next_seq:08d}"
            self._next_seq += 1
            assignment = PairAssignment(comparison_id, left, right, repeat_of)
            if session.pending is not None:
                self._pending_owner.pop(session.pending.comparison_id, None)
            session.pending = assignment
            session.served_pairs += 1
            self._pending_owner[comparison_id] = operator_id
            return assignment

    def record_judgment(self, comparison_id: str, outcome: Outcome) -> JudgmentRecord:
        """Durably append the judgment for a pending pair, then clear it."""
        with self._lock:
            operator_id = self._pending_owner.get(comparison_id)
            if operator_id is None:
                raise ConflictError(f"no pending pair with id {comparison_id!r}")
            session = self._sessions[operator_id]
            assignment = session.pending
            record = JudgmentRecord(
                comparison_id=comparison_id,
                operator_id=operator_id,
                left=assignment.left,
                right=assignment.right,
                outcome=outcome,
                unix_timestamp_ms=int(time.time() * 1000),
                repeat_of=assignment.repeat_of,
            )
            self._log.append(record)  # durable before acknowledging
            del self._pending_owner[comparison_id]
            session.pending = None
            if assignment.repeat_of is None:
                session.history.append(assignment)
            self._count(record)
            return record

    def progress_stats(self) -> ProgressStats:
        with self._lock:
            counts = list(self._per_image.values())
            return ProgressStats(
                total_judgments=self._total,
                per_operator=dict(self._per_operator),
                per_image=dict(self._per_image),
                image_count_mean=float(np.mean(counts)) if counts else 0.0,
                image_count_min=min(counts) if counts else 0,
                image_count_max=max(counts) if counts else 0,
            )

    def image_png(self, image_id: str) -> bytes:
        """The chip rendered for display: normalized, dynamic-range
        compressed, and scaled to 8-bit grayscale PNG."""
        cached = self._render_cache.get(image_id)
        if cached is not None:
            return cached
        chip = self._chips.get(image_id)
        if chip is None:
            raise KeyError(image_id)
        drc = dynamic_range_compress(normalize_unit(chip.image), self._drc_epsilon)
        v = drc.values
        lo, hi = float(v.min()), float(v.max())
        unit = (v - lo) / (hi - lo) if hi > lo else np.zeros_like(v)
        buf = io.BytesIO()
        PILImage.fromarray(np.rint(unit * 255.0).astype(np.uint8)).save(buf, format="PNG")
        png = buf.getvalue()
        with self._lock:
            self._render_cache[image_id] = png
        return png
