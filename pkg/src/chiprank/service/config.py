"""Service configuration: file, environment, and CLI flags, in that
precedence order (flags win)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

ENV_PREFIX = "CHIPRANK_"


@dataclass
class ServiceConfig:
    dataset_root: Path = Path("dataset")
    log_path: Path = Path("judgments.jsonl")
    host: str = "127.0.0.1"
    port: int = 8000
    p_repeat: float = 0.1
    seed: int = 0
    assets_dir: Path | None = None
    drc_epsilon: float = 1e-10

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_repeat <= 1.0):
            raise ValueError("p_repeat must lie in [0, 1]")


_PATH_FIELDS = {"dataset_root", "log_path", "assets_dir"}
_INT_FIELDS = {"port", "seed"}
_FLOAT_FIELDS = {"p_repeat", "drc_epsilon"}


def _coerce(name: str, value: Any) -> Any:
    if value is None:
        return None
    if name in _PATH_FIELDS:
        return Path(value)
    if name in _INT_FIELDS:
        return int(value)
    if name in _FLOAT_FIELDS:
        return float(value)
    return str(value)


def load_service_config(
    config_file: Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> ServiceConfig:
    """Merge defaults <- config file (JSON, "service" section or flat) <-
    CHIPRANK_* environment variables <- explicit overrides."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    known = {f.name for f in fields(ServiceConfig)}

    if config_file is not None:
        raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
        section = raw.get("service", raw) if isinstance(raw, dict) else {}
        for name, value in section.items():
            if name in known:
                values[name] = _coerce(name, value)

    for name in known:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = _coerce(name, env[env_key])

    if overrides:
        for name, value in overrides.items():
            if name in known and value is not None:
                values[name] = _coerce(name, value)

    return ServiceConfig(**values)
