"""Flat key/value configuration files.

Format: one ``key = value`` pair per line; blank lines and ``#`` comments
are ignored.  Unknown keys are rejected.  Command-line flags override file
values.  The API credential itself never appears here, only the name of the
environment variable holding it (``api_key_env``).
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path


class ConfigError(ValueError):
    """Unreadable or invalid configuration."""


@dataclass(frozen=True)
class Config:
    endpoint: str = ""
    model: str = ""
    api_key_env: str = ""
    timeout_s: float = 60.0
    max_retries: int = 3
    parallelism: int = 1
    rate_limit_per_s: float = 0.0
    trials_per_repetition: int = 100
    repetitions: int = 10
    temperature: float | None = None
    out_dir: str = ""

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ConfigError("timeout_s must be > 0")
        if self.max_retries < 1:
            raise ConfigError("max_retries must be >= 1")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.rate_limit_per_s < 0:
            raise ConfigError("rate_limit_per_s must be >= 0")


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(name: str, raw: str):
    if name in ("endpoint", "model", "api_key_env", "out_dir"):
        return raw
    if name in ("timeout_s", "rate_limit_per_s"):
        return float(raw)
    if name == "temperature":
        return None if raw.lower() in ("", "none") else float(raw)
    if name in ("max_retries", "parallelism", "trials_per_repetition", "repetitions"):
        return int(raw)
    raise ConfigError(f"unknown configuration key {name!r}")


def load_config(path: str | Path) -> Config:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return Config(**values)


def merge_config(config: Config, **overrides) -> Config:
    """Apply non-None overrides on top of ``config``."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **changes) if changes else config
