"""Pipeline configuration: defaults, TOML file loading, flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .codec import Rounding
from .dtw import DEFAULT_ATTENTION_FRAME_SECONDS
from .errors import ConfigError
from .metrics import Normalization
from .types import FRAME_SECONDS, MAX_FRAME_INDEX

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


@dataclass
class PipelineConfig:
    frame_rate_s: float = FRAME_SECONDS  # timestamp bucket duration
    max_frame: int = MAX_FRAME_INDEX
    threshold_ms: int = 240
    rounding: Rounding = Rounding.FLOOR
    normalization: Normalization = Normalization.NONE
    timestamp_data_fraction: float = 0.15  # share of lines given the timestamp style
    workers: int = 1
    attention_frame_s: float = DEFAULT_ATTENTION_FRAME_SECONDS
    seed: int = 0

    def validate(self) -> None:
        if not self.frame_rate_s > 0:
            raise ConfigError(f"frame_rate_s must be positive, got {self.frame_rate_s}")
        if self.max_frame < 1:
            raise ConfigError(f"max_frame must be >= 1, got {self.max_frame}")
        if self.threshold_ms <= 0:
            raise ConfigError(f"threshold_ms must be positive, got {self.threshold_ms}")
        if not 0.0 <= self.timestamp_data_fraction <= 1.0:
            raise ConfigError(
                f"timestamp_data_fraction must be in [0, 1], got "
                f"{self.timestamp_data_fraction}"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.attention_frame_s > 0:
            raise ConfigError(
                f"attention_frame_s must be positive, got {self.attention_frame_s}"
            )

    @property
    def frame_ms(self) -> int:
        return round(self.frame_rate_s * 1000)


_ENUM_FIELDS = {"rounding": Rounding, "normalization": Normalization}


def load_config(path: str | Path) -> PipelineConfig:
    """Read a flat TOML file; unknown keys are an error."""
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    known = {f.name: f.type for f in fields(PipelineConfig)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in _ENUM_FIELDS:
            try:
                value = _ENUM_FIELDS[key](value)
            except ValueError:
                raise ConfigError(f"{path}: bad value {value!r} for {key}") from None
        kwargs[key] = value
    try:
        config = PipelineConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    config.validate()
    return config
