from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, LengthError


@dataclass(slots=True, frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise LengthError("waveform must be a non-empty 1-D array")
        if self.sample_rate < 8000:
            raise ConfigError(f"sample_rate must be >= 8000 Hz, got {self.sample_rate}")

    @property
    def num_samples(self) -> int:
        return int(self.samples.size)


@dataclass(slots=True, frozen=True)
class FeatureMatrix:
    frames: np.ndarray
    frame_shift_ms: float = 10.0
    frame_length_ms: float = 25.0

    def __post_init__(self) -> None:
        if self.frames.ndim != 2 or self.frames.shape[0] < 1 or self.frames.shape[1] < 1:
            raise LengthError(f"feature matrix must be T x D with T, D >= 1, got {self.frames.shape}")
        if not np.all(np.isfinite(self.frames)):
            raise ConfigError("feature matrix contains non-finite entries")

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frames.shape[1])

    def with_frames(self, frames: np.ndarray) -> FeatureMatrix:
        return FeatureMatrix(frames, self.frame_shift_ms, self.frame_length_ms)
