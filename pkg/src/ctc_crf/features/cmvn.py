from __future__ import annotations

import numpy as np

from ..errors import InsufficientFramesError
from .types import FeatureMatrix

# Standard deviations below this are treated as a constant dimension.
_CONSTANT_STD = 1e-12


def apply_cmvn(feat: FeatureMatrix) -> FeatureMatrix:
    """Per-utterance mean/variance normalization over frames."""
    if feat.num_frames < 2:
        raise InsufficientFramesError(f"CMVN needs at least 2 frames, got {feat.num_frames}")
    frames = feat.frames.astype(np.float64)
    mean = frames.mean(axis=0)
    centered = frames - mean
    std = np.sqrt(np.mean(centered**2, axis=0))
    constant = std <= _CONSTANT_STD * np.maximum(1.0, np.abs(mean))
    normalized = np.where(constant, 0.0, centered / np.where(constant, 1.0, std))
    return feat.with_frames(normalized)


def compute_deltas(frames: np.ndarray, window: int = 2) -> np.ndarray:
    """Regression deltas with edge frames replicated."""
    padded = np.pad(frames, ((window, window), (0, 0)), mode="edge")
    num = len(frames)
    denom = 2.0 * sum(n * n for n in range(1, window + 1))
    deltas = np.zeros_like(frames, dtype=np.float64)
    for n in range(1, window + 1):
        deltas += n * (padded[window + n : window + n + num] - padded[window - n : window - n + num])
    return deltas / denom


def add_deltas(frames: np.ndarray, window: int = 2) -> np.ndarray:
    """Stack [base, delta, delta-delta]; the base block is left untouched."""
    delta = compute_deltas(frames, window)
    return np.concatenate([frames, delta, compute_deltas(delta, window)], axis=1)
