"""Ratio SpecAug: time warp, frequency masks and time masks.

Every extent is a proportion of the axis it applies to. The warp runs
first, then frequency masks, then time masks; masks are filled with 0.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Mapping

import numpy as np
from pydantic import ValidationError

from ..errors import ConfigError, LengthError
from ..features.types import FeatureMatrix
from ..settings import SpecAugPolicy

logger = logging.getLogger(__name__)

MIN_WARP_FRAMES = 4


def validate_policy(policy: SpecAugPolicy) -> SpecAugPolicy:
    ratios = (policy.warp_ratio, policy.freq_ratio, policy.time_mask_ratio)
    if any(not 0.0 <= r <= 1.0 for r in ratios):
        raise ConfigError("SpecAug ratios must lie in [0, 1]")
    if policy.num_freq_masks < 0 or policy.num_time_masks < 0:
        raise ConfigError("SpecAug mask counts must be >= 0")
    if policy.num_freq_masks * policy.freq_ratio > 1.0:
        raise ConfigError("num_freq_masks * freq_ratio must be <= 1")
    if policy.num_time_masks * policy.time_mask_ratio > 1.0:
        raise ConfigError("num_time_masks * time_mask_ratio must be <= 1")
    return policy


def load_policy(data: Mapping[str, Any]) -> SpecAugPolicy:
    try:
        return SpecAugPolicy.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid SpecAug policy: {exc}") from exc


def sample_warp(num_frames: int, warp_ratio: float, rng: np.random.Generator) -> tuple[int, int] | None:
    """Draw ``(pivot, moved_pivot)``; None when the warp is a no-op."""
    if warp_ratio == 0.0:
        return None
    if num_frames < MIN_WARP_FRAMES:
        logger.warning("Sequence too short to warp", extra={"frames": num_frames})
        return None
    w = int(warp_ratio * num_frames)
    if w == 0:
        return None
    lo, hi = max(w, 1), min(num_frames - w, num_frames - 2)
    if lo > hi:
        return None
    t0 = int(rng.integers(lo, hi + 1))
    delta = int(rng.integers(-w, w + 1))
    t1 = min(max(t0 + delta, 1), num_frames - 2)
    return t0, t1


def warp_source_positions(num_frames: int, t0: int, t1: int) -> np.ndarray:
    """Source position read by each output frame: ``t1`` maps onto ``t0``, the ends stay fixed."""
    j = np.arange(num_frames, dtype=np.float64)
    last = num_frames - 1
    left = j * t0 / t1
    right = t0 + (j - t1) * (last - t0) / (last - t1)
    return np.where(j <= t1, left, right)


def warp_frames(frames: np.ndarray, t0: int, t1: int) -> np.ndarray:
    num_frames = frames.shape[0]
    src = warp_source_positions(num_frames, t0, t1)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, num_frames - 1)
    frac = (src - lo)[:, None]
    return frames[lo] + frac * (frames[hi] - frames[lo])


def _time_warp(frames: np.ndarray, warp_ratio: float, rng: np.random.Generator) -> np.ndarray:
    pivots = sample_warp(frames.shape[0], warp_ratio, rng)
    if pivots is None:
        return frames
    return warp_frames(frames, *pivots)


def time_warp(feat: FeatureMatrix, warp_ratio: float, seed: int | None) -> FeatureMatrix:
    if not 0.0 <= warp_ratio <= 1.0:
        raise ConfigError(f"warp_ratio must lie in [0, 1], got {warp_ratio}")
    rng = np.random.default_rng(seed)
    return feat.with_frames(_time_warp(feat.frames.copy(), warp_ratio, rng))


def _mask(frames: np.ndarray, axis: int, ratio: float, count: int, rng: np.random.Generator) -> None:
    size = frames.shape[axis]
    max_width = math.ceil(ratio * size)
    for _ in range(count):
        width = int(rng.integers(0, max_width + 1))
        start = int(rng.integers(0, size - width + 1))
        if axis == 0:
            frames[start : start + width, :] = 0.0
        else:
            frames[:, start : start + width] = 0.0


def augment_frames(frames: np.ndarray, policy: SpecAugPolicy, rng: np.random.Generator) -> np.ndarray:
    """Apply ``policy`` to a T x D array, drawing from ``rng``; returns a new array."""
    num_frames, dim = frames.shape
    if num_frames < 2 or dim < 2:
        raise LengthError(f"SpecAug needs at least 2 frames and 2 bins, got {frames.shape}")
    out = _time_warp(frames, policy.warp_ratio, rng).copy()
    _mask(out, 1, policy.freq_ratio, policy.num_freq_masks, rng)
    _mask(out, 0, policy.time_mask_ratio, policy.num_time_masks, rng)
    return out


def spec_augment(feat: FeatureMatrix, policy: SpecAugPolicy, seed: int | None) -> FeatureMatrix:
    validate_policy(policy)
    rng = np.random.default_rng(seed)
    return feat.with_frames(augment_frames(feat.frames, policy, rng))
