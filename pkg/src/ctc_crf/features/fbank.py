"""Log-mel filterbank extraction (Hamming window, HTK mel scale, float64)."""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np

from ..errors import ConfigError, LengthError
from ..settings import FEATURE_VARIANTS, FbankConfig
from .cmvn import add_deltas
from .types import FeatureMatrix, Waveform

logger = logging.getLogger(__name__)


def hz_to_mel(hz: np.ndarray | float) -> np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray | float) -> np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def feature_variant(name: str) -> FbankConfig:
    """Named input-feature setup: fbank80, fbank40 or fbank40-deltas."""
    try:
        return FEATURE_VARIANTS[name]
    except KeyError:
        raise ConfigError(f"unknown feature variant {name!r}; expected one of {sorted(FEATURE_VARIANTS)}") from None


def frame_geometry(sample_rate: int, cfg: FbankConfig) -> tuple[int, int, int]:
    """Return (window_samples, hop_samples, fft_size)."""
    window = int(round(sample_rate * cfg.frame_length_ms / 1000.0))
    hop = int(round(sample_rate * cfg.frame_shift_ms / 1000.0))
    fft_size = 1 << max(0, math.ceil(math.log2(window)))
    return window, hop, fft_size


def num_frames(num_samples: int, window: int, hop: int) -> int:
    if num_samples < window:
        raise LengthError(f"waveform has {num_samples} samples, shorter than one {window}-sample window")
    return 1 + (num_samples - window) // hop


def _band_edges(sample_rate: int, cfg: FbankConfig) -> np.ndarray:
    high = cfg.high_freq if cfg.high_freq is not None else sample_rate / 2.0
    return np.linspace(hz_to_mel(cfg.low_freq), hz_to_mel(high), cfg.num_mel_bins + 2)


def mel_center_frequencies(sample_rate: int, cfg: FbankConfig) -> np.ndarray:
    return mel_to_hz(_band_edges(sample_rate, cfg)[1:-1])


@lru_cache(maxsize=16)
def _mel_weights(sample_rate: int, fft_size: int, cfg_json: str) -> np.ndarray:
    cfg = FbankConfig.model_validate_json(cfg_json)
    edges = _band_edges(sample_rate, cfg)
    bin_mels = hz_to_mel(np.arange(fft_size // 2 + 1) * sample_rate / fft_size)
    left, center, right = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bin_mels[None, :] - left) / (center - left)
    falling = (right - bin_mels[None, :]) / (right - center)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    weights.setflags(write=False)
    return weights


def mel_filterbank(sample_rate: int, fft_size: int, cfg: FbankConfig) -> np.ndarray:
    """Triangular filters, shape (num_mel_bins, fft_size // 2 + 1)."""
    return _mel_weights(sample_rate, fft_size, cfg.model_dump_json())


def frame_signal(samples: np.ndarray, window: int, hop: int) -> np.ndarray:
    count = num_frames(samples.size, window, hop)
    frames = np.lib.stride_tricks.sliding_window_view(samples, window)[::hop][:count]
    return np.array(frames, dtype=np.float64, copy=True)


def power_spectrum(wave: Waveform, cfg: FbankConfig) -> np.ndarray:
    window, hop, fft_size = frame_geometry(wave.sample_rate, cfg)
    frames = frame_signal(np.asarray(wave.samples, dtype=np.float64), window, hop)
    if cfg.preemphasis > 0.0:
        frames[:, 1:] -= cfg.preemphasis * frames[:, :-1].copy()
        frames[:, 0] -= cfg.preemphasis * frames[:, 0]
    frames *= np.hamming(window)[None, :]
    spectrum = np.fft.rfft(frames, n=fft_size, axis=1)
    return spectrum.real**2 + spectrum.imag**2


def compute_fbank(wave: Waveform, cfg: FbankConfig) -> FeatureMatrix:
    window, _, fft_size = frame_geometry(wave.sample_rate, cfg)
    if wave.num_samples < window:
        raise LengthError(
            f"waveform has {wave.num_samples} samples, shorter than one {window}-sample window"
        )
    power = power_spectrum(wave, cfg)
    energies = power @ mel_filterbank(wave.sample_rate, fft_size, cfg).T
    feats = np.maximum(np.log(np.maximum(energies, np.finfo(np.float64).tiny)), cfg.log_floor)
    if cfg.deltas:
        feats = add_deltas(feats)
    logger.debug(
        "Computed fbank",
        extra={"num_frames": feats.shape[0], "dim": feats.shape[1], "sample_rate": wave.sample_rate},
    )
    return FeatureMatrix(feats, cfg.frame_shift_ms, cfg.frame_length_ms)
