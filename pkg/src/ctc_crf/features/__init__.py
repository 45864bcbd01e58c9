"""Feature extraction: log-mel filterbanks, CMVN and delta stacking."""

from .cmvn import add_deltas, apply_cmvn, compute_deltas
from .fbank import (
    compute_fbank,
    feature_variant,
    frame_geometry,
    mel_center_frequencies,
    mel_filterbank,
    num_frames,
    power_spectrum,
)
from .types import FeatureMatrix, Waveform

__all__ = [
    "FeatureMatrix",
    "Waveform",
    "add_deltas",
    "apply_cmvn",
    "compute_deltas",
    "compute_fbank",
    "feature_variant",
    "frame_geometry",
    "mel_center_frequencies",
    "mel_filterbank",
    "num_frames",
    "power_spectrum",
]
