from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from ..errors import FormatError


def read_wav(path: Path) -> tuple[np.ndarray, int]:
    """Load a PCM16 mono WAV file as float64 samples in [-1, 1]."""
    try:
        with wave.open(str(path), "rb") as wf:
            sample_rate = wf.getframerate()
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise FormatError(f"{path}: not a readable WAV file: {exc}") from exc

    if width != 2:
        raise FormatError(f"only 16-bit PCM is supported, got sampwidth={width}")
    if channels != 1:
        raise FormatError(f"only mono audio is supported, got {channels} channels")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return samples, sample_rate


def write_wav(path: Path, samples: np.ndarray, sample_rate: int) -> None:
    pcm = np.clip(np.round(np.asarray(samples) * 32767.0), -32768, 32767).astype("<i2")
    path.parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(pcm.tobytes())
