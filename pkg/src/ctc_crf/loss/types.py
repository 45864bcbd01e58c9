from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..errors import LogProbError

ROW_TOLERANCE = 1e-6


@dataclass(slots=True, frozen=True)
class LossResult:
    loss: float
    grad: np.ndarray


def validate_logprobs(logprobs: np.ndarray) -> np.ndarray:
    """Return ``logprobs`` as float64 after checking each row is a finite log-softmax output."""
    arr = np.asarray(logprobs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 2:
        raise LogProbError(f"expected a T x (V+1) matrix with V >= 1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LogProbError("logprobs contain non-finite entries")
    drift = np.abs(logsumexp(arr, axis=1))
    if drift.max() > ROW_TOLERANCE:
        row = int(drift.argmax())
        raise LogProbError(f"row {row} log-sum-exps to {drift[row]:.3g} instead of 0")
    return arr
