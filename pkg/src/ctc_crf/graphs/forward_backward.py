"""Frame-synchronous forward-backward over an epsilon-free graph."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..errors import DegenerateGraphError, LengthError, LogProbError, NoPathError, VocabularyError
from .fsa import WeightedFsa

logger = logging.getLogger(__name__)

AGREEMENT_TOLERANCE = 1e-6


@dataclass(slots=True, frozen=True)
class ForwardBackwardResult:
    log_z: float
    log_z_backward: float
    occupancy: np.ndarray


def _segment_logsumexp(values: np.ndarray, segments: np.ndarray, size: int) -> np.ndarray:
    peak = np.full(size, -np.inf)
    np.maximum.at(peak, segments, values)
    shift = np.where(np.isfinite(peak), peak, 0.0)
    total = np.zeros(size)
    np.add.at(total, segments, np.exp(values - shift[segments]))
    with np.errstate(divide="ignore"):
        return np.where(total > 0.0, shift + np.log(total), -np.inf)


def forward_backward(fsa: WeightedFsa, logprobs: np.ndarray) -> ForwardBackwardResult:
    """Total log-score of all length-T paths and per-frame symbol posteriors.

    A path's score is its graph weight plus ``logprobs[t, symbol]`` for every
    frame. Raises :class:`NoPathError` when no path of length T is accepted,
    :class:`LogProbError` on NaN or +inf scores (-inf is probability zero) and
    :class:`DegenerateGraphError` when the forward and backward totals disagree.
    """
    logprobs = np.asarray(logprobs, dtype=np.float64)
    if logprobs.ndim != 2 or logprobs.shape[0] < 1:
        raise LengthError(f"logprobs must be a non-empty T x K matrix, got shape {logprobs.shape}")
    bad = np.isnan(logprobs) | np.isposinf(logprobs)
    if bad.any():
        t, k = (int(i) for i in np.argwhere(bad)[0])
        raise LogProbError(f"logprobs[{t}, {k}] is {logprobs[t, k]}")
    if not fsa.is_epsilon_free():
        raise DegenerateGraphError("forward_backward requires an epsilon-free graph")
    num_frames, num_symbols = logprobs.shape
    if fsa.num_arcs and (fsa.labels.min() < 0 or fsa.labels.max() >= num_symbols):
        raise VocabularyError(f"graph labels exceed the {num_symbols} logprob columns")

    n = fsa.num_states
    src, dst, labels, weights = fsa.src, fsa.dst, fsa.labels, fsa.weights
    final_states = np.fromiter(fsa.finals.keys(), dtype=np.int64, count=len(fsa.finals))
    final_weights = np.fromiter(fsa.finals.values(), dtype=np.float64, count=len(fsa.finals))

    alpha = np.full((num_frames + 1, n), -np.inf)
    alpha[0, fsa.start] = 0.0
    for t in range(num_frames):
        scores = alpha[t, src] + weights + logprobs[t, labels]
        alpha[t + 1] = _segment_logsumexp(scores, dst, n)

    beta = np.full((num_frames + 1, n), -np.inf)
    beta[num_frames, final_states] = final_weights
    for t in range(num_frames - 1, -1, -1):
        scores = beta[t + 1, dst] + weights + logprobs[t, labels]
        beta[t] = _segment_logsumexp(scores, src, n)

    log_z = float(logsumexp(alpha[num_frames, final_states] + final_weights)) if len(final_states) else -math.inf
    if not math.isfinite(log_z):
        raise NoPathError(f"graph accepts no path of length {num_frames}")
    log_z_backward = float(beta[0, fsa.start])
    if not abs(log_z - log_z_backward) <= AGREEMENT_TOLERANCE * max(1.0, abs(log_z)):
        logger.error(
            "Forward-backward mismatch",
            extra={"log_z": log_z, "log_z_backward": log_z_backward, "frames": num_frames},
        )
        raise DegenerateGraphError(f"forward log-score {log_z!r} disagrees with backward {log_z_backward!r}")

    occupancy = np.zeros((num_frames, num_symbols))
    for t in range(num_frames):
        posts = np.exp(alpha[t, src] + weights + logprobs[t, labels] + beta[t + 1, dst] - log_z)
        np.add.at(occupancy[t], labels, posts)
    return ForwardBackwardResult(log_z=log_z, log_z_backward=log_z_backward, occupancy=occupancy)
