from __future__ import annotations

from typing import Protocol

import numpy as np

from ..graphs import collapse


class LogProbModel(Protocol):
    def log_probs(self, features: np.ndarray) -> np.ndarray: ...


def best_path(logprobs: np.ndarray) -> tuple[int, ...]:
    """Collapse of the framewise argmax; blank is the last column."""
    logprobs = np.asarray(logprobs)
    return collapse(logprobs.argmax(axis=1).tolist(), logprobs.shape[1] - 1)


def greedy_decode(model: LogProbModel, features: np.ndarray) -> tuple[int, ...]:
    return best_path(model.log_probs(features))
