from __future__ import annotations

from typing import Sequence

import numpy as np

from ..graphs import build_numerator, forward_backward
from .types import LossResult, validate_logprobs


def ctc_loss(logprobs: np.ndarray, labels: Sequence[int], validate: bool = True) -> LossResult:
    """Negative log of the summed probability of every alignment of ``labels``.

    The gradient is taken with respect to the log-probability inputs.
    """
    lp = validate_logprobs(logprobs) if validate else np.asarray(logprobs, dtype=np.float64)
    num = build_numerator(labels, lp.shape[1] - 1)
    fb = forward_backward(num, lp)
    return LossResult(loss=-fb.log_z, grad=-fb.occupancy)
