from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from ..errors import ConfigError, NoPathError
from ..graphs import WeightedFsa, build_ctc_topology, build_numerator, compose_denominator, forward_backward
from ..labellm import NGramLabelLm, lm_to_fsa, score_sequence
from .types import LossResult, validate_logprobs

logger = logging.getLogger(__name__)


def build_denominator(lm: NGramLabelLm) -> WeightedFsa:
    """CTC topology composed with the label LM acceptor."""
    return compose_denominator(build_ctc_topology(lm.vocab_size), lm_to_fsa(lm))


def crf_loss(
    logprobs: np.ndarray,
    labels: Sequence[int],
    den: WeightedFsa,
    lm: NGramLabelLm,
    validate: bool = True,
) -> LossResult:
    """CTC-CRF loss: ``-(logZ_num + log p(l)) + logZ_den``.

    The gradient with respect to the log-probabilities is the difference of
    the denominator and numerator occupancies.
    """
    lp = validate_logprobs(logprobs) if validate else np.asarray(logprobs, dtype=np.float64)
    vocab_size = lp.shape[1] - 1
    if lm.vocab_size != vocab_size or (den.vocab_size is not None and den.vocab_size != vocab_size):
        raise ConfigError(
            f"vocabulary mismatch: logprobs have {vocab_size} labels, "
            f"LM has {lm.vocab_size}, denominator graph has {den.vocab_size}"
        )
    log_p_labels = score_sequence(lm, labels)
    if not math.isfinite(log_p_labels):
        raise NoPathError(f"label sequence {tuple(labels)} has zero probability under the LM")

    num = forward_backward(build_numerator(labels, vocab_size), lp)
    den_fb = forward_backward(den, lp)
    loss = -(num.log_z + log_p_labels) + den_fb.log_z
    return LossResult(loss=float(loss), grad=den_fb.occupancy - num.occupancy)
