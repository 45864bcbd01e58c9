"""CTC and CTC-CRF losses with gradients w.r.t. log-probabilities."""

from .batch import BatchLossResult, LossKind, batch_loss, sequence_loss
from .crf import build_denominator, crf_loss
from .ctc import ctc_loss
from .oracle import MAX_PATHS, brute_force_crf, brute_force_ctc
from .types import LossResult, validate_logprobs

__all__ = [
    "BatchLossResult",
    "LossKind",
    "LossResult",
    "MAX_PATHS",
    "batch_loss",
    "brute_force_crf",
    "brute_force_ctc",
    "build_denominator",
    "crf_loss",
    "ctc_loss",
    "sequence_loss",
    "validate_logprobs",
]
