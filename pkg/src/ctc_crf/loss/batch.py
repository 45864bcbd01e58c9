from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from ..errors import ConfigError, EmptyInputError
from ..graphs import WeightedFsa
from ..labellm import NGramLabelLm
from .crf import crf_loss
from .ctc import ctc_loss
from .types import LossResult

LossKind = Literal["ctc", "ctc_crf"]


@dataclass(slots=True, frozen=True)
class BatchLossResult:
    loss: float
    losses: tuple[float, ...]
    grads: tuple[np.ndarray, ...]


def sequence_loss(
    kind: LossKind,
    logprobs: np.ndarray,
    labels: Sequence[int],
    den: WeightedFsa | None = None,
    lm: NGramLabelLm | None = None,
    validate: bool = True,
) -> LossResult:
    if kind == "ctc":
        return ctc_loss(logprobs, labels, validate=validate)
    if kind == "ctc_crf":
        if den is None or lm is None:
            raise ConfigError("ctc_crf loss needs a denominator graph and a label LM")
        return crf_loss(logprobs, labels, den, lm, validate=validate)
    raise ConfigError(f"unknown loss kind {kind!r}")


def batch_loss(
    kind: LossKind,
    batch: Sequence[tuple[np.ndarray, Sequence[int]]],
    den: WeightedFsa | None = None,
    lm: NGramLabelLm | None = None,
) -> BatchLossResult:
    """Mean loss over utterances, each weighted equally; per-item gradients are scaled by 1/B."""
    if not batch:
        raise EmptyInputError("batch is empty")
    results = [sequence_loss(kind, lp, labels, den=den, lm=lm) for lp, labels in batch]
    scale = 1.0 / len(results)
    losses = tuple(r.loss for r in results)
    return BatchLossResult(
        loss=float(np.mean(losses)),
        losses=losses,
        grads=tuple(r.grad * scale for r in results),
    )
