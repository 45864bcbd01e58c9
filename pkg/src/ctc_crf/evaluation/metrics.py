from __future__ import annotations

import abc
from typing import Sequence

from ..errors import LengthError

TokenSeq = Sequence[int]


def edit_distance(ref: TokenSeq, hyp: TokenSeq) -> int:
    """Levenshtein distance with unit substitution, deletion and insertion costs."""
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, 1):
        cur = [i] + [0] * len(hyp)
        for j, h in enumerate(hyp, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (r != h))
        prev = cur
    return prev[-1]


def _check_parallel(hyps: Sequence[TokenSeq], refs: Sequence[TokenSeq]) -> None:
    if len(hyps) != len(refs):
        raise LengthError(f"{len(hyps)} hypotheses but {len(refs)} references")


def token_error_rate(hyps: Sequence[TokenSeq], refs: Sequence[TokenSeq]) -> float:
    """100 * total edits / total reference tokens."""
    _check_parallel(hyps, refs)
    edits = sum(edit_distance(r, h) for h, r in zip(hyps, refs))
    return 100.0 * edits / max(sum(len(r) for r in refs), 1)


class Metric(abc.ABC):
    name: str

    @abc.abstractmethod
    def compute(self, *, hyps: Sequence[TokenSeq], refs: Sequence[TokenSeq]) -> float:
        """Return the metric value over a whole corpus split."""


class MetricSuite:
    def __init__(self, metrics: Sequence[Metric]):
        self._metrics = metrics

    def evaluate(self, *, hyps: Sequence[TokenSeq], refs: Sequence[TokenSeq]) -> dict[str, float]:
        return {metric.name: metric.compute(hyps=hyps, refs=refs) for metric in self._metrics}


class TokenErrorRate(Metric):
    name = "ter"

    def compute(self, *, hyps, refs) -> float:
        return token_error_rate(hyps, refs)


class SentenceErrorRate(Metric):
    name = "ser"

    def compute(self, *, hyps, refs) -> float:
        _check_parallel(hyps, refs)
        if not refs:
            return 0.0
        wrong = sum(tuple(h) != tuple(r) for h, r in zip(hyps, refs))
        return 100.0 * wrong / len(refs)


def default_suite() -> MetricSuite:
    return MetricSuite([TokenErrorRate(), SentenceErrorRate()])
