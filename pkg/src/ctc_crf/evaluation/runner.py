from __future__ import annotations

import abc
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..data.types import Utterance
from ..features.cmvn import apply_cmvn
from ..features.types import FeatureMatrix
from ..train.decode import LogProbModel, greedy_decode
from .metrics import MetricSuite

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class DecodeReport:
    scores: dict[str, float]
    hypotheses: dict[str, tuple[int, ...]] = field(default_factory=dict)


class BaseEvaluator(abc.ABC):
    @abc.abstractmethod
    def iter_utterances(self) -> Iterable[Utterance]:
        """Yield evaluation utterances."""

    @abc.abstractmethod
    def evaluate(self) -> DecodeReport:
        """Run the evaluation suite."""


class DecodeEvaluator(BaseEvaluator):
    """Greedy-decodes a corpus split and scores it against the reference labels."""

    def __init__(
        self,
        *,
        model: LogProbModel,
        metrics: MetricSuite,
        utterances: Sequence[Utterance],
        use_cmvn: bool = False,
        split: str = "test",
    ):
        self.model = model
        self.metrics = metrics
        self.utterances = utterances
        self.use_cmvn = use_cmvn
        self.split = split

    def iter_utterances(self) -> Iterable[Utterance]:
        return iter(self.utterances)

    def evaluate(self) -> DecodeReport:
        total = len(self.utterances)
        logger.info("Starting decode evaluation", extra={"split": self.split, "utterances": total})
        hyps: dict[str, tuple[int, ...]] = {}
        refs: list[tuple[int, ...]] = []
        for idx, utt in enumerate(self.iter_utterances(), 1):
            feats = apply_cmvn(FeatureMatrix(utt.features)).frames if self.use_cmvn else utt.features
            hyps[utt.utt_id] = greedy_decode(self.model, feats)
            refs.append(utt.labels)
            if idx % 100 == 0:
                logger.info("Decode progress", extra={"progress": idx, "total": total})

        scores = self.metrics.evaluate(hyps=list(hyps.values()), refs=refs)
        for name, value in scores.items():
            logger.info(f"{name}: {value:.4f}", extra={"metric": name, "value": value, "split": self.split})
        return DecodeReport(scores=scores, hypotheses=hyps)
