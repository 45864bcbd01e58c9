"""Backoff n-gram models over integer label sequences.

Labels are ``0..V-1``; sentence end is ``V`` and sentence start is ``V + 1``.
Sentence start only ever appears in histories.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import ConfigError, EmptyInputError, VocabularyError

logger = logging.getLogger(__name__)

MAX_ORDER = 4
History = tuple[int, ...]


@dataclass(slots=True)
class ContextEntry:
    """Explicit next-symbol log-probabilities; ``backoff`` None means no mass is left for backoff."""

    probs: dict[int, float] = field(default_factory=dict)
    backoff: float | None = None


@dataclass(slots=True)
class NGramLabelLm:
    order: int
    vocab_size: int
    contexts: dict[History, ContextEntry]

    def __post_init__(self) -> None:
        if not 1 <= self.order <= MAX_ORDER:
            raise ConfigError(f"n-gram order must be in [1, {MAX_ORDER}], got {self.order}")
        if self.vocab_size < 1:
            raise ConfigError(f"label vocabulary must be non-empty, got {self.vocab_size}")
        for history, entry in self.contexts.items():
            if len(history) >= self.order:
                raise ConfigError(f"history {history} is too long for order {self.order}")
            for label, logp in entry.probs.items():
                if not 0 <= label <= self.eos:
                    raise VocabularyError(f"context {history} predicts unknown symbol {label}")
                if not logp <= 1e-12:
                    raise ConfigError(f"log-probability {logp} for {history} -> {label} is positive")

    @property
    def eos(self) -> int:
        return self.vocab_size

    @property
    def bos(self) -> int:
        return self.vocab_size + 1

    @property
    def start_history(self) -> History:
        return (self.bos,) if self.order > 1 else ()

    def resolve(self, history: Sequence[int]) -> History:
        """Longest suffix of ``history`` (capped at order - 1) that is a stored context."""
        h = tuple(history)[-(self.order - 1) :] if self.order > 1 else ()
        while h and h not in self.contexts:
            h = h[1:]
        return h

    def conditional_log_prob(self, history: Sequence[int], label: int) -> float:
        if not 0 <= label <= self.eos:
            raise VocabularyError(f"label {label} outside vocabulary of size {self.vocab_size}")
        h = self.resolve(history)
        total = 0.0
        while True:
            entry = self.contexts.get(h)
            if entry is not None:
                if label in entry.probs:
                    return total + entry.probs[label]
                if entry.backoff is None:
                    return -math.inf
                total += entry.backoff
            if not h:
                return -math.inf
            h = self.resolve(h[1:])

    def max_normalization_error(self) -> float:
        worst = 0.0
        for history in self.contexts:
            mass = sum(math.exp(self.conditional_log_prob(history, w)) for w in range(self.eos + 1))
            worst = max(worst, abs(mass - 1.0))
        return worst


def default_lm_order(unit: str) -> int:
    return 2 if unit == "wordpiece" else 4


def score_sequence(lm: NGramLabelLm, labels: Sequence[int]) -> float:
    """log p(labels) including the sentence-end term."""
    history: list[int] = list(lm.start_history)
    total = 0.0
    for label in labels:
        if not 0 <= label < lm.vocab_size:
            raise VocabularyError(f"label {label} outside vocabulary of size {lm.vocab_size}")
        total += lm.conditional_log_prob(history, label)
        history.append(int(label))
    return total + lm.conditional_log_prob(history, lm.eos)


def estimate_ngram(
    sequences: Iterable[Sequence[int]],
    order: int,
    vocab_size: int | None = None,
) -> NGramLabelLm:
    """Witten-Bell smoothed backoff model.

    The unigram level is interpolated with a uniform distribution over labels
    and sentence end, so every label keeps non-zero probability.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ConfigError(f"n-gram order must be in [1, {MAX_ORDER}], got {order}")
    corpus = [tuple(int(x) for x in seq) for seq in sequences]
    if not corpus:
        raise EmptyInputError("label corpus is empty")
    seen_max = max((max(seq) for seq in corpus if seq), default=-1)
    if vocab_size is None:
        vocab_size = seen_max + 1
    if vocab_size < 1:
        raise EmptyInputError("label corpus contains no labels and no vocabulary size was given")
    if seen_max >= vocab_size or any(x < 0 for seq in corpus for x in seq):
        raise VocabularyError(f"corpus labels exceed vocabulary of size {vocab_size}")

    eos, bos = vocab_size, vocab_size + 1
    counts: dict[History, Counter[int]] = defaultdict(Counter)
    for seq in corpus:
        padded = (bos, *seq, eos)
        for i in range(1, len(padded)):
            for k in range(0, min(order - 1, i) + 1):
                counts[padded[i - k : i]][padded[i]] += 1

    num_symbols = vocab_size + 1
    contexts: dict[History, ContextEntry] = {}

    def lower(history: History, label: int) -> float:
        if not history:
            return math.log(1.0 / num_symbols)
        return resolved(history[1:], label)

    def resolved(history: History, label: int) -> float:
        while history not in contexts:
            history = history[1:]
        entry = contexts[history]
        if label in entry.probs:
            return entry.probs[label]
        assert entry.backoff is not None
        return entry.backoff + resolved(history[1:], label)

    for history in sorted(counts, key=len):
        c = counts[history]
        total = sum(c.values())
        types = len(c)
        denom = total + types
        backoff = math.log(types / denom)
        predicted = range(num_symbols) if not history else sorted(c)
        probs = {}
        for label in predicted:
            lower_p = math.exp(lower(history, label))
            probs[label] = math.log((c.get(label, 0) + types * lower_p) / denom)
        contexts[history] = ContextEntry(probs=probs, backoff=None if not history else backoff)

    lm = NGramLabelLm(order=order, vocab_size=vocab_size, contexts=contexts)
    logger.info(
        "Estimated label n-gram",
        extra={"order": order, "vocab_size": vocab_size, "sequences": len(corpus), "contexts": len(contexts)},
    )
    return lm
