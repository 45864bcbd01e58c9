"""Unigram wordpiece training.

Seed pieces are frequent substrings plus every covered character. Piece
probabilities are re-estimated by EM over each word's segmentation lattice
and the least useful multi-character pieces are pruned until the target
vocabulary size is reached.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..errors import EmptyInputError, InfeasibleSizeError
from ..settings import TokenizerConfig
from .model import (
    BOUNDARY_SYMBOLS,
    UNK,
    Piece,
    PieceKind,
    TokenizerModel,
)
from .normalize import WORD_BOUNDARY, normalize_word

logger = logging.getLogger(__name__)

# Penalty, relative to the least likely learned piece, for unk and reserved pieces.
SPECIAL_PIECE_PENALTY = 10.0
MIN_EXPECTED_COUNT = 1e-12


def count_words(words: Iterable[str] | Mapping[str, int]) -> Counter[str]:
    """Normalize and count words; a mapping is read as word -> count."""
    items = words.items() if isinstance(words, Mapping) else ((w, 1) for w in words)
    counts: Counter[str] = Counter()
    for word, count in items:
        normalized = normalize_word(word)
        if normalized and count > 0:
            counts[normalized] += int(count)
    return counts


def select_characters(counts: Mapping[str, int], coverage: float) -> list[str]:
    """Most frequent characters covering ``coverage`` of all character occurrences."""
    freq: Counter[str] = Counter()
    for word, count in counts.items():
        for ch in word:
            freq[ch] += count
    total = sum(freq.values())
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    kept: list[str] = []
    covered = 0
    for ch, n in ranked:
        if kept and covered >= coverage * total:
            break
        kept.append(ch)
        covered += n
    return kept


@dataclass(slots=True)
class LatticeStats:
    log_likelihood: float
    expected: dict[str, float]


@dataclass(slots=True)
class UnigramTrainer:
    config: TokenizerConfig
    words: Counter[str]
    characters: list[str]
    log_probs: dict[str, float] = field(default_factory=dict)
    unk_log_prob: float = math.log(MIN_EXPECTED_COUNT)
    history: list[float] = field(default_factory=list)

    @property
    def max_len(self) -> int:
        return max((len(p) for p in self.log_probs), default=1)

    def multi_pieces(self) -> list[str]:
        return [p for p in self.log_probs if len(p) > 1]

    def _strings(self) -> list[tuple[str, int]]:
        return [(WORD_BOUNDARY + w, c) for w, c in self.words.items()]

    def seed(self) -> None:
        kept = set(self.characters) | {WORD_BOUNDARY}
        freq: Counter[str] = Counter()
        for text, count in self._strings():
            for start in range(len(text)):
                for end in range(start + 1, min(len(text), start + self.config.max_piece_length) + 1):
                    piece = text[start:end]
                    if piece[-1] not in kept:
                        break
                    freq[piece] += count
        chars = {p: n for p, n in freq.items() if len(p) == 1}
        multi = {p: n for p, n in freq.items() if len(p) > 1 and n >= self.config.min_frequency}
        total = sum(chars.values()) + sum(multi.values())
        self.log_probs = {p: math.log(n / total) for p, n in {**chars, **multi}.items()}
        logger.debug(
            "Seeded unigram candidates",
            extra={"characters": len(chars), "multi_pieces": len(multi)},
        )

    def lattice(self, text: str) -> tuple[float, dict[str, float]]:
        """Forward-backward over one segmentation lattice; returns (logZ, posteriors)."""
        n = len(text)
        max_len = self.max_len
        lp = self.log_probs
        alpha = np.full(n + 1, -np.inf)
        beta = np.full(n + 1, -np.inf)
        alpha[0] = 0.0
        beta[n] = 0.0

        def edges(start: int, end: int) -> float | None:
            piece = text[start:end]
            if piece in lp:
                return lp[piece]
            if end - start == 1:
                return self.unk_log_prob
            return None

        for end in range(1, n + 1):
            for start in range(max(0, end - max_len), end):
                w = edges(start, end)
                if w is not None:
                    alpha[end] = np.logaddexp(alpha[end], alpha[start] + w)
        for start in range(n - 1, -1, -1):
            for end in range(start + 1, min(n, start + max_len) + 1):
                w = edges(start, end)
                if w is not None:
                    beta[start] = np.logaddexp(beta[start], beta[end] + w)

        log_z = float(alpha[n])
        posteriors: dict[str, float] = {}
        for end in range(1, n + 1):
            for start in range(max(0, end - max_len), end):
                piece = text[start:end]
                if piece in lp:
                    post = math.exp(alpha[start] + lp[piece] + beta[end] - log_z)
                    posteriors[piece] = posteriors.get(piece, 0.0) + post
        return log_z, posteriors

    def em_step(self) -> float:
        """One EM iteration; returns the corpus log-likelihood under the parameters before the update."""
        expected: dict[str, float] = {p: 0.0 for p in self.log_probs}
        total_ll = 0.0
        for text, count in self._strings():
            log_z, posteriors = self.lattice(text)
            total_ll += count * log_z
            for piece, post in posteriors.items():
                expected[piece] += count * post
        norm = sum(max(v, MIN_EXPECTED_COUNT) for v in expected.values())
        self.log_probs = {p: math.log(max(v, MIN_EXPECTED_COUNT) / norm) for p, v in expected.items()}
        self.history.append(total_ll)
        return total_ll

    def viterbi(self, text: str, exclude: str | None = None) -> tuple[float, list[str]]:
        n = len(text)
        max_len = self.max_len
        best = [-math.inf] * (n + 1)
        back: list[tuple[int, str]] = [(0, "")] * (n + 1)
        best[0] = 0.0
        for end in range(1, n + 1):
            for start in range(max(0, end - max_len), end):
                piece = text[start:end]
                w = None if piece == exclude else self.log_probs.get(piece)
                if w is None and end - start == 1:
                    w = self.unk_log_prob
                if w is None or best[start] == -math.inf:
                    continue
                if best[start] + w > best[end]:
                    best[end] = best[start] + w
                    back[end] = (start, piece)
        pieces: list[str] = []
        pos = n
        while pos > 0:
            start, piece = back[pos]
            pieces.append(piece)
            pos = start
        return best[n], pieces[::-1]

    def prune(self, target_multi: int) -> int:
        """Drop the lowest-loss share of multi-character pieces; returns how many were removed."""
        usage: Counter[str] = Counter()
        for text, count in self._strings():
            _, pieces = self.viterbi(text)
            for piece in pieces:
                usage[piece] += count

        losses: list[tuple[float, str]] = []
        for piece in self.multi_pieces():
            if usage[piece] == 0:
                losses.append((0.0, piece))
                continue
            alt_score, _ = self.viterbi(piece, exclude=piece)
            losses.append((usage[piece] * (self.log_probs[piece] - alt_score), piece))

        prunable = len(losses)
        n_remove = min(math.ceil(self.config.shrink_ratio * prunable), prunable - target_multi)
        losses.sort()
        for _, piece in losses[:n_remove]:
            del self.log_probs[piece]
        return n_remove


def _finalize(
    log_probs: Mapping[str, float],
    reserved: list[str],
    mode: str,
    boundary_marker: bool,
) -> TokenizerModel:
    learned = sorted(log_probs.items(), key=lambda kv: (-kv[1], kv[0]))
    special = min(log_probs.values()) - SPECIAL_PIECE_PENALTY
    excluded = tuple(s for s in reserved if s in BOUNDARY_SYMBOLS)
    specials = [s for s in reserved if s not in BOUNDARY_SYMBOLS]

    raw: list[tuple[str, float, PieceKind]] = []
    for sym in specials:
        kind = PieceKind.UNKNOWN if sym == UNK else PieceKind.RESERVED
        raw.append((sym, special, kind))
    raw.extend((p, w, PieceKind.NORMAL) for p, w in learned)

    log_norm = float(np.logaddexp.reduce([w for _, w, _ in raw]))
    pieces = tuple(Piece(text, min(w - log_norm, 0.0), kind) for text, w, kind in raw)
    return TokenizerModel(
        pieces=pieces,
        mode=mode,  # type: ignore[arg-type]
        unk_id=specials.index(UNK),
        boundary_marker=boundary_marker,
        excluded=excluded,
    )


def _reserved_symbols(config: TokenizerConfig) -> list[str]:
    reserved = list(dict.fromkeys(config.reserved))
    if UNK not in reserved:
        reserved.insert(0, UNK)
    return reserved


def train_char(
    words: Iterable[str] | Mapping[str, int],
    config: TokenizerConfig,
) -> TokenizerModel:
    counts = count_words(words)
    if not counts:
        raise EmptyInputError("tokenizer corpus is empty")
    reserved = _reserved_symbols(config)
    characters = select_characters(counts, config.character_coverage)
    if config.vocab_size < len(characters) + len(reserved):
        raise InfeasibleSizeError(
            f"target size {config.vocab_size} is below the {len(characters)} characters "
            f"plus {len(reserved)} reserved symbols"
        )
    freq: Counter[str] = Counter()
    for word, count in counts.items():
        for ch in word:
            if ch in characters:
                freq[ch] += count
    total = sum(freq.values())
    log_probs = {ch: math.log(freq[ch] / total) for ch in characters}
    model = _finalize(log_probs, reserved, "char", boundary_marker=False)
    logger.info("Trained char tokenizer", extra={"pieces": len(model)})
    return model


def train_unigram(
    words: Iterable[str] | Mapping[str, int],
    config: TokenizerConfig,
) -> TokenizerModel:
    """Train a unigram model; the result holds ``vocab_size`` minus excluded boundary symbols pieces."""
    if config.mode == "char":
        return train_char(words, config)

    counts = count_words(words)
    if not counts:
        raise EmptyInputError("tokenizer corpus is empty")
    reserved = _reserved_symbols(config)
    characters = select_characters(counts, config.character_coverage)
    num_chars = len(set(characters) | {WORD_BOUNDARY})
    if config.vocab_size < num_chars + len(reserved):
        raise InfeasibleSizeError(
            f"target size {config.vocab_size} is below the {num_chars} characters "
            f"plus {len(reserved)} reserved symbols"
        )

    target_multi = config.vocab_size - len(reserved) - num_chars
    trainer = UnigramTrainer(config=config, words=counts, characters=characters)
    trainer.seed()
    available = len(trainer.multi_pieces())
    if available < target_multi:
        raise InfeasibleSizeError(
            f"corpus yields only {available} candidate pieces, {target_multi} are needed "
            f"for a vocabulary of {config.vocab_size}"
        )
    trainer.unk_log_prob = min(trainer.log_probs.values()) - SPECIAL_PIECE_PENALTY

    round_no = 0
    while True:
        for _ in range(config.em_iterations):
            trainer.em_step()
        if len(trainer.multi_pieces()) <= target_multi:
            break
        removed = trainer.prune(target_multi)
        round_no += 1
        logger.debug(
            "Pruned unigram candidates",
            extra={"round": round_no, "removed": removed, "remaining": len(trainer.log_probs)},
        )
    for _ in range(config.em_iterations):
        trainer.em_step()

    model = _finalize(trainer.log_probs, reserved, "unigram", boundary_marker=True)
    logger.info(
        "Trained unigram tokenizer",
        extra={
            "pieces": len(model),
            "characters": num_chars,
            "log_likelihood": trainer.history[-1] if trainer.history else None,
        },
    )
    return model
