"""Markov label grammars with Gaussian frame emissions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import orjson

from ..data.pipeline import BaseCorpusPipeline
from ..data.types import Utterance
from ..errors import ConfigError
from ..settings import SynthConfig

logger = logging.getLogger(__name__)

GRAMMAR_FILE = "grammar.json"


@dataclass(slots=True, frozen=True)
class SyntheticGrammar:
    transitions: np.ndarray
    initial: np.ndarray
    means: np.ndarray
    sigma: float
    min_duration: int
    max_duration: int
    min_labels: int
    max_labels: int

    def __post_init__(self) -> None:
        v = self.means.shape[0]
        if self.transitions.shape != (v, v) or self.initial.shape != (v,):
            raise ConfigError("transition matrix, initial distribution and means disagree on vocabulary size")
        if np.any(self.transitions < 0) or not np.allclose(self.transitions.sum(axis=1), 1.0, atol=1e-9):
            raise ConfigError("transition rows must be distributions")
        if np.any(self.initial < 0) or abs(self.initial.sum() - 1.0) > 1e-9:
            raise ConfigError("initial distribution must sum to 1")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")
        if not 1 <= self.min_duration <= self.max_duration:
            raise ConfigError("durations must satisfy 1 <= min <= max")
        if not 1 <= self.min_labels <= self.max_labels:
            raise ConfigError("label counts must satisfy 1 <= min <= max")

    @property
    def vocab_size(self) -> int:
        return int(self.means.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.means.shape[1])

    def to_dict(self) -> dict[str, Any]:
        return {
            "transitions": self.transitions,
            "initial": self.initial,
            "means": self.means,
            "sigma": self.sigma,
            "min_duration": self.min_duration,
            "max_duration": self.max_duration,
            "min_labels": self.min_labels,
            "max_labels": self.max_labels,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SyntheticGrammar:
        return cls(
            transitions=np.asarray(data["transitions"], dtype=np.float64),
            initial=np.asarray(data["initial"], dtype=np.float64),
            means=np.asarray(data["means"], dtype=np.float64),
            sigma=float(data["sigma"]),
            min_duration=int(data["min_duration"]),
            max_duration=int(data["max_duration"]),
            min_labels=int(data["min_labels"]),
            max_labels=int(data["max_labels"]),
        )

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(orjson.dumps(self.to_dict(), option=orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2))

    @classmethod
    def load(cls, path: Path) -> SyntheticGrammar:
        return cls.from_dict(orjson.loads(path.read_bytes()))


def stationary_distribution(transitions: np.ndarray) -> np.ndarray:
    """Left eigenvector of the transition matrix for eigenvalue 1, normalized to a distribution."""
    values, vectors = np.linalg.eig(transitions.T)
    vec = np.real(vectors[:, np.argmin(np.abs(values - 1.0))])
    vec = np.abs(vec)
    return vec / vec.sum()


def default_grammar(config: SynthConfig | None = None, seed: int = 0) -> SyntheticGrammar:
    """Random chain without self-transitions, started from its stationary distribution."""
    config = config or SynthConfig()
    rng = np.random.default_rng(seed)
    v = config.vocab_size
    if v == 1:
        transitions = np.ones((1, 1))
    else:
        transitions = rng.dirichlet(np.ones(v - 1), size=v)
        transitions = np.stack([np.insert(row, i, 0.0) for i, row in enumerate(transitions)])
    means = rng.standard_normal((v, config.feature_dim))
    return SyntheticGrammar(
        transitions=transitions,
        initial=stationary_distribution(transitions),
        means=means,
        sigma=config.sigma,
        min_duration=config.min_duration,
        max_duration=config.max_duration,
        min_labels=config.min_labels,
        max_labels=config.max_labels,
    )


def _sample_utterance(grammar: SyntheticGrammar, rng: np.random.Generator, utt_id: str) -> Utterance:
    num_labels = int(rng.integers(grammar.min_labels, grammar.max_labels + 1))
    labels = [int(rng.choice(grammar.vocab_size, p=grammar.initial))]
    for _ in range(num_labels - 1):
        labels.append(int(rng.choice(grammar.vocab_size, p=grammar.transitions[labels[-1]])))
    durations = rng.integers(grammar.min_duration, grammar.max_duration + 1, size=num_labels)
    segments = []
    for label, duration in zip(labels, durations):
        noise = rng.standard_normal((int(duration), grammar.feature_dim))
        segments.append(grammar.means[label] + grammar.sigma * noise)
    return Utterance(
        utt_id=utt_id,
        features=np.concatenate(segments, axis=0),
        labels=tuple(labels),
        metadata={"durations": durations.tolist()},
    )


def generate(grammar: SyntheticGrammar, num_utts: int, seed: int, prefix: str = "utt") -> list[Utterance]:
    """Deterministic under ``seed``; each utterance draws from its own spawned stream."""
    children = np.random.SeedSequence(seed).spawn(num_utts)
    width = max(len(str(num_utts - 1)), 1)
    return [
        _sample_utterance(grammar, np.random.default_rng(child), f"{prefix}{i:0{width}d}")
        for i, child in enumerate(children)
    ]


class SyntheticCorpusPipeline(BaseCorpusPipeline):
    def __init__(self, grammar: SyntheticGrammar, config: SynthConfig, seed: int):
        self.grammar = grammar
        self.config = config
        self.seed = seed

    def build(self, split: str) -> list[Utterance]:
        if split == "train":
            return generate(self.grammar, self.config.num_train, self.seed, prefix="train")
        return generate(self.grammar, self.config.num_test, self.seed + 1, prefix="test")

    def run(self, output_dir: Path) -> dict[str, int]:
        counts = super().run(output_dir)
        self.grammar.save(output_dir / GRAMMAR_FILE)
        return counts


def write_synthetic_corpus(output_dir: Path, config: SynthConfig, seed: int) -> dict[str, int]:
    grammar = default_grammar(config, seed)
    counts = SyntheticCorpusPipeline(grammar, config, seed).run(output_dir)
    logger.info("Generated synthetic corpus", extra={"path": str(output_dir), **counts})
    return counts
