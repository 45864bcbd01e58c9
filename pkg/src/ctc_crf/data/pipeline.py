from __future__ import annotations

import abc
from pathlib import Path
from typing import Iterable

from .corpus import write_split
from .types import Utterance


class BaseCorpusPipeline(abc.ABC):
    """Blueprint for pipelines that materialize corpus splits on disk."""

    splits: tuple[str, ...] = ("train", "test")

    @abc.abstractmethod
    def build(self, split: str) -> Iterable[Utterance]:
        """Produce the utterances of ``split``."""

    def persist(self, split: str, utterances: Iterable[Utterance], output_dir: Path) -> int:
        return write_split(output_dir, split, utterances)

    def run(self, output_dir: Path) -> dict[str, int]:
        return {split: self.persist(split, self.build(split), output_dir) for split in self.splits}
