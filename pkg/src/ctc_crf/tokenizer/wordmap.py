from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import EmptyInputError, FormatError, VocabularyError
from .model import TokenizerModel, encode_word
from .normalize import normalize_word

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class WordMap:
    """Normalized training word -> piece ids."""

    entries: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: object) -> bool:
        return word in self.entries

    def lookup(self, word: str) -> tuple[int, ...]:
        key = normalize_word(word)
        if key not in self.entries:
            raise VocabularyError(f"word {word!r} is not in the word map")
        return self.entries[key]

    def reverse(self) -> dict[tuple[int, ...], str]:
        return {ids: word for word, ids in self.entries.items()}

    def ids_to_words(self, ids: Sequence[int]) -> list[str]:
        """Greedy longest-match of a decoded id stream back onto map entries."""
        reverse = self.reverse()
        longest = max((len(k) for k in reverse), default=0)
        words: list[str] = []
        pos = 0
        while pos < len(ids):
            for width in range(min(longest, len(ids) - pos), 0, -1):
                key = tuple(ids[pos : pos + width])
                if key in reverse:
                    words.append(reverse[key])
                    pos += width
                    break
            else:
                raise VocabularyError(f"no word map entry starts with id {ids[pos]} at position {pos}")
        return words

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for word, ids in self.entries.items():
                fh.write(f"{word}\t{' '.join(str(i) for i in ids)}\n")

    @classmethod
    def load(cls, path: Path) -> WordMap:
        entries: dict[str, tuple[int, ...]] = {}
        for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            word, sep, ids = line.partition("\t")
            if not sep:
                raise FormatError(f"{path}:{line_no}: expected word<TAB>ids")
            try:
                entries[word] = tuple(int(x) for x in ids.split())
            except ValueError as exc:
                raise FormatError(f"{path}:{line_no}: non-integer piece id") from exc
        return cls(entries)


def build_word_map(model: TokenizerModel, words: Iterable[str]) -> WordMap:
    entries: dict[str, tuple[int, ...]] = {}
    seen = 0
    for word in words:
        seen += 1
        key = normalize_word(word)
        if not key:
            logger.warning("Skipping word that normalizes to nothing", extra={"word": word})
            continue
        if key not in entries:
            entries[key] = tuple(encode_word(model, key))
    if not seen:
        raise EmptyInputError("word list is empty")
    logger.info("Built word map", extra={"words": seen, "entries": len(entries)})
    return WordMap(entries)
