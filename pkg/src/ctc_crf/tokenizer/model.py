from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Literal, Sequence

from ..errors import EmptyInputError, FormatError, TokenIndexError
from .normalize import WORD_BOUNDARY, normalize_word

logger = logging.getLogger(__name__)

UNK = "<unk>"
BOUNDARY_SYMBOLS = ("<s>", "</s>")
MODEL_HEADER = "#ctc-crf-tokenizer"
MODEL_VERSION = 1

TokenizerMode = Literal["unigram", "char"]


class PieceKind(str, Enum):
    NORMAL = "normal"
    UNKNOWN = "unk"
    RESERVED = "reserved"


@dataclass(slots=True, frozen=True)
class Piece:
    text: str
    log_prob: float
    kind: PieceKind = PieceKind.NORMAL


@dataclass(slots=True, frozen=True)
class Segmentation:
    ids: tuple[int, ...]
    score: float


@dataclass(frozen=True)
class TokenizerModel:
    pieces: tuple[Piece, ...]
    mode: TokenizerMode
    unk_id: int
    boundary_marker: bool = True
    excluded: tuple[str, ...] = ()
    _index: dict[str, int] = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, int] = {}
        for i, piece in enumerate(self.pieces):
            if not piece.text:
                raise FormatError(f"piece {i} is empty")
            if piece.text in index:
                raise FormatError(f"duplicate piece {piece.text!r}")
            if not math.isfinite(piece.log_prob) or piece.log_prob > 0.0:
                raise FormatError(f"piece {piece.text!r} has invalid log-probability {piece.log_prob}")
            index[piece.text] = i
        if not 0 <= self.unk_id < len(self.pieces) or self.pieces[self.unk_id].kind != PieceKind.UNKNOWN:
            raise FormatError(f"unk_id {self.unk_id} does not name an unknown-piece entry")
        normal = [p.text for p in self.pieces if p.kind == PieceKind.NORMAL]
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_max_len", max((len(t) for t in normal), default=1))

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def vocab_size(self) -> int:
        return len(self.pieces)

    def piece_id(self, text: str) -> int | None:
        idx = self._index.get(text)
        if idx is None or self.pieces[idx].kind != PieceKind.NORMAL:
            return None
        return idx

    def prepare(self, word: str) -> str:
        """Normalized segmentation string for ``word``."""
        normalized = normalize_word(word)
        if not normalized:
            raise EmptyInputError("cannot encode an empty word")
        if self.mode == "unigram" and self.boundary_marker:
            return WORD_BOUNDARY + normalized
        return normalized

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        header = [
            MODEL_HEADER,
            f"version={MODEL_VERSION}",
            f"mode={self.mode}",
            f"unk_id={self.unk_id}",
            f"boundary_marker={int(self.boundary_marker)}",
            f"excluded={','.join(self.excluded)}",
        ]
        with path.open("w", encoding="utf-8") as fh:
            fh.write("\t".join(header) + "\n")
            for piece in self.pieces:
                fh.write(f"{piece.text}\t{piece.log_prob!r}\t{piece.kind.value}\n")

    @classmethod
    def load(cls, path: Path) -> TokenizerModel:
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines or not lines[0].startswith(MODEL_HEADER):
            raise FormatError(f"{path}: missing tokenizer header")
        meta = dict(item.split("=", 1) for item in lines[0].split("\t")[1:] if "=" in item)
        if int(meta.get("version", "0")) != MODEL_VERSION:
            raise FormatError(f"{path}: unsupported tokenizer version {meta.get('version')}")
        pieces = []
        for line_no, line in enumerate(lines[1:], 2):
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError(f"{path}:{line_no}: expected 3 tab-separated fields")
            try:
                pieces.append(Piece(fields[0], float(fields[1]), PieceKind(fields[2])))
            except ValueError as exc:
                raise FormatError(f"{path}:{line_no}: {exc}") from exc
        mode = meta.get("mode", "unigram")
        if mode not in ("unigram", "char"):
            raise FormatError(f"{path}: unknown mode {mode!r}")
        excluded = tuple(x for x in meta.get("excluded", "").split(",") if x)
        return cls(
            pieces=tuple(pieces),
            mode=mode,  # type: ignore[arg-type]
            unk_id=int(meta.get("unk_id", "0")),
            boundary_marker=meta.get("boundary_marker", "1") == "1",
            excluded=excluded,
        )


def viterbi_segment(model: TokenizerModel, text: str) -> Segmentation:
    """Best segmentation of an already prepared string; unknown characters cost one unk each."""
    n = len(text)
    unk_logp = model.pieces[model.unk_id].log_prob
    best = [-math.inf] * (n + 1)
    back: list[tuple[int, int]] = [(0, -1)] * (n + 1)
    best[0] = 0.0
    for end in range(1, n + 1):
        for length in range(1, min(model._max_len, end) + 1):
            start = end - length
            if best[start] == -math.inf:
                continue
            piece_id = model.piece_id(text[start:end])
            if piece_id is None:
                continue
            score = best[start] + model.pieces[piece_id].log_prob
            if score > best[end]:
                best[end] = score
                back[end] = (start, piece_id)
        if model.piece_id(text[end - 1]) is None:
            score = best[end - 1] + unk_logp
            if score > best[end]:
                best[end] = score
                back[end] = (end - 1, model.unk_id)

    ids: list[int] = []
    pos = n
    while pos > 0:
        start, piece_id = back[pos]
        ids.append(piece_id)
        pos = start
    ids.reverse()
    return Segmentation(tuple(ids), best[n])


def segment_word(model: TokenizerModel, word: str) -> Segmentation:
    text = model.prepare(word)
    if model.mode == "char":
        ids = []
        for ch in text:
            piece_id = model.piece_id(ch)
            ids.append(model.unk_id if piece_id is None else piece_id)
        return Segmentation(tuple(ids), sum(model.pieces[i].log_prob for i in ids))
    return viterbi_segment(model, text)


def encode_word(model: TokenizerModel, word: str) -> list[int]:
    return list(segment_word(model, word).ids)


def decode_ids(model: TokenizerModel, ids: Sequence[int]) -> str:
    parts = []
    for i in ids:
        if not 0 <= i < len(model.pieces):
            raise TokenIndexError(f"piece id {i} out of range for vocabulary of {len(model.pieces)}")
        parts.append(model.pieces[i].text)
    return "".join(parts).replace(WORD_BOUNDARY, " ").strip(" ")
