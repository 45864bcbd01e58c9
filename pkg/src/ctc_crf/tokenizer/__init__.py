"""Unigram wordpiece and char tokenization."""

from .model import (
    BOUNDARY_SYMBOLS,
    UNK,
    Piece,
    PieceKind,
    Segmentation,
    TokenizerModel,
    decode_ids,
    encode_word,
    segment_word,
    viterbi_segment,
)
from .normalize import WORD_BOUNDARY, normalize_text, normalize_word
from .unigram import UnigramTrainer, count_words, select_characters, train_char, train_unigram
from .wordmap import WordMap, build_word_map

__all__ = [
    "BOUNDARY_SYMBOLS",
    "Piece",
    "PieceKind",
    "Segmentation",
    "TokenizerModel",
    "UNK",
    "UnigramTrainer",
    "WORD_BOUNDARY",
    "WordMap",
    "build_word_map",
    "count_words",
    "decode_ids",
    "encode_word",
    "normalize_text",
    "normalize_word",
    "segment_word",
    "select_characters",
    "train_char",
    "train_unigram",
    "viterbi_segment",
]
