from __future__ import annotations

from typing import Sequence

from ..errors import ConfigError, VocabularyError
from .fsa import EPSILON, WeightedFsa

StateSequence = tuple[int, ...]
LabelSequence = tuple[int, ...]


def blank_id(vocab_size: int) -> int:
    """The blank symbol is the last logit column."""
    return vocab_size


def collapse(pi: Sequence[int], blank: int) -> LabelSequence:
    """Merge consecutive repeats, then drop blanks."""
    out: list[int] = []
    prev = None
    for sym in pi:
        if sym != prev and sym != blank:
            out.append(int(sym))
        prev = sym
    return tuple(out)


def _check_vocab(vocab_size: int) -> None:
    if vocab_size < 1:
        raise ConfigError(f"vocabulary size must be >= 1, got {vocab_size}")


def build_ctc_topology(vocab_size: int) -> WeightedFsa:
    """Zero-weight transducer from state sequences to collapsed labels.

    State 0 is the start, state ``k + 1`` remembers label ``k`` as the last
    symbol read and state ``V + 1`` remembers a blank. A label is emitted on
    the output side when its run starts.
    """
    _check_vocab(vocab_size)
    blank = blank_id(vocab_size)
    blank_state = vocab_size + 1
    arcs = []
    for src in range(vocab_size + 2):
        for sym in range(vocab_size + 1):
            if sym == blank:
                arcs.append((src, blank_state, sym, EPSILON, 0.0))
            else:
                out = EPSILON if src == sym + 1 else sym
                arcs.append((src, sym + 1, sym, out, 0.0))
    finals = {s: 0.0 for s in range(1, vocab_size + 2)}
    return WeightedFsa.from_arcs(vocab_size + 2, arcs, finals, vocab_size=vocab_size, transducer=True)


def build_numerator(labels: Sequence[int], vocab_size: int) -> WeightedFsa:
    """The 2U+1 position CTC lattice for ``labels`` plus a start state.

    Even positions are blanks, odd positions are labels. An empty sequence
    leaves only the all-blank path.
    """
    _check_vocab(vocab_size)
    labels = tuple(int(x) for x in labels)
    for label in labels:
        if not 0 <= label < vocab_size:
            raise VocabularyError(f"label {label} outside vocabulary of size {vocab_size}")
    blank = blank_id(vocab_size)
    ext = [blank]
    for label in labels:
        ext.extend([int(label), blank])

    # lattice position j lives in state j + 1
    arcs = [(0, 1, blank, 0.0)]
    if labels:
        arcs.append((0, 2, ext[1], 0.0))
    for j, sym in enumerate(ext):
        arcs.append((j + 1, j + 1, sym, 0.0))
        if j + 1 < len(ext):
            arcs.append((j + 1, j + 2, ext[j + 1], 0.0))
        if j + 2 < len(ext) and ext[j + 2] != blank and ext[j + 2] != sym:
            arcs.append((j + 1, j + 3, ext[j + 2], 0.0))
    finals = {len(ext): 0.0}
    if labels:
        finals[len(ext) - 1] = 0.0
    return WeightedFsa.from_arcs(len(ext) + 1, arcs, finals, vocab_size=vocab_size)
