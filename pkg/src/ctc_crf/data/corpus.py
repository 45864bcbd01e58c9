"""Corpus directories: ``<root>/<split>/feats/<utt_id>.cctf`` plus ``<root>/<split>/text``."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigError, FormatError
from ..utils import read_label_file, read_tensor, write_label_file, write_tensor
from .types import Utterance

logger = logging.getLogger(__name__)

LABEL_FILE = "text"
FEATS_DIR = "feats"


def write_split(root: Path, split: str, utterances: Iterable[Utterance]) -> int:
    split_dir = root / split
    feats_dir = split_dir / FEATS_DIR
    feats_dir.mkdir(parents=True, exist_ok=True)
    labels: dict[str, tuple[int, ...]] = {}
    for utt in utterances:
        write_tensor(feats_dir / f"{utt.utt_id}.cctf", utt.features)
        labels[utt.utt_id] = utt.labels
    write_label_file(split_dir / LABEL_FILE, labels)
    logger.info("Wrote corpus split", extra={"split": split, "utterances": len(labels), "path": str(split_dir)})
    return len(labels)


def read_split(root: Path, split: str) -> list[Utterance]:
    split_dir = root / split
    label_path = split_dir / LABEL_FILE
    if not label_path.exists():
        raise FormatError(f"{split_dir} has no {LABEL_FILE} file")
    utterances = []
    for utt_id, labels in read_label_file(label_path).items():
        feat_path = split_dir / FEATS_DIR / f"{utt_id}.cctf"
        if not feat_path.exists():
            raise FormatError(f"missing features for utterance {utt_id}: {feat_path}")
        utterances.append(Utterance(utt_id=utt_id, features=read_tensor(feat_path), labels=labels))
    return utterances


def split_train_val(
    utterances: Sequence[Utterance], val_fraction: float, seed: int
) -> tuple[list[Utterance], list[Utterance]]:
    """Seeded shuffle, then hold out ``round(val_fraction * N)`` utterances.

    Both splits keep at least one utterance, so N must be at least 2.
    """
    if len(utterances) < 2:
        raise ConfigError(
            f"need at least 2 utterances to hold out validation data, got {len(utterances)}"
        )
    order = np.random.default_rng(seed).permutation(len(utterances))
    n_val = min(max(1, int(round(val_fraction * len(utterances)))), len(utterances) - 1)
    val = [utterances[i] for i in sorted(order[:n_val])]
    train = [utterances[i] for i in sorted(order[n_val:])]
    return train, val
