"""Exhaustive-enumeration references for the CTC and CTC-CRF losses."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from ..errors import SizeError
from ..graphs import collapse
from ..labellm import NGramLabelLm, score_sequence

MAX_PATHS = 10**6


def _paths(logprobs: np.ndarray) -> itertools.product:
    num_frames, num_symbols = logprobs.shape
    if num_symbols**num_frames > MAX_PATHS:
        raise SizeError(f"{num_symbols}^{num_frames} paths exceed the enumeration limit of {MAX_PATHS}")
    return itertools.product(range(num_symbols), repeat=num_frames)


def _path_score(logprobs: np.ndarray, pi: tuple[int, ...]) -> float:
    return float(logprobs[np.arange(len(pi)), list(pi)].sum())


def brute_force_ctc(logprobs: np.ndarray, labels: Sequence[int]) -> float:
    lp = np.asarray(logprobs, dtype=np.float64)
    blank = lp.shape[1] - 1
    target = tuple(labels)
    scores = [_path_score(lp, pi) for pi in _paths(lp) if collapse(pi, blank) == target]
    return -float(logsumexp(scores)) if scores else math.inf


def brute_force_crf(logprobs: np.ndarray, labels: Sequence[int], lm: NGramLabelLm) -> float:
    lp = np.asarray(logprobs, dtype=np.float64)
    blank = lp.shape[1] - 1
    target = tuple(labels)
    lm_cache: dict[tuple[int, ...], float] = {}
    num: list[float] = []
    den: list[float] = []
    for pi in _paths(lp):
        seq = collapse(pi, blank)
        if seq not in lm_cache:
            lm_cache[seq] = score_sequence(lm, seq)
        if lm_cache[seq] == -math.inf:
            continue
        score = _path_score(lp, pi) + lm_cache[seq]
        den.append(score)
        if seq == target:
            num.append(score)
    if not num:
        return math.inf
    return float(logsumexp(den) - logsumexp(num))
