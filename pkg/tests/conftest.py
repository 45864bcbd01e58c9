# tests/conftest.py

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import log_softmax

from ctc_crf.labellm import ContextEntry, NGramLabelLm


def two_sequence_lm(p_empty: float) -> NGramLabelLm:
    """V=1 bigram with p(()) = p_empty, p((a)) = 1 - p_empty and nothing longer."""
    a, eos, bos = 0, 1, 2
    probs = {}
    if p_empty > 0.0:
        probs[eos] = math.log(p_empty)
    if p_empty < 1.0:
        probs[a] = math.log(1.0 - p_empty)
    contexts = {
        (): ContextEntry(probs={a: math.log(0.5), eos: math.log(0.5)}),
        (bos,): ContextEntry(probs=probs, backoff=None),
        (a,): ContextEntry(probs={eos: 0.0}, backoff=None),
    }
    return NGramLabelLm(order=2, vocab_size=1, contexts=contexts)


def random_logprobs(num_frames: int, vocab_size: int, rng: np.random.Generator) -> np.ndarray:
    return log_softmax(rng.normal(size=(num_frames, vocab_size + 1)) * 2.0, axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def uniform_two_frames():
    """T=2, V=1, every entry ln 0.5"""
    return np.full((2, 2), math.log(0.5))


@pytest.fixture
def lm_04_06():
    """p(()) = 0.4 and p((a)) = 0.6"""
    return two_sequence_lm(0.4)


@pytest.fixture
def make_lm():
    return two_sequence_lm


@pytest.fixture
def make_logprobs():
    return random_logprobs
