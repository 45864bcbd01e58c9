# tests/test_loss.py

from __future__ import annotations

import math

import numpy as np
import pytest

from ctc_crf.errors import ConfigError, EmptyInputError, LogProbError, NoPathError, SizeError
from ctc_crf.labellm import estimate_ngram, score_sequence
from ctc_crf.loss import (
    batch_loss,
    brute_force_crf,
    brute_force_ctc,
    build_denominator,
    crf_loss,
    ctc_loss,
    sequence_loss,
)


def finite_difference(fn, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        plus, minus = x.copy(), x.copy()
        plus[idx] += h
        minus[idx] -= h
        grad[idx] = (fn(plus) - fn(minus)) / (2 * h)
    return grad


def random_crf_instance(rng, make_logprobs, order):
    """Logprobs, labels with at least one alignment, and an LM trained on a random corpus"""
    while True:
        vocab = int(rng.integers(1, 3))
        frames = int(rng.integers(1, 5))
        corpus = [tuple(int(x) for x in rng.integers(0, vocab, size=rng.integers(0, 5))) for _ in range(12)]
        labels = tuple(int(x) for x in rng.integers(0, vocab, size=rng.integers(0, frames + 1)))
        lp = make_logprobs(frames, vocab, rng)
        if not math.isinf(brute_force_ctc(lp, labels)):
            return lp, labels, estimate_ngram(corpus, order=order, vocab_size=vocab)


class TestCtcLoss:
    def test_three_alignments(self, uniform_two_frames):
        """V=1, T=2, l=(a), uniform: loss = -ln 0.75"""
        result = ctc_loss(uniform_two_frames, (0,))

        assert result.loss == pytest.approx(-math.log(0.75), abs=1e-12)
        assert result.loss == pytest.approx(0.287682, abs=1e-6)

    def test_single_frame(self, rng, make_logprobs):
        """T=1, l=(a): loss = -logprobs[0, a]"""
        lp = make_logprobs(1, 3, rng)
        assert ctc_loss(lp, (2,)).loss == pytest.approx(-lp[0, 2], abs=1e-12)

    def test_matches_brute_force(self, rng, make_logprobs):
        """200 random instances with T <= 5, V <= 3, U <= 2 agree with path enumeration"""
        checked = 0
        for _ in range(200):
            vocab = int(rng.integers(1, 4))
            frames = int(rng.integers(1, 6))
            length = int(rng.integers(0, 3))
            labels = tuple(int(x) for x in rng.integers(0, vocab, size=length))
            lp = make_logprobs(frames, vocab, rng)
            expected = brute_force_ctc(lp, labels)
            if math.isinf(expected):
                with pytest.raises(NoPathError):
                    ctc_loss(lp, labels)
                continue

            assert ctc_loss(lp, labels).loss == pytest.approx(expected, abs=1e-10)
            checked += 1
        assert checked > 120

    def test_gradient_finite_difference(self, rng, make_logprobs):
        """Gradient w.r.t. logprobs matches central differences"""
        lp = make_logprobs(4, 2, rng)
        labels = (1, 0)
        analytic = ctc_loss(lp, labels).grad
        numeric = finite_difference(lambda x: ctc_loss(x, labels, validate=False).loss, lp)

        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-8)

    def test_random_gradients(self, make_logprobs):
        """50 random instances: gradients match central differences, rows sum to -1"""
        rng = np.random.default_rng(8)
        checked = 0
        while checked < 50:
            vocab = int(rng.integers(1, 4))
            frames = int(rng.integers(1, 6))
            labels = tuple(int(x) for x in rng.integers(0, vocab, size=rng.integers(0, 3)))
            lp = make_logprobs(frames, vocab, rng)
            if math.isinf(brute_force_ctc(lp, labels)):
                continue
            result = ctc_loss(lp, labels)
            numeric = finite_difference(lambda x: ctc_loss(x, labels, validate=False).loss, lp)

            np.testing.assert_allclose(result.grad, numeric, rtol=1e-5, atol=1e-8)
            np.testing.assert_allclose(result.grad.sum(axis=1), -1.0, atol=1e-8)
            checked += 1

    def test_too_short(self, uniform_two_frames):
        """T below the minimum alignment length has no path"""
        with pytest.raises(NoPathError):
            ctc_loss(uniform_two_frames, (0, 0))

    def test_unnormalized_rows_rejected(self):
        """Rows must be log-softmax outputs"""
        with pytest.raises(LogProbError):
            ctc_loss(np.zeros((2, 2)), (0,))

    def test_non_finite_rejected(self):
        """NaN entries are rejected"""
        lp = np.full((2, 2), math.log(0.5))
        lp[1, 0] = np.nan
        with pytest.raises(LogProbError):
            ctc_loss(lp, (0,))


class TestCrfLoss:
    def test_four_path_example(self, uniform_two_frames, lm_04_06):
        """p(())=0.4, p((a))=0.6: loss = ln(11/9)"""
        result = crf_loss(uniform_two_frames, (0,), build_denominator(lm_04_06), lm_04_06)

        assert result.loss == pytest.approx(math.log(11 / 9), abs=1e-12)
        assert result.loss == pytest.approx(0.200671, abs=1e-6)

    def test_brute_force_agrees(self, uniform_two_frames, lm_04_06):
        """The enumeration oracle gives the same value"""
        assert brute_force_crf(uniform_two_frames, (0,), lm_04_06) == pytest.approx(math.log(11 / 9), abs=1e-12)

    def test_single_frame_empty_label(self, rng, make_logprobs, lm_04_06):
        """V=1, T=1, l=(): two-path closed form"""
        lp = make_logprobs(1, 1, rng)
        p_a, p_blank = math.exp(lp[0, 0]), math.exp(lp[0, 1])
        expected = -math.log(p_blank * 0.4) + math.log(p_blank * 0.4 + p_a * 0.6)

        assert brute_force_crf(lp, (), lm_04_06) == pytest.approx(expected, abs=1e-12)
        assert crf_loss(lp, (), build_denominator(lm_04_06), lm_04_06).loss == pytest.approx(expected, abs=1e-12)

    def test_equal_support_gives_zero(self, make_lm):
        """All LM mass on (a) at T=1: numerator and denominator coincide"""
        lm = make_lm(0.0)
        lp = np.log(np.array([[0.9, 0.1]]))
        result = crf_loss(lp, (0,), build_denominator(lm), lm)

        assert result.loss == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(result.grad, 0.0, atol=1e-12)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_matches_brute_force(self, order, make_logprobs):
        """200 random instances with T <= 4, V <= 2 agree with enumeration"""
        rng = np.random.default_rng(100 + order)
        checked = 0
        while checked < 200:
            lp, labels, lm = random_crf_instance(rng, make_logprobs, order)
            result = crf_loss(lp, labels, build_denominator(lm), lm)

            assert result.loss == pytest.approx(brute_force_crf(lp, labels, lm), abs=1e-10)
            checked += 1

    def test_gradient_finite_difference(self, make_logprobs):
        """50 random instances: gradients match central differences, rows sum to 0"""
        rng = np.random.default_rng(7)
        for i in range(50):
            lp, labels, lm = random_crf_instance(rng, make_logprobs, order=1 + i % 3)
            den = build_denominator(lm)
            result = crf_loss(lp, labels, den, lm)
            numeric = finite_difference(lambda x: crf_loss(x, labels, den, lm, validate=False).loss, lp)

            np.testing.assert_allclose(result.grad, numeric, rtol=1e-5, atol=1e-8)
            np.testing.assert_allclose(result.grad.sum(axis=1), 0.0, atol=1e-8)

    def test_gradient_rows_sum_to_zero(self, rng, make_logprobs):
        """Occupancy difference has zero mass per frame"""
        lm = estimate_ngram([(0, 1), (1, 1, 0)], order=2)
        lp = make_logprobs(5, 2, rng)
        result = crf_loss(lp, (0, 1), build_denominator(lm), lm)

        np.testing.assert_allclose(result.grad.sum(axis=1), 0.0, atol=1e-10)

    def test_shift_invariance(self, rng, make_logprobs):
        """Adding a constant to every logprob leaves the CRF loss unchanged"""
        lm = estimate_ngram([(0, 1), (1,)], order=2)
        den = build_denominator(lm)
        lp = make_logprobs(4, 2, rng)
        base = crf_loss(lp, (1,), den, lm).loss
        shifted = crf_loss(lp + 3.0, (1,), den, lm, validate=False).loss

        assert shifted == pytest.approx(base, abs=1e-10)

    def test_non_negative(self, rng, make_logprobs):
        """The numerator is a subset of the denominator"""
        lm = estimate_ngram([(0, 1), (1, 0, 0)], order=2)
        den = build_denominator(lm)
        for _ in range(5):
            lp = make_logprobs(5, 2, rng)
            assert crf_loss(lp, (0, 1), den, lm).loss >= -1e-12

    def test_vocab_mismatch_names_sizes(self, rng, make_logprobs, lm_04_06):
        """Mismatched sizes raise a config error naming both"""
        lp = make_logprobs(3, 2, rng)
        with pytest.raises(ConfigError, match="2 labels.*LM has 1"):
            crf_loss(lp, (0,), build_denominator(lm_04_06), lm_04_06)

    def test_zero_probability_label_sequence(self, uniform_two_frames, make_lm):
        """A sequence the LM cannot produce has no numerator"""
        lm = make_lm(1.0)
        with pytest.raises(NoPathError):
            crf_loss(uniform_two_frames, (0,), build_denominator(lm), lm)

    def test_oracle_size_limit(self, rng, make_logprobs):
        """Enumeration refuses instances beyond the limit"""
        lm = estimate_ngram([(0, 1)], order=1)
        with pytest.raises(SizeError):
            brute_force_crf(make_logprobs(20, 2, rng), (0,), lm)


class TestBatch:
    def test_mean_and_scaled_gradients(self, rng, make_logprobs):
        """Batch loss is the mean; gradients carry a 1/B factor"""
        lm = estimate_ngram([(0, 1), (1,)], order=2)
        den = build_denominator(lm)
        batch = [(make_logprobs(4, 2, rng), (0,)), (make_logprobs(5, 2, rng), (1, 0))]
        result = batch_loss("ctc_crf", batch, den=den, lm=lm)
        singles = [crf_loss(lp, labels, den, lm) for lp, labels in batch]

        assert result.loss == pytest.approx(np.mean([s.loss for s in singles]))
        for grad, single in zip(result.grads, singles):
            np.testing.assert_allclose(grad, single.grad / 2)

    def test_ctc_kind(self, uniform_two_frames):
        """sequence_loss dispatches on kind"""
        assert sequence_loss("ctc", uniform_two_frames, (0,)).loss == pytest.approx(-math.log(0.75))

    def test_crf_needs_graph_and_lm(self, uniform_two_frames):
        """ctc_crf without a denominator is a config error"""
        with pytest.raises(ConfigError):
            sequence_loss("ctc_crf", uniform_two_frames, (0,))

    def test_empty_batch(self):
        """Empty batches are rejected"""
        with pytest.raises(EmptyInputError):
            batch_loss("ctc", [])

    def test_lm_score_enters_loss(self, uniform_two_frames, lm_04_06):
        """Loss equals -(logZ_num + log p(l)) + logZ_den"""
        den = build_denominator(lm_04_06)
        loss = crf_loss(uniform_two_frames, (0,), den, lm_04_06).loss
        expected = -(math.log(0.75) + score_sequence(lm_04_06, (0,))) + math.log(0.55)

        assert loss == pytest.approx(expected, abs=1e-12)
