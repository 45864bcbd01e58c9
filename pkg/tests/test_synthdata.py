# tests/test_synthdata.py

from __future__ import annotations

import numpy as np
import pytest

from ctc_crf.data import Utterance, read_split, split_train_val, write_split
from ctc_crf.errors import ConfigError, FormatError
from ctc_crf.settings import SynthConfig
from ctc_crf.synthdata import (
    GRAMMAR_FILE,
    SyntheticGrammar,
    default_grammar,
    generate,
    stationary_distribution,
    write_synthetic_corpus,
)


@pytest.fixture
def small_config():
    return SynthConfig(vocab_size=4, feature_dim=6, num_train=12, num_test=3)


@pytest.fixture
def noiseless_grammar():
    """V=2, duration 1, orthogonal means, sigma 0"""
    return SyntheticGrammar(
        transitions=np.array([[0.0, 1.0], [1.0, 0.0]]),
        initial=np.array([0.5, 0.5]),
        means=np.eye(2),
        sigma=0.0,
        min_duration=1,
        max_duration=1,
        min_labels=3,
        max_labels=6,
    )


class TestGrammar:
    def test_no_self_transitions(self, small_config):
        """The default chain never repeats a label"""
        grammar = default_grammar(small_config, seed=0)

        np.testing.assert_array_equal(np.diag(grammar.transitions), 0.0)
        np.testing.assert_allclose(grammar.transitions.sum(axis=1), 1.0)

    def test_initial_is_stationary(self, small_config):
        """Chains start from their stationary distribution"""
        grammar = default_grammar(small_config, seed=1)

        np.testing.assert_allclose(grammar.initial @ grammar.transitions, grammar.initial, atol=1e-10)

    def test_stationary_of_symmetric_chain(self):
        """A two-state flip chain is uniform at stationarity"""
        np.testing.assert_allclose(stationary_distribution(np.array([[0.0, 1.0], [1.0, 0.0]])), [0.5, 0.5])

    def test_invalid_rows(self):
        """Rows that do not sum to one are rejected"""
        with pytest.raises(ConfigError):
            SyntheticGrammar(
                transitions=np.array([[0.5, 0.2], [1.0, 0.0]]),
                initial=np.array([0.5, 0.5]),
                means=np.eye(2),
                sigma=0.1,
                min_duration=1,
                max_duration=2,
                min_labels=1,
                max_labels=2,
            )

    def test_save_load(self, small_config, tmp_path):
        """Grammar JSON round trip"""
        grammar = default_grammar(small_config, seed=2)
        grammar.save(tmp_path / GRAMMAR_FILE)
        loaded = SyntheticGrammar.load(tmp_path / GRAMMAR_FILE)

        np.testing.assert_array_equal(loaded.transitions, grammar.transitions)
        np.testing.assert_array_equal(loaded.means, grammar.means)
        assert loaded.sigma == grammar.sigma


class TestGenerate:
    def test_noiseless_features_are_means(self, noiseless_grammar):
        """sigma=0: every frame is its label's mean and nearest-mean recovers the labels"""
        for utt in generate(noiseless_grammar, 10, seed=4):
            np.testing.assert_array_equal(utt.features, noiseless_grammar.means[list(utt.labels)])
            nearest = tuple(int(i) for i in np.argmax(utt.features @ noiseless_grammar.means.T, axis=1))
            assert nearest == utt.labels

    def test_fixed_seed_bit_identical(self, small_config):
        """Same seed, same corpus"""
        grammar = default_grammar(small_config, seed=0)
        a = generate(grammar, 5, seed=9)
        b = generate(grammar, 5, seed=9)

        for x, y in zip(a, b):
            assert x.labels == y.labels
            np.testing.assert_array_equal(x.features, y.features)

    def test_lengths_within_bounds(self, small_config):
        """Label counts and durations respect the config"""
        grammar = default_grammar(small_config, seed=0)
        for utt in generate(grammar, 20, seed=1):
            assert small_config.min_labels <= len(utt.labels) <= small_config.max_labels
            durations = utt.metadata["durations"]
            assert all(small_config.min_duration <= d <= small_config.max_duration for d in durations)
            assert utt.num_frames == sum(durations)

    def test_no_adjacent_repeats(self, small_config):
        """Generated sequences never repeat a label back to back"""
        grammar = default_grammar(small_config, seed=0)
        for utt in generate(grammar, 20, seed=2):
            assert all(a != b for a, b in zip(utt.labels, utt.labels[1:]))

    def test_ids_sortable(self, small_config):
        """Utterance ids are zero-padded"""
        utts = generate(default_grammar(small_config), 12, seed=0)

        assert [u.utt_id for u in utts] == sorted(u.utt_id for u in utts)


class TestCorpus:
    def test_write_synthetic_corpus(self, small_config, tmp_path):
        """Train and test splits plus the grammar land on disk"""
        counts = write_synthetic_corpus(tmp_path, small_config, seed=0)
        train = read_split(tmp_path, "train")

        assert counts == {"train": 12, "test": 3}
        assert (tmp_path / GRAMMAR_FILE).exists()
        assert len(train) == 12
        assert train[0].features.shape[1] == small_config.feature_dim

    def test_rerun_is_byte_identical(self, small_config, tmp_path):
        """Two runs with one seed write identical feature files"""
        write_synthetic_corpus(tmp_path / "a", small_config, seed=5)
        write_synthetic_corpus(tmp_path / "b", small_config, seed=5)

        for path in sorted((tmp_path / "a" / "train" / "feats").iterdir()):
            assert path.read_bytes() == (tmp_path / "b" / "train" / "feats" / path.name).read_bytes()

    def test_split_round_trip(self, tmp_path):
        """write_split then read_split"""
        utts = [Utterance("u0", np.ones((3, 2)), (0, 1)), Utterance("u1", np.zeros((2, 2)), ())]
        write_split(tmp_path, "dev", utts)
        back = read_split(tmp_path, "dev")

        assert [u.utt_id for u in back] == ["u0", "u1"]
        assert back[1].labels == ()
        np.testing.assert_array_equal(back[0].features, utts[0].features)

    def test_missing_split(self, tmp_path):
        """A split without a text file is a format error"""
        with pytest.raises(FormatError):
            read_split(tmp_path, "train")

    def test_train_val_split(self):
        """Seeded split holds out round(frac * N) utterances"""
        utts = [Utterance(f"u{i}", np.ones((1, 1)), (i,)) for i in range(20)]
        train, val = split_train_val(utts, 0.1, seed=0)
        again, _ = split_train_val(utts, 0.1, seed=0)

        assert len(val) == 2 and len(train) == 18
        assert [u.utt_id for u in train] == [u.utt_id for u in again]
        assert not {u.utt_id for u in train} & {u.utt_id for u in val}

    @pytest.mark.parametrize("n,fraction", [(2, 0.05), (2, 0.95), (3, 0.9), (5, 0.01)])
    def test_both_splits_non_empty(self, n, fraction):
        """Small corpora still train on one utterance and validate on another"""
        utts = [Utterance(f"u{i}", np.ones((1, 1)), (i,)) for i in range(n)]
        train, val = split_train_val(utts, fraction, seed=0)

        assert train and val
        assert len(train) + len(val) == n

    def test_single_utterance_rejected(self):
        """One utterance cannot be split into training and validation"""
        utts = [Utterance("u0", np.ones((1, 1)), (0,))]
        with pytest.raises(ConfigError, match="at least 2 utterances"):
            split_train_val(utts, 0.5, seed=0)
