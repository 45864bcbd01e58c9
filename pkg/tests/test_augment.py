# tests/test_augment.py

from __future__ import annotations

import math

import numpy as np
import pytest

from ctc_crf.augment import load_policy, sample_warp, spec_augment, time_warp, validate_policy, warp_source_positions
from ctc_crf.errors import ConfigError, LengthError
from ctc_crf.features import FeatureMatrix
from ctc_crf.settings import SpecAugPolicy


@pytest.fixture
def feat():
    return FeatureMatrix(np.random.default_rng(0).normal(size=(100, 80)) + 5.0)


@pytest.fixture
def default_policy():
    return SpecAugPolicy(warp_ratio=0.2, freq_ratio=0.15, num_freq_masks=2, time_mask_ratio=0.05, num_time_masks=2)


class TestSpecAugment:
    def test_identity_policy(self, feat):
        """An all-zero policy returns the input bitwise"""
        out = spec_augment(feat, SpecAugPolicy.identity(), seed=3)

        np.testing.assert_array_equal(out.frames, feat.frames)

    def test_mask_extents(self, feat, default_policy):
        """At most 24 masked bins and 10 masked frames on a 100 x 80 input"""
        for seed in range(20):
            out = spec_augment(feat, default_policy, seed=seed).frames
            zero_bins = int(np.sum(np.all(out == 0.0, axis=0)))
            zero_frames = int(np.sum(np.all(out == 0.0, axis=1)))

            assert zero_bins <= 2 * math.ceil(0.15 * 80) == 24
            # a frame is all-zero only through a time mask or a full-width frequency mask
            if zero_bins < 80:
                assert zero_frames <= 2 * math.ceil(0.05 * 100) == 10

    def test_deterministic(self, feat, default_policy):
        """Same seed, same output"""
        a = spec_augment(feat, default_policy, seed=42).frames
        b = spec_augment(feat, default_policy, seed=42).frames

        np.testing.assert_array_equal(a, b)

    def test_input_untouched(self, feat, default_policy):
        """Augmentation never mutates its input"""
        before = feat.frames.copy()
        spec_augment(feat, default_policy, seed=1)

        np.testing.assert_array_equal(feat.frames, before)

    def test_shape_preserved(self, feat, default_policy):
        """Output has the input's shape"""
        assert spec_augment(feat, default_policy, seed=9).frames.shape == (100, 80)

    def test_too_small_input(self, default_policy):
        """A single frame cannot be augmented"""
        with pytest.raises(LengthError):
            spec_augment(FeatureMatrix(np.ones((1, 80))), default_policy, seed=0)


class TestPolicy:
    def test_mask_budget_violation(self):
        """num_freq_masks * freq_ratio > 1 is rejected"""
        with pytest.raises(ConfigError):
            load_policy({"freq_ratio": 0.6, "num_freq_masks": 2})

    def test_ratio_out_of_range(self):
        """Ratios above 1 are rejected"""
        with pytest.raises(ConfigError):
            load_policy({"warp_ratio": 1.5})

    def test_validate_unchecked_policy(self):
        """Policies built without validation are still checked before use"""
        policy = SpecAugPolicy.model_construct(
            warp_ratio=0.0, freq_ratio=0.6, num_freq_masks=2, time_mask_ratio=0.0, num_time_masks=0
        )
        with pytest.raises(ConfigError):
            validate_policy(policy)

    def test_load_defaults(self):
        """An empty mapping yields the default policy"""
        assert load_policy({}) == SpecAugPolicy()


class TestTimeWarp:
    def test_zero_ratio_identity(self, feat):
        """warp_ratio 0 changes nothing"""
        np.testing.assert_array_equal(time_warp(feat, 0.0, seed=1).frames, feat.frames)

    def test_constant_matrix_unchanged(self):
        """Interpolating a constant gives the constant"""
        constant = FeatureMatrix(np.full((50, 4), 2.5))
        out = time_warp(constant, 0.3, seed=7)

        np.testing.assert_allclose(out.frames, 2.5, atol=1e-12)

    def test_ramp_follows_piecewise_linear_map(self):
        """A time ramp is mapped through the two-segment linear warp"""
        num_frames = 60
        ramp = FeatureMatrix(np.tile(np.arange(num_frames, dtype=float)[:, None], (1, 3)))
        t0, t1 = sample_warp(num_frames, 0.2, np.random.default_rng(11))
        out = time_warp(ramp, 0.2, seed=11).frames

        last = num_frames - 1
        expected = [j * t0 / t1 if j <= t1 else t0 + (j - t1) * (last - t0) / (last - t1) for j in range(num_frames)]
        np.testing.assert_allclose(out[:, 0], expected, atol=1e-12)
        assert out[0, 0] == 0.0
        assert out[-1, 0] == pytest.approx(last)

    def test_pivot_bounds(self):
        """Pivots stay strictly inside the sequence"""
        rng = np.random.default_rng(0)
        for _ in range(200):
            t0, t1 = sample_warp(100, 0.2, rng)
            assert 20 <= t0 <= 80
            assert 1 <= t1 <= 98

    def test_short_sequence_skipped(self, caplog):
        """Fewer than four frames skips the warp with a warning"""
        short = FeatureMatrix(np.arange(6.0).reshape(3, 2))
        out = time_warp(short, 0.5, seed=0)

        np.testing.assert_array_equal(out.frames, short.frames)
        assert "too short" in caplog.text

    def test_source_positions_fix_endpoints(self):
        """The first and last frame map to themselves"""
        src = warp_source_positions(40, 10, 14)

        assert src[0] == 0.0
        assert src[-1] == pytest.approx(39.0)
        assert src[14] == pytest.approx(10.0)
