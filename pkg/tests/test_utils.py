# tests/test_utils.py

from __future__ import annotations

import numpy as np
import orjson
import pytest

from ctc_crf.errors import FormatError
from ctc_crf.settings import load_settings
from ctc_crf.utils import (
    parse_label_sequence,
    read_checkpoint,
    read_label_file,
    read_tensor,
    read_wav,
    write_checkpoint,
    write_label_file,
    write_tensor,
    write_wav,
)


class TestTensorFiles:
    def test_header_layout(self, tmp_path):
        """Magic, version, rank and dims precede the float64 payload"""
        path = tmp_path / "x.cctf"
        write_tensor(path, np.arange(6.0).reshape(2, 3))
        raw = path.read_bytes()

        assert raw[:4] == b"CCTF"
        assert len(raw) == 4 + 8 + 2 * 8 + 6 * 8
        np.testing.assert_array_equal(read_tensor(path), np.arange(6.0).reshape(2, 3))

    def test_bad_magic(self, tmp_path):
        """Foreign files are rejected"""
        path = tmp_path / "x.cctf"
        path.write_bytes(b"NOPE" + bytes(16))
        with pytest.raises(FormatError, match="magic"):
            read_tensor(path)

    def test_truncated_payload(self, tmp_path):
        """Short payloads are rejected"""
        path = tmp_path / "x.cctf"
        write_tensor(path, np.ones((4, 4)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError, match="truncated"):
            read_tensor(path)

    def test_checkpoint_keeps_order(self, tmp_path):
        """Named tensors come back in write order with the header"""
        path = tmp_path / "m.cckp"
        write_checkpoint(path, {"epoch": 2}, {"b": np.ones(3), "a": np.zeros((2, 2))})
        header, tensors = read_checkpoint(path)

        assert header == {"epoch": 2}
        assert list(tensors) == ["b", "a"]
        assert tensors["a"].shape == (2, 2)

    def test_not_a_checkpoint(self, tmp_path):
        """A tensor file is not a checkpoint"""
        path = tmp_path / "x.cctf"
        write_tensor(path, np.ones(2))
        with pytest.raises(FormatError):
            read_checkpoint(path)


class TestLabelFiles:
    def test_empty_sequence_line(self, tmp_path):
        """An id alone on its line is an empty sequence"""
        path = tmp_path / "labels.txt"
        write_label_file(path, {"u1": (3, 1), "u2": ()})

        assert read_label_file(path) == {"u1": (3, 1), "u2": ()}

    def test_non_integer_label(self, tmp_path):
        """Line numbers are reported for bad labels"""
        path = tmp_path / "labels.txt"
        path.write_text("u1 1 2\nu2 x\n")
        with pytest.raises(FormatError, match=":2:"):
            read_label_file(path)

    def test_parse_sequence(self):
        """Whitespace-separated ids"""
        assert parse_label_sequence(" 0  1 2\n") == (0, 1, 2)
        with pytest.raises(FormatError):
            parse_label_sequence("0 b")


class TestWav:
    def test_pcm16_round_trip(self, tmp_path):
        """Samples survive within one quantization step"""
        samples = 0.5 * np.sin(np.linspace(0, 20, 800))
        write_wav(tmp_path / "a.wav", samples, 8000)
        back, rate = read_wav(tmp_path / "a.wav")

        assert rate == 8000
        np.testing.assert_allclose(back, samples, atol=2 / 32768)

    def test_not_a_wav(self, tmp_path):
        """Garbage input is a format error"""
        path = tmp_path / "a.wav"
        path.write_bytes(b"garbage")
        with pytest.raises(FormatError):
            read_wav(path)


class TestSettings:
    def test_json_overlay(self, tmp_path):
        """Nested JSON keys override defaults"""
        path = tmp_path / "settings.json"
        path.write_bytes(orjson.dumps({"seed": 7, "scheduler": {"warmup_steps": 100}}))
        settings = load_settings(path)

        assert settings.seed == 7
        assert settings.scheduler.warmup_steps == 100
        assert settings.scheduler.d_model == 256

    def test_environment(self, monkeypatch):
        """CTC_CRF_ prefixed variables are read"""
        monkeypatch.setenv("CTC_CRF_SEED", "42")
        monkeypatch.setenv("CTC_CRF_TELEMETRY__LOG_LEVEL", "DEBUG")
        settings = load_settings()

        assert settings.seed == 42
        assert settings.telemetry.log_level == "DEBUG"
