# tests/test_cli.py

from __future__ import annotations

import logging

import numpy as np
import orjson
import pytest
import typer

from ctc_crf.cli import UsageError, dispatch
from ctc_crf.utils import write_label_file, write_tensor, write_wav


@pytest.fixture(autouse=True)
def reset_logging():
    """dictConfig binds handlers to the captured stderr; drop them between tests"""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)


@pytest.fixture
def labels_file(tmp_path):
    path = tmp_path / "labels.txt"
    write_label_file(path, {"u1": (0,), "u2": (0, 0), "u3": ()})
    return path


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_sched_dump(self, capsys):
        """Header plus one row per step"""
        code, out, _ = run(capsys, "sched", "dump", "--steps", "3", "--d-model", "256", "--warmup", "25000")
        lines = out.strip().splitlines()

        assert code == 0
        assert lines[0] == "step,lr"
        assert len(lines) == 4
        assert float(lines[1].split(",")[1]) == pytest.approx(1.5811e-8, rel=1e-4)

    def test_unknown_command(self, capsys):
        """Unknown subcommands are usage errors"""
        code, _, _ = run(capsys, "frobnicate")
        assert code == 1

    def test_missing_option(self, capsys):
        """A missing required option is a usage error"""
        code, _, _ = run(capsys, "sched", "dump")
        assert code == 1

    def test_unknown_fbank_variant(self, capsys, tmp_path):
        """Bad --variant values are usage errors"""
        code, _, _ = run(capsys, "fbank", "--wav", str(tmp_path / "x.wav"), "--out", str(tmp_path / "o"), "--variant", "mfcc")
        assert code == 1

    def test_unknown_flag_shows_usage(self, capsys):
        """Unknown flags exit 1 and print usage on stderr"""
        code, _, err = run(capsys, "sched", "dump", "--steps", "3", "--frobnicate")

        assert code == 1
        assert "Usage" in err

    def test_usage_error_matches_typer_exceptions(self):
        """The caught usage error is the one typer raises"""
        assert issubclass(typer.BadParameter, UsageError)

    def test_missing_file_is_data_error(self, capsys, tmp_path):
        """An unreadable input exits 2 with a message on stderr"""
        code, _, err = run(capsys, "cmvn", "--in", str(tmp_path / "absent.cctf"), "--out", str(tmp_path / "o.cctf"))

        assert code == 2
        assert "error:" in err


class TestLossCommands:
    def test_ctc(self, capsys, tmp_path):
        """Uniform logits, V=1, T=2, label (a): -ln 0.75"""
        write_tensor(tmp_path / "logits.cctf", np.zeros((2, 2)))
        (tmp_path / "lab.txt").write_text("0\n")
        code, out, _ = run(capsys, "loss", "ctc", "--logits", str(tmp_path / "logits.cctf"), "--labels", str(tmp_path / "lab.txt"))

        assert code == 0
        assert orjson.loads(out)["loss"] == pytest.approx(0.287682, abs=1e-6)

    def test_crf_vocab_mismatch(self, capsys, tmp_path, labels_file):
        """Two-label logits against a one-label LM exit 2 naming both sizes"""
        lm_path, den_path = tmp_path / "lm.arpa", tmp_path / "den.fsa"
        assert run(capsys, "lm", "train", "--labels", str(labels_file), "--out", str(lm_path), "--order", "2", "--vocab-size", "1")[0] == 0
        assert run(capsys, "graph", "build-den", "--lm", str(lm_path), "--out", str(den_path))[0] == 0
        write_tensor(tmp_path / "logits.cctf", np.zeros((3, 3)))
        (tmp_path / "lab.txt").write_text("0\n")

        code, _, err = run(
            capsys, "loss", "crf", "--logits", str(tmp_path / "logits.cctf"), "--labels", str(tmp_path / "lab.txt"),
            "--den", str(den_path), "--lm", str(lm_path),
        )

        assert code == 2
        assert "2 labels" in err and "LM has 1" in err

    def test_crf_matching_sizes(self, capsys, tmp_path, labels_file):
        """A consistent LM, graph and logits give a non-negative loss"""
        lm_path, den_path = tmp_path / "lm.arpa", tmp_path / "den.fsa"
        run(capsys, "lm", "train", "--labels", str(labels_file), "--out", str(lm_path), "--order", "2", "--vocab-size", "1")
        run(capsys, "graph", "build-den", "--lm", str(lm_path), "--out", str(den_path))
        write_tensor(tmp_path / "logits.cctf", np.random.default_rng(0).normal(size=(3, 2)))
        (tmp_path / "lab.txt").write_text("0\n")

        code, out, _ = run(
            capsys, "loss", "crf", "--logits", str(tmp_path / "logits.cctf"), "--labels", str(tmp_path / "lab.txt"),
            "--den", str(den_path), "--lm", str(lm_path),
        )

        assert code == 0
        assert orjson.loads(out)["loss"] >= -1e-9


class TestGraphAndLm:
    def test_topology_info(self, capsys, tmp_path):
        """build-topo and info report the same summary"""
        path = tmp_path / "topo.fsa"
        code, built, _ = run(capsys, "graph", "build-topo", "--vocab-size", "2", "--out", str(path))
        _, info, _ = run(capsys, "graph", "info", str(path))

        assert code == 0
        assert orjson.loads(built) == orjson.loads(info)
        assert orjson.loads(info)["states"] == 4

    def test_numerator(self, capsys, tmp_path):
        """(a, b) numerator has 2U + 1 lattice positions plus a start state"""
        code, out, _ = run(capsys, "graph", "build-num", "--labels", "0 1", "--vocab-size", "2", "--out", str(tmp_path / "num.fsa"))

        assert code == 0
        assert orjson.loads(out)["states"] == 6

    def test_lm_score(self, capsys, tmp_path, labels_file):
        """One log-probability line per utterance"""
        lm_path = tmp_path / "lm.arpa"
        run(capsys, "lm", "train", "--labels", str(labels_file), "--out", str(lm_path), "--order", "2")
        code, out, _ = run(capsys, "lm", "score", "--lm", str(lm_path), "--labels", str(labels_file))
        rows = dict(line.split("\t") for line in out.strip().splitlines())

        assert code == 0
        assert set(rows) == {"u1", "u2", "u3"}
        assert all(float(v) < 0.0 for v in rows.values())

    def test_malformed_arpa(self, capsys, tmp_path, labels_file):
        """A broken ARPA file is a data error"""
        bad = tmp_path / "bad.arpa"
        bad.write_text("\\data\\\nngram 1=oops\n")
        code, _, err = run(capsys, "lm", "score", "--lm", str(bad), "--labels", str(labels_file))

        assert code == 2
        assert "error:" in err


class TestOtherCommands:
    def test_tokenizer_char_mode(self, capsys, tmp_path):
        """Character tokenizers train and encode from the command line"""
        corpus = tmp_path / "words.txt"
        corpus.write_text("abc cab bca abc\n")
        model = tmp_path / "tok.tsv"
        code, out, _ = run(capsys, "tokenizer", "train", "--input", str(corpus), "--mode", "char", "--out", str(model))
        assert code == 0
        assert orjson.loads(out)["mode"] == "char"

        code, out, _ = run(capsys, "tokenizer", "encode", "--model", str(model), "abc")
        assert code == 0
        assert out.startswith("abc\t")

    def test_score(self, capsys, tmp_path):
        """TER and SER over label files"""
        write_label_file(tmp_path / "ref.txt", {"u1": (0, 1, 2), "u2": (1,)})
        write_label_file(tmp_path / "hyp.txt", {"u1": (0, 2), "u2": (1,)})
        code, out, _ = run(capsys, "score", "--hyp", str(tmp_path / "hyp.txt"), "--ref", str(tmp_path / "ref.txt"))
        scores = orjson.loads(out)

        assert code == 0
        assert scores["ter"] == pytest.approx(25.0)
        assert scores["ser"] == pytest.approx(50.0)

    def test_score_missing_hypothesis(self, capsys, tmp_path):
        """Every reference needs a hypothesis"""
        write_label_file(tmp_path / "ref.txt", {"u1": (0,), "u2": (1,)})
        write_label_file(tmp_path / "hyp.txt", {"u1": (0,)})
        code, _, _ = run(capsys, "score", "--hyp", str(tmp_path / "hyp.txt"), "--ref", str(tmp_path / "ref.txt"))

        assert code == 2

    def test_fbank_geometry(self, capsys, tmp_path):
        """0.4 s at 16 kHz gives 38 frames of 40 bins"""
        wav = tmp_path / "tone.wav"
        t = np.arange(6400) / 16000
        write_wav(wav, 0.5 * np.sin(2 * np.pi * 440 * t), 16000)
        code, out, _ = run(capsys, "fbank", "--wav", str(wav), "--out", str(tmp_path / "f.cctf"), "--variant", "fbank40")

        assert code == 0
        assert orjson.loads(out) == {"frames": 38, "dim": 40}

    def test_nn_info_preset(self, capsys):
        """Preset parameter counts are reported"""
        code, out, _ = run(capsys, "nn", "info", "--preset", "conformer-m")

        assert code == 0
        assert orjson.loads(out)["params"] == pytest.approx(25.03e6, rel=0.05)

    def test_synth(self, capsys, tmp_path):
        """Synthetic corpus counts come back as JSON"""
        code, out, _ = run(capsys, "synth", "--out", str(tmp_path / "corpus"), "--num-train", "5", "--num-test", "2")

        assert code == 0
        assert orjson.loads(out) == {"train": 5, "test": 2}
