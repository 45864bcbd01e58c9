from __future__ import annotations

import importlib
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np
import orjson
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table
from scipy.special import log_softmax

from .augment import load_policy, spec_augment
from .data import read_split
from .errors import ConfigError, CtcCrfError
from .evaluation import DecodeEvaluator, default_suite, token_error_rate
from .evaluation.metrics import SentenceErrorRate
from .features import FeatureMatrix, Waveform, apply_cmvn, compute_fbank, feature_variant
from .graphs import WeightedFsa, build_ctc_topology, build_numerator
from .labellm import default_lm_order, estimate_ngram, export_arpa, import_arpa, lm_to_fsa, score_sequence
from .logging_utils import configure_logging
from .loss import build_denominator, crf_loss, ctc_loss
from .nn import ConformerModel, load_checkpoint, param_breakdown, param_count, preset
from .schedule import SchedulerState, dump_schedule
from .settings import FEATURE_VARIANTS, ConformerConfig, TokenizerConfig, TrainConfig, get_settings, load_settings
from .synthdata import write_synthetic_corpus
from .tokenizer import TokenizerModel, build_word_map, decode_ids, encode_word, train_unigram
from .train import greedy_decode, train_loop
from .utils import parse_label_sequence, read_label_file, read_tensor, read_wav, write_label_file, write_tensor

logger = logging.getLogger(__name__)

# typer re-exports its click exceptions; newer releases vendor click, so resolve them through typer.
UsageError = importlib.import_module(typer.BadParameter.__module__).UsageError

PROG_NAME = "ctc-crf"

EXIT_CODES = "Exit codes: 0 success, 1 usage error, 2 invalid input or data error."

app = typer.Typer(
    help="CTC and CTC-CRF acoustic model toolkit",
    epilog=EXIT_CODES,
    no_args_is_help=True,
    add_completion=False,
)
tokenizer_app = typer.Typer(help="Train and apply wordpiece tokenizers", epilog=EXIT_CODES, no_args_is_help=True)
lm_app = typer.Typer(help="Label n-gram language models", epilog=EXIT_CODES, no_args_is_help=True)
graph_app = typer.Typer(help="CTC topology, numerator and denominator graphs", epilog=EXIT_CODES, no_args_is_help=True)
loss_app = typer.Typer(help="Evaluate CTC and CTC-CRF losses", epilog=EXIT_CODES, no_args_is_help=True)
sched_app = typer.Typer(help="Learning-rate schedule", epilog=EXIT_CODES, no_args_is_help=True)
nn_app = typer.Typer(help="Acoustic model utilities", epilog=EXIT_CODES, no_args_is_help=True)

app.add_typer(tokenizer_app, name="tokenizer")
app.add_typer(lm_app, name="lm")
app.add_typer(graph_app, name="graph")
app.add_typer(loss_app, name="loss")
app.add_typer(sched_app, name="sched")
app.add_typer(nn_app, name="nn")


def _emit(payload: Any) -> None:
    typer.echo(orjson.dumps(payload, option=orjson.OPT_SERIALIZE_NUMPY).decode())


def _seed(seed: Optional[int]) -> int:
    return get_settings().seed if seed is None else seed


def _read_json(path: Path) -> dict[str, Any]:
    try:
        return orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc


def _read_words(path: Path) -> List[str]:
    return path.read_text(encoding="utf-8").split()


@app.callback()
def main_callback(
    config: Optional[Path] = typer.Option(None, "--config", help="JSON settings overlay"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Global random seed"),
) -> None:
    settings = load_settings(config)
    if seed is not None:
        settings.seed = seed
    configure_logging(settings)
    logger.debug("CLI started", extra={"seed": settings.seed})


@app.command()
def fbank(
    wav: Path = typer.Option(..., "--wav", help="PCM16 mono WAV input"),
    out: Path = typer.Option(..., "--out", help="Output tensor file"),
    variant: Optional[str] = typer.Option(None, help=f"One of {sorted(FEATURE_VARIANTS)}"),
) -> None:
    """Log-mel filterbank features."""
    if variant is not None and variant not in FEATURE_VARIANTS:
        raise typer.BadParameter(f"unknown variant {variant!r}", param_hint="--variant")
    cfg = feature_variant(variant) if variant else get_settings().fbank
    samples, sample_rate = read_wav(wav)
    feats = compute_fbank(Waveform(samples, sample_rate), cfg)
    write_tensor(out, feats.frames)
    _emit({"frames": feats.num_frames, "dim": feats.dim})


@app.command()
def cmvn(
    input_path: Path = typer.Option(..., "--in", help="Input tensor file"),
    out: Path = typer.Option(..., "--out", help="Output tensor file"),
) -> None:
    """Per-utterance mean and variance normalization."""
    feats = apply_cmvn(FeatureMatrix(read_tensor(input_path)))
    write_tensor(out, feats.frames)


@tokenizer_app.command("train")
def tokenizer_train(
    input_path: Path = typer.Option(..., "--input", help="Whitespace-separated training text"),
    size: Optional[int] = typer.Option(None, "--size", help="Target vocabulary size"),
    mode: Optional[str] = typer.Option(None, "--mode", help="unigram or char"),
    out: Path = typer.Option(..., "--out", help="Model TSV"),
) -> None:
    base = get_settings().tokenizer
    update: dict[str, Any] = {}
    if size is not None:
        update["vocab_size"] = size
    if mode is not None:
        update["mode"] = mode
    cfg = TokenizerConfig.model_validate({**base.model_dump(), **update})
    model = train_unigram(Counter(_read_words(input_path)), cfg)
    model.save(out)
    _emit({"pieces": len(model), "mode": model.mode, "excluded": list(model.excluded)})


@tokenizer_app.command("encode")
def tokenizer_encode(
    model_path: Path = typer.Option(..., "--model"),
    words: List[str] = typer.Argument(..., help="Words to encode"),
) -> None:
    model = TokenizerModel.load(model_path)
    for word in words:
        typer.echo(f"{word}\t{' '.join(str(i) for i in encode_word(model, word))}")


@tokenizer_app.command("decode")
def tokenizer_decode(
    model_path: Path = typer.Option(..., "--model"),
    ids: List[int] = typer.Argument(..., help="Piece ids"),
) -> None:
    typer.echo(decode_ids(TokenizerModel.load(model_path), ids))


@tokenizer_app.command("map")
def tokenizer_map(
    model_path: Path = typer.Option(..., "--model"),
    input_path: Path = typer.Option(..., "--input", help="Training word list"),
    out: Path = typer.Option(..., "--out", help="Word map TSV"),
) -> None:
    word_map = build_word_map(TokenizerModel.load(model_path), _read_words(input_path))
    word_map.save(out)
    _emit({"entries": len(word_map)})


@lm_app.command("train")
def lm_train(
    labels: Path = typer.Option(..., "--labels", help="Label file: utt_id l1 l2 ..."),
    out: Path = typer.Option(..., "--out", help="ARPA output"),
    order: Optional[int] = typer.Option(None, "--order"),
    vocab_size: Optional[int] = typer.Option(None, "--vocab-size"),
) -> None:
    cfg = get_settings().labellm
    order = order or cfg.order or default_lm_order(cfg.unit)
    lm = estimate_ngram(read_label_file(labels).values(), order, vocab_size=vocab_size)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(export_arpa(lm), encoding="utf-8")
    _emit({"order": lm.order, "vocab_size": lm.vocab_size, "contexts": len(lm.contexts)})


@lm_app.command("score")
def lm_score(
    lm_path: Path = typer.Option(..., "--lm", help="ARPA model"),
    labels: Path = typer.Option(..., "--labels", help="Label file: utt_id l1 l2 ..."),
) -> None:
    lm = import_arpa(lm_path.read_text(encoding="utf-8"))
    for utt_id, seq in read_label_file(labels).items():
        typer.echo(f"{utt_id}\t{score_sequence(lm, seq)!r}")


@lm_app.command("export")
def lm_export(
    lm_path: Path = typer.Option(..., "--lm", help="ARPA model"),
    out: Path = typer.Option(..., "--out", help="Canonical ARPA output"),
) -> None:
    lm = import_arpa(lm_path.read_text(encoding="utf-8"))
    out.write_text(export_arpa(lm), encoding="utf-8")
    _emit({"max_normalization_error": lm.max_normalization_error()})


@lm_app.command("compile")
def lm_compile(
    lm_path: Path = typer.Option(..., "--lm", help="ARPA model"),
    out: Path = typer.Option(..., "--out", help="Text FSA output"),
) -> None:
    fsa = lm_to_fsa(import_arpa(lm_path.read_text(encoding="utf-8")))
    fsa.save(out)
    _emit(fsa.summary())


@graph_app.command("build-topo")
def graph_build_topo(
    vocab_size: int = typer.Option(..., "--vocab-size"),
    out: Path = typer.Option(..., "--out"),
) -> None:
    fsa = build_ctc_topology(vocab_size)
    fsa.save(out)
    _emit(fsa.summary())


@graph_app.command("build-num")
def graph_build_num(
    labels: str = typer.Option(..., "--labels", help="Space-separated label ids"),
    vocab_size: int = typer.Option(..., "--vocab-size"),
    out: Path = typer.Option(..., "--out"),
) -> None:
    fsa = build_numerator(parse_label_sequence(labels), vocab_size)
    fsa.save(out)
    _emit(fsa.summary())


@graph_app.command("build-den")
def graph_build_den(
    lm_path: Path = typer.Option(..., "--lm", help="ARPA model"),
    out: Path = typer.Option(..., "--out"),
) -> None:
    fsa = build_denominator(import_arpa(lm_path.read_text(encoding="utf-8")))
    fsa.save(out)
    _emit(fsa.summary())


@graph_app.command("info")
def graph_info(path: Path = typer.Argument(..., help="Text FSA")) -> None:
    _emit(WeightedFsa.load(path).summary())


def _loss_inputs(logits: Path, labels: Path) -> tuple[np.ndarray, tuple[int, ...]]:
    return log_softmax(read_tensor(logits), axis=1), parse_label_sequence(labels.read_text(encoding="utf-8"))


def _emit_loss(loss: float, grad: np.ndarray) -> None:
    _emit({"loss": loss, "grad_checksum": float(np.abs(grad).sum()), "grad_sum": float(grad.sum())})


@loss_app.command("ctc")
def loss_ctc(
    logits: Path = typer.Option(..., "--logits", help="T x (V+1) tensor; log-softmax is applied"),
    labels: Path = typer.Option(..., "--labels", help="File with space-separated label ids"),
) -> None:
    lp, seq = _loss_inputs(logits, labels)
    result = ctc_loss(lp, seq)
    _emit_loss(result.loss, result.grad)


@loss_app.command("crf")
def loss_crf(
    logits: Path = typer.Option(..., "--logits", help="T x (V+1) tensor; log-softmax is applied"),
    labels: Path = typer.Option(..., "--labels", help="File with space-separated label ids"),
    den: Path = typer.Option(..., "--den", help="Denominator graph (text FSA)"),
    lm_path: Path = typer.Option(..., "--lm", help="ARPA model"),
) -> None:
    lp, seq = _loss_inputs(logits, labels)
    lm = import_arpa(lm_path.read_text(encoding="utf-8"))
    result = crf_loss(lp, seq, WeightedFsa.load(den), lm)
    _emit_loss(result.loss, result.grad)


@app.command()
def augment(
    input_path: Path = typer.Option(..., "--in", help="Input tensor file"),
    out: Path = typer.Option(..., "--out", help="Output tensor file"),
    policy: Optional[Path] = typer.Option(None, "--policy", help="SpecAug policy JSON"),
    seed: Optional[int] = typer.Option(None, "--seed"),
) -> None:
    """Ratio SpecAug on a feature tensor."""
    pol = load_policy(_read_json(policy)) if policy else get_settings().specaug
    feats = spec_augment(FeatureMatrix(read_tensor(input_path)), pol, _seed(seed))
    write_tensor(out, feats.frames)


@sched_app.command("dump")
def sched_dump(
    steps: int = typer.Option(..., "--steps", min=1),
    d_model: Optional[int] = typer.Option(None, "--d-model"),
    warmup: Optional[int] = typer.Option(None, "--warmup"),
    peak: Optional[float] = typer.Option(None, "--peak"),
) -> None:
    """CSV of (step, lr)."""
    cfg = get_settings().scheduler
    state = SchedulerState(
        d_model=d_model or cfg.d_model,
        warmup_steps=warmup or cfg.warmup_steps,
        peak_factor=peak or cfg.peak_factor,
        plateau_factor=cfg.plateau_factor,
        stop_threshold=cfg.stop_threshold,
    )
    typer.echo("step,lr")
    for step, lr in dump_schedule(state, steps):
        typer.echo(f"{step},{lr!r}")


@app.command()
def synth(
    out: Path = typer.Option(..., "--out", help="Corpus directory"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    num_train: Optional[int] = typer.Option(None, "--num-train"),
    num_test: Optional[int] = typer.Option(None, "--num-test"),
) -> None:
    """Generate a synthetic corpus."""
    cfg = get_settings().synth
    update = {k: v for k, v in {"num_train": num_train, "num_test": num_test}.items() if v is not None}
    cfg = cfg.model_validate({**cfg.model_dump(), **update})
    _emit(write_synthetic_corpus(out, cfg, _seed(seed)))


@app.command()
def train(
    config: Path = typer.Option(..., "--config", help="Training config JSON"),
) -> None:
    """Train an acoustic model and score the test split."""
    cfg = TrainConfig.model_validate(_read_json(config))
    report = train_loop(cfg)
    summary: dict[str, Any] = {
        "epochs": len(report.epochs),
        "best_val_loss": report.best_val_loss,
        "stopped_early": report.stopped_early,
        "checkpoint": str(report.best_checkpoint) if report.best_checkpoint else None,
    }
    if report.best_checkpoint and (cfg.data_dir / "test").exists():
        model, _ = load_checkpoint(report.best_checkpoint)
        evaluator = DecodeEvaluator(
            model=model, metrics=default_suite(), utterances=read_split(cfg.data_dir, "test"), use_cmvn=cfg.apply_cmvn
        )
        summary["test"] = evaluator.evaluate().scores
    _emit(summary)


@app.command()
def decode(
    ckpt: Path = typer.Option(..., "--ckpt", help="Model checkpoint"),
    input_path: Path = typer.Option(..., "--in", help="Feature tensor or corpus directory"),
    split: str = typer.Option("test", help="Split to decode when --in is a corpus directory"),
    out: Optional[Path] = typer.Option(None, "--out", help="Hypothesis label file"),
) -> None:
    """Greedy CTC decoding."""
    model, _ = load_checkpoint(ckpt)
    if input_path.is_dir():
        report = DecodeEvaluator(model=model, metrics=default_suite(), utterances=read_split(input_path, split)).evaluate()
        if out:
            write_label_file(out, report.hypotheses)
        _emit(report.scores)
        return
    typer.echo(" ".join(str(x) for x in greedy_decode(model, read_tensor(input_path))))


@app.command()
def score(
    hyp: Path = typer.Option(..., "--hyp", help="Hypothesis label file"),
    ref: Path = typer.Option(..., "--ref", help="Reference label file"),
) -> None:
    """Token and sentence error rates."""
    hyps, refs = read_label_file(hyp), read_label_file(ref)
    missing = sorted(set(refs) - set(hyps))
    if missing:
        raise ConfigError(f"{len(missing)} reference utterances have no hypothesis, e.g. {missing[0]}")
    ids = list(refs)
    h = [hyps[i] for i in ids]
    r = [refs[i] for i in ids]
    _emit({"ter": token_error_rate(h, r), "ser": SentenceErrorRate().compute(hyps=h, refs=r), "utterances": len(ids)})


@nn_app.command("info")
def nn_info(
    config: Optional[Path] = typer.Option(None, "--config", help="Model config JSON"),
    preset_name: Optional[str] = typer.Option(None, "--preset", help="conformer-s+, conformer-m or conformer-m+"),
    table: bool = typer.Option(False, "--table", help="Per-submodule breakdown table"),
) -> None:
    """Parameter count of a model config."""
    if config and preset_name:
        raise typer.BadParameter("use either --config or --preset", param_hint="--preset")
    if preset_name:
        cfg = preset(preset_name)
    elif config:
        cfg = ConformerConfig.model_validate(_read_json(config))
    else:
        cfg = ConformerConfig()
    if not table:
        _emit({"params": param_count(cfg), "config": cfg.model_dump()})
        return
    breakdown = param_breakdown(ConformerModel(cfg))
    grid = Table(title=f"{param_count(cfg):,} parameters")
    grid.add_column("submodule")
    grid.add_column("params", justify="right")
    for name, count in breakdown.items():
        grid.add_row(name, f"{count:,}")
    Console().print(grid)


def dispatch(argv: Sequence[str]) -> int:
    """Run one command line; 0 on success, 1 on usage errors, 2 on data or validation errors."""
    command = typer.main.get_command(app)
    try:
        rv = command.main(list(argv), prog_name=PROG_NAME, standalone_mode=False)
    except UsageError as exc:
        exc.show()
        return 1
    except typer.Exit as exc:
        return exc.exit_code
    except typer.Abort:
        return 1
    except (CtcCrfError, ValidationError, OSError) as exc:
        logger.error(
            "Command failed",
            extra={"error": str(exc), "error_type": type(exc).__name__, "argv": list(argv)},
        )
        typer.echo(f"error: {exc}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
