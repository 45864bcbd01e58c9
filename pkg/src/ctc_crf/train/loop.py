"""Desk-scale acoustic model training.

One optimizer step per batch: every utterance is forwarded on its own, its
loss gradient w.r.t. the log-probabilities is pulled back through the model
and accumulated with weight 1/B. Validation runs once per epoch without
augmentation and drives the plateau decay and early stop.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import torch

from ..augment import augment_frames, validate_policy
from ..data import Utterance, read_split, split_train_val
from ..errors import ConfigError, NoPathError, TrainingDivergedError
from ..evaluation.metrics import token_error_rate
from ..features.cmvn import apply_cmvn
from ..features.types import FeatureMatrix
from ..graphs import WeightedFsa
from ..labellm import NGramLabelLm, default_lm_order, estimate_ngram
from ..loss import build_denominator, sequence_loss
from ..nn import ConformerModel, backward, record, save_checkpoint
from ..schedule import SchedulerState, advance, lr_at, on_validation, should_stop
from ..settings import TrainConfig
from ..synthdata import GRAMMAR_FILE, SyntheticGrammar, write_synthetic_corpus
from ..utils import write_jsonl
from .decode import best_path

logger = logging.getLogger(__name__)

REPORT_FILE = "report.jsonl"
CHECKPOINT_FILE = "best.cckp"


@dataclass(slots=True)
class EpochRecord:
    epoch: int
    step: int
    train_loss: float
    val_loss: float
    val_ter: float
    lr: float
    scale: float
    skipped: int


@dataclass(slots=True)
class TrainingReport:
    epochs: list[EpochRecord] = field(default_factory=list)
    lr_trace: list[tuple[int, float, float]] = field(default_factory=list)
    best_val_loss: float = math.inf
    best_checkpoint: Path | None = None
    stopped_early: bool = False

    def rows(self) -> list[dict[str, Any]]:
        rows: list[dict[str, Any]] = [{"event": "epoch", **asdict(e)} for e in self.epochs]
        rows.extend({"event": "lr", "step": s, "lr": lr, "scale": sc} for s, lr, sc in self.lr_trace)
        rows.append(
            {
                "event": "summary",
                "epochs": len(self.epochs),
                "best_val_loss": self.best_val_loss,
                "best_checkpoint": str(self.best_checkpoint) if self.best_checkpoint else None,
                "stopped_early": self.stopped_early,
            }
        )
        return rows


def load_corpus(config: TrainConfig) -> tuple[list[Utterance], int]:
    """Training utterances and label vocabulary size; the synthetic corpus is generated when absent."""
    if not (config.data_dir / "train").exists():
        logger.info("No corpus found; generating synthetic data", extra={"path": str(config.data_dir)})
        write_synthetic_corpus(config.data_dir, config.synth, config.seed)
    utterances = read_split(config.data_dir, "train")
    grammar_path = config.data_dir / GRAMMAR_FILE
    if grammar_path.exists():
        vocab_size = SyntheticGrammar.load(grammar_path).vocab_size
    else:
        vocab_size = 1 + max((max(u.labels) for u in utterances if u.labels), default=0)
    return utterances, vocab_size


class Trainer:
    def __init__(self, config: TrainConfig):
        self.config = config
        validate_policy(config.specaug)
        torch.manual_seed(config.seed)
        utterances, self.vocab_size = load_corpus(config)
        self.train_set, self.val_set = split_train_val(utterances, config.val_fraction, config.seed)
        self._check_vocabulary()

        self.lm: NGramLabelLm | None = None
        self.den: WeightedFsa | None = None
        if config.loss_kind == "ctc_crf":
            order = config.lm_order or default_lm_order(config.unit)
            self.lm = estimate_ngram((u.labels for u in self.train_set), order, vocab_size=self.vocab_size)
            self.den = build_denominator(self.lm)

        self.model = ConformerModel(config.model)
        opt = config.optimizer
        self.optimizer = torch.optim.Adam(
            self.model.parameters(), lr=0.0, betas=(opt.beta1, opt.beta2), eps=opt.eps
        )
        self.scheduler = SchedulerState.from_config(config.scheduler)
        self.rng = np.random.default_rng(config.seed)
        self.report = TrainingReport()

    def _check_vocabulary(self) -> None:
        model = self.config.model
        if model.vocab_size_plus_blank != self.vocab_size + 1:
            raise ConfigError(
                f"model outputs {model.vocab_size_plus_blank} symbols but the corpus has "
                f"{self.vocab_size} labels plus blank"
            )
        dims = {u.features.shape[1] for u in self.train_set + self.val_set}
        if dims != {model.input_dim}:
            raise ConfigError(f"model expects {model.input_dim}-dim features, corpus has {sorted(dims)}")

    def _features(self, utt: Utterance, augment: bool) -> np.ndarray:
        feats = utt.features
        if self.config.apply_cmvn:
            feats = apply_cmvn(FeatureMatrix(feats)).frames
        if augment and self.config.use_specaug:
            feats = augment_frames(feats, self.config.specaug, self.rng)
        return feats

    def _loss(self, logprobs: np.ndarray, utt: Utterance):
        if not np.isfinite(logprobs).all():
            raise TrainingDivergedError(
                f"model produced non-finite log-probabilities on utterance {utt.utt_id}"
            )
        # float32 rows drift past the log-softmax tolerance, so only float64 is row-checked
        validate = self.model.dtype == torch.float64
        result = sequence_loss(
            self.config.loss_kind, logprobs, utt.labels, den=self.den, lm=self.lm, validate=validate
        )
        if not math.isfinite(result.loss) or not np.isfinite(result.grad).all():
            raise TrainingDivergedError(f"non-finite loss or gradient on utterance {utt.utt_id}")
        return result

    def train_step(self, batch: list[Utterance]) -> tuple[float, int]:
        """One optimizer update; returns (mean loss over usable utterances, skipped count)."""
        self.model.train()
        params = dict(self.model.named_parameters())
        for p in params.values():
            p.grad = None
        losses: list[float] = []
        tapes = []
        for utt in batch:
            tape = record(self.model, self._features(utt, augment=True))
            try:
                result = self._loss(tape.log_probs(), utt)
            except NoPathError:
                logger.warning("Skipping utterance without alignment", extra={"utt_id": utt.utt_id})
                continue
            losses.append(result.loss)
            tapes.append((tape, result.grad))

        for tape, grad in tapes:
            for name, g in backward(grad / len(tapes), tape).items():
                p = params[name]
                p.grad = g.clone() if p.grad is None else p.grad + g

        skipped = len(batch) - len(tapes)
        if not tapes:
            return math.nan, skipped
        norm = torch.nn.utils.clip_grad_norm_(self.model.parameters(), self.config.optimizer.clip_norm)
        if not torch.isfinite(norm):
            raise TrainingDivergedError(f"non-finite gradient norm at step {self.scheduler.step + 1}")
        lr = advance(self.scheduler)
        for group in self.optimizer.param_groups:
            group["lr"] = lr
        self.optimizer.step()
        if self.scheduler.step % self.config.log_every == 0:
            self.report.lr_trace.append((self.scheduler.step, lr, self.scheduler.current_scale))
        return float(np.mean(losses)), skipped

    def validate(self) -> tuple[float, float]:
        """Mean validation loss and token error rate, no augmentation."""
        losses, hyps, refs = [], [], []
        for utt in self.val_set:
            logprobs = self.model.log_probs(self._features(utt, augment=False))
            hyps.append(best_path(logprobs))
            refs.append(utt.labels)
            try:
                losses.append(self._loss(logprobs, utt).loss)
            except NoPathError:
                continue
        if not losses:
            raise TrainingDivergedError("no validation utterance has a usable alignment")
        val_loss = float(np.mean(losses))
        if not math.isfinite(val_loss):
            raise TrainingDivergedError(f"validation loss is {val_loss}")
        return val_loss, token_error_rate(hyps, refs)

    def run(self) -> TrainingReport:
        cfg = self.config
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(
            "Starting training",
            extra={
                "loss_kind": cfg.loss_kind,
                "train_utts": len(self.train_set),
                "val_utts": len(self.val_set),
                "vocab_size": self.vocab_size,
            },
        )
        for epoch in range(1, cfg.max_epochs + 1):
            order = self.rng.permutation(len(self.train_set))
            epoch_losses: list[float] = []
            skipped = 0
            for start in range(0, len(order), cfg.batch_size):
                batch = [self.train_set[i] for i in order[start : start + cfg.batch_size]]
                loss, n_skipped = self.train_step(batch)
                skipped += n_skipped
                if not math.isnan(loss):
                    epoch_losses.append(loss)

            val_loss, val_ter = self.validate()
            if val_loss < self.scheduler.best_val_loss:
                path = cfg.output_dir / CHECKPOINT_FILE
                save_checkpoint(path, self.model, {"epoch": epoch, "val_loss": val_loss, "vocab_size": self.vocab_size})
                self.report.best_checkpoint = path
                self.report.best_val_loss = val_loss
            on_validation(self.scheduler, val_loss)

            step = max(self.scheduler.step, 1)
            lr = lr_at(self.scheduler, step)
            self.report.lr_trace.append((step, lr, self.scheduler.current_scale))
            summary = EpochRecord(
                epoch=epoch,
                step=self.scheduler.step,
                train_loss=float(np.mean(epoch_losses)) if epoch_losses else math.nan,
                val_loss=val_loss,
                val_ter=val_ter,
                lr=lr,
                scale=self.scheduler.current_scale,
                skipped=skipped,
            )
            self.report.epochs.append(summary)
            logger.info("Epoch finished", extra=asdict(summary))

            if should_stop(self.scheduler):
                self.report.stopped_early = True
                logger.info("Learning rate fell below threshold; stopping", extra={"lr": lr})
                break

        write_jsonl(cfg.output_dir / REPORT_FILE, self.report.rows())
        return self.report


def train_loop(config: TrainConfig) -> TrainingReport:
    return Trainer(config).run()
