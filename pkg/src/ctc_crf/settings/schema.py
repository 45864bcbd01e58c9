from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Literal, Optional

import orjson
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

UnitKind = Literal["phone", "char", "wordpiece"]


class TelemetryConfig(BaseModel):
    log_level: str = Field(default="INFO")
    log_json: bool = Field(default=False)


class FbankConfig(BaseModel):
    num_mel_bins: int = Field(default=80, ge=1)
    frame_length_ms: float = Field(default=25.0, gt=0)
    frame_shift_ms: float = Field(default=10.0, gt=0)
    preemphasis: float = Field(default=0.97, ge=0.0, lt=1.0)
    log_floor: float = Field(default=math.log(1e-10))
    low_freq: float = Field(default=0.0, ge=0.0)
    high_freq: Optional[float] = Field(
        default=None, description="Upper filterbank edge in Hz; Nyquist when unset"
    )
    deltas: bool = Field(default=False, description="Append delta and delta-delta features")

    @model_validator(mode="after")
    def _check_frames(self) -> FbankConfig:
        if self.frame_shift_ms > self.frame_length_ms:
            raise ValueError(
                f"frame_shift_ms ({self.frame_shift_ms}) must not exceed "
                f"frame_length_ms ({self.frame_length_ms})"
            )
        return self


FEATURE_VARIANTS: dict[str, FbankConfig] = {
    "fbank80": FbankConfig(num_mel_bins=80),
    "fbank40": FbankConfig(num_mel_bins=40),
    "fbank40-deltas": FbankConfig(num_mel_bins=40, deltas=True),
}


class SpecAugPolicy(BaseModel):
    """Ratio SpecAug policy; every extent is a proportion of the matching axis."""

    warp_ratio: float = Field(default=0.2, ge=0.0, le=1.0)
    freq_ratio: float = Field(default=0.15, ge=0.0, le=1.0)
    num_freq_masks: int = Field(default=2, ge=0)
    time_mask_ratio: float = Field(default=0.05, ge=0.0, le=1.0)
    num_time_masks: int = Field(default=2, ge=0)

    @model_validator(mode="after")
    def _check_mask_budget(self) -> SpecAugPolicy:
        if self.num_freq_masks * self.freq_ratio > 1.0:
            raise ValueError("num_freq_masks * freq_ratio must be <= 1")
        if self.num_time_masks * self.time_mask_ratio > 1.0:
            raise ValueError("num_time_masks * time_mask_ratio must be <= 1")
        return self

    @classmethod
    def identity(cls) -> SpecAugPolicy:
        return cls(
            warp_ratio=0.0, freq_ratio=0.0, num_freq_masks=0, time_mask_ratio=0.0, num_time_masks=0
        )


class SchedulerConfig(BaseModel):
    d_model: int = Field(default=256, gt=0)
    warmup_steps: int = Field(default=25000, gt=0)
    peak_factor: float = Field(default=1.0, gt=0)
    plateau_factor: float = Field(default=0.3, gt=0, lt=1.0)
    stop_threshold: float = Field(default=1e-6, ge=0)


class TokenizerConfig(BaseModel):
    vocab_size: int = Field(default=150, gt=0)
    mode: Literal["unigram", "char"] = Field(default="unigram")
    reserved: list[str] = Field(default_factory=lambda: ["<unk>", "<s>", "</s>"])
    max_piece_length: int = Field(default=8, ge=1)
    min_frequency: int = Field(default=2, ge=1)
    character_coverage: float = Field(default=1.0, gt=0.0, le=1.0)
    shrink_ratio: float = Field(
        default=0.2, gt=0.0, lt=1.0, description="Share of prunable pieces dropped per round"
    )
    em_iterations: int = Field(default=2, ge=1)

    @field_validator("reserved", mode="before")
    @classmethod
    def parse_reserved(cls, v):
        if isinstance(v, str):
            return [x.strip() for x in v.split(",") if x.strip()]
        return v


class LabelLmConfig(BaseModel):
    unit: UnitKind = Field(default="char")
    order: Optional[int] = Field(default=None, ge=1, le=4)


class ConformerConfig(BaseModel):
    num_blocks: int = Field(default=2, ge=1)
    d_model: int = Field(default=64, gt=0)
    num_heads: int = Field(default=4, gt=0)
    conv_kernel: int = Field(default=32, ge=1)
    ffn_expansion: int = Field(default=4, ge=1)
    vocab_size_plus_blank: int = Field(default=6, ge=2)
    input_dim: int = Field(default=80, ge=1)
    subsampling_channels: int = Field(default=128, ge=1)
    dropout: float = Field(default=0.0, ge=0.0, lt=1.0)
    dtype: Literal["float64", "float32"] = Field(default="float64")
    seed: int = Field(default=0)

    @model_validator(mode="after")
    def _check_heads(self) -> ConformerConfig:
        if self.d_model % self.num_heads:
            raise ValueError(
                f"d_model ({self.d_model}) must be divisible by num_heads ({self.num_heads})"
            )
        return self


class OptimizerConfig(BaseModel):
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.98, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-9, gt=0.0)
    clip_norm: float = Field(default=5.0, gt=0.0)


class SynthConfig(BaseModel):
    vocab_size: int = Field(default=5, ge=1)
    feature_dim: int = Field(default=20, ge=1)
    sigma: float = Field(default=0.3, ge=0.0)
    min_duration: int = Field(default=4, ge=1)
    max_duration: int = Field(default=8, ge=1)
    min_labels: int = Field(default=3, ge=1)
    max_labels: int = Field(default=8, ge=1)
    num_train: int = Field(default=2000, ge=1)
    num_test: int = Field(default=200, ge=0)

    @model_validator(mode="after")
    def _check_ranges(self) -> SynthConfig:
        if self.max_duration < self.min_duration:
            raise ValueError("max_duration must be >= min_duration")
        if self.max_labels < self.min_labels:
            raise ValueError("max_labels must be >= min_labels")
        return self


def _toy_model() -> ConformerConfig:
    return ConformerConfig(
        num_blocks=2, d_model=64, num_heads=4, conv_kernel=15, input_dim=20, vocab_size_plus_blank=6
    )


class TrainConfig(BaseModel):
    loss_kind: Literal["ctc", "ctc_crf"] = Field(default="ctc_crf")
    seed: int = Field(default=0)
    data_dir: Path = Field(default=Path("data/synth"))
    output_dir: Path = Field(default=Path("artifacts/train"))
    batch_size: int = Field(default=4, ge=1)
    max_epochs: int = Field(default=30, ge=1)
    val_fraction: float = Field(default=0.05, gt=0.0, lt=1.0)
    unit: UnitKind = Field(default="char")
    lm_order: Optional[int] = Field(default=None, ge=1, le=4)
    apply_cmvn: bool = Field(default=False)
    use_specaug: bool = Field(default=True)
    log_every: int = Field(default=50, ge=1)
    model: ConformerConfig = Field(default_factory=_toy_model)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    scheduler: SchedulerConfig = Field(
        default_factory=lambda: SchedulerConfig(warmup_steps=400, peak_factor=1.0)
    )
    specaug: SpecAugPolicy = Field(default_factory=SpecAugPolicy)
    synth: SynthConfig = Field(default_factory=SynthConfig)

    @model_validator(mode="after")
    def _sync_scheduler_width(self) -> TrainConfig:
        # the schedule follows the model width unless set explicitly
        if "d_model" not in self.scheduler.model_fields_set:
            self.scheduler = self.scheduler.model_copy(update={"d_model": self.model.d_model})
        return self

    @classmethod
    def from_json_file(cls, path: Path) -> TrainConfig:
        return cls.model_validate(orjson.loads(path.read_bytes()))


class AppSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="CTC_CRF_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="ignore",
    )

    seed: int = 0
    artifacts_dir: Path = Path("artifacts")

    telemetry: TelemetryConfig = Field(default_factory=TelemetryConfig)
    fbank: FbankConfig = Field(default_factory=FbankConfig)
    specaug: SpecAugPolicy = Field(default_factory=SpecAugPolicy)
    scheduler: SchedulerConfig = Field(default_factory=SchedulerConfig)
    tokenizer: TokenizerConfig = Field(default_factory=TokenizerConfig)
    labellm: LabelLmConfig = Field(default_factory=LabelLmConfig)
    synth: SynthConfig = Field(default_factory=SynthConfig)


_settings: Optional[AppSettings] = None


def load_settings(config_path: Optional[Path] = None) -> AppSettings:
    """Build settings from defaults, the environment and an optional JSON overlay."""
    global _settings
    overrides = orjson.loads(config_path.read_bytes()) if config_path else {}
    _settings = AppSettings(**overrides)
    logger.debug(
        "Settings loaded",
        extra={"config_path": str(config_path) if config_path else None, "seed": _settings.seed},
    )
    return _settings


def get_settings() -> AppSettings:
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings
