"""Settings helpers."""

from .schema import (
    FEATURE_VARIANTS,
    AppSettings,
    ConformerConfig,
    FbankConfig,
    LabelLmConfig,
    OptimizerConfig,
    SchedulerConfig,
    SpecAugPolicy,
    SynthConfig,
    TelemetryConfig,
    TokenizerConfig,
    TrainConfig,
    get_settings,
    load_settings,
)

__all__ = [
    "FEATURE_VARIANTS",
    "AppSettings",
    "ConformerConfig",
    "FbankConfig",
    "LabelLmConfig",
    "OptimizerConfig",
    "SchedulerConfig",
    "SpecAugPolicy",
    "SynthConfig",
    "TelemetryConfig",
    "TokenizerConfig",
    "TrainConfig",
    "get_settings",
    "load_settings",
]
