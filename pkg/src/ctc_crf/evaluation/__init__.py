"""Evaluation primitives."""

from .metrics import (
    Metric,
    MetricSuite,
    SentenceErrorRate,
    TokenErrorRate,
    default_suite,
    edit_distance,
    token_error_rate,
)
from .runner import BaseEvaluator, DecodeEvaluator, DecodeReport

__all__ = [
    "BaseEvaluator",
    "DecodeEvaluator",
    "DecodeReport",
    "Metric",
    "MetricSuite",
    "SentenceErrorRate",
    "TokenErrorRate",
    "default_suite",
    "edit_distance",
    "token_error_rate",
]
