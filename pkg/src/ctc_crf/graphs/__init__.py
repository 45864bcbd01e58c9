"""Weighted FSAs, CTC graphs and forward-backward."""

from .compose import compose_denominator
from .ctc import LabelSequence, StateSequence, blank_id, build_ctc_topology, build_numerator, collapse
from .forward_backward import ForwardBackwardResult, forward_backward
from .fsa import (
    EPSILON,
    ArcIndex,
    FsaPath,
    WeightedFsa,
    best_path_weight,
    failure_path_weight,
    iter_paths,
    sequence_log_weight,
    trim,
)

__all__ = [
    "ArcIndex",
    "EPSILON",
    "ForwardBackwardResult",
    "FsaPath",
    "LabelSequence",
    "StateSequence",
    "WeightedFsa",
    "best_path_weight",
    "blank_id",
    "build_ctc_topology",
    "build_numerator",
    "collapse",
    "compose_denominator",
    "failure_path_weight",
    "forward_backward",
    "iter_paths",
    "sequence_log_weight",
    "trim",
]
