"""N-gram label language models."""

from .arpa import export_arpa, import_arpa
from .compile import lm_to_fsa
from .ngram import (
    MAX_ORDER,
    ContextEntry,
    NGramLabelLm,
    default_lm_order,
    estimate_ngram,
    score_sequence,
)

__all__ = [
    "ContextEntry",
    "MAX_ORDER",
    "NGramLabelLm",
    "default_lm_order",
    "estimate_ngram",
    "export_arpa",
    "import_arpa",
    "lm_to_fsa",
    "score_sequence",
]
