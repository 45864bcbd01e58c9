from .grammar import (
    GRAMMAR_FILE,
    SyntheticCorpusPipeline,
    SyntheticGrammar,
    default_grammar,
    generate,
    stationary_distribution,
    write_synthetic_corpus,
)

__all__ = [
    "GRAMMAR_FILE",
    "SyntheticCorpusPipeline",
    "SyntheticGrammar",
    "default_grammar",
    "generate",
    "stationary_distribution",
    "write_synthetic_corpus",
]
