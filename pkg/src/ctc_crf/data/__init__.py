from .corpus import read_split, split_train_val, write_split
from .pipeline import BaseCorpusPipeline
from .types import Utterance

__all__ = ["BaseCorpusPipeline", "Utterance", "read_split", "split_train_val", "write_split"]
