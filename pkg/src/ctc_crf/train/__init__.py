from .decode import LogProbModel, best_path, greedy_decode
from .loop import EpochRecord, Trainer, TrainingReport, load_corpus, train_loop

__all__ = [
    "EpochRecord",
    "LogProbModel",
    "Trainer",
    "TrainingReport",
    "best_path",
    "greedy_decode",
    "load_corpus",
    "train_loop",
]
