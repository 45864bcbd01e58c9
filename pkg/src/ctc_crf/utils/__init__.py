"""Utility helpers."""

from .audio import read_wav, write_wav
from .io import (
    parse_label_sequence,
    read_jsonl,
    read_label_file,
    write_jsonl,
    write_label_file,
)
from .tensor_io import read_checkpoint, read_tensor, write_checkpoint, write_tensor

__all__ = [
    "parse_label_sequence",
    "read_checkpoint",
    "read_jsonl",
    "read_label_file",
    "read_tensor",
    "read_wav",
    "write_checkpoint",
    "write_jsonl",
    "write_label_file",
    "write_tensor",
    "write_wav",
]
