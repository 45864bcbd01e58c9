"""Conformer acoustic model and its training hooks."""

from .checkpoint import load_checkpoint, save_checkpoint
from .conformer import (
    ConformerBlock,
    ConformerModel,
    ConvolutionModule,
    FeedForwardModule,
    MultiHeadSelfAttentionModule,
    SinusoidalPositionalEncoding,
)
from .params import PRESETS, block_param_count, param_breakdown, param_count, preset
from .subsampling import Conv2dSubsampling, subsampled_length
from .tape import Tape, backward, record

__all__ = [
    "ConformerBlock",
    "ConformerModel",
    "Conv2dSubsampling",
    "ConvolutionModule",
    "FeedForwardModule",
    "MultiHeadSelfAttentionModule",
    "PRESETS",
    "SinusoidalPositionalEncoding",
    "Tape",
    "backward",
    "block_param_count",
    "load_checkpoint",
    "param_breakdown",
    "param_count",
    "preset",
    "record",
    "save_checkpoint",
    "subsampled_length",
]
