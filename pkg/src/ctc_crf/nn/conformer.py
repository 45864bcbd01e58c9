"""Conformer acoustic model.

Convolutional 1/4 subsampling, sinusoidal positions, a stack of macaron
Conformer blocks and a log-softmax output layer whose last column is blank.
"""

from __future__ import annotations

import logging
import math

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from ..errors import ConfigError
from ..settings import ConformerConfig
from .subsampling import Conv2dSubsampling

logger = logging.getLogger(__name__)


class SinusoidalPositionalEncoding(nn.Module):
    def __init__(self, d_model: int, max_len: int = 5000):
        super().__init__()
        position = torch.arange(max_len, dtype=torch.float64).unsqueeze(1)
        div = torch.exp(torch.arange(0, d_model, 2, dtype=torch.float64) * (-math.log(10000.0) / d_model))
        pe = torch.zeros(max_len, d_model, dtype=torch.float64)
        pe[:, 0::2] = torch.sin(position * div)
        pe[:, 1::2] = torch.cos(position * div[: d_model // 2])
        self.register_buffer("pe", pe, persistent=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.size(1) > self.pe.size(0):
            raise ConfigError(f"sequence of {x.size(1)} frames exceeds positional table of {self.pe.size(0)}")
        return x + self.pe[: x.size(1)].to(x.dtype)


class FeedForwardModule(nn.Module):
    def __init__(self, d_model: int, expansion: int, dropout: float):
        super().__init__()
        self.norm = nn.LayerNorm(d_model)
        self.linear1 = nn.Linear(d_model, expansion * d_model)
        self.linear2 = nn.Linear(expansion * d_model, d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.dropout(F.silu(self.linear1(self.norm(x))))
        return self.dropout(self.linear2(x))


class MultiHeadSelfAttentionModule(nn.Module):
    def __init__(self, d_model: int, num_heads: int, dropout: float):
        super().__init__()
        self.norm = nn.LayerNorm(d_model)
        self.attention = nn.MultiheadAttention(d_model, num_heads, dropout=dropout, batch_first=True)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.norm(x)
        out, _ = self.attention(x, x, x, need_weights=False)
        return self.dropout(out)


class ConvolutionModule(nn.Module):
    """Pointwise conv + GLU, depthwise conv, LayerNorm, Swish, pointwise conv."""

    def __init__(self, d_model: int, kernel_size: int, dropout: float):
        super().__init__()
        self.norm = nn.LayerNorm(d_model)
        self.pointwise1 = nn.Conv1d(d_model, 2 * d_model, kernel_size=1)
        self.depthwise = nn.Conv1d(d_model, d_model, kernel_size=kernel_size, groups=d_model)
        self.conv_norm = nn.LayerNorm(d_model)
        self.pointwise2 = nn.Conv1d(d_model, d_model, kernel_size=1)
        self.dropout = nn.Dropout(dropout)
        # even kernels pad one more frame on the right
        self.padding = ((kernel_size - 1) // 2, kernel_size // 2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.norm(x).transpose(1, 2)
        x = F.glu(self.pointwise1(x), dim=1)
        x = self.depthwise(F.pad(x, self.padding))
        x = F.silu(self.conv_norm(x.transpose(1, 2))).transpose(1, 2)
        return self.dropout(self.pointwise2(x).transpose(1, 2))


class ConformerBlock(nn.Module):
    def __init__(self, config: ConformerConfig):
        super().__init__()
        d = config.d_model
        self.ffn1 = FeedForwardModule(d, config.ffn_expansion, config.dropout)
        self.mhsa = MultiHeadSelfAttentionModule(d, config.num_heads, config.dropout)
        self.conv = ConvolutionModule(d, config.conv_kernel, config.dropout)
        self.ffn2 = FeedForwardModule(d, config.ffn_expansion, config.dropout)
        self.norm = nn.LayerNorm(d)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + 0.5 * self.ffn1(x)
        x = x + self.mhsa(x)
        x = x + self.conv(x)
        x = x + 0.5 * self.ffn2(x)
        return self.norm(x)


def _dtype(name: str) -> torch.dtype:
    return torch.float64 if name == "float64" else torch.float32


class ConformerModel(nn.Module):
    def __init__(self, config: ConformerConfig):
        super().__init__()
        self.config = config
        self.subsampling = Conv2dSubsampling(config.input_dim, config.subsampling_channels, config.d_model)
        self.positional = SinusoidalPositionalEncoding(config.d_model)
        self.blocks = nn.ModuleList(ConformerBlock(config) for _ in range(config.num_blocks))
        self.output = nn.Linear(config.d_model, config.vocab_size_plus_blank)
        self.to(_dtype(config.dtype))
        self.reset_parameters(config.seed)

    @property
    def dtype(self) -> torch.dtype:
        return _dtype(self.config.dtype)

    @property
    def vocab_size(self) -> int:
        """Number of labels, blank excluded."""
        return self.config.vocab_size_plus_blank - 1

    def reset_parameters(self, seed: int) -> None:
        """Xavier-uniform weights and zero biases, drawn from a private seeded stream."""
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            for name, param in self.named_parameters():
                if param.dim() >= 2:
                    nn.init.xavier_uniform_(param)
                elif name.endswith("bias"):
                    nn.init.zeros_(param)
                else:
                    nn.init.ones_(param)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """(B, T, D) features -> (B, T', V + 1) log-probabilities."""
        if x.dim() != 3 or x.size(-1) != self.config.input_dim:
            raise ConfigError(
                f"subsampling: expected (B, T, {self.config.input_dim}) input, got {tuple(x.shape)}"
            )
        x = self.positional(self.subsampling(x.to(self.dtype)))
        for block in self.blocks:
            x = block(x)
        return F.log_softmax(self.output(x), dim=-1)

    def log_probs(self, features: np.ndarray) -> np.ndarray:
        was_training = self.training
        self.eval()
        try:
            with torch.no_grad():
                out = self(torch.as_tensor(np.asarray(features), dtype=self.dtype).unsqueeze(0))
        finally:
            self.train(was_training)
        return out[0].to(torch.float64).numpy()
