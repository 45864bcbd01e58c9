from __future__ import annotations

import torch
from torch import nn

from ..errors import LengthError

MIN_FRAMES = 8


def conv_out_length(length: int) -> int:
    """Output length of a kernel-3, stride-2, padding-1 convolution."""
    return (length - 1) // 2 + 1


def subsampled_length(num_frames: int) -> int:
    """Frames after two stride-2 convolutions; equals ``(T - 1) // 4 + 1``."""
    return conv_out_length(conv_out_length(num_frames))


class Conv2dSubsampling(nn.Module):
    """Two stride-2 3x3 convolutions with ReLU; channels x frequency folded and projected to d_model."""

    def __init__(self, input_dim: int, channels: int, d_model: int):
        super().__init__()
        self.input_dim = input_dim
        self.conv = nn.Sequential(
            nn.Conv2d(1, channels, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
            nn.Conv2d(channels, channels, kernel_size=3, stride=2, padding=1),
            nn.ReLU(),
        )
        self.out = nn.Linear(channels * subsampled_length(input_dim), d_model)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (B, T, D)
        if x.size(1) < MIN_FRAMES:
            raise LengthError(f"subsampling needs at least {MIN_FRAMES} frames, got {x.size(1)}")
        x = self.conv(x.unsqueeze(1))
        b, c, t, f = x.shape
        return self.out(x.transpose(1, 2).reshape(b, t, c * f))
