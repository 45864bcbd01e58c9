from __future__ import annotations

from collections import OrderedDict

from torch import nn

from ..errors import ConfigError
from ..settings import ConformerConfig
from .subsampling import subsampled_length

PRESETS: dict[str, ConformerConfig] = {
    "conformer-s+": ConformerConfig(num_blocks=16, d_model=180, num_heads=4, conv_kernel=32, vocab_size_plus_blank=149),
    "conformer-m": ConformerConfig(num_blocks=16, d_model=256, num_heads=4, conv_kernel=32, vocab_size_plus_blank=149),
    "conformer-m+": ConformerConfig(num_blocks=17, d_model=360, num_heads=8, conv_kernel=32, vocab_size_plus_blank=149),
}


def preset(name: str) -> ConformerConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown model preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name].model_copy()


def block_param_count(d: int, expansion: int, kernel: int) -> int:
    ffn = 2 * d + (d * expansion * d + expansion * d) + (expansion * d * d + d)
    mhsa = 2 * d + (3 * d * d + 3 * d) + (d * d + d)
    conv = 2 * d + (2 * d * d + 2 * d) + (kernel * d + d) + 2 * d + (d * d + d)
    return 2 * ffn + mhsa + conv + 2 * d


def param_count(config: ConformerConfig) -> int:
    """Closed-form number of trainable scalars in :class:`ConformerModel`."""
    c, d = config.subsampling_channels, config.d_model
    front = (9 * c + c) + (9 * c * c + c) + (c * subsampled_length(config.input_dim) * d + d)
    blocks = config.num_blocks * block_param_count(d, config.ffn_expansion, config.conv_kernel)
    out = d * config.vocab_size_plus_blank + config.vocab_size_plus_blank
    return front + blocks + out


def param_breakdown(model: nn.Module) -> "OrderedDict[str, int]":
    """Scalar count per top-level submodule, blocks listed individually."""
    counts: OrderedDict[str, int] = OrderedDict()
    for name, param in model.named_parameters():
        parts = name.split(".")
        key = ".".join(parts[:2]) if parts[0] == "blocks" else parts[0]
        counts[key] = counts.get(key, 0) + param.numel()
    return counts
