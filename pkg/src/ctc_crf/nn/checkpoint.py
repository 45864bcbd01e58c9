from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping

import torch

from ..errors import FormatError
from ..settings import ConformerConfig
from ..utils import read_checkpoint, write_checkpoint
from .conformer import ConformerModel

logger = logging.getLogger(__name__)


def save_checkpoint(path: Path, model: ConformerModel, extra: Mapping[str, Any] | None = None) -> None:
    header = {"model": model.config.model_dump(), **(extra or {})}
    tensors = {name: t.detach().to(torch.float64).numpy() for name, t in model.state_dict().items()}
    write_checkpoint(path, header, tensors)
    logger.info("Saved checkpoint", extra={"path": str(path), "tensors": len(tensors)})


def load_checkpoint(path: Path) -> tuple[ConformerModel, dict[str, Any]]:
    header, tensors = read_checkpoint(path)
    if "model" not in header:
        raise FormatError(f"{path}: checkpoint header has no model config")
    config = ConformerConfig.model_validate(header.pop("model"))
    model = ConformerModel(config)
    state = model.state_dict()
    missing = set(state) - set(tensors)
    if missing:
        raise FormatError(f"{path}: checkpoint lacks tensors {sorted(missing)}")
    model.load_state_dict({k: torch.from_numpy(v).to(model.dtype) for k, v in tensors.items()})
    return model, header
