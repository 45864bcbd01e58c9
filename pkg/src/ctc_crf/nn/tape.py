from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..errors import ConfigError, StateError
from .conformer import ConformerModel


@dataclass(slots=True)
class Tape:
    """A recorded forward pass; holds the autograd graph until :func:`backward` consumes it."""

    model: ConformerModel
    output: torch.Tensor
    consumed: bool = False

    def log_probs(self) -> np.ndarray:
        return self.output.detach().to(torch.float64).numpy()


def record(model: ConformerModel, features: np.ndarray) -> Tape:
    x = torch.as_tensor(np.asarray(features), dtype=model.dtype).unsqueeze(0)
    return Tape(model=model, output=model(x)[0])


def backward(loss_grad: np.ndarray, tape: Tape | None) -> dict[str, torch.Tensor]:
    """Pull ``d loss / d log-probs`` back to every named parameter."""
    if tape is None:
        raise StateError("backward called before a forward pass was recorded")
    if tape.consumed:
        raise StateError("tape was already consumed by a previous backward call")
    grad = torch.as_tensor(np.asarray(loss_grad), dtype=tape.output.dtype)
    if grad.shape != tape.output.shape:
        raise ConfigError(f"output: gradient shape {tuple(grad.shape)} != output shape {tuple(tape.output.shape)}")

    named = [(n, p) for n, p in tape.model.named_parameters() if p.requires_grad]
    grads = torch.autograd.grad(
        tape.output, [p for _, p in named], grad_outputs=grad, allow_unused=True
    )
    tape.consumed = True
    return {n: torch.zeros_like(p) if g is None else g for (n, p), g in zip(named, grads)}
