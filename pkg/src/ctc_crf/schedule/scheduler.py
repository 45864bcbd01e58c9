"""Warmup / inverse-square-root learning-rate schedule with plateau decay."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ..errors import ConfigError
from ..settings import SchedulerConfig

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class SchedulerState:
    d_model: int
    warmup_steps: int
    peak_factor: float = 1.0
    plateau_factor: float = 0.3
    stop_threshold: float = 1e-6
    step: int = 0
    best_val_loss: float = math.inf
    current_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.d_model <= 0 or self.warmup_steps <= 0 or self.peak_factor <= 0:
            raise ConfigError("d_model, warmup_steps and peak_factor must be positive")
        if not 0.0 < self.plateau_factor < 1.0:
            raise ConfigError(f"plateau_factor must lie in (0, 1), got {self.plateau_factor}")
        if self.step < 0:
            raise ConfigError(f"step must be >= 0, got {self.step}")

    @classmethod
    def from_config(cls, config: SchedulerConfig) -> SchedulerState:
        return cls(
            d_model=config.d_model,
            warmup_steps=config.warmup_steps,
            peak_factor=config.peak_factor,
            plateau_factor=config.plateau_factor,
            stop_threshold=config.stop_threshold,
        )

    @property
    def peak_lr(self) -> float:
        return self.peak_factor * self.d_model**-0.5 * self.warmup_steps**-0.5 * self.current_scale


def lr_at(state: SchedulerState, n: int) -> float:
    if n < 1:
        raise ConfigError(f"learning-rate step must be >= 1, got {n}")
    return (
        state.peak_factor
        * state.d_model**-0.5
        * min(n**-0.5, n * state.warmup_steps**-1.5)
        * state.current_scale
    )


def advance(state: SchedulerState) -> float:
    """Increment the step counter and return the learning rate for it."""
    state.step += 1
    return lr_at(state, state.step)


def on_validation(state: SchedulerState, val_loss: float) -> SchedulerState:
    if math.isnan(val_loss) or math.isinf(val_loss):
        raise ConfigError(f"validation loss must be finite, got {val_loss}")
    if val_loss >= state.best_val_loss:
        state.current_scale *= state.plateau_factor
        logger.info(
            "Validation loss plateaued; decaying learning rate",
            extra={"val_loss": val_loss, "best_val_loss": state.best_val_loss, "scale": state.current_scale},
        )
    else:
        state.best_val_loss = val_loss
    return state


def should_stop(state: SchedulerState) -> bool:
    """True once warmup is over and the current learning rate is below the stop threshold."""
    if state.step < state.warmup_steps:
        return False
    return lr_at(state, state.step) < state.stop_threshold


def dump_schedule(state: SchedulerState, steps: int) -> list[tuple[int, float]]:
    return [(n, lr_at(state, n)) for n in range(1, steps + 1)]
