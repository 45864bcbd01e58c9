from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np


@dataclass(slots=True)
class Utterance:
    utt_id: str
    features: np.ndarray
    labels: tuple[int, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def num_frames(self) -> int:
        return int(self.features.shape[0])
