from .specaug import (
    augment_frames,
    load_policy,
    sample_warp,
    spec_augment,
    time_warp,
    validate_policy,
    warp_frames,
    warp_source_positions,
)

__all__ = [
    "augment_frames",
    "load_policy",
    "sample_warp",
    "spec_augment",
    "time_warp",
    "validate_policy",
    "warp_frames",
    "warp_source_positions",
]
