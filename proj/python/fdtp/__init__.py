"""Frequency-domain quad-camera tile processor."""

from ._fdtp import (
    FEATURE_LENGTH,
    FormatError,
    GroundTruth,
    QuadFrameSet,
    estimate,
    features,
    imclt,
    load_frames,
    mclt_forward,
    phase_rotate,
    render,
    save_frames,
)

__all__ = [
    "FEATURE_LENGTH",
    "FormatError",
    "GroundTruth",
    "QuadFrameSet",
    "estimate",
    "features",
    "imclt",
    "load_frames",
    "mclt_forward",
    "phase_rotate",
    "render",
    "save_frames",
]
