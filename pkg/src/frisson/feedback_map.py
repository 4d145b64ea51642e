"""Mappings from aggregate frisson magnitude to the three feedback designs.

Magnitude ``a`` is the fraction of viewers in frisson at the current video
time, in [0, 1]. Each design renders nothing at a = 0 and grows
monotonically with a: the ambient halo in opacity and radius, the bolt
icon in scale (hidden below a small threshold), and the fingertip motor
in PWM duty capped at 70% of maximum (6000 RPM class motor). Keyframe
timelines are run-length-compressed step functions at grid resolution;
easing is the renderer's concern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import InvalidInputError, InvalidParameterError
from .signal_core import AggregateSeries

__all__ = [
    "FeedbackDesign",
    "DesignParams",
    "DEFAULT_PARAMS",
    "AmbientLevel",
    "IconLevel",
    "FeedbackKeyframe",
    "map_vibration",
    "map_ambient",
    "map_icon",
    "build_keyframes",
    "magnitude_at",
    "keyframes_payload",
]


class FeedbackDesign(str, Enum):
    AMBIENT_LIGHT = "ambient_light"
    ICON = "icon"
    VIBRATION = "vibration"


@dataclass(frozen=True)
class DesignParams:
    """Numeric constants of the three mappings (configurable defaults)."""

    duty_max: float = 0.7
    halo_min_px: float = 8.0
    halo_span_px: float = 72.0
    icon_show_threshold: float = 0.01
    icon_min_scale: float = 0.4
    icon_scale_span: float = 0.6

    def __post_init__(self):
        if not 0 < self.duty_max <= 1:
            raise InvalidParameterError("duty_max must be in (0, 1]")
        for name in ("halo_min_px", "halo_span_px", "icon_min_scale", "icon_scale_span"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if not 0 <= self.icon_show_threshold <= 1:
            raise InvalidParameterError("icon_show_threshold must be in [0, 1]")


DEFAULT_PARAMS = DesignParams()


@dataclass(frozen=True)
class AmbientLevel:
    opacity: float
    halo_radius_px: float


@dataclass(frozen=True)
class IconLevel:
    visible: bool
    scale: float


@dataclass(frozen=True)
class FeedbackKeyframe:
    video_t_s: float
    magnitude: float

    def __post_init__(self):
        if not 0 <= self.magnitude <= 1:
            raise InvalidInputError("keyframe magnitude must be in [0, 1]")
        if self.video_t_s < 0:
            raise InvalidInputError("keyframe time must be >= 0")


def _check_magnitude(a: float) -> float:
    if isinstance(a, bool) or not isinstance(a, (int, float)) or not 0 <= a <= 1:
        raise InvalidParameterError(f"magnitude must be in [0, 1], got {a!r}")
    return float(a)


def map_vibration(a: float, params: DesignParams = DEFAULT_PARAMS) -> float:
    """Linear motor duty fraction: 0 at rest, ``duty_max`` (0.7) at a = 1."""
    return params.duty_max * _check_magnitude(a)


def map_ambient(a: float, params: DesignParams = DEFAULT_PARAMS) -> AmbientLevel:
    """Halo opacity equals a; radius grows linearly from the base size."""
    a = _check_magnitude(a)
    return AmbientLevel(opacity=a, halo_radius_px=params.halo_min_px + params.halo_span_px * a)


def map_icon(a: float, params: DesignParams = DEFAULT_PARAMS) -> IconLevel:
    """Bolt icon hidden below the threshold, otherwise scaled with a."""
    a = _check_magnitude(a)
    return IconLevel(
        visible=a >= params.icon_show_threshold,
        scale=params.icon_min_scale + params.icon_scale_span * a,
    )


def build_keyframes(
    agg: AggregateSeries, design: FeedbackDesign
) -> list[FeedbackKeyframe]:
    """Run-length-compressed step timeline of the aggregate magnitudes.

    Each maximal run of equal values contributes a keyframe at its first
    grid point, plus a closing keyframe at its last grid point when the run
    is longer than one sample. Step reconstruction (hold the last keyframe
    value) reproduces the aggregate at every grid point.
    """
    FeedbackDesign(design)
    out: list[FeedbackKeyframe] = []
    values = agg.values
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[j + 1] == values[i]:
            j += 1
        out.append(FeedbackKeyframe(i / agg.grid_hz, values[i]))
        if j > i:
            out.append(FeedbackKeyframe(j / agg.grid_hz, values[i]))
        i = j + 1
    return out


def magnitude_at(agg: AggregateSeries, video_t_s: float) -> float:
    """Aggregate value at a video time; times beyond the end clamp to the last."""
    if isinstance(video_t_s, bool) or not isinstance(video_t_s, (int, float)):
        raise InvalidParameterError("video time must be a number")
    if not math.isfinite(video_t_s) or video_t_s < 0:
        raise InvalidParameterError(f"video time must be finite and >= 0, got {video_t_s!r}")
    idx = min(int(math.floor(video_t_s * agg.grid_hz)), len(agg.values) - 1)
    return agg.values[idx]


def keyframes_payload(
    design: FeedbackDesign, keyframes: Sequence[FeedbackKeyframe]
) -> dict:
    """Serialization shared by the keyframe file, REST response and UI."""
    return {
        "design": FeedbackDesign(design).value,
        "keyframes": [[kf.video_t_s, kf.magnitude] for kf in keyframes],
    }
