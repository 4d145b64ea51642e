"""Wall-clock to video-time alignment.

Viewers watch asynchronously, so each sensor stream arrives on its own
wall clock together with the viewer's play/stop events. This module
derives the wall ↔ video-time map from those events (video time advances
at slope 1 while playing and freezes while stopped) and resamples the EDA
stream onto a shared video-time grid so per-viewer results can be
aggregated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidInputError,
    InvalidParameterError,
    ProtocolViolationError,
)
from .signal_core import EdaSeries

__all__ = [
    "PLAY",
    "STOP",
    "PlaybackEvent",
    "PlaybackTimeline",
    "GridSeries",
    "build_timeline",
    "video_time",
    "to_grid",
    "to_grid_timed",
    "grid_to_eda",
]

PLAY = "play"
STOP = "stop"


@dataclass(frozen=True)
class PlaybackEvent:
    t_wall_ms: int
    kind: str

    def __post_init__(self):
        if self.kind not in (PLAY, STOP):
            raise InvalidInputError(f"unknown playback event kind: {self.kind!r}")
        if self.t_wall_ms < 0:
            raise InvalidInputError("event timestamp must be >= 0")


@dataclass(frozen=True)
class PlaybackTimeline:
    """Validated play/stop sequence; may end mid-play (open-ended)."""

    events: tuple[PlaybackEvent, ...]
    video_duration_s: float | None = None

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        if not events:
            raise ProtocolViolationError("timeline needs at least one event")
        if events[0].kind != PLAY:
            raise ProtocolViolationError("timeline must begin with a play event")
        for prev, cur in zip(events, events[1:]):
            if cur.t_wall_ms <= prev.t_wall_ms:
                raise ProtocolViolationError(
                    "event timestamps must be strictly increasing"
                )
            if cur.kind == prev.kind:
                raise ProtocolViolationError(
                    f"consecutive {cur.kind} events violate play/stop alternation"
                )

    @property
    def open_ended(self) -> bool:
        return self.events[-1].kind == PLAY


@dataclass(frozen=True)
class GridSeries:
    """Values on the uniform video-time grid, one per grid point from t=0."""

    grid_hz: float
    values: tuple[float, ...]
    video_t0_s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.grid_hz > 0:
            raise InvalidParameterError("grid_hz must be positive")

    def __len__(self) -> int:
        return len(self.values)


def build_timeline(
    events: Sequence[PlaybackEvent], video_duration_s: float | None = None
) -> PlaybackTimeline:
    """Validate an ordered event list into a timeline.

    Raises protocol-violation for an empty list, a leading stop, repeated
    kinds, or non-increasing timestamps. A trailing un-stopped play leaves
    the timeline open-ended; consumers close it at their last sample.
    """
    return PlaybackTimeline(tuple(events), video_duration_s)


def _play_intervals(
    tl: PlaybackTimeline, close_at_ms: float | None
) -> list[tuple[float, float]]:
    """Play intervals as (start, end) pairs, closing a trailing open play at
    ``close_at_ms`` (an open interval that starts after the close time is
    dropped)."""
    intervals: list[tuple[float, float]] = []
    events = tl.events
    for i in range(0, len(events), 2):
        start = float(events[i].t_wall_ms)
        if i + 1 < len(events):
            intervals.append((start, float(events[i + 1].t_wall_ms)))
        elif close_at_ms is not None and close_at_ms >= start:
            intervals.append((start, float(close_at_ms)))
    return intervals


def video_time(tl: PlaybackTimeline, t_wall_ms: float) -> float:
    """Accumulated play time in seconds at wall time ``t_wall_ms``.

    Zero before the first play; constant during stops; advances at slope 1
    (an open-ended final play keeps accumulating).
    """
    total_ms = 0.0
    events = tl.events
    for i in range(0, len(events), 2):
        start = events[i].t_wall_ms
        if t_wall_ms <= start:
            break
        end = events[i + 1].t_wall_ms if i + 1 < len(events) else t_wall_ms
        total_ms += min(t_wall_ms, end) - start
    return total_ms / 1000.0


def to_grid_timed(
    times_ms: Sequence[float],
    values: Sequence[float],
    tl: PlaybackTimeline,
    grid_hz: float,
) -> GridSeries:
    """Resample timestamped samples onto the video-time grid.

    Only samples taken during play count (boundary samples at a stop
    instant included). Each grid point takes the in-play sample whose
    mapped video time is nearest (ties: earlier sample); if the nearest is
    farther than one grid step the previous grid value is carried forward,
    except at the first point which always takes the nearest.
    """
    if len(times_ms) != len(values):
        raise InvalidInputError("sample times and values differ in length")
    if not len(values):
        raise InsufficientDataError("no samples to grid")
    if not grid_hz > 0:
        raise InvalidParameterError("grid_hz must be positive")

    last_t = float(times_ms[-1])
    intervals = _play_intervals(tl, close_at_ms=last_t)

    t_arr = np.asarray(times_ms, dtype=float)
    in_play = np.zeros(len(t_arr), dtype=bool)
    for start, end in intervals:
        in_play |= (t_arr >= start) & (t_arr <= end)
    if not in_play.any():
        raise InsufficientDataError("no sample falls inside a play interval")

    sample_vt = np.array([video_time(tl, t) for t in t_arr[in_play]])
    sample_vals = np.asarray(values, dtype=float)[in_play]

    covered_s = sum(end - start for start, end in intervals) / 1000.0
    if tl.video_duration_s is not None:
        covered_s = min(covered_s, tl.video_duration_s)
    n_points = int(math.floor(covered_s * grid_hz + 1e-9)) + 1

    grid_ts = np.arange(n_points) / grid_hz
    pos = np.searchsorted(sample_vt, grid_ts)
    left = np.clip(pos - 1, 0, len(sample_vt) - 1)
    right = np.clip(pos, 0, len(sample_vt) - 1)
    d_left = np.abs(grid_ts - sample_vt[left])
    d_right = np.abs(sample_vt[right] - grid_ts)
    take_left = d_left <= d_right  # tie -> earlier sample
    nearest = np.where(take_left, left, right)
    dist = np.where(take_left, d_left, d_right)

    near_enough = dist <= 1.0 / grid_hz
    near_enough[0] = True  # first point: nearest regardless
    source = np.where(near_enough, np.arange(n_points), -1)
    source = np.maximum.accumulate(source)
    out = sample_vals[nearest[source]]
    return GridSeries(grid_hz, tuple(float(v) for v in out))


def to_grid(eda: EdaSeries, tl: PlaybackTimeline, grid_hz: float) -> GridSeries:
    """Resample a uniform EDA series onto the video-time grid."""
    return to_grid_timed(eda.sample_times_ms(), eda.values, tl, grid_hz)


def grid_to_eda(grid: GridSeries, start_wall_ms: int) -> EdaSeries:
    """View a gridded series as an EDA series for the processing pipeline."""
    return EdaSeries(start_wall_ms, grid.grid_hz, grid.values)
