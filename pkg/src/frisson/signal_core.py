"""EDA-to-frisson processing core.

Implements the four-step per-viewer pipeline (moving-average smoothing,
moving-average baseline removal, min-max normalization, prominence-based
peak detection) plus binary quantization of the detected episodes and
cross-viewer aggregation into a single fraction-in-frisson time series.

All functions are pure and deterministic; series types are immutable.
"""

from __future__ import annotations

import math
from bisect import bisect_left, insort
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, ShapeMismatchError

__all__ = [
    "PipelineConfig",
    "EdaSeries",
    "PeakDescriptor",
    "FrissonSeries",
    "AggregateSeries",
    "smooth",
    "remove_baseline",
    "normalize",
    "detect_peaks",
    "quantize",
    "pipeline_peaks",
    "process_session",
    "aggregate",
]


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable parameters of the detection pipeline.

    The defaults are the deployed constants: 5 Hz sampling, a 50-sample
    baseline window, a 5 s minimum peak separation and a 0.6 minimum
    prominence on the normalized signal. ``smooth_window_samples`` (1 s of
    samples) and ``quantize_halfwidth_s`` (half of the 5 s event scale)
    fill in parameters the deployment left open.
    """

    sample_rate_hz: float = 5.0
    smooth_window_samples: int = 5
    baseline_window_samples: int = 50
    peak_min_distance_s: float = 5.0
    peak_min_prominence: float = 0.6
    quantize_halfwidth_s: float = 2.5

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise InvalidParameterError("sample_rate_hz must be positive")
        if self.smooth_window_samples < 1 or self.smooth_window_samples % 2 == 0:
            raise InvalidParameterError("smooth_window_samples must be odd and >= 1")
        if self.baseline_window_samples < 1:
            raise InvalidParameterError("baseline_window_samples must be >= 1")
        if not 0 < self.peak_min_prominence <= 1:
            raise InvalidParameterError("peak_min_prominence must be in (0, 1]")
        if not self.peak_min_distance_s > 0:
            raise InvalidParameterError("peak_min_distance_s must be positive")
        if self.quantize_halfwidth_s < 0:
            raise InvalidParameterError("quantize_halfwidth_s must be >= 0")

    @property
    def peak_min_distance_samples(self) -> int:
        """Minimum inter-peak spacing, rounded half-up to whole samples."""
        return int(math.floor(self.peak_min_distance_s * self.sample_rate_hz + 0.5))

    @property
    def quantize_halfwidth_samples(self) -> int:
        return int(math.floor(self.quantize_halfwidth_s * self.sample_rate_hz))

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "PipelineConfig":
        """Build a config from a dict of overrides; unknown keys are rejected."""
        known = set(cls.__dataclass_fields__)
        unknown = set(mapping) - known
        if unknown:
            raise InvalidParameterError(
                f"unknown pipeline config keys: {', '.join(sorted(unknown))}"
            )
        return cls(**dict(mapping))


@dataclass(frozen=True)
class EdaSeries:
    """Uniformly sampled skin-conductance series anchored to wall-clock time."""

    start_wall_ms: int
    sample_rate_hz: float
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise InvalidInputError("EDA series must contain at least one sample")
        if not np.isfinite(np.asarray(vals)).all():
            raise InvalidInputError("EDA series contains non-finite samples")
        if not self.sample_rate_hz > 0:
            raise InvalidParameterError("sample_rate_hz must be positive")

    def __len__(self) -> int:
        return len(self.values)

    def with_values(self, values: Iterable[float]) -> "EdaSeries":
        """Same wall anchor and rate, new sample values."""
        return EdaSeries(self.start_wall_ms, self.sample_rate_hz, tuple(values))

    def sample_times_ms(self) -> tuple[float, ...]:
        """Wall-clock time of each sample on the uniform grid."""
        step = 1000.0 / self.sample_rate_hz
        return tuple(self.start_wall_ms + i * step for i in range(len(self.values)))


@dataclass(frozen=True)
class PeakDescriptor:
    """A kept peak: its sample index, height, prominence and base indices."""

    index: int
    height: float
    prominence: float
    left_base: int
    right_base: int

    def __post_init__(self):
        if not self.left_base <= self.index <= self.right_base:
            raise InvalidInputError("peak bases must bracket the peak index")
        if self.prominence < 0:
            raise InvalidInputError("prominence must be >= 0")


@dataclass(frozen=True)
class FrissonSeries:
    """One viewer's binary frisson indicator on the video-time grid."""

    grid_hz: float
    values: tuple[int, ...]

    def __post_init__(self):
        vals = []
        for v in self.values:
            iv = int(v)
            if iv != v or iv not in (0, 1):
                raise InvalidInputError("frisson series values must be 0 or 1")
            vals.append(iv)
        object.__setattr__(self, "values", tuple(vals))
        if not self.grid_hz > 0:
            raise InvalidParameterError("grid_hz must be positive")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AggregateSeries:
    """Fraction of viewers in frisson per grid point for one video."""

    video_id: str
    grid_hz: float
    n_viewers: int
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.video_id:
            raise InvalidInputError("video_id must be non-empty")
        if not isinstance(self.n_viewers, int) or self.n_viewers < 1:
            raise InvalidInputError("n_viewers must be a positive integer")
        if not self.grid_hz > 0:
            raise InvalidParameterError("grid_hz must be positive")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for v in vals:
            if not 0.0 <= v <= 1.0:
                raise InvalidInputError("aggregate values must lie in [0, 1]")
            scaled = v * self.n_viewers
            if abs(scaled - round(scaled)) > 1e-9:
                raise InvalidInputError(
                    "aggregate values must be multiples of 1/n_viewers"
                )

    def __len__(self) -> int:
        return len(self.values)


def _windowed_deviation(x: np.ndarray, half: int, symmetric: bool) -> np.ndarray:
    """Per-sample mean of ``x[i] - x[j]`` over the centered window.

    Equals ``x - windowed_mean(x)`` algebraically, but sums pointwise
    differences instead of subtracting two large sums, so a constant
    stretch yields exactly zero instead of rounding dust (which the later
    normalization step would otherwise blow up to full scale). With
    ``symmetric`` the window shrinks symmetrically at the edges, otherwise
    it clips.
    """
    n = len(x)
    total = np.zeros(n)
    count = np.zeros(n)
    for d in range(-half, half + 1):
        if symmetric:
            lo, hi = abs(d), n - abs(d)
        else:
            lo, hi = max(0, -d), n - max(0, d)
        if lo >= hi:
            continue
        total[lo:hi] += x[lo:hi] - x[lo + d : hi + d]
        count[lo:hi] += 1
    return total / count


def smooth(series: EdaSeries, window: int) -> EdaSeries:
    """Centered moving average of odd width ``window``.

    At the edges the window truncates symmetrically, so the output at index
    i averages ``min(window//2, i, n-1-i)`` samples on each side. Length,
    wall anchor and rate are preserved.
    """
    n = len(series)
    if window < 1 or window % 2 == 0:
        raise InvalidParameterError("smoothing window must be odd and >= 1")
    if window > n:
        raise InvalidParameterError("smoothing window exceeds series length")
    x = np.asarray(series.values)
    return series.with_values(x - _windowed_deviation(x, window // 2, symmetric=True))


def remove_baseline(series: EdaSeries, window: int) -> EdaSeries:
    """Subtract a centered moving-average baseline of ``window`` samples.

    The window is ``[i - window//2, i + window//2]`` clipped at the series
    bounds, so edge baselines average fewer samples.
    """
    if window < 1:
        raise InvalidParameterError("baseline window must be >= 1")
    x = np.asarray(series.values)
    return series.with_values(_windowed_deviation(x, window // 2, symmetric=False))


def normalize(series: EdaSeries) -> EdaSeries:
    """Min-max scale to [0, 1]; a constant series maps to all zeros."""
    x = np.asarray(series.values)
    lo = float(x.min())
    hi = float(x.max())
    if hi == lo:
        return series.with_values([0.0] * len(series))
    return series.with_values((x - lo) / (hi - lo))


def _scan_base(x: Sequence[float], i: int, step: int) -> tuple[float, int]:
    """Window minimum on one side of peak i, stopping at the first strictly
    higher sample (or the series edge). Returns (min, base_index); ties keep
    the index nearest the peak."""
    h = x[i]
    m = h
    base = i
    j = i + step
    n = len(x)
    while 0 <= j < n and x[j] <= h:
        if x[j] < m:
            m = x[j]
            base = j
        j += step
    return m, base


def _plateau_maxima(x: Sequence[float]) -> list[int]:
    """Strict local maxima; a flat plateau contributes its leftmost index."""
    n = len(x)
    out = []
    i = 1
    while i < n:
        if x[i] > x[i - 1]:
            j = i
            while j + 1 < n and x[j + 1] == x[i]:
                j += 1
            if j + 1 < n and x[j + 1] < x[i]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def detect_peaks(series: EdaSeries, cfg: PipelineConfig) -> list[PeakDescriptor]:
    """Prominence-thresholded peak detection with minimum spacing.

    Candidates are strict local maxima (leftmost index of flat plateaus).
    The prominence of a peak is its height minus the higher of the two
    window minima found by walking outward to the nearest strictly higher
    sample (or the series edge). Candidates below
    ``cfg.peak_min_prominence`` are dropped; the rest are pruned to a
    minimum spacing of ``cfg.peak_min_distance_samples`` by keeping taller
    peaks first (ties: lower index). The result is sorted by index.
    """
    x = series.values
    survivors: list[PeakDescriptor] = []
    for i in _plateau_maxima(x):
        left_min, left_base = _scan_base(x, i, -1)
        right_min, right_base = _scan_base(x, i, +1)
        prominence = x[i] - max(left_min, right_min)
        if prominence >= cfg.peak_min_prominence:
            survivors.append(
                PeakDescriptor(i, x[i], prominence, left_base, right_base)
            )

    spacing = cfg.peak_min_distance_samples
    kept_indices: list[int] = []
    kept: list[PeakDescriptor] = []
    for peak in sorted(survivors, key=lambda p: (-p.height, p.index)):
        pos = bisect_left(kept_indices, peak.index)
        too_close = (
            pos > 0 and peak.index - kept_indices[pos - 1] < spacing
        ) or (
            pos < len(kept_indices) and kept_indices[pos] - peak.index < spacing
        )
        if not too_close:
            insort(kept_indices, peak.index)
            kept.append(peak)
    return sorted(kept, key=lambda p: p.index)


def quantize(
    length: int, peaks: Sequence[PeakDescriptor], cfg: PipelineConfig
) -> FrissonSeries:
    """Binary series with a ±``quantize_halfwidth_s`` window around each peak.

    Windows are clipped to the series bounds; overlaps merge.
    """
    if length < 0:
        raise InvalidParameterError("length must be >= 0")
    half = cfg.quantize_halfwidth_samples
    out = [0] * length
    for peak in peaks:
        if not 0 <= peak.index < length:
            raise InvalidInputError(
                f"peak index {peak.index} outside series of length {length}"
            )
        lo = max(0, peak.index - half)
        hi = min(length - 1, peak.index + half)
        for k in range(lo, hi + 1):
            out[k] = 1
    return FrissonSeries(cfg.sample_rate_hz, tuple(out))


def pipeline_peaks(series: EdaSeries, cfg: PipelineConfig) -> list[PeakDescriptor]:
    """Peaks surviving the full smooth → detrend → normalize → detect chain."""
    stage = smooth(series, cfg.smooth_window_samples)
    stage = remove_baseline(stage, cfg.baseline_window_samples)
    stage = normalize(stage)
    return detect_peaks(stage, cfg)


def process_session(series: EdaSeries, cfg: PipelineConfig) -> FrissonSeries:
    """Full pipeline for one viewer: gridded EDA in, binary frisson out."""
    return quantize(len(series), pipeline_peaks(series, cfg), cfg)


def aggregate(video_id: str, series_list: Sequence[FrissonSeries]) -> AggregateSeries:
    """Mean of the viewers' binary series per grid point.

    All inputs must share grid rate and length; mismatches raise rather
    than pad.
    """
    if not series_list:
        raise InvalidInputError("cannot aggregate zero frisson series")
    grid_hz = series_list[0].grid_hz
    length = len(series_list[0])
    for s in series_list[1:]:
        if s.grid_hz != grid_hz:
            raise ShapeMismatchError("frisson series disagree on grid rate")
        if len(s) != length:
            raise ShapeMismatchError(
                f"frisson series lengths differ ({len(s)} vs {length})"
            )
    n = len(series_list)
    matrix = np.asarray([s.values for s in series_list], dtype=np.int64)
    values = matrix.sum(axis=0) / n
    return AggregateSeries(video_id, grid_hz, n, tuple(float(v) for v in values))
