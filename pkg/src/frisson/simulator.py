"""Synthetic EDA generator with ground-truth events, plus a detector scorer.

Stands in for the hardware sensor and human participants: each simulated
session is tonic drift (one slow sinusoid over the recording) plus a
difference-of-exponentials SCR transient per event plus Gaussian sensor
noise. All randomness comes from NumPy's PCG64 generator
(``numpy.random.default_rng``), so a seed pins the output bit-for-bit
across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import storage
from .errors import InvalidParameterError
from .session_align import PlaybackEvent
from .signal_core import EdaSeries

__all__ = [
    "ScrParams",
    "SimSpec",
    "EvalResult",
    "scr_kernel",
    "kernel_peak_offset_s",
    "generate",
    "draw_event_times",
    "evaluate",
    "build_session",
    "write_simulation",
]

DEFAULT_START_WALL_MS = 1_700_000_000_000


@dataclass(frozen=True)
class ScrParams:
    """Skin-conductance-response transient: amplitude and rise/decay taus."""

    amplitude: float = 1.0
    rise_tau_s: float = 0.75
    decay_tau_s: float = 2.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise InvalidParameterError("amplitude must be positive")
        if not 0 < self.rise_tau_s < self.decay_tau_s:
            raise InvalidParameterError("need 0 < rise_tau_s < decay_tau_s")


@dataclass(frozen=True)
class SimSpec:
    """Everything that determines one synthetic session."""

    duration_s: float
    sample_rate_hz: float = 5.0
    event_times_s: tuple[float, ...] = ()
    scr: ScrParams = ScrParams()
    drift_amplitude: float = 0.5
    noise_sigma: float = 0.02
    seed: int = 0
    start_wall_ms: int = DEFAULT_START_WALL_MS

    def __post_init__(self):
        object.__setattr__(
            self, "event_times_s", tuple(float(t) for t in self.event_times_s)
        )
        if not self.duration_s > 0:
            raise InvalidParameterError("duration_s must be positive")
        if not self.sample_rate_hz > 0:
            raise InvalidParameterError("sample_rate_hz must be positive")
        if self.noise_sigma < 0 or self.drift_amplitude < 0:
            raise InvalidParameterError("noise_sigma and drift_amplitude must be >= 0")
        for t in self.event_times_s:
            if not 0 <= t < self.duration_s:
                raise InvalidParameterError(
                    f"event time {t} outside [0, {self.duration_s})"
                )


def kernel_peak_offset_s(p: ScrParams) -> float:
    """Time after onset at which the SCR kernel reaches its maximum."""
    r, d = p.rise_tau_s, p.decay_tau_s
    return math.log(d / r) * (r * d) / (d - r)


def _bracket(t, p: ScrParams):
    return np.exp(-t / p.decay_tau_s) - np.exp(-t / p.rise_tau_s)


def scr_kernel(t_since_onset_s, p: ScrParams):
    """SCR transient value(s) at time(s) since onset; 0 before onset.

    Normalized so the peak value is exactly ``p.amplitude``.
    """
    peak = _bracket(kernel_peak_offset_s(p), p)
    t = np.asarray(t_since_onset_s, dtype=float)
    out = np.where(t < 0, 0.0, p.amplitude * _bracket(np.maximum(t, 0.0), p) / peak)
    if np.ndim(t_since_onset_s) == 0:
        return float(out)
    return out


def generate(spec: SimSpec) -> tuple[EdaSeries, tuple[float, ...]]:
    """Synthesize one session; returns the series and sorted truth times."""
    n = int(round(spec.duration_s * spec.sample_rate_hz))
    t = np.arange(n) / spec.sample_rate_hz
    signal = spec.drift_amplitude * np.sin(2.0 * np.pi * t / spec.duration_s)
    for onset in spec.event_times_s:
        signal = signal + scr_kernel(t - onset, spec.scr)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        signal = signal + rng.normal(0.0, spec.noise_sigma, n)
    series = EdaSeries(spec.start_wall_ms, spec.sample_rate_hz, tuple(float(v) for v in signal))
    return series, tuple(sorted(spec.event_times_s))


def draw_event_times(
    rng: np.random.Generator,
    duration_s: float,
    count: int,
    min_gap_s: float = 20.0,
    edge_margin_s: float = 10.0,
    max_tries: int = 10_000,
) -> tuple[float, ...]:
    """Sorted event times with a minimum gap, kept away from the edges."""
    if count < 0:
        raise InvalidParameterError("count must be >= 0")
    lo, hi = edge_margin_s, duration_s - edge_margin_s
    if count == 0:
        return ()
    if hi - lo < (count - 1) * min_gap_s or hi <= lo:
        raise InvalidParameterError(
            f"cannot place {count} events {min_gap_s}s apart in [{lo}, {hi}]"
        )
    for _ in range(max_tries):
        times = np.sort(rng.uniform(lo, hi, count))
        if count == 1 or np.diff(times).min() >= min_gap_s:
            return tuple(float(t) for t in times)
    raise InvalidParameterError(
        "could not satisfy the minimum event gap; loosen the constraints"
    )


@dataclass(frozen=True)
class EvalResult:
    precision: float
    recall: float
    matches: int


def evaluate(
    detected_times: Sequence[float],
    truth_times: Sequence[float],
    tol_s: float = 2.5,
) -> EvalResult:
    """Greedy one-to-one matching in increasing time within ``±tol_s``.

    Empty-list conventions: no detections means precision 1, no truth
    means recall 1.
    """
    detected = sorted(float(t) for t in detected_times)
    truth = sorted(float(t) for t in truth_times)
    matches = 0
    i = j = 0
    while i < len(detected) and j < len(truth):
        delta = detected[i] - truth[j]
        if abs(delta) <= tol_s:
            matches += 1
            i += 1
            j += 1
        elif delta < 0:
            i += 1
        else:
            j += 1
    precision = matches / len(detected) if detected else 1.0
    recall = matches / len(truth) if truth else 1.0
    return EvalResult(precision, recall, matches)


def participant_seed(seed: int, index: int, stream: int = 0) -> int:
    """Stable per-participant sub-seed derived from the run seed."""
    return int(np.random.SeedSequence([seed, index, stream]).generate_state(1)[0])


def build_session(
    spec: SimSpec, participant_id: str, video_id: str
) -> tuple[storage.SessionRecord, tuple[float, ...]]:
    """Session record for a viewer who plays straight through, no pauses.

    The stop event lands on the last sample's wall time, so gridding the
    record reproduces the sample sequence exactly.
    """
    eda, truth = generate(spec)
    last_ms = spec.start_wall_ms + int(round((len(eda) - 1) * 1000.0 / spec.sample_rate_hz))
    events = (
        PlaybackEvent(spec.start_wall_ms, "play"),
        PlaybackEvent(last_ms, "stop"),
    )
    return storage.SessionRecord(participant_id, video_id, eda, events), truth


def write_simulation(
    out_dir: Path | str,
    participants: int,
    duration_s: float,
    events: int,
    seed: int,
    video_id: str = "sim",
    sample_rate_hz: float = 5.0,
    scr: ScrParams = ScrParams(),
    drift_amplitude: float = 0.5,
    noise_sigma: float = 0.02,
    min_gap_s: float = 20.0,
    edge_margin_s: float = 10.0,
) -> list[str]:
    """Emit one session directory per participant plus its truth file.

    Layout: ``out_dir/p01/{metadata.json,eda.csv,events.jsonl,truth.json}``.
    Returns the participant ids in order.
    """
    if participants < 1:
        raise InvalidParameterError("participants must be >= 1")
    root = Path(out_dir)
    ids: list[str] = []
    for i in range(participants):
        pid = f"p{i + 1:02d}"
        event_rng = np.random.default_rng(participant_seed(seed, i, stream=0))
        times = draw_event_times(event_rng, duration_s, events, min_gap_s, edge_margin_s)
        spec = SimSpec(
            duration_s=duration_s,
            sample_rate_hz=sample_rate_hz,
            event_times_s=times,
            scr=scr,
            drift_amplitude=drift_amplitude,
            noise_sigma=noise_sigma,
            seed=participant_seed(seed, i, stream=1),
        )
        record, truth = build_session(spec, pid, video_id)
        session_dir = root / pid
        storage.write_session(session_dir, record)
        (session_dir / "truth.json").write_text(
            "[" + ",".join(repr(round(t, 6)) for t in truth) + "]\n", "utf-8"
        )
        ids.append(pid)
    return ids
