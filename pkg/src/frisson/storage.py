"""On-disk formats and round-trip I/O.

A session record is a directory of three text files (``metadata.json``,
``eda.csv``, ``events.jsonl``); frisson series, aggregates and keyframe
timelines are single-line JSON objects. All writers emit one canonical
byte form so re-serialization of a read record reproduces the original
file exactly; readers reject invariant-violating files instead of
repairing them. FORMATS.md documents each layout with examples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .errors import FormatError, FrissonError, InvalidInputError, ParseError
from .feedback_map import FeedbackDesign, FeedbackKeyframe
from .session_align import PlaybackEvent
from .signal_core import AggregateSeries, EdaSeries, FrissonSeries

__all__ = [
    "SessionRecord",
    "write_session",
    "read_session",
    "write_aggregate",
    "read_aggregate",
    "write_frisson",
    "read_frisson",
    "write_keyframes",
    "read_keyframes",
    "aggregate_payload",
]

META_FILE = "metadata.json"
EDA_FILE = "eda.csv"
EVENTS_FILE = "events.jsonl"
EDA_HEADER = "t_ms,v"


@dataclass(frozen=True)
class SessionRecord:
    """One participant's raw data for one video."""

    participant_id: str
    video_id: str
    eda: EdaSeries
    events: tuple[PlaybackEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if not self.participant_id:
            raise InvalidInputError("participant_id must be non-empty")
        if not self.video_id:
            raise InvalidInputError("video_id must be non-empty")


def _compact_num(v: float) -> int | float:
    """Render integral floats as JSON integers (canonical byte form)."""
    f = float(v)
    return int(f) if f == int(f) else f


def _round9(v: float) -> int | float:
    return _compact_num(round(float(v), 9))


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False) + "\n"


def _load_json_file(path: Path, what: str) -> Any:
    if not path.is_file():
        raise FormatError(f"missing {what} file: {path}")
    try:
        return json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed {what} file {path}: {exc.msg}") from exc


def _require_keys(obj: Any, keys: tuple[str, ...], what: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be a JSON object")
    missing = set(keys) - set(obj)
    unknown = set(obj) - set(keys)
    if missing:
        raise FormatError(f"{what} missing fields: {', '.join(sorted(missing))}")
    if unknown:
        raise FormatError(f"{what} has unknown fields: {', '.join(sorted(unknown))}")


def write_session(path: Path | str, record: SessionRecord) -> None:
    """Write a session record into directory ``path`` (created if needed)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    meta = {
        "participant_id": record.participant_id,
        "video_id": record.video_id,
        "sample_rate_hz": _compact_num(record.eda.sample_rate_hz),
    }
    (root / META_FILE).write_text(_dump_line(meta), "utf-8")

    step = 1000.0 / record.eda.sample_rate_hz
    rows = [EDA_HEADER]
    for i, v in enumerate(record.eda.values):
        t = record.eda.start_wall_ms + int(round(i * step))
        rows.append(f"{t},{v!r}")
    (root / EDA_FILE).write_text("\n".join(rows) + "\n", "utf-8")

    lines = [
        _dump_line({"t_ms": ev.t_wall_ms, "e": ev.kind}) for ev in record.events
    ]
    (root / EVENTS_FILE).write_text("".join(lines), "utf-8")


def read_session(path: Path | str) -> SessionRecord:
    """Read a session record directory written by :func:`write_session`."""
    root = Path(path)
    meta = _load_json_file(root / META_FILE, "metadata")
    _require_keys(meta, ("participant_id", "video_id", "sample_rate_hz"), "metadata")
    participant_id = meta["participant_id"]
    video_id = meta["video_id"]
    rate = meta["sample_rate_hz"]
    if not isinstance(participant_id, str) or not isinstance(video_id, str):
        raise FormatError("metadata ids must be strings")
    if isinstance(rate, bool) or not isinstance(rate, (int, float)) or not rate > 0:
        raise FormatError("metadata sample_rate_hz must be a positive number")

    eda_path = root / EDA_FILE
    if not eda_path.is_file():
        raise FormatError(f"missing EDA file: {eda_path}")
    lines = eda_path.read_text("utf-8").splitlines()
    if not lines or lines[0] != EDA_HEADER:
        raise ParseError(f"EDA file must start with header {EDA_HEADER!r}", line=1)
    start_wall_ms: int | None = None
    values: list[float] = []
    for lineno, row in enumerate(lines[1:], start=2):
        parts = row.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 't_ms,v' row, got {row!r}", line=lineno)
        try:
            t = int(parts[0])
            v = float(parts[1])
        except ValueError:
            raise ParseError(f"non-numeric row {row!r}", line=lineno) from None
        if start_wall_ms is None:
            start_wall_ms = t
        values.append(v)
    if start_wall_ms is None:
        raise FormatError(f"EDA file {eda_path} contains no samples")

    events: list[PlaybackEvent] = []
    events_path = root / EVENTS_FILE
    if not events_path.is_file():
        raise FormatError(f"missing events file: {events_path}")
    for lineno, raw in enumerate(events_path.read_text("utf-8").splitlines(), start=1):
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed event: {exc.msg}", line=lineno) from exc
        if not isinstance(obj, dict) or set(obj) != {"t_ms", "e"}:
            raise ParseError("event rows carry exactly t_ms and e", line=lineno)
        if isinstance(obj["t_ms"], bool) or not isinstance(obj["t_ms"], int):
            raise ParseError("event t_ms must be an integer", line=lineno)
        try:
            events.append(PlaybackEvent(obj["t_ms"], obj["e"]))
        except FrissonError as exc:
            raise ParseError(str(exc), line=lineno) from exc

    try:
        eda = EdaSeries(start_wall_ms, rate, tuple(values))
        return SessionRecord(participant_id, video_id, eda, tuple(events))
    except FrissonError as exc:
        raise FormatError(f"invalid session record at {root}: {exc}") from exc


def aggregate_payload(agg: AggregateSeries) -> dict:
    """Canonical JSON object for an aggregate (file body and wire payload)."""
    return {
        "video_id": agg.video_id,
        "grid_hz": _compact_num(agg.grid_hz),
        "n_viewers": agg.n_viewers,
        "values": [_round9(v) for v in agg.values],
    }


def write_aggregate(path: Path | str, agg: AggregateSeries) -> None:
    Path(path).write_text(_dump_line(aggregate_payload(agg)), "utf-8")


def read_aggregate(path: Path | str) -> AggregateSeries:
    obj = _load_json_file(Path(path), "aggregate")
    _require_keys(obj, ("video_id", "grid_hz", "n_viewers", "values"), "aggregate")
    values = obj["values"]
    if not isinstance(values, list):
        raise FormatError("aggregate values must be a list")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FormatError("aggregate values must be numbers")
        if not 0 <= v <= 1:
            raise FormatError(f"aggregate value {v!r} outside [0, 1]")
    try:
        return AggregateSeries(
            obj["video_id"],
            obj["grid_hz"],
            obj["n_viewers"],
            tuple(float(v) for v in values),
        )
    except FrissonError as exc:
        raise FormatError(f"invalid aggregate at {path}: {exc}") from exc


def write_frisson(
    path: Path | str, participant_id: str, video_id: str, series: FrissonSeries
) -> None:
    """Write one viewer's binary frisson series."""
    obj = {
        "participant_id": participant_id,
        "video_id": video_id,
        "grid_hz": _compact_num(series.grid_hz),
        "values": list(series.values),
    }
    Path(path).write_text(_dump_line(obj), "utf-8")


def read_frisson(path: Path | str) -> tuple[str, str, FrissonSeries]:
    obj = _load_json_file(Path(path), "frisson series")
    _require_keys(obj, ("participant_id", "video_id", "grid_hz", "values"), "frisson series")
    values = obj["values"]
    if not isinstance(values, list) or any(v not in (0, 1) or isinstance(v, bool) for v in values):
        raise FormatError("frisson values must be a list of 0/1")
    try:
        series = FrissonSeries(obj["grid_hz"], tuple(values))
    except FrissonError as exc:
        raise FormatError(f"invalid frisson series at {path}: {exc}") from exc
    if not isinstance(obj["participant_id"], str) or not isinstance(obj["video_id"], str):
        raise FormatError("frisson series ids must be strings")
    return obj["participant_id"], obj["video_id"], series


def write_keyframes(
    path: Path | str, design: FeedbackDesign, keyframes: Sequence[FeedbackKeyframe]
) -> None:
    """Write a design's animation timeline for the UI and CLI."""
    obj = {
        "design": design.value,
        "keyframes": [[_round9(kf.video_t_s), _round9(kf.magnitude)] for kf in keyframes],
    }
    Path(path).write_text(_dump_line(obj), "utf-8")


def read_keyframes(path: Path | str) -> tuple[FeedbackDesign, list[FeedbackKeyframe]]:
    obj = _load_json_file(Path(path), "keyframes")
    _require_keys(obj, ("design", "keyframes"), "keyframes")
    try:
        design = FeedbackDesign(obj["design"])
    except ValueError as exc:
        raise FormatError(f"unknown design {obj['design']!r}") from exc
    kfs = []
    for pair in obj["keyframes"]:
        if not isinstance(pair, list) or len(pair) != 2:
            raise FormatError("keyframes must be [t, magnitude] pairs")
        try:
            kfs.append(FeedbackKeyframe(float(pair[0]), float(pair[1])))
        except FrissonError as exc:
            raise FormatError(str(exc)) from exc
    return design, kfs
