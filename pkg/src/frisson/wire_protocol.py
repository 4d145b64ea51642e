"""Line-delimited pub/sub wire format.

One frame per UTF-8 text line, terminated by ``\\n``, carrying a JSON
object with the fields ``op``, ``topic`` (pub/sub/msg only) and ``data``.
The encoder always emits one canonical key order; the decoder accepts any
order but rejects unknown ops, unknown or missing fields, and malformed
topics. See PROTOCOL.md for the byte-exact grammar.

Encode/decode are pure; per-connection framing state lives in
:class:`LineFramer`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import EncodeError, InvalidParameterError, ParseError, ProtocolViolationError

__all__ = [
    "OPS",
    "Frame",
    "encode",
    "decode",
    "topic_match",
    "LineFramer",
    "eda_topic",
    "playback_topic",
    "feedback_topic",
]

OPS = ("pub", "sub", "msg", "get_aggregate", "aggregate", "err")

TOPIC_RE = re.compile(r"^[a-z_]+(/[A-Za-z0-9_-]+)*$")
PATTERN_RE = re.compile(r"^([a-z_]+|\+)(/([A-Za-z0-9_-]+|\+))*$")
ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")

MAX_LINE_BYTES = 1 << 20

# Canonical key order per payload kind; also the exhaustive field set.
_DATA_ORDER = {
    "eda": ("t", "v"),
    "playback": ("t", "e"),
    "feedback": ("t", "a", "duty"),
    "sub": (),
    "get_aggregate": ("video",),
    "aggregate": ("video_id", "grid_hz", "n_viewers", "values"),
    "err": ("code", "msg"),
}


@dataclass(frozen=True)
class Frame:
    op: str
    topic: str | None = None
    data: Mapping[str, Any] = field(default_factory=dict)


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v: Any) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, int):
        return True
    return isinstance(v, float) and v == v and v not in (float("inf"), float("-inf"))


def _check_keys(data: Mapping, expected: tuple[str, ...], what: str) -> None:
    missing = set(expected) - set(data)
    unknown = set(data) - set(expected)
    if missing:
        raise ProtocolViolationError(
            f"{what} payload missing fields: {', '.join(sorted(missing))}"
        )
    if unknown:
        raise ProtocolViolationError(
            f"{what} payload has unknown fields: {', '.join(sorted(unknown))}"
        )


def _payload_kind(frame: Frame) -> str:
    """Which payload schema applies: topic family for pub/msg, op otherwise."""
    if frame.op in ("pub", "msg"):
        return frame.topic.split("/", 1)[0]  # type: ignore[union-attr]
    return frame.op


def validate_frame(frame: Frame) -> None:
    """Raise protocol-violation unless the frame is well-formed."""
    if frame.op not in OPS:
        raise ProtocolViolationError(f"unknown op: {frame.op!r}")

    if frame.op in ("pub", "msg"):
        if not isinstance(frame.topic, str) or not TOPIC_RE.match(frame.topic):
            raise ProtocolViolationError(f"invalid topic: {frame.topic!r}")
        segments = frame.topic.split("/")
        depth = {"eda": 3, "playback": 3, "feedback": 2}.get(segments[0])
        if depth is not None and len(segments) != depth:
            raise ProtocolViolationError(
                f"topic {frame.topic!r} has wrong depth for family {segments[0]!r}"
            )
    elif frame.op == "sub":
        if not isinstance(frame.topic, str) or not PATTERN_RE.match(frame.topic):
            raise ProtocolViolationError(f"invalid topic pattern: {frame.topic!r}")
    elif frame.topic is not None:
        raise ProtocolViolationError(f"op {frame.op} does not carry a topic")

    data = frame.data
    if not isinstance(data, Mapping):
        raise ProtocolViolationError("data must be an object")

    kind = _payload_kind(frame)
    if kind not in _DATA_ORDER:
        raise ProtocolViolationError(f"unknown topic family: {kind!r}")
    _check_keys(data, _DATA_ORDER[kind], kind)

    if kind == "eda":
        if not _is_int(data["t"]) or data["t"] < 0:
            raise ProtocolViolationError("eda payload t must be a wall-clock ms integer")
        if not _is_number(data["v"]):
            raise ProtocolViolationError("eda payload v must be a finite number")
    elif kind == "playback":
        if not _is_int(data["t"]) or data["t"] < 0:
            raise ProtocolViolationError("playback payload t must be a wall-clock ms integer")
        if data["e"] not in ("play", "stop"):
            raise ProtocolViolationError(f"playback event must be play or stop, got {data['e']!r}")
    elif kind == "feedback":
        if not _is_int(data["t"]) or data["t"] < 0:
            raise ProtocolViolationError("feedback payload t must be a wall-clock ms integer")
        for key in ("a", "duty"):
            if not _is_number(data[key]):
                raise ProtocolViolationError(f"feedback payload {key} must be a finite number")
    elif kind == "get_aggregate":
        if not isinstance(data["video"], str) or not ID_RE.match(data["video"]):
            raise ProtocolViolationError("get_aggregate video must be an identifier")
    elif kind == "aggregate":
        if not isinstance(data["video_id"], str) or not data["video_id"]:
            raise ProtocolViolationError("aggregate video_id must be a non-empty string")
        if not _is_number(data["grid_hz"]) or not data["grid_hz"] > 0:
            raise ProtocolViolationError("aggregate grid_hz must be positive")
        if not _is_int(data["n_viewers"]) or data["n_viewers"] < 1:
            raise ProtocolViolationError("aggregate n_viewers must be a positive integer")
        values = data["values"]
        if not isinstance(values, list):
            raise ProtocolViolationError("aggregate values must be a list")
        for v in values:
            if not _is_number(v) or not 0 <= v <= 1:
                raise ProtocolViolationError("aggregate values must be numbers in [0, 1]")
    elif kind == "err":
        for key in ("code", "msg"):
            if not isinstance(data[key], str):
                raise ProtocolViolationError(f"err payload {key} must be a string")


def encode(frame: Frame) -> bytes:
    """Serialize a frame to its canonical newline-terminated line."""
    try:
        validate_frame(frame)
    except ProtocolViolationError as exc:
        raise EncodeError(str(exc)) from exc
    payload: dict[str, Any] = {"op": frame.op}
    if frame.topic is not None:
        payload["topic"] = frame.topic
    order = _DATA_ORDER[_payload_kind(frame)]
    payload["data"] = {key: frame.data[key] for key in order}
    try:
        text = json.dumps(
            payload, separators=(",", ":"), ensure_ascii=False, allow_nan=False
        )
    except (TypeError, ValueError) as exc:
        raise EncodeError(f"unserializable frame: {exc}") from exc
    if "\n" in text:
        raise EncodeError("frame must not contain embedded newlines")
    return text.encode("utf-8") + b"\n"


def decode(line: bytes | str) -> Frame:
    """Parse one complete line back into a frame (inverse of encode)."""
    if isinstance(line, bytes):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"line is not valid UTF-8: {exc}") from exc
    else:
        text = line
    if text.endswith("\n"):
        text = text[:-1]
    if not text:
        raise ParseError("empty line")
    if "\n" in text:
        raise ParseError("embedded newline inside frame")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed frame: {exc.msg}") from exc

    if not isinstance(obj, dict):
        raise ProtocolViolationError("frame must be a JSON object")
    if "op" not in obj:
        raise ProtocolViolationError("frame missing op")
    op = obj["op"]
    if op not in OPS:
        raise ProtocolViolationError(f"unknown op: {op!r}")
    unknown = set(obj) - {"op", "topic", "data"}
    if unknown:
        raise ProtocolViolationError(
            f"frame has unknown fields: {', '.join(sorted(unknown))}"
        )
    if "data" not in obj:
        raise ProtocolViolationError("frame missing data")
    data = obj["data"]
    if not isinstance(data, dict):
        raise ProtocolViolationError("data must be an object")
    topic = obj.get("topic")
    if op in ("pub", "sub", "msg") and "topic" not in obj:
        raise ProtocolViolationError(f"op {op} requires a topic")

    frame = Frame(op=op, topic=topic, data=data)
    validate_frame(frame)
    return frame


def topic_match(pattern: str, topic: str) -> bool:
    """Segment-wise match; ``+`` in the pattern matches exactly one segment."""
    p_segs = pattern.split("/")
    t_segs = topic.split("/")
    if len(p_segs) != len(t_segs):
        return False
    return all(p == "+" or p == t for p, t in zip(p_segs, t_segs))


class LineFramer:
    """Splits a byte stream into newline-terminated lines.

    Single-owner, per-connection state. A corrupted line only poisons
    itself; framing resynchronizes at the next newline.
    """

    def __init__(self, max_line_bytes: int = MAX_LINE_BYTES):
        self._buffer = bytearray()
        self._max = max_line_bytes

    def feed(self, chunk: bytes) -> list[bytes]:
        """Append a chunk; return all lines completed by it (with newline)."""
        self._buffer.extend(chunk)
        lines: list[bytes] = []
        while True:
            nl = self._buffer.find(b"\n")
            if nl < 0:
                break
            lines.append(bytes(self._buffer[: nl + 1]))
            del self._buffer[: nl + 1]
        if len(self._buffer) > self._max:
            self._buffer.clear()
            raise ParseError("line exceeds maximum frame size")
        return lines

    @property
    def pending(self) -> bytes:
        """Bytes of the current incomplete line, if any."""
        return bytes(self._buffer)


def _check_id(value: str, what: str) -> str:
    if not isinstance(value, str) or not ID_RE.match(value):
        raise InvalidParameterError(f"{what} must match [A-Za-z0-9_-]+, got {value!r}")
    return value


def eda_topic(session: str, participant: str) -> str:
    return f"eda/{_check_id(session, 'session')}/{_check_id(participant, 'participant')}"


def playback_topic(session: str, participant: str) -> str:
    return f"playback/{_check_id(session, 'session')}/{_check_id(participant, 'participant')}"


def feedback_topic(session: str) -> str:
    return f"feedback/{_check_id(session, 'session')}"
