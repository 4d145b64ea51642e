"""In-memory session state, frame routing and finalization.

All mutations run on the server's single event loop, so no locks are
needed: per-participant buffers have one writer (that participant's
connection) and finalization snapshots them before processing. Fan-out to
subscribers happens inline, per frame, in arrival order.
"""

from __future__ import annotations

import asyncio
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

from .. import storage
from ..errors import (
    FrissonError,
    InsufficientDataError,
    InvalidParameterError,
    ProtocolViolationError,
)
from ..feedback_map import map_vibration
from ..session_align import (
    PLAY,
    PlaybackEvent,
    build_timeline,
    grid_to_eda,
    to_grid_timed,
    video_time,
)
from ..signal_core import (
    AggregateSeries,
    EdaSeries,
    FrissonSeries,
    PipelineConfig,
    aggregate,
    process_session,
)
from ..wire_protocol import ID_RE, Frame, decode, feedback_topic, topic_match

__all__ = ["Connection", "ServerState", "SessionState", "FeedbackTicker", "FinalizeReport"]


class Connection(Protocol):
    """Anything that can receive outbound frames (a WebSocket, a test stub)."""

    async def send(self, frame: Frame) -> None: ...


@dataclass
class ParticipantBuffer:
    """Append-only raw data for one participant in one session."""

    samples: list[tuple[int, float]] = field(default_factory=list)
    events: list[PlaybackEvent] = field(default_factory=list)


@dataclass
class SessionState:
    session_id: str
    participants: dict[str, ParticipantBuffer] = field(default_factory=dict)

    def buffer(self, participant_id: str) -> ParticipantBuffer:
        return self.participants.setdefault(participant_id, ParticipantBuffer())


@dataclass(frozen=True)
class FinalizeReport:
    aggregate: AggregateSeries
    skipped: tuple[tuple[str, str], ...]
    trimmed: bool
    aggregate_path: Path


def now_ms() -> int:
    return int(time.time() * 1000)


class ServerState:
    """Routing table, session buffers and aggregate cache for one server."""

    def __init__(self, data_dir: Path | str, cfg: PipelineConfig | None = None):
        self.data_dir = Path(data_dir)
        self.cfg = cfg or PipelineConfig()
        self.sessions: dict[str, SessionState] = {}
        self.aggregates: dict[str, AggregateSeries] = {}
        self._subscribers: dict[Any, list[str]] = {}

    # -- connection lifecycle -------------------------------------------------

    def register(self, conn: Connection) -> None:
        self._subscribers.setdefault(conn, [])

    def drop(self, conn: Connection) -> None:
        self._subscribers.pop(conn, None)

    def subscriptions(self, conn: Connection) -> tuple[str, ...]:
        return tuple(self._subscribers.get(conn, ()))

    # -- frame plane ----------------------------------------------------------

    async def handle_line(self, conn: Connection, line: bytes) -> None:
        """Decode one wire line; malformed input earns an err frame back."""
        try:
            frame = decode(line)
        except FrissonError as exc:
            await self._send_err(conn, exc.code, str(exc))
            return
        await self.handle_frame(conn, frame)

    async def handle_frame(self, conn: Connection, frame: Frame) -> None:
        if frame.op == "pub":
            await self._handle_pub(conn, frame)
        elif frame.op == "sub":
            patterns = self._subscribers.setdefault(conn, [])
            if frame.topic not in patterns:
                patterns.append(frame.topic)  # type: ignore[arg-type]
        elif frame.op == "get_aggregate":
            await self._handle_get_aggregate(conn, frame)
        else:
            # msg, aggregate and err are server-to-client only
            await self._send_err(
                conn, "protocol-violation", f"op {frame.op} is not accepted inbound"
            )

    async def _handle_pub(self, conn: Connection, frame: Frame) -> None:
        segments = frame.topic.split("/")  # type: ignore[union-attr]
        family = segments[0]
        if family == "eda":
            _, session_id, participant_id = segments
            buf = self._session(session_id).buffer(participant_id)
            t = frame.data["t"]
            if buf.samples and t < buf.samples[-1][0]:
                await self._send_err(
                    conn,
                    "ts_regression",
                    f"sample at {t} predates previous {buf.samples[-1][0]}; dropped",
                )
                return
            buf.samples.append((t, float(frame.data["v"])))
        elif family == "playback":
            _, session_id, participant_id = segments
            buf = self._session(session_id).buffer(participant_id)
            buf.events.append(PlaybackEvent(frame.data["t"], frame.data["e"]))
        await self.publish(frame.topic, dict(frame.data))  # type: ignore[arg-type]

    async def _handle_get_aggregate(self, conn: Connection, frame: Frame) -> None:
        video_id = frame.data["video"]
        agg = self.lookup_aggregate(video_id)
        if agg is None:
            await self._send_err(conn, "not_found", f"no aggregate for video {video_id!r}")
            return
        await conn.send(Frame("aggregate", None, storage.aggregate_payload(agg)))

    async def publish(self, topic: str, data: dict) -> None:
        """Forward a msg frame to every connection with a matching pattern."""
        frame = Frame("msg", topic, data)
        for conn, patterns in list(self._subscribers.items()):
            if any(topic_match(p, topic) for p in patterns):
                await conn.send(frame)

    async def _send_err(self, conn: Connection, code: str, msg: str) -> None:
        await conn.send(Frame("err", None, {"code": code, "msg": msg}))

    def _session(self, session_id: str) -> SessionState:
        return self.sessions.setdefault(session_id, SessionState(session_id))

    # -- aggregates and finalization -------------------------------------------

    def lookup_aggregate(self, video_id: str) -> AggregateSeries | None:
        """Cached, stored, or freshly recomputed aggregate for a video."""
        if video_id in self.aggregates:
            return self.aggregates[video_id]
        path = self._aggregate_path(video_id)
        if path.is_file():
            agg = storage.read_aggregate(path)
            self.aggregates[video_id] = agg
            return agg
        agg = self._recompute_from_disk(video_id)
        if agg is not None:
            self.aggregates[video_id] = agg
        return agg

    def _aggregate_path(self, video_id: str) -> Path:
        if not ID_RE.match(video_id):
            raise InvalidParameterError(f"video id must match [A-Za-z0-9_-]+: {video_id!r}")
        return self.data_dir / "aggregates" / f"{video_id}.json"

    def _recompute_from_disk(self, video_id: str) -> AggregateSeries | None:
        sessions_root = self.data_dir / "sessions"
        if not sessions_root.is_dir():
            return None
        series: list[FrissonSeries] = []
        for session_dir in sorted(p for p in sessions_root.iterdir() if p.is_dir()):
            for record_dir in sorted(p for p in session_dir.iterdir() if p.is_dir()):
                try:
                    record = storage.read_session(record_dir)
                except FrissonError:
                    continue
                if record.video_id != video_id:
                    continue
                try:
                    series.append(self._record_to_frisson(record))
                except FrissonError:
                    continue
        if not series:
            return None
        return aggregate(video_id, _trim_common(series)[0])

    def _record_to_frisson(self, record: storage.SessionRecord) -> FrissonSeries:
        timeline = build_timeline(record.events)
        grid = to_grid_timed(
            record.eda.sample_times_ms(),
            record.eda.values,
            timeline,
            self.cfg.sample_rate_hz,
        )
        return process_session(grid_to_eda(grid, record.eda.start_wall_ms), self.cfg)

    def finalize_session(
        self, session_id: str, video_id: str, cfg: PipelineConfig | None = None
    ) -> FinalizeReport:
        """Grid + process every participant, aggregate, and persist.

        Participants with no usable data (no samples, no events, invalid
        timeline, or no samples during play) are skipped and reported, not
        fabricated. Series are trimmed to the common minimum length when
        viewers stopped at slightly different points.
        """
        cfg = cfg or self.cfg
        if not ID_RE.match(session_id):
            raise InvalidParameterError(f"session id must match [A-Za-z0-9_-]+: {session_id!r}")
        agg_path = self._aggregate_path(video_id)
        session = self.sessions.get(session_id)
        if session is None or not session.participants:
            raise InsufficientDataError(f"session {session_id!r} has no participants")

        per_viewer: dict[str, FrissonSeries] = {}
        records: dict[str, storage.SessionRecord] = {}
        skipped: list[tuple[str, str]] = []
        for pid in sorted(session.participants):
            buf = session.participants[pid]
            samples = list(buf.samples)
            events = tuple(buf.events)
            if not samples:
                skipped.append((pid, "no EDA samples"))
                continue
            records[pid] = storage.SessionRecord(
                pid,
                video_id,
                EdaSeries(samples[0][0], cfg.sample_rate_hz, tuple(v for _, v in samples)),
                events,
            )
            if not events:
                skipped.append((pid, "no playback events"))
                continue
            try:
                timeline = build_timeline(events)
            except ProtocolViolationError as exc:
                skipped.append((pid, f"invalid playback timeline: {exc}"))
                continue
            try:
                grid = to_grid_timed(
                    [t for t, _ in samples], [v for _, v in samples], timeline, cfg.sample_rate_hz
                )
                per_viewer[pid] = process_session(
                    grid_to_eda(grid, samples[0][0]), cfg
                )
            except FrissonError as exc:
                skipped.append((pid, str(exc)))
                continue

        if not per_viewer:
            raise InsufficientDataError(
                f"no participant in session {session_id!r} produced a usable series"
            )

        ordered = [per_viewer[pid] for pid in sorted(per_viewer)]
        trimmed_series, trimmed = _trim_common(ordered)
        agg = aggregate(video_id, trimmed_series)

        agg_path.parent.mkdir(parents=True, exist_ok=True)
        storage.write_aggregate(agg_path, agg)
        for pid, record in records.items():
            storage.write_session(self.data_dir / "sessions" / session_id / pid, record)
        self.aggregates[video_id] = agg
        return FinalizeReport(agg, tuple(skipped), trimmed, agg_path)


def _trim_common(series: list[FrissonSeries]) -> tuple[list[FrissonSeries], bool]:
    """Trim all series to the shortest length; report whether any trim happened."""
    shortest = min(len(s) for s in series)
    if all(len(s) == shortest for s in series):
        return series, False
    return (
        [FrissonSeries(s.grid_hz, s.values[:shortest]) for s in series],
        True,
    )


class FeedbackTicker:
    """Publishes live vibration frames while the reference viewer is playing.

    Each tick reads the viewer's playback timeline, maps the current video
    time to an aggregate index (clipped to bounds), and publishes
    ``{t, a, duty}`` on ``feedback/{session}``; nothing is published while
    the viewer is stopped or before the first play.
    """

    def __init__(
        self,
        state: ServerState,
        session_id: str,
        participant_id: str,
        agg: AggregateSeries,
        tick_hz: float = 5.0,
    ):
        if not tick_hz > 0:
            raise InvalidParameterError("tick_hz must be positive")
        self.state = state
        self.session_id = session_id
        self.participant_id = participant_id
        self.aggregate = agg
        self.tick_hz = tick_hz

    def frame_data(self, t_wall_ms: int) -> dict | None:
        """Feedback payload at a wall time, or None while not playing."""
        session = self.state.sessions.get(self.session_id)
        buf = session.participants.get(self.participant_id) if session else None
        if buf is None or not buf.events or buf.events[-1].kind != PLAY:
            return None
        try:
            timeline = build_timeline(tuple(buf.events))
        except ProtocolViolationError:
            return None
        vt = video_time(timeline, t_wall_ms)
        idx = min(int(math.floor(vt * self.aggregate.grid_hz)), len(self.aggregate.values) - 1)
        a = self.aggregate.values[max(idx, 0)]
        return {"t": int(t_wall_ms), "a": a, "duty": map_vibration(a)}

    async def run(self) -> None:
        interval = 1.0 / self.tick_hz
        while True:
            await asyncio.sleep(interval)
            data = self.frame_data(now_ms())
            if data is not None:
                await self.state.publish(feedback_topic(self.session_id), data)
