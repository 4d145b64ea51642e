"""FastAPI application: WebSocket wire endpoint plus REST control plane.

The pub/sub wire protocol runs over ``/ws``; WebSocket messages (text or
binary) are chunks of the same newline-delimited byte stream a plain
socket would carry, so one message may hold several frames or a partial
one. REST endpoints expose aggregates, keyframes, session introspection,
finalization and the live vibration ticker.
"""

from __future__ import annotations

import asyncio
import os
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .. import __version__
from ..errors import FrissonError, InsufficientDataError, NotFoundError
from ..feedback_map import FeedbackDesign, build_keyframes
from ..signal_core import PipelineConfig
from ..wire_protocol import Frame, LineFramer, encode
from . import models
from .state import FeedbackTicker, ServerState

DEFAULT_DATA_DIR = "frisson-data"
DATA_DIR_ENV = "FRISSON_DATA_DIR"


def resolve_data_dir(explicit: Path | str | None = None) -> Path:
    """Explicit flag wins, then $FRISSON_DATA_DIR, then ./frisson-data."""
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else Path(DEFAULT_DATA_DIR)


class _WsConnection:
    """Adapts a WebSocket to the ServerState connection interface."""

    def __init__(self, ws: WebSocket):
        self._ws = ws

    async def send(self, frame: Frame) -> None:
        await self._ws.send_text(encode(frame).decode("utf-8"))


def _http_error(status: int, exc: FrissonError) -> HTTPException:
    return HTTPException(status, detail={"code": exc.code, "msg": str(exc)})


def create_app(
    data_dir: Path | str | None = None,
    cfg: PipelineConfig | None = None,
    tick_hz: float = 5.0,
) -> FastAPI:
    state = ServerState(resolve_data_dir(data_dir), cfg)
    tickers: dict[str, tuple[FeedbackTicker, asyncio.Task]] = {}

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        for _, task in tickers.values():
            task.cancel()
        tickers.clear()

    app = FastAPI(title="frisson stream server", version=__version__, lifespan=lifespan)
    app.state.frisson = state
    app.state.tickers = tickers

    @app.get("/health", response_model=models.HealthResponse)
    async def health() -> models.HealthResponse:
        return models.HealthResponse(status="ok", version=__version__)

    @app.get("/sessions", response_model=models.SessionListResponse)
    async def list_sessions() -> models.SessionListResponse:
        return models.SessionListResponse(sessions=sorted(state.sessions))

    @app.get("/sessions/{session_id}", response_model=models.SessionInfoResponse)
    async def session_info(session_id: str) -> models.SessionInfoResponse:
        session = state.sessions.get(session_id)
        if session is None:
            raise _http_error(404, NotFoundError(f"unknown session {session_id!r}"))
        participants = [
            models.ParticipantInfo(
                participant_id=pid,
                sample_count=len(buf.samples),
                event_count=len(buf.events),
            )
            for pid, buf in sorted(session.participants.items())
        ]
        return models.SessionInfoResponse(session_id=session_id, participants=participants)

    @app.post("/sessions/{session_id}/finalize", response_model=models.FinalizeResponse)
    async def finalize(session_id: str, req: models.FinalizeRequest) -> models.FinalizeResponse:
        try:
            report = state.finalize_session(session_id, req.video_id)
        except InsufficientDataError as exc:
            raise _http_error(409, exc)
        except FrissonError as exc:
            raise _http_error(422, exc)
        return models.FinalizeResponse(
            video_id=report.aggregate.video_id,
            n_viewers=report.aggregate.n_viewers,
            grid_hz=report.aggregate.grid_hz,
            n_points=len(report.aggregate.values),
            trimmed=report.trimmed,
            skipped=[
                models.SkippedParticipant(participant_id=pid, reason=reason)
                for pid, reason in report.skipped
            ],
            aggregate_path=str(report.aggregate_path),
        )

    @app.get("/videos/{video_id}/aggregate", response_model=models.AggregateResponse)
    async def video_aggregate(video_id: str) -> models.AggregateResponse:
        try:
            agg = state.lookup_aggregate(video_id)
        except FrissonError as exc:
            raise _http_error(422, exc)
        if agg is None:
            raise _http_error(404, NotFoundError(f"no aggregate for video {video_id!r}"))
        return models.AggregateResponse(
            video_id=agg.video_id,
            grid_hz=agg.grid_hz,
            n_viewers=agg.n_viewers,
            values=list(agg.values),
        )

    @app.get("/videos/{video_id}/keyframes", response_model=models.KeyframesResponse)
    async def video_keyframes(video_id: str, design: str) -> models.KeyframesResponse:
        try:
            chosen = FeedbackDesign(design)
        except ValueError:
            raise _http_error(422, FrissonError(f"unknown design {design!r}"))
        try:
            agg = state.lookup_aggregate(video_id)
        except FrissonError as exc:
            raise _http_error(422, exc)
        if agg is None:
            raise _http_error(404, NotFoundError(f"no aggregate for video {video_id!r}"))
        keyframes = build_keyframes(agg, chosen)
        return models.KeyframesResponse(
            design=chosen.value,
            keyframes=[(kf.video_t_s, kf.magnitude) for kf in keyframes],
        )

    @app.post("/sessions/{session_id}/ticker", response_model=models.TickerResponse)
    async def start_ticker(session_id: str, req: models.TickerStartRequest) -> models.TickerResponse:
        try:
            agg = state.lookup_aggregate(req.video_id)
        except FrissonError as exc:
            raise _http_error(422, exc)
        if agg is None:
            raise _http_error(
                404, NotFoundError(f"no aggregate for video {req.video_id!r}; ticker not started")
            )
        if session_id in tickers:
            _, task = tickers.pop(session_id)
            task.cancel()
        ticker = FeedbackTicker(
            state, session_id, req.participant_id, agg, req.tick_hz or tick_hz
        )
        task = asyncio.create_task(ticker.run())
        tickers[session_id] = (ticker, task)
        return models.TickerResponse(
            session_id=session_id,
            video_id=req.video_id,
            participant_id=req.participant_id,
            tick_hz=ticker.tick_hz,
            running=True,
        )

    @app.delete("/sessions/{session_id}/ticker", response_model=models.TickerResponse)
    async def stop_ticker(session_id: str) -> models.TickerResponse:
        entry = tickers.pop(session_id, None)
        if entry is None:
            raise _http_error(404, NotFoundError(f"no ticker running for session {session_id!r}"))
        ticker, task = entry
        task.cancel()
        return models.TickerResponse(
            session_id=session_id,
            video_id=ticker.aggregate.video_id,
            participant_id=ticker.participant_id,
            tick_hz=ticker.tick_hz,
            running=False,
        )

    @app.websocket("/ws")
    async def wire(ws: WebSocket) -> None:
        await ws.accept()
        conn = _WsConnection(ws)
        state.register(conn)
        framer = LineFramer()
        try:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    break
                chunk = message.get("bytes")
                if chunk is None:
                    chunk = (message.get("text") or "").encode("utf-8")
                try:
                    lines = framer.feed(chunk)
                except FrissonError as exc:
                    await conn.send(Frame("err", None, {"code": exc.code, "msg": str(exc)}))
                    continue
                for line in lines:
                    await state.handle_line(conn, line)
        except WebSocketDisconnect:
            pass
        finally:
            state.drop(conn)

    return app
