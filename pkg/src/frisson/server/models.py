"""Pydantic request/response models for the REST surface."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class ParticipantInfo(BaseModel):
    participant_id: str
    sample_count: int
    event_count: int


class SessionInfoResponse(BaseModel):
    session_id: str
    participants: list[ParticipantInfo]


class SessionListResponse(BaseModel):
    sessions: list[str]


class FinalizeRequest(BaseModel):
    video_id: str = Field(pattern=r"^[A-Za-z0-9_-]+$")


class SkippedParticipant(BaseModel):
    participant_id: str
    reason: str


class FinalizeResponse(BaseModel):
    video_id: str
    n_viewers: int
    grid_hz: float
    n_points: int
    trimmed: bool
    skipped: list[SkippedParticipant]
    aggregate_path: str


class AggregateResponse(BaseModel):
    video_id: str
    grid_hz: float
    n_viewers: int
    values: list[float]


class KeyframesResponse(BaseModel):
    design: str
    keyframes: list[tuple[float, float]]


class TickerStartRequest(BaseModel):
    video_id: str = Field(pattern=r"^[A-Za-z0-9_-]+$")
    participant_id: str = Field(pattern=r"^[A-Za-z0-9_-]+$")
    tick_hz: float | None = Field(default=None, gt=0)


class TickerResponse(BaseModel):
    session_id: str
    video_id: str
    participant_id: str
    tick_hz: float
    running: bool


class ErrorBody(BaseModel):
    code: str
    msg: str
