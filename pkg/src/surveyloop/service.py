"""HTTP session service for the chat UI and external integrators.

Respondent-facing payloads expose only conversational fields; all policy
telemetry lives behind the token-gated debug endpoint. Each session carries
its own lock so at most one message is processed at a time; an Idempotency-Key
header makes client retries safe.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .config import AppConfig
from .engine import (
    STATUS_ACTIVE,
    ConversationEngine,
    ConversationSession,
    MissingPriorsError,
    SessionConfig,
    SessionStateError,
    write_transcript,
)
from .lsde import ScoringError
from .policy import EpsilonSchedule

ADMIN_TOKEN_HEADER = "X-Admin-Token"


class CreateSessionRequest(BaseModel):
    role: str = "student"
    topic: str = "campus life"
    horizon: int | None = Field(default=None, ge=1, le=200)
    alpha: float | None = Field(default=None, gt=0.0, le=1.0)
    epsilon: float | None = Field(default=None, ge=0.0, le=1.0)
    epsilon_schedule: str | None = Field(default=None, pattern="^(fixed|linear_decay)$")
    epsilon_start: float | None = Field(default=None, ge=0.0, le=1.0)
    epsilon_end: float | None = Field(default=None, ge=0.0, le=1.0)
    seed: int | None = None


class MessageRequest(BaseModel):
    text: str = Field(min_length=1)


class RespondentView(BaseModel):
    """What a survey participant is allowed to see."""

    session_id: str
    status: str
    t: int
    question: str | None
    completed: bool


class MessageResponse(RespondentView):
    pass


class _SessionHandle:
    def __init__(self, session: ConversationSession):
        self.session = session
        self.lock = threading.Lock()
        self.idempotency: dict[str, dict] = {}


def _respondent_view(session: ConversationSession) -> dict:
    return {
        "session_id": session.session_id,
        "status": session.status,
        "t": session.t,
        "question": session.current_question(),
        "completed": session.status != STATUS_ACTIVE,
    }


def _session_schedule(body: CreateSessionRequest, config: AppConfig) -> EpsilonSchedule:
    kind = body.epsilon_schedule
    if kind is None:
        if body.epsilon is not None:
            return EpsilonSchedule.fixed(body.epsilon)
        return config.schedule()
    if kind == "fixed":
        epsilon = body.epsilon if body.epsilon is not None else config.epsilon
        return EpsilonSchedule.fixed(epsilon)
    start = body.epsilon_start if body.epsilon_start is not None else config.epsilon_start
    end = body.epsilon_end if body.epsilon_end is not None else config.epsilon_end
    horizon = body.horizon if body.horizon is not None else config.horizon
    return EpsilonSchedule.linear_decay(start, end, horizon)


def create_app(
    config: AppConfig | None = None, engine: ConversationEngine | None = None
) -> FastAPI:
    """Build the service; a preconstructed engine wins over config."""
    config = config if config is not None else AppConfig()
    if engine is None:
        try:
            engine = config.build_engine()
        except Exception:
            # Startable without priors so /healthz works; session creation 503s.
            engine = ConversationEngine(priors=None)

    app = FastAPI(title="surveyloop", docs_url=None, redoc_url=None)
    origins = config.cors_origin_list()
    if origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(origins),
            allow_methods=["*"],
            allow_headers=["*", ADMIN_TOKEN_HEADER],
        )

    sessions: dict[str, _SessionHandle] = {}
    registry_lock = threading.Lock()
    # server-side registry, reachable for operational inspection; never serialized
    app.state.sessions = sessions

    def _handle(session_id: str) -> _SessionHandle:
        handle = sessions.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return handle

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok",
            "sessions": len(sessions),
            "priors_loaded": engine.priors is not None,
        }

    @app.post("/sessions", response_model=RespondentView, status_code=201)
    def create_session(body: CreateSessionRequest) -> dict:
        session_config = SessionConfig(
            role=body.role,
            topic=body.topic,
            horizon=body.horizon if body.horizon is not None else config.horizon,
            alpha=body.alpha if body.alpha is not None else config.alpha,
            schedule=_session_schedule(body, config),
            seed=body.seed,
        )
        try:
            session = engine.start_session(session_config)
        except MissingPriorsError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        with registry_lock:
            sessions[session.session_id] = _SessionHandle(session)
        return _respondent_view(session)

    @app.post("/sessions/{session_id}/messages", response_model=MessageResponse)
    def post_message(
        session_id: str,
        body: MessageRequest,
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ) -> dict:
        handle = _handle(session_id)
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="message text is empty")
        if not handle.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session busy")
        try:
            if idempotency_key is not None and idempotency_key in handle.idempotency:
                return handle.idempotency[idempotency_key]
            try:
                engine.step(handle.session, body.text)
            except SessionStateError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            except ScoringError as exc:
                raise HTTPException(status_code=500, detail=f"scoring failed: {exc}") from exc
            view = _respondent_view(handle.session)
            if idempotency_key is not None:
                handle.idempotency[idempotency_key] = view
            return view
        finally:
            handle.lock.release()

    @app.get("/sessions/{session_id}/debug")
    def session_debug(
        session_id: str,
        admin_token: str | None = Header(default=None, alias=ADMIN_TOKEN_HEADER),
    ) -> dict:
        if not config.admin_token:
            raise HTTPException(status_code=503, detail="admin endpoint not configured")
        if admin_token is None:
            raise HTTPException(status_code=401, detail="missing admin token")
        if admin_token != config.admin_token:
            raise HTTPException(status_code=403, detail="bad admin token")
        handle = _handle(session_id)
        session = handle.session
        current_state = session.exchanges[-1].state if session.exchanges else None
        ev_row = None
        if session.table is not None and current_state is not None:
            ev_row = {str(a): v for a, v in session.table.row(current_state).items()}
        return {
            **_respondent_view(session),
            "role": session.role,
            "topic": session.topic,
            "horizon": session.horizon,
            "alpha": session.alpha,
            "seed": session.seed,
            "state": None if current_state is None else str(current_state),
            "ev_row": ev_row,
            "exchanges": [record.to_dict() for record in session.exchanges],
        }

    @app.delete("/sessions/{session_id}", response_model=RespondentView)
    def delete_session(session_id: str) -> dict:
        handle = _handle(session_id)
        with handle.lock:
            transcript = engine.end_session(handle.session)
            if config.transcript_dir:
                out_dir = Path(config.transcript_dir)
                out_dir.mkdir(parents=True, exist_ok=True)
                write_transcript(transcript, out_dir / f"{session_id}.jsonl")
        return _respondent_view(handle.session)

    return app
