"""HTTP service for sessions: chat turns, dashboard reads, selection, events.

SessionStore is the framework-free core (used directly by the eval harness
and tests); the FastAPI app is a thin JSON layer over it.  Turns are
persisted as events; per-session locks enforce one turn in flight.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from pydantic import BaseModel

from .catalog import Catalog, load_catalog
from .errors import (
    NoPlanYet,
    PlanfitError,
    ProviderUnavailable,
    SessionBusy,
    SessionComplete,
    UnknownExercise,
    UnknownSession,
)
from .events import EventLog, PersistedEvent, replay_session
from .orchestrator import (
    OrchestratorConfig,
    Session,
    Stage,
    TurnRecord,
    TurnResult,
    handle_user_message,
    new_session,
    start_iteration,
)
from .providers import Provider, ProviderConfig, make_provider
from .summary import select_exercise


def _serialize_plan_state(session: Session) -> dict | None:
    if session.plan is None:
        return None
    return {
        "plan": session.plan.to_json(),
        "report": session.plan_report.to_json() if session.plan_report else None,
        "advisories": [a.to_json() for a in session.plan_advisories],
    }


@dataclass
class SessionStore:
    catalog: Catalog
    provider: Provider
    config: OrchestratorConfig = field(default_factory=OrchestratorConfig)
    data_dir: Path | None = None
    clock: Callable[[], float] = time.time

    def __post_init__(self):
        self.sessions: dict[str, Session] = {}
        self.logs: dict[str, EventLog] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._store_lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir = Path(self.data_dir)
            self._load_existing()

    # --- persistence ------------------------------------------------------

    def _log_path(self, session_id: str) -> Path | None:
        if self.data_dir is None:
            return None
        return self.data_dir / "sessions" / f"{session_id}.jsonl"

    def _load_existing(self) -> None:
        sessions_dir = Path(self.data_dir) / "sessions"
        if not sessions_dir.is_dir():
            return
        for path in sorted(sessions_dir.glob("*.jsonl")):
            session_id = path.stem
            log = EventLog(session_id, path)
            self.logs[session_id] = log
            self.sessions[session_id] = replay_session(session_id, log.events())
            self._locks[session_id] = threading.Lock()

    def _persist_turn(
        self, session: Session, text: str, result: TurnResult
    ) -> None:
        log = self.logs[session.id]
        record = result.record
        now = self.clock()
        log.append("user_msg", {"text": text, "timestamp": result.session.history[-2].timestamp}, now)
        if record.mutations:
            steps = []
            for kind, value in record.mutations:
                if kind == "commands":
                    steps.append({"commands": value})
                elif kind == "select":
                    steps.append({"select": value})
                elif kind == "deselect":
                    steps.append({"deselect": value})
            log.append("edits_applied", {"steps": steps}, now)
        if record.plan_changed:
            payload = _serialize_plan_state(result.session) or {}
            payload["waivers"] = [w.to_json() for w in result.session.waivers]
            log.append("plan_set", payload, now)
        if record.stage_changed or record.mutations:
            log.append(
                "stage_change",
                {
                    "stage": result.session.stage.value,
                    "control": result.session.control.to_json(),
                },
                now,
            )
        log.append(
            "agent_msg",
            {"text": result.reply, "timestamp": result.session.history[-1].timestamp},
            now,
        )

    # --- session operations -------------------------------------------------

    def _session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def _lock(self, session_id: str) -> threading.Lock:
        with self._store_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create_session(self, user_name: str) -> tuple[Session, str]:
        if not user_name or not user_name.strip():
            raise ValueError("user_name must be non-empty")
        session_id = uuid.uuid4().hex[:12]
        session, greeting = new_session(
            session_id, user_name.strip(), self.provider, self.config
        )
        with self._store_lock:
            self.sessions[session_id] = session
            self.logs[session_id] = EventLog(session_id, self._log_path(session_id))
            self._locks[session_id] = threading.Lock()
        log = self.logs[session_id]
        now = self.clock()
        log.append(
            "stage_change",
            {
                "stage": session.stage.value,
                "control": session.control.to_json(),
                "user_name": session.user_name,
            },
            now,
        )
        log.append(
            "agent_msg",
            {"text": greeting, "timestamp": session.history[-1].timestamp},
            now,
        )
        return session, greeting

    def post_message(self, session_id: str, text: str) -> dict:
        session = self._session(session_id)
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(session_id)
        try:
            result = handle_user_message(
                session, text, self.catalog, self.provider, self.config
            )
            if result.record.provider_failed:
                raise ProviderUnavailable("provider failed; turn not recorded")
            self.sessions[session_id] = result.session
            self._persist_turn(session, text, result)
            return self.dashboard_state(session_id, reply=result.reply)
        finally:
            lock.release()

    def begin_iteration(self, session_id: str) -> dict:
        session = self._session(session_id)
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(session_id)
        try:
            result = start_iteration(session, self.provider, self.config)
            self.sessions[session_id] = result.session
            log = self.logs[session_id]
            now = self.clock()
            if result.record.stage_changed:
                log.append(
                    "stage_change",
                    {
                        "stage": result.session.stage.value,
                        "control": result.session.control.to_json(),
                    },
                    now,
                )
            log.append(
                "agent_msg",
                {
                    "text": result.reply,
                    "timestamp": result.session.history[-1].timestamp,
                },
                now,
            )
            return self.dashboard_state(session_id, reply=result.reply)
        finally:
            lock.release()

    def select(self, session_id: str, row_id: str) -> dict:
        session = self._session(session_id)
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusy(session_id)
        try:
            updated = select_exercise(session.summary, row_id, self.catalog)
            if updated is not session.summary:
                session.summary = updated
                self.logs[session_id].append(
                    "edits_applied", {"steps": [{"select": row_id}]}, self.clock()
                )
            return {"summary": session.summary.to_json()}
        finally:
            lock.release()

    # --- reads --------------------------------------------------------------

    def dashboard_state(self, session_id: str, reply: str | None = None) -> dict:
        session = self._session(session_id)
        state = {
            "session_id": session_id,
            "stage": session.stage.value,
            "summary": session.summary.to_json(),
            "plan": _serialize_plan_state(session),
            "revision": session.summary.revision,
        }
        if reply is not None:
            state["reply"] = reply
        return state

    def summary_json(self, session_id: str) -> dict:
        return self._session(session_id).summary.to_json()

    def plan_json(self, session_id: str) -> dict:
        state = _serialize_plan_state(self._session(session_id))
        if state is None:
            raise NoPlanYet(session_id)
        return state

    def history_json(self, session_id: str) -> list[dict]:
        return [t.to_json() for t in self._session(session_id).history]

    def events_since(self, session_id: str, since: int) -> list[PersistedEvent]:
        self._session(session_id)
        return self.logs[session_id].events(since)


def build_store(
    catalog_path: str,
    provider_config: ProviderConfig,
    data_dir: str = "",
    orchestrator_config: OrchestratorConfig | None = None,
) -> SessionStore:
    catalog = load_catalog(catalog_path)
    config = orchestrator_config or OrchestratorConfig()
    catalog.build_index(config.retrieval)
    provider = make_provider(provider_config)
    return SessionStore(
        catalog=catalog,
        provider=provider,
        config=config,
        data_dir=Path(data_dir) if data_dir else None,
    )


class CreateSession(BaseModel):
    user_name: str


class Message(BaseModel):
    text: str


class Selection(BaseModel):
    row_id: str


def create_app(store: SessionStore):
    """FastAPI wiring over a SessionStore."""
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="planfit", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    def _wrap(fn, *args):
        try:
            return fn(*args)
        except UnknownSession as exc:
            raise HTTPException(404, str(exc))
        except NoPlanYet as exc:
            raise HTTPException(404, f"no plan yet: {exc}")
        except SessionBusy as exc:
            raise HTTPException(409, f"turn in flight: {exc}")
        except SessionComplete as exc:
            raise HTTPException(409, str(exc))
        except ProviderUnavailable as exc:
            raise HTTPException(502, str(exc))
        except UnknownExercise as exc:
            raise HTTPException(422, str(exc))

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        if not body.user_name.strip():
            raise HTTPException(400, "user_name must be non-empty")
        session, greeting = store.create_session(body.user_name)
        return {"session_id": session.id, "greeting": greeting}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: Message):
        return _wrap(store.post_message, session_id, body.text)

    @app.post("/sessions/{session_id}/iteration")
    def begin_iteration(session_id: str):
        return _wrap(store.begin_iteration, session_id)

    @app.get("/sessions/{session_id}/summary")
    def get_summary(session_id: str):
        return _wrap(store.summary_json, session_id)

    @app.get("/sessions/{session_id}/plan")
    def get_plan(session_id: str):
        return _wrap(store.plan_json, session_id)

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        return _wrap(store.history_json, session_id)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, since: int = 0):
        events = _wrap(store.events_since, session_id, since)
        return {"events": [e.to_json() for e in events]}

    @app.post("/sessions/{session_id}/selection")
    def post_selection(session_id: str, body: Selection):
        return _wrap(store.select, session_id, body.row_id)

    @app.get("/exercises/{row_id}")
    def get_exercise(row_id: str):
        try:
            return store.catalog.get(row_id).to_json()
        except UnknownExercise as exc:
            raise HTTPException(404, str(exc))

    return app
