"""Event-sourced session persistence: JSON-lines append-only logs.

Each session owns one log file.  Replaying a log reconstructs the session
exactly (summary ids, revisions, plan, stage, and control state) without
calling any provider: analyzer edits, retrieval results, and plan syncs were
all recorded as explicit summary mutations when they happened.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from .guidelines import GuidelineReport, Waiver
from .orchestrator import Session, SessionControl, Stage, Turn
from .plan import WeeklyPlan
from .summary import EditCommand, apply_edits, deselect_exercise
from .synthesis import Advisory

EVENT_KINDS = ("user_msg", "agent_msg", "edits_applied", "plan_set", "stage_change")


@dataclass(frozen=True)
class PersistedEvent:
    session_id: str
    seq: int
    kind: str
    payload: dict
    timestamp: float

    def to_json(self) -> dict:
        return {
            "session_id": self.session_id,
            "seq": self.seq,
            "kind": self.kind,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }

    @staticmethod
    def from_json(data: dict) -> "PersistedEvent":
        return PersistedEvent(
            session_id=data["session_id"],
            seq=data["seq"],
            kind=data["kind"],
            payload=data["payload"],
            timestamp=data["timestamp"],
        )


class EventLog:
    """Append-only per-session event log with contiguous sequence numbers."""

    def __init__(self, session_id: str, path: Path | None):
        self.session_id = session_id
        self.path = path
        self._events: list[PersistedEvent] = []
        self._lock = threading.Lock()
        if path is not None and path.exists():
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._events.append(PersistedEvent.from_json(json.loads(line)))

    @property
    def last_seq(self) -> int:
        return self._events[-1].seq if self._events else 0

    def append(self, kind: str, payload: dict, timestamp: float) -> PersistedEvent:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._lock:
            event = PersistedEvent(
                session_id=self.session_id,
                seq=self.last_seq + 1,
                kind=kind,
                payload=payload,
                timestamp=timestamp,
            )
            self._events.append(event)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as f:
                    f.write(json.dumps(event.to_json(), ensure_ascii=False) + "\n")
        return event

    def events(self, since: int = 0) -> list[PersistedEvent]:
        return [e for e in self._events if e.seq > since]


def apply_event(session: Session, event: PersistedEvent) -> None:
    """Apply one persisted event to an in-memory session."""
    payload = event.payload
    if event.kind == "user_msg":
        session.history.append(Turn("user", payload["text"], payload["timestamp"]))
    elif event.kind == "agent_msg":
        session.history.append(Turn("agent", payload["text"], payload["timestamp"]))
    elif event.kind == "edits_applied":
        for step in payload["steps"]:
            if "commands" in step:
                commands = [EditCommand.from_json(c) for c in step["commands"]]
                session.summary = apply_edits(session.summary, commands)
            elif "select" in step:
                # catalog membership was validated when the event was written
                session.summary = session.summary.clone()
                if step["select"] not in session.summary.selected_exercise_row_ids:
                    session.summary.selected_exercise_row_ids.append(step["select"])
                    session.summary.revision += 1
            elif "deselect" in step:
                session.summary = deselect_exercise(session.summary, step["deselect"])
    elif event.kind == "plan_set":
        session.plan = WeeklyPlan.from_json(payload["plan"])
        session.plan_report = GuidelineReport.from_json(payload["report"])
        session.plan_advisories = tuple(
            Advisory.from_json(a) for a in payload.get("advisories", [])
        )
        session.waivers = [Waiver.from_json(w) for w in payload.get("waivers", [])]
    elif event.kind == "stage_change":
        session.stage = Stage(payload["stage"])
        session.control = SessionControl.from_json(payload.get("control", {}))
    else:
        raise ValueError(f"unknown event kind {event.kind!r}")


def replay_session(session_id: str, events: list[PersistedEvent]) -> Session:
    """Rebuild a session purely from its event log.

    The user name travels in the first stage_change payload.
    """
    user_name = next(
        (
            e.payload["user_name"]
            for e in events
            if e.kind == "stage_change" and "user_name" in e.payload
        ),
        "",
    )
    session = Session(id=session_id, user_name=user_name)
    for event in events:
        apply_event(session, event)
    return session
