"""Session planning state and the add/update/remove edit-command machinery.

The dialogue analyzer emits a JSON array of edit commands; applying a batch is
atomic (any failure rejects the whole batch and leaves the summary untouched).
Entity ids are ``<prefix><counter>`` per target and counters are never reused
after removal.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    MalformedCommand,
    NoArrayFound,
    UnknownExercise,
    UnknownId,
    UnknownTarget,
)

TARGETS: dict[str, tuple[str, str]] = {
    # target -> (collection attribute, id prefix)
    "goal": ("goals", "g"),
    "availability": ("availabilities", "a"),
    "obstacle": ("obstacles", "o"),
    "recommended_exercise": ("recommended_exercises", "r"),
    "implementation_intention": ("implementation_intentions", "p"),
}

METHODS = ("add", "update", "remove")


@dataclass(frozen=True)
class SummaryEntity:
    id: str
    payload: dict[str, Any]

    def to_json(self) -> dict:
        return {"id": self.id, **self.payload}


@dataclass(frozen=True)
class EditCommand:
    target: str
    method: str
    params: dict[str, Any]

    def to_json(self) -> dict:
        return {"target": self.target, "method": self.method, "params": self.params}

    @staticmethod
    def from_json(data: dict) -> "EditCommand":
        return EditCommand(data["target"], data["method"], data["params"])


def add(target: str, entity: dict[str, Any]) -> EditCommand:
    return EditCommand(target, "add", {"entity": entity})


def update(target: str, entity_id: str, patch: dict[str, Any]) -> EditCommand:
    return EditCommand(target, "update", {"id": entity_id, "update": patch})


def remove(target: str, entity_id: str) -> EditCommand:
    return EditCommand(target, "remove", {"id": entity_id})


@dataclass
class PlanSummary:
    goals: list[SummaryEntity] = field(default_factory=list)
    availabilities: list[SummaryEntity] = field(default_factory=list)
    obstacles: list[SummaryEntity] = field(default_factory=list)
    recommended_exercises: list[SummaryEntity] = field(default_factory=list)
    selected_exercise_row_ids: list[str] = field(default_factory=list)
    implementation_intentions: list[SummaryEntity] = field(default_factory=list)
    revision: int = 0
    # id counters survive removals so ids are never reissued
    counters: dict[str, int] = field(default_factory=dict)

    def clone(self) -> "PlanSummary":
        return PlanSummary(
            goals=[copy.deepcopy(e) for e in self.goals],
            availabilities=[copy.deepcopy(e) for e in self.availabilities],
            obstacles=[copy.deepcopy(e) for e in self.obstacles],
            recommended_exercises=[copy.deepcopy(e) for e in self.recommended_exercises],
            selected_exercise_row_ids=list(self.selected_exercise_row_ids),
            implementation_intentions=[
                copy.deepcopy(e) for e in self.implementation_intentions
            ],
            revision=self.revision,
            counters=dict(self.counters),
        )

    def collection(self, target: str) -> list[SummaryEntity]:
        return getattr(self, TARGETS[target][0])

    def to_json(self) -> dict:
        return {
            "goals": [e.to_json() for e in self.goals],
            "availabilities": [e.to_json() for e in self.availabilities],
            "obstacles": [e.to_json() for e in self.obstacles],
            "recommended_exercises": [e.to_json() for e in self.recommended_exercises],
            "selected_exercise_row_ids": list(self.selected_exercise_row_ids),
            "implementation_intentions": [
                e.to_json() for e in self.implementation_intentions
            ],
            "revision": self.revision,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)

    @staticmethod
    def from_json(data: dict) -> "PlanSummary":
        def entities(items: list) -> list[SummaryEntity]:
            return [
                SummaryEntity(item["id"], {k: v for k, v in item.items() if k != "id"})
                for item in items
            ]

        summary = PlanSummary(
            goals=entities(data.get("goals", [])),
            availabilities=entities(data.get("availabilities", [])),
            obstacles=entities(data.get("obstacles", [])),
            recommended_exercises=entities(data.get("recommended_exercises", [])),
            selected_exercise_row_ids=list(data.get("selected_exercise_row_ids", [])),
            implementation_intentions=entities(
                data.get("implementation_intentions", [])
            ),
            revision=data.get("revision", 0),
        )
        # counters resume past the largest numeric suffix seen per target
        for target, (attr, prefix) in TARGETS.items():
            best = 0
            for entity in getattr(summary, attr):
                m = re.fullmatch(re.escape(prefix) + r"(\d+)", entity.id)
                if m:
                    best = max(best, int(m.group(1)))
            if best:
                summary.counters[target] = best
        return summary


def _next_id(summary: PlanSummary, target: str) -> str:
    prefix = TARGETS[target][1]
    counter = summary.counters.get(target, 0) + 1
    summary.counters[target] = counter
    return f"{prefix}{counter}"


def _find(entities: list[SummaryEntity], entity_id: str) -> int:
    for i, e in enumerate(entities):
        if e.id == entity_id:
            return i
    return -1


def _apply_one(summary: PlanSummary, cmd: EditCommand, index: int) -> None:
    if cmd.target not in TARGETS:
        raise UnknownTarget(cmd.target)
    if cmd.method not in METHODS:
        raise MalformedCommand(index, f"unknown method {cmd.method!r}")
    collection = summary.collection(cmd.target)
    params = cmd.params or {}

    if cmd.method == "add":
        entity = params.get("entity")
        if not isinstance(entity, dict):
            raise MalformedCommand(index, "add requires an object 'entity' param")
        payload = dict(entity)
        supplied_id = payload.pop("id", None)
        parent_ids = params.get("parent_ids", payload.pop("parent_ids", None))
        if parent_ids is not None and cmd.target == "implementation_intention":
            payload["parent_ids"] = list(parent_ids)
        # a caller-supplied (random) id is honored only for implementation
        # intentions, where parent links may refer to it
        if supplied_id and cmd.target == "implementation_intention":
            if any(e.id == supplied_id for e in collection):
                raise MalformedCommand(index, f"duplicate supplied id {supplied_id!r}")
            new_id = str(supplied_id)
        else:
            new_id = _next_id(summary, cmd.target)
        collection.append(SummaryEntity(new_id, payload))
        return

    if cmd.method == "update":
        entity_id = params.get("id")
        patch = params.get("update")
        if not isinstance(entity_id, str):
            raise MalformedCommand(index, "update requires a string 'id' param")
        if not isinstance(patch, dict):
            raise MalformedCommand(index, "update requires an object 'update' param")
        pos = _find(collection, entity_id)
        if pos < 0:
            raise UnknownId(cmd.target, entity_id)
        merged = {**collection[pos].payload, **patch}
        collection[pos] = SummaryEntity(entity_id, merged)
        return

    entity_id = params.get("id")
    if not isinstance(entity_id, str):
        raise MalformedCommand(index, "remove requires a string 'id' param")
    pos = _find(collection, entity_id)
    if pos < 0:
        raise UnknownId(cmd.target, entity_id)
    del collection[pos]


def apply_edits(summary: PlanSummary, commands: list[EditCommand]) -> PlanSummary:
    """Apply a command batch atomically; an empty batch is the identity."""
    if not commands:
        return summary
    work = summary.clone()
    for i, cmd in enumerate(commands):
        _apply_one(work, cmd, i)
    work.revision += 1
    return work


_ARRAY_START_RE = re.compile(r"\[")


def _extract_first_array(text: str) -> list | None:
    decoder = json.JSONDecoder()
    for m in _ARRAY_START_RE.finditer(text):
        try:
            value, _ = decoder.raw_decode(text, m.start())
        except json.JSONDecodeError:
            continue
        if isinstance(value, list):
            return value
    return None


def parse_commands_json(text: str) -> list[EditCommand]:
    """Locate the first top-level JSON array in *text* and parse edit commands.

    The array may be wrapped in prose or code fences.  Unknown extra fields on
    command objects are ignored.
    """
    array = _extract_first_array(text or "")
    if array is None:
        raise NoArrayFound("no JSON array in analyzer output")
    commands: list[EditCommand] = []
    for i, item in enumerate(array):
        if not isinstance(item, dict):
            raise MalformedCommand(i, "command must be a JSON object")
        target = item.get("target")
        method = item.get("method")
        if not isinstance(target, str) or target not in TARGETS:
            raise UnknownTarget(str(target))
        if not isinstance(method, str) or method not in METHODS:
            raise MalformedCommand(i, f"unknown method {method!r}")
        params = item.get("params", {})
        if not isinstance(params, dict):
            raise MalformedCommand(i, "params must be a JSON object")
        if method == "add" and not isinstance(params.get("entity"), dict):
            raise MalformedCommand(i, "add requires an object 'entity' param")
        if method == "update" and (
            not isinstance(params.get("id"), str)
            or not isinstance(params.get("update"), dict)
        ):
            raise MalformedCommand(i, "update requires 'id' and 'update' params")
        if method == "remove" and not isinstance(params.get("id"), str):
            raise MalformedCommand(i, "remove requires a string 'id' param")
        commands.append(EditCommand(target, method, params))
    return commands


def select_exercise(summary: PlanSummary, row_id: str, catalog) -> PlanSummary:
    """Append *row_id* to the selection if absent; idempotent."""
    if row_id not in catalog:
        raise UnknownExercise(row_id)
    if row_id in summary.selected_exercise_row_ids:
        return summary
    work = summary.clone()
    work.selected_exercise_row_ids.append(row_id)
    work.revision += 1
    return work


def deselect_exercise(summary: PlanSummary, row_id: str) -> PlanSummary:
    """Remove *row_id* from the selection if present; idempotent."""
    if row_id not in summary.selected_exercise_row_ids:
        return summary
    work = summary.clone()
    work.selected_exercise_row_ids.remove(row_id)
    work.revision += 1
    return work
