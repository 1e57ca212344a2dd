"""Language-model providers: deterministic template mode, scripted replay, remote HTTP.

Template mode is the offline stand-in for a hosted chat model: the responder
renders stage templates and the analyzer applies fixed extraction rules, so
end-to-end runs are reproducible with zero network access.  Remote mode talks
to a chat-completions style endpoint and parses its structured output.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from . import templates
from .errors import PlanfitError, ProviderUnavailable, ScriptExhausted
from .plan import RecommendationItem
from .summary import (
    EditCommand,
    PlanSummary,
    add,
    parse_commands_json,
    remove,
)

ANALYZER_PROMPT = (
    "Analyze the latest turn of the dialogue and return an array of JSON "
    "objects, each describing one update to the planning summary.\n"
    "Each object has the shape {\"target\": \"goal\" | \"availability\" | "
    "\"obstacle\" | \"recommended_exercise\" | \"implementation_intention\", "
    "\"method\": \"add\" | \"update\" | \"remove\", \"params\": {...}}.\n"
    "For add, params carry {\"entity\": {...}} without an id (the system "
    "assigns ids; only implementation_intention adds may carry a random id "
    "when the parent_ids property is used). For update, params carry "
    "{\"id\": ..., \"update\": {...}} whose fields overwrite the matching "
    "element. For remove, params carry {\"id\": ...}.\n"
    "If there is nothing to be updated, return []."
)


@dataclass(frozen=True)
class ProviderConfig:
    mode: str = "template"  # "scripted" | "template" | "remote"
    model_name: str = "gpt-4"
    temperature: float = 0.5
    top_p: float = 1.0
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0
    endpoint: str = ""
    api_key: str = ""


@dataclass(frozen=True)
class RetrievalRequest:
    keywords: tuple[str, ...]


@dataclass(frozen=True)
class ProviderReply:
    text: str | None
    retrieval_request: RetrievalRequest | None = None


@dataclass
class RespondContext:
    stage: str
    summary: PlanSummary
    user_name: str
    intent: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class AnalyzeContext:
    stage: str
    obstacle_availability_id: str | None = None


def extract_keywords(summary: PlanSummary) -> tuple[str, ...]:
    """Exercise-related keywords for retrieval: goal and obstacle labels."""
    words = [str(e.payload.get("label", "")) for e in summary.goals]
    words += [str(e.payload.get("label", "")) for e in summary.obstacles]
    return tuple(w for w in words if w.strip())


class Provider:
    """Interface shared by all modes; subclasses render the actual text."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    def respond(self, instruction: str, history: list, context: RespondContext) -> ProviderReply:
        if context.intent == "recommend" and not context.params.get("recommendations"):
            return ProviderReply(None, RetrievalRequest(extract_keywords(context.summary)))
        return ProviderReply(self._render(instruction, history, context))

    def _render(self, instruction: str, history: list, context: RespondContext) -> str:
        raise NotImplementedError

    def analyze(self, turn_pair: tuple[str, str], summary: PlanSummary, context: AnalyzeContext) -> list[EditCommand]:
        raise NotImplementedError


# --- template mode -----------------------------------------------------------

_NEGATIVE_PHRASES = (
    "no",
    "nope",
    "nah",
    "none",
    "nothing",
    "n/a",
    "not really",
    "no thanks",
    "no thank you",
    "that's all",
    "thats all",
    "that is all",
    "that's it",
    "thats it",
    "that's everything",
    "i'm good",
    "im good",
    "all good",
    "nothing else",
    "nothing to add",
    "no more",
    "i'm done",
    "im done",
    "i am done",
)

_REMOVAL_RE = re.compile(r"\b(remove|delete|drop|forget)\b", re.IGNORECASE)

_GOAL_LEADIN_RE = re.compile(
    r"^(?:i\s+(?:really\s+)?(?:want|would like|'?d like|wish|hope|aim)\s+to\s+"
    r"|i\s+wanna\s+|my goals? (?:is|are)(?: to)?\s+|also,?\s+|and\s+)",
    re.IGNORECASE,
)

_AVAILABILITY_LEADIN_RE = re.compile(
    r"^(?:i(?:'m| am)\s+(?:usually\s+)?(?:free|available)\s+(?:on\s+|to exercise\s+)?"
    r"|i can (?:do|exercise|work out)\s+(?:on\s+)?|usually,?\s+|maybe\s+)",
    re.IGNORECASE,
)

_OBSTACLE_LEADIN_RE = re.compile(
    r"^(?:yes,?\s+|yeah,?\s+|well,?\s+|hmm,?\s+|i guess\s+|probably\s+|maybe\s+"
    r"|i think\s+)",
    re.IGNORECASE,
)

_CLAUSE_SPLIT_RE = re.compile(r"\s*(?:,\s*and\s+|,\s+|;\s*|\s+and\s+)\s*", re.IGNORECASE)


def is_negative(text: str) -> bool:
    cleaned = re.sub(r"[.!?]+$", "", text.strip().lower())
    if cleaned in _NEGATIVE_PHRASES:
        return True
    first = re.split(r"[,.!?\s]+", cleaned, maxsplit=1)[0]
    return first in ("no", "nope", "nah", "none", "nothing")


def _capitalize(text: str) -> str:
    return text[:1].upper() + text[1:] if text else text


def _clean(text: str, leadin: re.Pattern) -> str:
    out = leadin.sub("", text.strip())
    return re.sub(r"[.!?\s]+$", "", out).strip()


class TemplateProvider(Provider):
    """Deterministic stand-in for the hosted model: fixed templates, fixed rules."""

    def _render(self, instruction: str, history: list, context: RespondContext) -> str:
        p = context.params
        intent = context.intent
        t = templates
        if intent == "greeting":
            return t.GREETING.format(name=context.user_name)
        if intent == "goals_follow_up":
            return t.GOALS_FOLLOW_UP.format(latest=p["latest"])
        if intent == "goals_reask":
            return t.GOALS_REASK
        if intent == "availability_entry":
            return t.AVAILABILITY_ENTRY
        if intent == "availability_follow_up":
            return t.AVAILABILITY_FOLLOW_UP.format(latest=p["latest"])
        if intent == "availability_reask":
            return t.AVAILABILITY_REASK
        if intent == "obstacle_question":
            return t.OBSTACLE_QUESTION.format(availability=p["availability"])
        if intent == "recommend":
            items: list[RecommendationItem] = p["recommendations"]
            return "\n".join(
                [t.RECOMMEND_INTRO, t.recommendation_block(items), t.RECOMMEND_QUESTION]
            )
        if intent == "selection_reask":
            return t.SELECTION_REASK
        if intent == "balance_question":
            return t.balance_question(p["only"])
        if intent in ("plan", "replan"):
            intro = t.PLAN_INTRO if intent == "plan" else t.REPLAN_INTRO
            parts = [intro, p["plan_xml"]]
            if p.get("insufficient"):
                parts.append(t.INSUFFICIENT_AVAILABILITY)
            parts.append(t.PLAN_QUESTION)
            return "\n".join(parts)
        if intent == "progression_offer":
            return t.PROGRESSION_OFFER.format(step=p["step"])
        if intent == "progression_applied":
            return "\n".join([t.PROGRESSION_APPLIED, p["plan_xml"], t.ANYTHING_ELSE])
        if intent == "progression_declined":
            return t.PROGRESSION_DECLINED
        if intent == "progression_saturated":
            return t.PROGRESSION_SATURATED
        if intent == "dissatisfied":
            return t.DISSATISFIED_QUESTION
        if intent == "anything_else":
            return t.ANYTHING_ELSE
        if intent == "iteration_entry":
            return t.ITERATION_ENTRY.format(name=context.user_name)
        if intent == "wrap_up":
            return t.WRAP_UP.format(name=context.user_name)
        return t.REDIRECT

    def analyze(self, turn_pair: tuple[str, str], summary: PlanSummary, context: AnalyzeContext) -> list[EditCommand]:
        _, user_text = turn_pair
        text = user_text.strip()
        if not text or is_negative(text):
            return []
        stage = context.stage
        if stage not in ("GatherGoals", "GatherAvailability", "GatherObstacles"):
            return []
        target = {
            "GatherGoals": "goal",
            "GatherAvailability": "availability",
            "GatherObstacles": "obstacle",
        }[stage]

        if _REMOVAL_RE.search(text):
            lowered = text.lower()
            for entity in summary.collection(target):
                label = str(
                    entity.payload.get("label") or entity.payload.get("day_spec") or ""
                )
                if label and label.lower() in lowered:
                    return [remove(target, entity.id)]
            return []

        if target == "goal":
            clauses = [
                _clean(c, _GOAL_LEADIN_RE) for c in _CLAUSE_SPLIT_RE.split(text) if c.strip()
            ]
            return [add("goal", {"label": _capitalize(c)}) for c in clauses if c]
        if target == "availability":
            cleaned = _clean(text, _AVAILABILITY_LEADIN_RE)
            if not cleaned:
                return []
            return [add("availability", {"day_spec": _capitalize(cleaned), "time_spec": ""})]
        clauses = [
            _clean(c, _OBSTACLE_LEADIN_RE)
            for c in re.split(r"\s+and\s+", text, flags=re.IGNORECASE)
            if c.strip()
        ]
        commands = []
        for clause in clauses:
            if not clause or is_negative(clause):
                continue
            payload: dict[str, Any] = {"label": _capitalize(clause)}
            if context.obstacle_availability_id:
                payload["linked_availability_ids"] = [context.obstacle_availability_id]
            commands.append(add("obstacle", payload))
        return commands


# --- scripted mode -----------------------------------------------------------


class ScriptedProvider(TemplateProvider):
    """Replays fixture replies keyed by stage; analysis stays rule-based."""

    def __init__(self, config: ProviderConfig, script: dict[str, list[str]]):
        super().__init__(config)
        self.script = {k: list(v) for k, v in script.items()}
        self._cursor: dict[str, int] = {}

    def _render(self, instruction: str, history: list, context: RespondContext) -> str:
        stage = context.stage
        replies = self.script.get(stage, [])
        index = self._cursor.get(stage, 0)
        if index >= len(replies):
            raise ScriptExhausted(stage)
        self._cursor[stage] = index + 1
        return replies[index]


# --- remote mode -------------------------------------------------------------


class RemoteProvider(Provider):
    """Chat-completions style HTTP provider; validated downstream by repair."""

    def __init__(self, config: ProviderConfig, client=None):
        super().__init__(config)
        if not config.endpoint:
            raise ProviderUnavailable("remote mode requires an endpoint")
        if not config.api_key:
            raise ProviderUnavailable("remote mode requires credentials")
        if client is None:
            import httpx

            client = httpx.Client(timeout=30.0)
        self._client = client

    def _chat(self, messages: list[dict]) -> str:
        payload = {
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "frequency_penalty": self.config.frequency_penalty,
            "presence_penalty": self.config.presence_penalty,
            "messages": messages,
        }
        try:
            response = self._client.post(
                self.config.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {self.config.api_key}"},
            )
            response.raise_for_status()
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except PlanfitError:
            raise
        except Exception as exc:  # transport, status, or shape errors
            raise ProviderUnavailable(str(exc)) from exc

    def _render(self, instruction: str, history: list, context: RespondContext) -> str:
        messages = [{"role": "system", "content": instruction}]
        for turn in history:
            role = "assistant" if turn.role == "agent" else "user"
            messages.append({"role": role, "content": turn.text})
        return self._chat(messages)

    def analyze(self, turn_pair: tuple[str, str], summary: PlanSummary, context: AnalyzeContext) -> list[EditCommand]:
        agent_text, user_text = turn_pair
        system = (
            ANALYZER_PROMPT
            + "\n---\nCurrent summary: "
            + json.dumps(summary.to_json(), ensure_ascii=False)
        )
        messages = [
            {"role": "system", "content": system},
            {
                "role": "user",
                "content": f"Agent: {agent_text}\nUser: {user_text}",
            },
        ]
        return parse_commands_json(self._chat(messages))


def make_provider(config: ProviderConfig, script: dict[str, list[str]] | None = None) -> Provider:
    if config.mode == "template":
        return TemplateProvider(config)
    if config.mode == "scripted":
        return ScriptedProvider(config, script or {})
    if config.mode == "remote":
        return RemoteProvider(config)
    raise ValueError(f"unknown provider mode {config.mode!r}")
