"""Staged conversation driver: gather constraints, recommend, plan, iterate.

Every turn runs the analyzer-then-respond cycle: the analyzer's edit commands
are applied to the plan summary first, the stage machine advances, and only
then is the reply generated, so the reply always reflects the current user
message.  Analyzer failures degrade to no-op edits (a lost extraction beats a
halted conversation); responder failures surface as a retriable apology with
no state change beyond history.
"""

from __future__ import annotations

import enum
import logging
import re
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from . import summary as summary_mod
from .catalog import Catalog, RetrievalConfig, retrieve_top_k
from .errors import PlanfitError, ProviderUnavailable, NoPlanYet, SessionComplete
from .guidelines import GuidelineConfig, GuidelineReport, Waiver, WaiverKind, evaluate
from .plan import RecommendationItem, WeeklyPlan, serialize_plan_xml
from .providers import (
    AnalyzeContext,
    Provider,
    RespondContext,
    extract_keywords,
    is_negative,
)
from .summary import EditCommand, PlanSummary, apply_edits
from .synthesis import (
    Advisory,
    SynthesisConfig,
    SynthesisResult,
    apply_progression,
    progression_step,
    synthesize,
)
from .templates import build_instruction
from .vocab import Category

logger = logging.getLogger(__name__)


class Stage(str, enum.Enum):
    GATHER_GOALS = "GatherGoals"
    GATHER_AVAILABILITY = "GatherAvailability"
    GATHER_OBSTACLES = "GatherObstacles"
    RECOMMEND = "Recommend"
    AWAIT_SELECTION = "AwaitSelection"
    PLAN = "Plan"
    ITERATE = "Iterate"
    DONE = "Done"


@dataclass
class Turn:
    role: str  # "agent" | "user"
    text: str
    timestamp: float

    def to_json(self) -> dict:
        return {"role": self.role, "text": self.text, "timestamp": self.timestamp}

    @staticmethod
    def from_json(data: dict) -> "Turn":
        return Turn(data["role"], data["text"], data["timestamp"])


@dataclass
class SessionControl:
    obstacle_cursor: int = 0
    balance_prompted: bool = False
    progression_offered: bool = False
    wrap_pending: bool = False
    recommended_seen: list[str] = field(default_factory=list)
    target_override: int | None = None

    def to_json(self) -> dict:
        return {
            "obstacle_cursor": self.obstacle_cursor,
            "balance_prompted": self.balance_prompted,
            "progression_offered": self.progression_offered,
            "wrap_pending": self.wrap_pending,
            "recommended_seen": list(self.recommended_seen),
            "target_override": self.target_override,
        }

    @staticmethod
    def from_json(data: dict) -> "SessionControl":
        return SessionControl(
            obstacle_cursor=data.get("obstacle_cursor", 0),
            balance_prompted=data.get("balance_prompted", False),
            progression_offered=data.get("progression_offered", False),
            wrap_pending=data.get("wrap_pending", False),
            recommended_seen=list(data.get("recommended_seen", [])),
            target_override=data.get("target_override"),
        )

    def copy(self) -> "SessionControl":
        return SessionControl.from_json(self.to_json())


@dataclass
class Session:
    id: str
    user_name: str
    history: list[Turn] = field(default_factory=list)
    summary: PlanSummary = field(default_factory=PlanSummary)
    stage: Stage = Stage.GATHER_GOALS
    plan: WeeklyPlan | None = None
    plan_report: GuidelineReport | None = None
    plan_advisories: tuple[Advisory, ...] = ()
    waivers: list[Waiver] = field(default_factory=list)
    control: SessionControl = field(default_factory=SessionControl)

    def clone(self) -> "Session":
        return Session(
            id=self.id,
            user_name=self.user_name,
            history=list(self.history),
            summary=self.summary,
            stage=self.stage,
            plan=self.plan,
            plan_report=self.plan_report,
            plan_advisories=self.plan_advisories,
            waivers=list(self.waivers),
            control=self.control.copy(),
        )


@dataclass
class TurnRecord:
    """Everything a persistence layer needs to replay this turn exactly."""

    mutations: list[tuple[str, Any]] = field(default_factory=list)
    plan_changed: bool = False
    stage_changed: bool = False
    provider_failed: bool = False


@dataclass
class TurnResult:
    reply: str
    session: Session
    record: TurnRecord


@dataclass
class OrchestratorConfig:
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    guideline: GuidelineConfig = field(default_factory=GuidelineConfig)
    clock: Callable[[], float] = time.time


# --- deterministic intent patterns (template mode) ---------------------------

_AFFIRMATIVE_RE = re.compile(
    r"^\s*(yes|yeah|yep|sure|ok(ay)?|sounds good|please do|let'?s do|go ahead|alright)\b",
    re.IGNORECASE,
)
_SATISFIED_RE = re.compile(
    r"\b(satisfied|happy with|went (really )?well|worked (out )?well|followed (it|the plan)|liked it)\b",
    re.IGNORECASE,
)
_DISSATISFIED_RE = re.compile(
    r"\b(not\s+(really\s+)?(satisfied|happy)|wasn'?t\s+(satisfied|happy)|dissatisfied|unsatisfied|didn'?t (work|fit|follow)|too (much|hard|long|intense))\b",
    re.IGNORECASE,
)
_INJURY_RE = re.compile(r"\b(injur\w*|hurt|sprain\w*|strain(?:ed)?|pain(?:ful)?|ache)\b", re.IGNORECASE)
_REMOVAL_RE = re.compile(r"\b(remove|delete|drop|skip|without|stop|exclude|quit)\b", re.IGNORECASE)
_REFRESH_RE = re.compile(
    r"\b(other|more|different|new|refresh)\w*\s+(options?|exercises?|recommendations?|suggestions?|ideas?)\b",
    re.IGNORECASE,
)
_REDUCE_AMOUNT_RE = re.compile(
    r"\b(?:only|just|reduce\w*(?:\s+\w+){0,3}?\s+to|cut\w*(?:\s+\w+){0,3}?\s+to|at most|no more than)\s+(\d+)\s*(?:effective\s+)?min",
    re.IGNORECASE,
)


def match_exercise_names(text: str, catalog: Catalog) -> list[str]:
    """row_ids of catalog exercises named in *text*, longest phrase first."""
    lowered = text.lower()
    taken = [False] * len(lowered)
    phrases: list[tuple[str, str]] = []
    for entry in catalog.entries:
        phrases.append((entry.name.lower(), entry.row_id))
        phrases.extend((kw.lower(), entry.row_id) for kw in entry.alt_keywords)
    phrases.sort(key=lambda p: len(p[0]), reverse=True)
    hits: list[tuple[int, str]] = []
    seen: set[str] = set()
    for phrase, row_id in phrases:
        if row_id in seen or not phrase:
            continue
        for m in re.finditer(rf"\b{re.escape(phrase)}\b", lowered):
            if any(taken[m.start() : m.end()]):
                continue
            for i in range(m.start(), m.end()):
                taken[i] = True
            hits.append((m.start(), row_id))
            seen.add(row_id)
            break
    return [row_id for _, row_id in sorted(hits)]


def _availability_label(entity) -> str:
    day_spec = str(entity.payload.get("day_spec") or "").strip()
    time_spec = str(entity.payload.get("time_spec") or "").strip()
    return " ".join(p for p in (day_spec, time_spec) if p)


def _selected_categories(session: Session, catalog: Catalog) -> set[Category]:
    return {
        catalog.get(rid).category
        for rid in session.summary.selected_exercise_row_ids
        if rid in catalog
    }


def new_session(
    session_id: str,
    user_name: str,
    provider: Provider,
    config: OrchestratorConfig = OrchestratorConfig(),
) -> tuple[Session, str]:
    """Create a session at the goal-gathering stage with the greeting recorded."""
    session = Session(id=session_id, user_name=user_name)
    context = RespondContext(
        stage=session.stage.value,
        summary=session.summary,
        user_name=user_name,
        intent="greeting",
    )
    instruction = build_instruction(session.stage.value, session.summary, user_name)
    greeting = provider.respond(instruction, [], context).text or ""
    session.history.append(Turn("agent", greeting, config.clock()))
    return session, greeting


class _Turn:
    """One in-flight turn; mutates a cloned session and accumulates the record."""

    def __init__(
        self,
        session: Session,
        catalog: Catalog,
        provider: Provider,
        config: OrchestratorConfig,
    ):
        self.s = session
        self.catalog = catalog
        self.provider = provider
        self.config = config
        self.record = TurnRecord()

    # --- state helpers -----------------------------------------------------

    def _apply_commands(self, commands: list[EditCommand]) -> bool:
        if not commands:
            return False
        self.s.summary = apply_edits(self.s.summary, commands)
        self.record.mutations.append(
            ("commands", [c.to_json() for c in commands])
        )
        return True

    def _select(self, row_id: str) -> bool:
        before = self.s.summary
        self.s.summary = summary_mod.select_exercise(before, row_id, self.catalog)
        if self.s.summary is not before:
            self.record.mutations.append(("select", row_id))
            return True
        return False

    def _deselect(self, row_id: str) -> bool:
        before = self.s.summary
        self.s.summary = summary_mod.deselect_exercise(before, row_id)
        if self.s.summary is not before:
            self.record.mutations.append(("deselect", row_id))
            return True
        return False

    def _set_stage(self, stage: Stage) -> None:
        if self.s.stage is not stage:
            self.s.stage = stage
            self.record.stage_changed = True

    # --- retrieval ---------------------------------------------------------

    def _run_retrieval(self, keywords: tuple[str, ...]) -> list[RecommendationItem]:
        keywords = tuple(k for k in keywords if k.strip()) or extract_keywords(
            self.s.summary
        )
        if not keywords:
            keywords = ("general fitness",)
        seen = set(self.s.control.recommended_seen)
        widened = replace(
            self.config.retrieval, k=self.config.retrieval.k + len(seen)
        )
        ranked = retrieve_top_k(list(keywords), self.catalog, widened)
        fresh = [(e, score) for e, score in ranked if e.row_id not in seen]
        fresh = fresh[: self.config.retrieval.k]
        if not fresh:  # everything already shown; fall back to the plain top-k
            fresh = ranked[: self.config.retrieval.k]
        items = [
            RecommendationItem(
                exercise_row_id=entry.row_id,
                exercise_name=entry.name,
                rationale=self._rationale(entry),
            )
            for entry, _ in fresh
        ]
        commands = [
            summary_mod.remove("recommended_exercise", e.id)
            for e in self.s.summary.recommended_exercises
        ] + [
            summary_mod.add(
                "recommended_exercise",
                {
                    "exercise_row_id": item.exercise_row_id,
                    "exercise_name": item.exercise_name,
                    "rationale": item.rationale,
                },
            )
            for item in items
        ]
        self._apply_commands(commands)
        for item in items:
            if item.exercise_row_id not in self.s.control.recommended_seen:
                self.s.control.recommended_seen.append(item.exercise_row_id)
        return items

    @staticmethod
    def _rationale(entry) -> str:
        first_sentence = entry.description.split(". ")[0].rstrip(".")
        return (
            f"{first_sentence}. A {entry.intensity.value}-intensity "
            f"{entry.category.value} option."
        )

    # --- planning ----------------------------------------------------------

    def _synthesis_config(self) -> SynthesisConfig:
        cfg = self.config.synthesis
        if self.s.control.target_override:
            cfg = replace(cfg, target_effective_minutes=self.s.control.target_override)
        return cfg

    def _store_plan(self, result: SynthesisResult) -> None:
        self.s.plan = result.plan
        self.s.plan_report = result.report
        self.s.plan_advisories = result.advisories
        self.s.waivers = list(result.waivers)
        self.record.plan_changed = True
        self._sync_intentions()

    def _sync_intentions(self) -> None:
        """Mirror the current plan into the summary's intention entities."""
        assert self.s.plan is not None
        commands = [
            summary_mod.remove("implementation_intention", e.id)
            for e in self.s.summary.implementation_intentions
        ]
        for rule in self.s.plan.rules:
            commands.append(
                summary_mod.add("implementation_intention", {"kind": "rule", **rule.to_json()})
            )
        for cp in self.s.plan.coping_plans:
            commands.append(
                summary_mod.add("implementation_intention", {"kind": "coping", **cp.to_json()})
            )
        self._apply_commands(commands)

    def _make_plan(self, intent: str) -> tuple[str, dict]:
        result = synthesize(
            self.s.summary,
            self.catalog,
            self._synthesis_config(),
            self.config.guideline,
            extra_waivers=tuple(self.s.waivers),
        )
        self._store_plan(result)
        self._set_stage(Stage.ITERATE)
        params = {
            "plan_xml": serialize_plan_xml(result.plan),
            "insufficient": any(
                a.kind == "insufficient_availability" for a in result.advisories
            ),
        }
        return intent, params

    def _update_plan(self, plan: WeeklyPlan) -> None:
        report = evaluate(
            plan, self.catalog, self.config.guideline, tuple(self.s.waivers)
        )
        self.s.plan = plan
        self.s.plan_report = report
        self.record.plan_changed = True
        self._sync_intentions()

    # --- stage machine -----------------------------------------------------

    def advance(self, text: str, commands: list[EditCommand]) -> tuple[str, dict]:
        stage = self.s.stage
        if stage is Stage.GATHER_GOALS:
            return self._advance_gather(
                text,
                commands,
                target="goal",
                next_stage=Stage.GATHER_AVAILABILITY,
                entry_intent="availability_entry",
                follow_up="goals_follow_up",
                reask="goals_reask",
            )
        if stage is Stage.GATHER_AVAILABILITY:
            return self._advance_gather(
                text,
                commands,
                target="availability",
                next_stage=Stage.GATHER_OBSTACLES,
                entry_intent="obstacle_question",
                follow_up="availability_follow_up",
                reask="availability_reask",
            )
        if stage is Stage.GATHER_OBSTACLES:
            return self._advance_obstacles()
        if stage is Stage.AWAIT_SELECTION:
            return self._advance_selection(text)
        if stage is Stage.ITERATE:
            return self._advance_iterate(text)
        return "redirect", {}

    def _advance_gather(
        self,
        text: str,
        commands: list[EditCommand],
        target: str,
        next_stage: Stage,
        entry_intent: str,
        follow_up: str,
        reask: str,
    ) -> tuple[str, dict]:
        added = [c for c in commands if c.target == target and c.method == "add"]
        collection = self.s.summary.collection(target)
        if collection and not added:
            # nothing new for this stage: the collection is confirmed complete
            self._set_stage(next_stage)
            if entry_intent == "obstacle_question":
                self.s.control.obstacle_cursor = 0
                first = self.s.summary.availabilities[0]
                return entry_intent, {"availability": _availability_label(first)}
            return entry_intent, {}
        if added:
            if target == "goal":
                latest = str(collection[-1].payload.get("label", ""))
            else:
                latest = _availability_label(collection[-1])
            return follow_up, {"latest": latest}
        if commands and collection:
            return follow_up, {
                "latest": str(
                    collection[-1].payload.get("label")
                    or _availability_label(collection[-1])
                )
            }
        if commands:
            return "anything_else", {}
        return reask, {}

    def _advance_obstacles(self) -> tuple[str, dict]:
        self.s.control.obstacle_cursor += 1
        cursor = self.s.control.obstacle_cursor
        availabilities = self.s.summary.availabilities
        if cursor < len(availabilities):
            return "obstacle_question", {
                "availability": _availability_label(availabilities[cursor])
            }
        self._set_stage(Stage.RECOMMEND)
        return "recommend", {}

    def _advance_selection(self, text: str) -> tuple[str, dict]:
        if _REFRESH_RE.search(text):
            self._set_stage(Stage.RECOMMEND)
            return "recommend", {}
        matches = match_exercise_names(text, self.catalog)
        if matches and _REMOVAL_RE.search(text):
            for row_id in matches:
                self._deselect(row_id)
            matches = []
        else:
            for row_id in matches:
                self._select(row_id)
        selected = self.s.summary.selected_exercise_row_ids
        if matches and selected:
            categories = _selected_categories(self.s, self.catalog)
            if len(categories) == 1 and not self.s.control.balance_prompted:
                self.s.control.balance_prompted = True
                return "balance_question", {"only": next(iter(categories))}
            return self._make_plan("plan")
        if is_negative(text) and selected:
            return self._make_plan("plan")
        return "selection_reask", {}

    def _advance_iterate(self, text: str) -> tuple[str, dict]:
        control = self.s.control
        if control.wrap_pending and is_negative(text):
            control.wrap_pending = False
            self._set_stage(Stage.DONE)
            return "wrap_up", {}
        if control.progression_offered:
            control.progression_offered = False
            if _AFFIRMATIVE_RE.search(text):
                try:
                    grown = apply_progression(self.s.plan, self._synthesis_config())
                except PlanfitError:
                    control.wrap_pending = True
                    return "progression_saturated", {}
                self._update_plan(grown)
                control.wrap_pending = True
                return "progression_applied", {"plan_xml": serialize_plan_xml(grown)}
            if is_negative(text):
                control.wrap_pending = True
                return "progression_declined", {}
        reduce_m = _REDUCE_AMOUNT_RE.search(text)
        if reduce_m:
            target = int(reduce_m.group(1))
            control.target_override = target
            self.s.waivers = [
                w for w in self.s.waivers if w.kind is not WaiverKind.USER_REDUCED_AMOUNT
            ] + [
                Waiver(
                    WaiverKind.USER_REDUCED_AMOUNT,
                    note=f"user capped the weekly amount at {target} effective minutes",
                )
            ]
            return self._make_plan("replan")

        matches = match_exercise_names(text, self.catalog)
        injury = _INJURY_RE.search(text)
        removal = _REMOVAL_RE.search(text)
        if matches and (removal or injury):
            removed_any = False
            for row_id in matches:
                removed_any = self._deselect(row_id) or removed_any
            if injury:
                self.s.waivers = [
                    w for w in self.s.waivers if w.kind is not WaiverKind.INJURY_EXCLUSION
                ] + [
                    Waiver(
                        WaiverKind.INJURY_EXCLUSION,
                        note=f"injury-driven exclusion: {text.strip()}",
                    )
                ]
            if not self.s.summary.selected_exercise_row_ids:
                self._set_stage(Stage.AWAIT_SELECTION)
                return "selection_reask", {}
            if removed_any or injury:
                return self._make_plan("replan")
        if matches:
            changed = False
            for row_id in matches:
                changed = self._select(row_id) or changed
            if changed:
                return self._make_plan("replan")
        # availability edits: "add Saturday mornings", "I'm also free on Sunday"
        availability_cmds = self._iterate_availability_edits(text)
        if availability_cmds:
            self._apply_commands(availability_cmds)
            return self._make_plan("replan")
        if _DISSATISFIED_RE.search(text):
            return "dissatisfied", {}
        if _SATISFIED_RE.search(text):
            assert self.s.plan is not None
            step = progression_step(self.s.plan, self._synthesis_config())
            saturated = all(
                r.amount_minutes >= self._synthesis_config().hard_session_cap
                for r in self.s.plan.rules
            )
            if saturated or step == 0:
                control.wrap_pending = True
                return "progression_saturated", {}
            control.progression_offered = True
            return "progression_offer", {"step": step}
        if is_negative(text):
            self._set_stage(Stage.DONE)
            return "wrap_up", {}
        return "redirect", {}

    def _iterate_availability_edits(self, text: str) -> list[EditCommand]:
        from .vocab import first_day_token

        if first_day_token(text) is None:
            return []
        lowered = text.lower()
        if _REMOVAL_RE.search(text) or "can't" in lowered or "cannot" in lowered or "no longer" in lowered:
            for entity in self.s.summary.availabilities:
                label = _availability_label(entity).lower()
                day = first_day_token(text)
                if day and day.label.lower() in label.lower():
                    return [summary_mod.remove("availability", entity.id)]
            return []
        if re.search(r"\b(add|also free|available|free on|could also)\b", lowered):
            cleaned = re.sub(
                r"^(?:please\s+)?(?:add|i'?m also free(?: on)?|i am also free(?: on)?|i could also do)\s*",
                "",
                text.strip(),
                flags=re.IGNORECASE,
            )
            cleaned = re.sub(r"[.!?\s]+$", "", cleaned)
            return [
                summary_mod.add(
                    "availability", {"day_spec": cleaned, "time_spec": ""}
                )
            ]
        return []

    # --- reply generation ----------------------------------------------------

    def respond(self, intent: str, params: dict) -> str:
        instruction = build_instruction(
            self.s.stage.value, self.s.summary, self.s.user_name
        )
        context = RespondContext(
            stage=self.s.stage.value,
            summary=self.s.summary,
            user_name=self.s.user_name,
            intent=intent,
            params=params,
        )
        reply = self.provider.respond(instruction, self.s.history, context)
        if reply.retrieval_request is not None:
            items = self._run_retrieval(reply.retrieval_request.keywords)
            context.params = {**params, "recommendations": items}
            context.summary = self.s.summary
            instruction = build_instruction(
                self.s.stage.value, self.s.summary, self.s.user_name
            )
            reply = self.provider.respond(instruction, self.s.history, context)
        if self.s.stage is Stage.RECOMMEND:
            self._set_stage(Stage.AWAIT_SELECTION)
        return reply.text or ""


def handle_user_message(
    session: Session,
    text: str,
    catalog: Catalog,
    provider: Provider,
    config: OrchestratorConfig = OrchestratorConfig(),
) -> TurnResult:
    """Run one full analyzer -> edit -> advance -> respond cycle."""
    if session.stage is Stage.DONE:
        raise SessionComplete("session is complete; start an iteration to reopen it")
    turn = _Turn(session.clone(), catalog, provider, config)
    s = turn.s
    last_agent = s.history[-1].text if s.history else ""
    s.history.append(Turn("user", text, config.clock()))

    analyze_ctx = AnalyzeContext(stage=s.stage.value)
    if (
        s.stage is Stage.GATHER_OBSTACLES
        and s.control.obstacle_cursor < len(s.summary.availabilities)
    ):
        analyze_ctx.obstacle_availability_id = s.summary.availabilities[
            s.control.obstacle_cursor
        ].id

    try:
        commands = provider.analyze((last_agent, text), s.summary, analyze_ctx)
    except PlanfitError as exc:
        logger.warning("analyzer failed (%s); continuing with no edits", exc)
        commands = []
    try:
        turn._apply_commands(commands)
    except PlanfitError as exc:
        logger.warning("edit batch rejected (%s); continuing with no edits", exc)
        commands = []

    try:
        intent, params = turn.advance(text, commands)
        reply_text = turn.respond(intent, params)
    except ProviderUnavailable:
        apology_session = session.clone()
        apology_session.history.append(Turn("user", text, config.clock()))
        from .templates import APOLOGY

        apology_session.history.append(Turn("agent", APOLOGY, config.clock()))
        return TurnResult(
            APOLOGY, apology_session, TurnRecord(provider_failed=True)
        )

    s.history.append(Turn("agent", reply_text, config.clock()))
    return TurnResult(reply_text, s, turn.record)


def start_iteration(
    session: Session,
    provider: Provider,
    config: OrchestratorConfig = OrchestratorConfig(),
) -> TurnResult:
    """Reopen a planned session for a new week: ask adherence + satisfaction."""
    if session.plan is None:
        raise NoPlanYet("no plan to iterate on")
    s = session.clone()
    record = TurnRecord()
    if s.stage is not Stage.ITERATE:
        s.stage = Stage.ITERATE
        record.stage_changed = True
    s.control.progression_offered = False
    s.control.wrap_pending = False
    context = RespondContext(
        stage=s.stage.value,
        summary=s.summary,
        user_name=s.user_name,
        intent="iteration_entry",
    )
    instruction = build_instruction(s.stage.value, s.summary, s.user_name)
    reply = provider.respond(instruction, s.history, context).text or ""
    s.history.append(Turn("agent", reply, config.clock()))
    return TurnResult(reply, s, record)
