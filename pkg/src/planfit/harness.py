"""Persona replay harness: drive scripted users through the full template-mode
pipeline and aggregate guideline compliance.

Each fixture transcribes one study persona's goals, availabilities, and
obstacles, plus a scripted exercise selection and an iteration scenario.  Runs
are fully deterministic (template provider, counter clock), so the suite
output doubles as a golden regression artifact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import Catalog
from .errors import PersonaRunError, PlanfitError
from .guidelines import GuidelineReport
from .orchestrator import (
    OrchestratorConfig,
    Session,
    Stage,
    handle_user_message,
    new_session,
)
from .plan import WeeklyPlan, serialize_plan_xml
from .providers import ProviderConfig, TemplateProvider
from .synthesis import Advisory

# Rates observed in the original human-driven study, shown for context next
# to harness numbers; never asserted (humans could decline guidance).
STUDY_REFERENCE = {
    "initial_amount": "15/18 (83%)",
    "initial_rest": "14/18 (78%)",
}

NO_OBSTACLE_REPLY = "No, nothing I can think of."
NOTHING_ELSE = "Nothing else."


@dataclass(frozen=True)
class PersonaFixture:
    id: str
    goals: tuple[str, ...]
    availabilities: tuple[str, ...]
    obstacles: tuple[str, ...]
    scripted_selection: tuple[str, ...]
    balance_reply: str | None = None
    iteration_turns: tuple[str, ...] = ()
    note: str = ""

    @staticmethod
    def from_json(data: dict) -> "PersonaFixture":
        return PersonaFixture(
            id=data["id"],
            goals=tuple(data["goals"]),
            availabilities=tuple(data["availabilities"]),
            obstacles=tuple(data.get("obstacles", [])),
            scripted_selection=tuple(data["scripted_selection"]),
            balance_reply=data.get("balance_reply"),
            iteration_turns=tuple(data.get("iteration_turns", [])),
            note=data.get("note", ""),
        )


@dataclass
class PersonaResult:
    fixture: PersonaFixture
    transcript: list[dict]
    plan: WeeklyPlan
    report: GuidelineReport
    advisories: tuple[Advisory, ...]
    final_stage: str

    def to_json(self) -> dict:
        return {
            "id": self.fixture.id,
            "final_stage": self.final_stage,
            "transcript": self.transcript,
            "plan": self.plan.to_json(),
            "plan_xml": serialize_plan_xml(self.plan),
            "report": self.report.to_json(),
            "advisories": [a.to_json() for a in self.advisories],
        }


@dataclass
class SuiteReport:
    results: list[PersonaResult]
    reference: dict = field(default_factory=lambda: dict(STUDY_REFERENCE))

    def compliance(self) -> dict:
        total = len(self.results)

        def rate(flag: str) -> dict:
            count = sum(1 for r in self.results if getattr(r.report, flag))
            return {
                "count": count,
                "total": total,
                "percent": round(100.0 * count / total, 1) if total else 0.0,
            }

        return {
            "amount": rate("amount_ok"),
            "balance": rate("balance_ok"),
            "rest": rate("rest_ok"),
        }

    def to_json(self) -> dict:
        return {
            "compliance": self.compliance(),
            "study_reference": self.reference,
            "personas": [r.to_json() for r in self.results],
        }

    def to_markdown(self) -> str:
        comp = self.compliance()
        lines = [
            "# Persona suite report",
            "",
            "| check | harness | study reference (human-driven) |",
            "| --- | --- | --- |",
            "| amount | {}/{} ({}%) | {} |".format(
                comp["amount"]["count"],
                comp["amount"]["total"],
                comp["amount"]["percent"],
                self.reference["initial_amount"],
            ),
            "| rest | {}/{} ({}%) | {} |".format(
                comp["rest"]["count"],
                comp["rest"]["total"],
                comp["rest"]["percent"],
                self.reference["initial_rest"],
            ),
            "| balance | {}/{} ({}%) | - |".format(
                comp["balance"]["count"],
                comp["balance"]["total"],
                comp["balance"]["percent"],
            ),
            "",
            "Study reference rates reflect human participants' own choices and",
            "are shown for context only; equality is not asserted.",
            "",
            "| persona | effective minutes | amount | balance | rest | waivers | note |",
            "| --- | --- | --- | --- | --- | --- | --- |",
        ]
        for r in self.results:
            rep = r.report
            lines.append(
                "| {} | {} | {} | {} | {} | {} | {} |".format(
                    r.fixture.id,
                    rep.effective_minutes,
                    "ok" if rep.amount_ok else "violated",
                    "ok" if rep.balance_ok else "one-sided",
                    "ok" if rep.rest_ok else "violated",
                    ", ".join(w.kind.value for w in rep.waivers) or "-",
                    r.fixture.note,
                )
            )
        return "\n".join(lines) + "\n"


def bundled_personas_dir() -> Path:
    return Path(__file__).parent / "personas"


def load_fixtures(directory: str | Path | None = None) -> list[PersonaFixture]:
    directory = Path(directory) if directory else bundled_personas_dir()
    paths = sorted(directory.glob("*.json"), key=lambda p: (len(p.stem), p.stem))
    if not paths:
        raise PersonaRunError("suite", f"no persona fixtures in {directory}")
    return [PersonaFixture.from_json(json.loads(p.read_text("utf-8"))) for p in paths]


def build_script(fixture: PersonaFixture) -> list[str]:
    """The exact user turns a persona types, in order."""
    turns: list[str] = []
    turns.extend(fixture.goals)
    turns.append(NOTHING_ELSE)
    turns.extend(fixture.availabilities)
    turns.append(NOTHING_ELSE)

    question_count = len(fixture.availabilities)
    obstacles = list(fixture.obstacles)
    answers: list[str]
    if len(obstacles) <= question_count:
        answers = obstacles + [NO_OBSTACLE_REPLY] * (question_count - len(obstacles))
    else:
        answers = obstacles[: question_count - 1]
        answers.append(" and ".join(obstacles[question_count - 1 :]))
    turns.extend(answers)

    turns.append("I'd like to try " + " and ".join(fixture.scripted_selection) + ".")
    if fixture.balance_reply:
        turns.append(fixture.balance_reply)
    turns.extend(fixture.iteration_turns)
    return turns


def _counter_clock():
    state = {"t": 0.0}

    def clock() -> float:
        state["t"] += 1.0
        return state["t"]

    return clock


def make_orchestrator_config() -> OrchestratorConfig:
    return OrchestratorConfig(clock=_counter_clock())


def run_persona(
    fixture: PersonaFixture,
    catalog: Catalog,
    config: OrchestratorConfig | None = None,
) -> PersonaResult:
    """Drive one persona's session to Done; any pipeline error carries the transcript."""
    config = config or make_orchestrator_config()
    provider = TemplateProvider(ProviderConfig(mode="template"))
    session, _ = new_session(fixture.id, fixture.id, provider, config)

    def transcript(s: Session) -> list[dict]:
        return [t.to_json() for t in s.history]

    try:
        for text in build_script(fixture):
            result = handle_user_message(session, text, catalog, provider, config)
            session = result.session
    except PlanfitError as exc:
        raise PersonaRunError(fixture.id, str(exc), transcript(session)) from exc

    if session.plan is None or session.plan_report is None:
        raise PersonaRunError(fixture.id, "script ended without a plan", transcript(session))
    if session.stage is not Stage.DONE:
        raise PersonaRunError(
            fixture.id,
            f"script ended at stage {session.stage.value}, not Done",
            transcript(session),
        )
    return PersonaResult(
        fixture=fixture,
        transcript=transcript(session),
        plan=session.plan,
        report=session.plan_report,
        advisories=session.plan_advisories,
        final_stage=session.stage.value,
    )


def run_suite(
    fixtures: list[PersonaFixture],
    catalog: Catalog,
) -> SuiteReport:
    results = [run_persona(f, catalog) for f in fixtures]
    return SuiteReport(results)


def write_reports(suite: SuiteReport, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "persona_report.json"
    md_path = out / "persona_report.md"
    json_path.write_text(
        json.dumps(suite.to_json(), indent=2, ensure_ascii=False) + "\n", "utf-8"
    )
    md_path.write_text(suite.to_markdown(), "utf-8")
    return json_path, md_path
