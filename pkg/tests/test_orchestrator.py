from __future__ import annotations

import itertools
import json

import pytest

from planfit.catalog import RetrievalConfig, load_catalog
from planfit.errors import NoPlanYet, ProviderUnavailable, ScriptExhausted, SessionComplete
from planfit.orchestrator import (
    OrchestratorConfig,
    Stage,
    handle_user_message,
    match_exercise_names,
    new_session,
    start_iteration,
)
from planfit.providers import (
    AnalyzeContext,
    ProviderConfig,
    RemoteProvider,
    ScriptedProvider,
    TemplateProvider,
    RespondContext,
    is_negative,
)
from planfit.summary import PlanSummary, apply_edits, add
from planfit.templates import APOLOGY
from planfit.vocab import Weekday

from conftest import TINY_CSV


@pytest.fixture()
def tiny_catalog():
    cat = load_catalog(TINY_CSV)
    cat.build_index(RetrievalConfig())
    return cat


@pytest.fixture()
def provider():
    return TemplateProvider(ProviderConfig())


def _config():
    counter = itertools.count(1)
    return OrchestratorConfig(clock=lambda: float(next(counter)))


def _drive(session, texts, catalog, provider, config):
    for text in texts:
        result = handle_user_message(session, text, catalog, provider, config)
        session = result.session
    return session, result


# --- template analyzer ---------------------------------------------------------


def test_analyzer_splits_goal_conjunctions(provider):
    commands = provider.analyze(
        ("What are your goals?", "I want to lose weight and fix my posture"),
        PlanSummary(),
        AnalyzeContext(stage="GatherGoals"),
    )
    assert [c.method for c in commands] == ["add", "add"]
    labels = [c.params["entity"]["label"] for c in commands]
    assert labels == ["Lose weight", "Fix my posture"]


def test_analyzer_negative_returns_empty(provider):
    for text in ("nothing else", "No, that's all.", "nope", "N/A"):
        assert (
            provider.analyze(
                ("anything to add?", text), PlanSummary(), AnalyzeContext(stage="GatherGoals")
            )
            == []
        )


def test_analyzer_removal_matches_label(provider):
    summary = apply_edits(PlanSummary(), [add("goal", {"label": "Weight loss"})])
    commands = provider.analyze(
        ("anything else?", "please remove the weight loss goal"),
        summary,
        AnalyzeContext(stage="GatherGoals"),
    )
    assert len(commands) == 1
    assert commands[0].method == "remove"
    assert commands[0].params["id"] == "g1"


def test_analyzer_links_obstacle_to_availability(provider):
    commands = provider.analyze(
        ("any obstacles at night?", "company dinners sometimes"),
        PlanSummary(),
        AnalyzeContext(stage="GatherObstacles", obstacle_availability_id="a2"),
    )
    assert commands[0].params["entity"]["linked_availability_ids"] == ["a2"]


def test_analyzer_out_of_gather_stages_is_noop(provider):
    assert (
        provider.analyze(
            ("pick some", "running please"), PlanSummary(), AnalyzeContext(stage="AwaitSelection")
        )
        == []
    )


def test_is_negative_cases():
    assert is_negative("No")
    assert is_negative("nothing to add!")
    assert not is_negative("Not familiar with exercise")
    assert not is_negative("Do not wanna do knee exercises")


# --- name matching ---------------------------------------------------------------


def test_match_exercise_names_longest_first(tiny_catalog):
    assert match_exercise_names("I'll take running and squats", tiny_catalog) == ["1", "2"]


def test_match_exercise_names_keywords(tiny_catalog):
    assert match_exercise_names("let's do some skipping", tiny_catalog) == ["3"]


def test_match_exercise_names_none(tiny_catalog):
    assert match_exercise_names("nothing I recognize", tiny_catalog) == []


# --- conversation flow -------------------------------------------------------------

SCRIPT = [
    "I want to lose weight",  # goal
    "Nothing else.",  # confirm goals -> availability question
    "Weekdays at night",  # availability
    "Nothing else.",  # confirm availability -> obstacle question
    "company dinners",  # obstacle for a1 -> recommend + selection question
    "I'd like running and squats.",  # selection -> plan
]


def test_full_template_conversation(tiny_catalog, provider):
    config = _config()
    session, greeting = new_session("s1", "Ana", provider, config)
    assert "goal" in greeting.lower()
    assert greeting.rstrip().endswith("?")

    session, result = _drive(session, SCRIPT, tiny_catalog, provider, config)
    assert session.stage is Stage.ITERATE
    assert session.plan is not None
    assert session.plan_report is not None
    assert session.plan_report.amount_ok
    assert [e.payload["label"] for e in session.summary.goals] == ["Lose weight"]
    assert len(session.summary.availabilities) == 1
    assert len(session.summary.obstacles) == 1
    assert session.summary.selected_exercise_row_ids == ["1", "2"]
    assert len(session.summary.recommended_exercises) > 0
    # intentions mirrored into the summary
    assert len(session.summary.implementation_intentions) == len(
        session.plan.rules
    ) + len(session.plan.coping_plans)
    assert "<If>" in result.reply


def test_history_alternates_and_grows_by_two(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    for text in SCRIPT:
        before = len(session.history)
        session = handle_user_message(session, text, tiny_catalog, provider, config).session
        assert len(session.history) == before + 2
    roles = [t.role for t in session.history]
    assert roles[0] == "agent"
    assert all(roles[i] != roles[i + 1] for i in range(len(roles) - 1))


def test_stage_never_skips_to_recommend(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    # goals gathered but never confirmed; availabilities absent
    result = handle_user_message(session, "lose weight", tiny_catalog, provider, config)
    assert result.session.stage is Stage.GATHER_GOALS
    result = handle_user_message(result.session, "get stronger", tiny_catalog, provider, config)
    assert result.session.stage is Stage.GATHER_GOALS
    result = handle_user_message(result.session, "nothing else", tiny_catalog, provider, config)
    assert result.session.stage is Stage.GATHER_AVAILABILITY
    assert result.session.summary.recommended_exercises == []


def test_obstacles_asked_once_per_availability(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    texts = [
        "lose weight",
        "nothing else",
        "Weekdays at night",
        "Weekends in the morning",
        "nothing else",
    ]
    session, result = _drive(session, texts, tiny_catalog, provider, config)
    assert session.stage is Stage.GATHER_OBSTACLES
    assert "Weekdays at night" in result.reply
    result = handle_user_message(session, "company dinners", tiny_catalog, provider, config)
    assert "Weekends in the morning" in result.reply
    # linked to the first availability
    assert result.session.summary.obstacles[0].payload["linked_availability_ids"] == ["a1"]
    result = handle_user_message(result.session, "no, nothing", tiny_catalog, provider, config)
    assert result.session.stage is Stage.AWAIT_SELECTION
    # zero obstacles recorded for the second availability is fine
    assert len(result.session.summary.obstacles) == 1


def test_balance_prompt_on_single_category(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    texts = SCRIPT[:5] + ["just running please"]
    session, result = _drive(session, texts, tiny_catalog, provider, config)
    assert session.stage is Stage.AWAIT_SELECTION
    assert "strength" in result.reply.lower()
    # decline keeps the one-sided selection and proceeds to the plan
    result = handle_user_message(session, "no thanks", tiny_catalog, provider, config)
    assert result.session.stage is Stage.ITERATE
    assert not result.session.plan_report.balance_ok


def test_refresh_recommendations(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    session, result = _drive(session, SCRIPT[:5], tiny_catalog, provider, config)
    first = [e.payload["exercise_row_id"] for e in session.summary.recommended_exercises]
    result = handle_user_message(
        session, "could you show me other options?", tiny_catalog, provider, config
    )
    second = [
        e.payload["exercise_row_id"]
        for e in result.session.summary.recommended_exercises
    ]
    assert second != [] and set(second).isdisjoint(first) or len(first) == len(tiny_catalog)


def test_iterate_satisfaction_offers_progression(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    session, _ = _drive(session, SCRIPT, tiny_catalog, provider, config)
    result = handle_user_message(session, "I was satisfied", tiny_catalog, provider, config)
    assert "extend" in result.reply.lower()
    before = result.session.plan_report.effective_minutes
    result = handle_user_message(result.session, "yes please", tiny_catalog, provider, config)
    assert result.session.plan_report.effective_minutes > before
    result = handle_user_message(result.session, "no, that's all", tiny_catalog, provider, config)
    assert result.session.stage is Stage.DONE
    assert not result.reply.rstrip().endswith("?")  # wrap-up is not a question


def test_iterate_dissatisfied_solicits_feedback(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    session, _ = _drive(session, SCRIPT, tiny_catalog, provider, config)
    result = handle_user_message(
        session, "I wasn't satisfied with it", tiny_catalog, provider, config
    )
    assert "change" in result.reply.lower()


def test_iterate_drop_exercise_replans(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    session, _ = _drive(session, SCRIPT, tiny_catalog, provider, config)
    result = handle_user_message(
        session, "please drop squats from my plan", tiny_catalog, provider, config
    )
    assert result.session.summary.selected_exercise_row_ids == ["1"]
    assert all(r.exercise_name != "Squats" for r in result.session.plan.rules)


def test_message_after_done_rejected(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    session, _ = _drive(
        session,
        SCRIPT + ["I was satisfied", "no thanks", "no, that's all"],
        tiny_catalog,
        provider,
        config,
    )
    assert session.stage is Stage.DONE
    with pytest.raises(SessionComplete):
        handle_user_message(session, "hello again", tiny_catalog, provider, config)


def test_start_iteration_requires_plan(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    with pytest.raises(NoPlanYet):
        start_iteration(session, provider, config)


def test_start_iteration_reopens_done_session(tiny_catalog, provider):
    config = _config()
    session, _ = new_session("s1", "Ana", provider, config)
    session, _ = _drive(
        session,
        SCRIPT + ["I was satisfied", "no thanks", "no, that's all"],
        tiny_catalog,
        provider,
        config,
    )
    result = start_iteration(session, provider, config)
    assert result.session.stage is Stage.ITERATE
    assert "follow" in result.reply.lower()
    assert result.reply.rstrip().endswith("?")


# --- provider failure handling -----------------------------------------------------


class FlakyProvider(TemplateProvider):
    def __init__(self, config, fail_respond=False, fail_analyze=False):
        super().__init__(config)
        self.fail_respond = fail_respond
        self.fail_analyze = fail_analyze

    def _render(self, instruction, history, context):
        if self.fail_respond:
            raise ProviderUnavailable("remote down")
        return super()._render(instruction, history, context)

    def analyze(self, turn_pair, summary, context):
        if self.fail_analyze:
            raise ProviderUnavailable("remote down")
        return super().analyze(turn_pair, summary, context)


def test_responder_failure_leaves_state_unchanged(tiny_catalog):
    config = _config()
    flaky = FlakyProvider(ProviderConfig(), fail_respond=True)
    session, _ = new_session("s1", "Ana", TemplateProvider(ProviderConfig()), config)
    result = handle_user_message(session, "lose weight", tiny_catalog, flaky, config)
    assert result.reply == APOLOGY
    assert result.record.provider_failed
    assert result.session.summary.to_json() == session.summary.to_json()
    assert result.session.stage is session.stage
    assert len(result.session.history) == len(session.history) + 2


def test_analyzer_failure_degrades_to_noop(tiny_catalog):
    config = _config()
    flaky = FlakyProvider(ProviderConfig(), fail_analyze=True)
    session, _ = new_session("s1", "Ana", TemplateProvider(ProviderConfig()), config)
    result = handle_user_message(session, "lose weight", tiny_catalog, flaky, config)
    assert result.reply  # conversation continues
    assert result.session.summary.goals == []


# --- scripted provider --------------------------------------------------------------


def test_scripted_provider_replays_and_exhausts(tiny_catalog):
    script = {"GatherGoals": ["What do you want to achieve?"]}
    provider = ScriptedProvider(ProviderConfig(mode="scripted"), script)
    config = _config()
    session, greeting = new_session("s1", "Ana", provider, config)
    assert greeting == "What do you want to achieve?"
    with pytest.raises(ScriptExhausted):
        handle_user_message(session, "lose weight", tiny_catalog, provider, config)


# --- remote provider -----------------------------------------------------------------


def test_remote_provider_round_trip(tiny_catalog):
    import httpx

    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.read().decode())
        assert body["temperature"] == 0.5
        assert body["top_p"] == 1.0
        assert body["frequency_penalty"] == 0.0
        assert body["presence_penalty"] == 0.0
        return httpx.Response(
            200,
            json={"choices": [{"message": {"content": "What are your goals?"}}]},
        )

    client = httpx.Client(transport=httpx.MockTransport(handler))
    provider = RemoteProvider(
        ProviderConfig(mode="remote", endpoint="http://llm.test/v1/chat", api_key="k"),
        client=client,
    )
    reply = provider.respond(
        "instructions",
        [],
        RespondContext(
            stage="GatherGoals", summary=PlanSummary(), user_name="Ana", intent="greeting"
        ),
    )
    assert reply.text == "What are your goals?"


def test_remote_provider_analyze_parses_commands():
    import httpx

    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(
            200,
            json={
                "choices": [
                    {
                        "message": {
                            "content": 'Sure: [{"target":"goal","method":"add","params":{"entity":{"label":"Weight loss"}}}]'
                        }
                    }
                ]
            },
        )

    client = httpx.Client(transport=httpx.MockTransport(handler))
    provider = RemoteProvider(
        ProviderConfig(mode="remote", endpoint="http://llm.test/v1/chat", api_key="k"),
        client=client,
    )
    commands = provider.analyze(
        ("goals?", "weight loss"), PlanSummary(), AnalyzeContext(stage="GatherGoals")
    )
    assert commands[0].params["entity"]["label"] == "Weight loss"


def test_remote_provider_unavailable_on_http_error():
    import httpx

    client = httpx.Client(
        transport=httpx.MockTransport(lambda request: httpx.Response(500, text="boom"))
    )
    provider = RemoteProvider(
        ProviderConfig(mode="remote", endpoint="http://llm.test/v1/chat", api_key="k"),
        client=client,
    )
    with pytest.raises(ProviderUnavailable):
        provider.respond(
            "i",
            [],
            RespondContext(
                stage="GatherGoals", summary=PlanSummary(), user_name="A", intent="greeting"
            ),
        )


def test_remote_provider_requires_credentials():
    with pytest.raises(ProviderUnavailable):
        RemoteProvider(ProviderConfig(mode="remote", endpoint="http://llm.test"))
    with pytest.raises(ProviderUnavailable):
        RemoteProvider(ProviderConfig(mode="remote", api_key="k"))
