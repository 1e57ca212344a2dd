from __future__ import annotations

import json
import random

import pytest

from planfit.catalog import load_catalog
from planfit.errors import (
    MalformedCommand,
    NoArrayFound,
    UnknownExercise,
    UnknownId,
    UnknownTarget,
)
from planfit.summary import (
    EditCommand,
    PlanSummary,
    TARGETS,
    add,
    apply_edits,
    parse_commands_json,
    remove,
    select_exercise,
    update,
)

from conftest import TINY_CSV


# --- apply_edits ----------------------------------------------------------------


def test_empty_batch_is_identity():
    s = PlanSummary()
    assert apply_edits(s, []) is s
    assert s.revision == 0


def test_add_assigns_prefixed_ids():
    s = apply_edits(PlanSummary(), [add("goal", {"label": "Weight loss"})])
    assert [e.id for e in s.goals] == ["g1"]
    assert s.goals[0].payload == {"label": "Weight loss"}
    assert s.revision == 1


def test_counters_not_reused_after_removal():
    s = apply_edits(
        PlanSummary(),
        [add("goal", {"label": "X"}), remove("goal", "g1")],
    )
    assert s.goals == []
    s2 = apply_edits(s, [add("goal", {"label": "Y"})])
    assert [e.id for e in s2.goals] == ["g2"]


def test_update_is_shallow_overwrite():
    s = apply_edits(
        PlanSummary(),
        [add("availability", {"day_spec": "Weekdays", "time_spec": "at night"})],
    )
    s2 = apply_edits(s, [update("availability", "a1", {"time_spec": "after 6 pm"})])
    assert s2.availabilities[0].payload == {
        "day_spec": "Weekdays",
        "time_spec": "after 6 pm",
    }


def test_update_unknown_id():
    with pytest.raises(UnknownId):
        apply_edits(PlanSummary(), [update("goal", "g9", {"label": "x"})])


def test_remove_unknown_id():
    with pytest.raises(UnknownId):
        apply_edits(PlanSummary(), [remove("obstacle", "o1")])


def test_update_cannot_cross_targets():
    s = apply_edits(PlanSummary(), [add("goal", {"label": "X"})])
    with pytest.raises(UnknownId):
        apply_edits(s, [update("obstacle", "g1", {"label": "Y"})])


def test_batch_is_atomic():
    s = apply_edits(PlanSummary(), [add("goal", {"label": "Keep me"})])
    before = json.dumps(s.to_json(), sort_keys=True)
    with pytest.raises(UnknownId):
        apply_edits(s, [add("goal", {"label": "New"}), remove("goal", "g99")])
    assert json.dumps(s.to_json(), sort_keys=True) == before
    assert [e.payload["label"] for e in s.goals] == ["Keep me"]


def test_revision_increments_once_per_batch():
    s = apply_edits(
        PlanSummary(),
        [add("goal", {"label": "A"}), add("goal", {"label": "B"}), add("obstacle", {"label": "C"})],
    )
    assert s.revision == 1


def test_supplied_id_honored_for_intentions_only():
    cmds = [
        EditCommand(
            "implementation_intention",
            "add",
            {"entity": {"id": "xk42", "kind": "rule"}, "parent_ids": ["r1"]},
        ),
        EditCommand("goal", "add", {"entity": {"id": "zzz", "label": "G"}}),
    ]
    s = apply_edits(PlanSummary(), cmds)
    assert s.implementation_intentions[0].id == "xk42"
    assert s.implementation_intentions[0].payload["parent_ids"] == ["r1"]
    assert s.goals[0].id == "g1"  # supplied id ignored outside intentions


def test_duplicate_supplied_id_rejected():
    first = EditCommand(
        "implementation_intention", "add", {"entity": {"id": "dup", "kind": "rule"}}
    )
    s = apply_edits(PlanSummary(), [first])
    with pytest.raises(MalformedCommand):
        apply_edits(s, [first])


# --- parse_commands_json ----------------------------------------------------------


def test_parse_simple_add():
    text = '[{"target":"goal","method":"add","params":{"entity":{"label":"Weight loss"}}}]'
    commands = parse_commands_json(text)
    assert len(commands) == 1
    assert commands[0].target == "goal"
    assert commands[0].method == "add"


def test_parse_empty_array():
    assert parse_commands_json("[]") == []


def test_parse_unknown_target():
    text = '[{"target":"mood","method":"add","params":{"entity":{}}}]'
    with pytest.raises(UnknownTarget) as err:
        parse_commands_json(text)
    assert err.value.token == "mood"


def test_parse_wrapped_in_prose_and_fence():
    text = (
        "Here are the updates you asked for:\n```json\n"
        '[{"target":"obstacle","method":"remove","params":{"id":"o2"}}]\n'
        "```\nLet me know!"
    )
    commands = parse_commands_json(text)
    assert commands == [EditCommand("obstacle", "remove", {"id": "o2"})]


def test_parse_skips_bracket_noise():
    text = 'ratios [1:2] then [{"target":"goal","method":"add","params":{"entity":{"label":"x"}}}]'
    assert len(parse_commands_json(text)) == 1


def test_parse_no_array():
    with pytest.raises(NoArrayFound):
        parse_commands_json("no json here {}")


def test_parse_malformed_method():
    text = '[{"target":"goal","method":"merge","params":{}}]'
    with pytest.raises(MalformedCommand):
        parse_commands_json(text)


def test_parse_extra_fields_ignored():
    text = (
        '[{"target":"goal","method":"add","reasoning":"because",'
        '"params":{"entity":{"label":"x"},"confidence":0.9}}]'
    )
    commands = parse_commands_json(text)
    assert commands[0].params["entity"] == {"label": "x"}


# --- selection ---------------------------------------------------------------------


@pytest.fixture()
def tiny_catalog():
    return load_catalog(TINY_CSV)


def test_select_idempotent(tiny_catalog):
    s = PlanSummary()
    s1 = select_exercise(s, "1", tiny_catalog)
    s2 = select_exercise(s1, "1", tiny_catalog)
    assert s1.selected_exercise_row_ids == ["1"]
    assert s2 is s1


def test_select_unknown(tiny_catalog):
    with pytest.raises(UnknownExercise):
        select_exercise(PlanSummary(), "999", tiny_catalog)


def test_select_order_preserved(tiny_catalog):
    s = select_exercise(PlanSummary(), "2", tiny_catalog)
    s = select_exercise(s, "1", tiny_catalog)
    assert s.selected_exercise_row_ids == ["2", "1"]
    assert s.revision == 2


# --- fuzz: random well-typed command sequences ----------------------------------------


def _check_invariants(s: PlanSummary) -> None:
    for target, (attr, prefix) in TARGETS.items():
        ids = [e.id for e in getattr(s, attr)]
        assert len(ids) == len(set(ids)), f"duplicate ids in {attr}"
        for entity_id in ids:
            if entity_id[0] == prefix and entity_id[1:].isdigit():
                assert int(entity_id[1:]) <= s.counters.get(target, 0)


def test_fuzz_random_sequences_preserve_invariants():
    rng = random.Random(424242)
    targets = list(TARGETS)
    s = PlanSummary()
    crashes = 0
    for step in range(1000):
        batch = []
        for _ in range(rng.randint(1, 4)):
            target = rng.choice(targets)
            method = rng.choice(["add", "update", "remove"])
            if method == "add":
                batch.append(add(target, {"label": f"item-{step}-{rng.randint(0, 9)}"}))
            else:
                collection = s.collection(target)
                if collection and rng.random() < 0.8:
                    entity_id = rng.choice(collection).id
                else:
                    entity_id = f"{TARGETS[target][1]}{rng.randint(1, 99)}"
                if method == "update":
                    batch.append(update(target, entity_id, {"label": "patched"}))
                else:
                    batch.append(remove(target, entity_id))
        before = json.dumps(s.to_json(), sort_keys=True)
        try:
            s = apply_edits(s, batch)
        except (UnknownId, UnknownTarget, MalformedCommand):
            crashes += 0  # expected rejections
            assert json.dumps(s.to_json(), sort_keys=True) == before
        _check_invariants(s)
    assert crashes == 0


def test_add_remove_all_restores_collections():
    rng = random.Random(77)
    s = PlanSummary()
    start = json.dumps(
        {k: v for k, v in s.to_json().items() if k != "revision"}, sort_keys=True
    )
    added: list[tuple[str, str]] = []
    for i in range(30):
        target = rng.choice(list(TARGETS))
        s = apply_edits(s, [add(target, {"label": f"e{i}"})])
        added.append((target, s.collection(target)[-1].id))
    for target, entity_id in added:
        s = apply_edits(s, [remove(target, entity_id)])
    end = json.dumps(
        {k: v for k, v in s.to_json().items() if k != "revision"}, sort_keys=True
    )
    assert start == end


# --- deterministic serialization -------------------------------------------------------


def test_json_round_trip():
    s = apply_edits(
        PlanSummary(),
        [
            add("goal", {"label": "Weight loss"}),
            add("availability", {"day_spec": "Weekdays", "time_spec": "night"}),
        ],
    )
    s2 = PlanSummary.from_json(s.to_json())
    assert s2.to_json() == s.to_json()
    # counters resume correctly: next goal id continues the sequence
    s3 = apply_edits(s2, [add("goal", {"label": "More"})])
    assert s3.goals[-1].id == "g2"


def test_json_field_order_stable():
    keys = list(PlanSummary().to_json().keys())
    assert keys == [
        "goals",
        "availabilities",
        "obstacles",
        "recommended_exercises",
        "selected_exercise_row_ids",
        "implementation_intentions",
        "revision",
    ]
