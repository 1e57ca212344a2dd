from __future__ import annotations

import random

import pytest

from planfit.errors import MissingDay, NoPlanFound, UnparseableAmount
from planfit.plan import (
    CopingPlan,
    WeeklyPlan,
    effective_minutes,
    exercise_days,
    parse_amount,
    parse_plan_xml,
    parse_recommendations_xml,
    serialize_plan_xml,
)
from planfit.vocab import Intensity, Weekday

from conftest import make_plan, make_rule

# The plan-format example message shipped with the agent's instructions.
EXAMPLE_MESSAGE = """Here is a plan that fits your week!
<If>Monday after work</If>
<Then>
  <Exercise>Running</Exercise>
  <Amount>60 minutes - moderate intensity</Amount>
</Then>
<If>After running</If>
<Then>
  <Exercise>Pilates</Exercise>
  <Amount>30 minutes - vigorous intensity</Amount>
</Then>
<If>Too sleepy after work on Monday</If> <Then>
  <CopingPlan>Do the same exercises on Tuesday</CopingPlan>
</Then>
Let me know if you would like any changes."""


# --- parsing -----------------------------------------------------------------


def test_parse_example_message():
    plan = parse_plan_xml(EXAMPLE_MESSAGE)
    assert len(plan.rules) == 2
    first, second = plan.rules
    assert (first.day, first.situation, first.exercise_name) == (
        Weekday.MONDAY,
        "after work",
        "Running",
    )
    assert (first.amount_minutes, first.intensity) == (60, Intensity.MODERATE)
    # chained rule inherits the previous rule's day
    assert (second.day, second.situation, second.exercise_name) == (
        Weekday.MONDAY,
        "After running",
        "Pilates",
    )
    assert (second.amount_minutes, second.intensity) == (30, Intensity.VIGOROUS)
    assert len(plan.coping_plans) == 1
    coping = plan.coping_plans[0]
    assert coping.obstacle_clause == "Too sleepy after work on Monday"
    assert coping.alternative == "Do the same exercises on Tuesday"
    # attaches to both Monday rules via the day token in its clause
    assert coping.parent_rule_ids == ("r1", "r2")
    assert effective_minutes(plan) == 120
    assert exercise_days(plan) == {Weekday.MONDAY}


def test_prose_only_is_no_plan():
    with pytest.raises(NoPlanFound):
        parse_plan_xml("I think you should exercise more, maybe on Mondays?")


def test_coping_only_is_no_plan():
    msg = "<If>Rain on Monday</If><Then><CopingPlan>Go to the gym</CopingPlan></Then>"
    with pytest.raises(NoPlanFound):
        parse_plan_xml(msg)


def test_amount_variants():
    assert parse_amount("45 minutes - vigorous intensity") == (45, Intensity.VIGOROUS)
    assert parse_amount("  30 Minutes -  Moderate Intensity ") == (30, Intensity.MODERATE)
    assert parse_amount("25 min — moderate") == (25, Intensity.MODERATE)
    assert parse_amount("50 minutes: vigorous") == (50, Intensity.VIGOROUS)


def test_amount_requires_intensity():
    with pytest.raises(UnparseableAmount):
        parse_amount("30 minutes")
    with pytest.raises(UnparseableAmount):
        parse_amount("plenty of effort")


def test_unparseable_amount_propagates():
    msg = "<If>Monday</If><Then><Exercise>Walk</Exercise><Amount>a while</Amount></Then>"
    with pytest.raises(UnparseableAmount):
        parse_plan_xml(msg)


def test_missing_day_on_first_rule():
    msg = (
        "<If>after work</If><Then><Exercise>Walk</Exercise>"
        "<Amount>30 minutes - moderate intensity</Amount></Then>"
    )
    with pytest.raises(MissingDay):
        parse_plan_xml(msg)


def test_parse_never_crashes_on_noise():
    rng = random.Random(7)
    alphabet = "<>/IfThenExerciseAmountCopingPlan abcdefg0123 minutes-"
    for _ in range(300):
        text = "".join(rng.choices(alphabet, k=rng.randint(0, 120)))
        try:
            plan = parse_plan_xml(text)
        except (NoPlanFound, UnparseableAmount, MissingDay):
            continue
        assert isinstance(plan, WeeklyPlan)


def test_coping_without_day_token_attaches_to_all():
    msg = (
        "<If>Monday morning</If><Then><Exercise>Walk</Exercise>"
        "<Amount>30 minutes - moderate intensity</Amount></Then>"
        "<If>Wednesday morning</If><Then><Exercise>Squats</Exercise>"
        "<Amount>30 minutes - moderate intensity</Amount></Then>"
        "<If>Feeling unwell</If><Then><CopingPlan>Take a gentle walk</CopingPlan></Then>"
    )
    plan = parse_plan_xml(msg)
    assert plan.coping_plans[0].parent_rule_ids == ("r1", "r2")


# --- serialization -----------------------------------------------------------


def test_serialize_empty_plan():
    assert serialize_plan_xml(WeeklyPlan()) == ""


def test_serialize_single_rule():
    plan = make_plan(
        make_rule(day=Weekday.WEDNESDAY, situation="after dinner", name="Walk", minutes=30)
    )
    text = serialize_plan_xml(plan)
    assert "<If>Wednesday after dinner</If>" in text
    assert "<Amount>30 minutes - moderate intensity</Amount>" in text


def test_example_round_trip():
    plan = parse_plan_xml(EXAMPLE_MESSAGE)
    assert parse_plan_xml(serialize_plan_xml(plan)) == plan


# --- generated round-trip ------------------------------------------------------

_SITUATIONS = ("after work", "before breakfast", "after dinner", "in the morning", "at the gym", "")
_NAMES = ("Running", "Walk", "Pilates", "Squats", "Jump Rope", "Yoga")
_PHRASES = ("Rain", "Overtime at work", "Feeling tired", "Guests at home", "Low energy")


def random_plan(rng: random.Random) -> WeeklyPlan:
    """Plans shaped the way the parser would shape them (canonical ids, coping
    clauses carrying their parents' day token)."""
    n_rules = rng.randint(1, 6)
    rules = []
    for i in range(n_rules):
        day = rng.choice(list(Weekday)) if i == 0 else rng.choice(list(Weekday))
        rules.append(
            make_rule(
                rule_id=f"r{i + 1}",
                day=day,
                situation=rng.choice(_SITUATIONS),
                name=rng.choice(_NAMES),
                minutes=rng.choice((10, 20, 30, 45, 60, 90)),
                intensity=rng.choice(list(Intensity)),
            )
        )
    coping = []
    for j in range(rng.randint(0, 3)):
        if rng.random() < 0.7:
            day = rng.choice([r.day for r in rules])
            clause = f"{rng.choice(_PHRASES)} on {day.label}"
            parents = tuple(r.id for r in rules if r.day == day)
        else:
            clause = rng.choice(_PHRASES)
            parents = tuple(r.id for r in rules)
        coping.append(
            CopingPlan(
                id=f"c{j + 1}",
                parent_rule_ids=parents,
                obstacle_clause=clause,
                alternative=f"Do the same exercises on {rng.choice(list(Weekday)).label}",
            )
        )
    return WeeklyPlan(tuple(rules), tuple(coping))


def test_generated_round_trip_500():
    rng = random.Random(991)
    for _ in range(500):
        plan = random_plan(rng)
        assert parse_plan_xml(serialize_plan_xml(plan)) == plan


# --- recommendations ------------------------------------------------------------


def test_parse_recommendation_block():
    msg = (
        "<Output><Exercise>Running</Exercise> (<RowID>12</RowID>): "
        "good for weight loss</Output>"
    )
    items = parse_recommendations_xml(msg)
    assert len(items) == 1
    assert items[0].exercise_row_id == "12"
    assert items[0].exercise_name == "Running"
    assert items[0].rationale == "good for weight loss"


def test_parse_recommendations_prose_only():
    assert parse_recommendations_xml("nothing here") == []


def test_parse_recommendations_document_order():
    msg = (
        "intro <Output><Exercise>A</Exercise> (<RowID>1</RowID>): one</Output>"
        " middle <Output><Exercise>B</Exercise> (<RowID>2</RowID>): two</Output> end"
    )
    items = parse_recommendations_xml(msg)
    assert [i.exercise_name for i in items] == ["A", "B"]


# --- arithmetic ----------------------------------------------------------------


def test_effective_minutes_doubles_vigorous():
    plan = make_plan(
        make_rule(rule_id="r1", minutes=90, intensity=Intensity.MODERATE),
        make_rule(rule_id="r2", day=Weekday.WEDNESDAY, minutes=30, intensity=Intensity.VIGOROUS),
    )
    assert effective_minutes(plan) == 150


def test_effective_minutes_empty():
    assert effective_minutes(WeeklyPlan()) == 0


def test_effective_minutes_reorder_invariant():
    rng = random.Random(5)
    rules = [
        make_rule(
            rule_id=f"r{i}",
            day=rng.choice(list(Weekday)),
            minutes=rng.randint(1, 120),
            intensity=rng.choice(list(Intensity)),
        )
        for i in range(1, 8)
    ]
    total = effective_minutes(make_plan(*rules))
    rng.shuffle(rules)
    assert effective_minutes(make_plan(*rules)) == total


def test_exercise_days():
    assert exercise_days(WeeklyPlan()) == set()
    plan = make_plan(
        make_rule(rule_id="r1", day=Weekday.MONDAY),
        make_rule(rule_id="r2", day=Weekday.MONDAY, situation="later"),
        make_rule(rule_id="r3", day=Weekday.THURSDAY),
    )
    assert exercise_days(plan) == {Weekday.MONDAY, Weekday.THURSDAY}
