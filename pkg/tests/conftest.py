from __future__ import annotations

import pytest

from planfit.catalog import RetrievalConfig, load_bundled_catalog
from planfit.plan import CopingPlan, PlanRule, WeeklyPlan
from planfit.vocab import Intensity, Weekday

TINY_CSV = """row_id,name,alt_keywords,intensity,description,muscles
1,Running,jogging; sprint,moderate,"Easy running outdoors, about 6 mph.","Quads, hamstrings, calves; cardio"
2,Squats,air squats,moderate,"Sit back and stand tall.","Quads, glutes; strength"
3,Jump Rope,skipping,vigorous,"Quick hops over a rope.","Calves, shoulders; cardio"
4,Push-ups,press-ups,moderate,"Plank to floor and back.","Chest, triceps; strength"
"""


@pytest.fixture(scope="session")
def catalog():
    cat = load_bundled_catalog()
    cat.build_index(RetrievalConfig())
    return cat


@pytest.fixture()
def tiny_csv() -> str:
    return TINY_CSV


def make_rule(
    rule_id: str = "r1",
    day: Weekday = Weekday.MONDAY,
    situation: str = "after work",
    name: str = "Running",
    minutes: int = 30,
    intensity: Intensity = Intensity.MODERATE,
    row_id: str = "",
) -> PlanRule:
    return PlanRule(
        id=rule_id,
        day=day,
        situation=situation,
        exercise_row_id=row_id,
        exercise_name=name,
        amount_minutes=minutes,
        intensity=intensity,
    )


def make_plan(*rules: PlanRule, coping: tuple[CopingPlan, ...] = ()) -> WeeklyPlan:
    return WeeklyPlan(tuple(rules), coping)
