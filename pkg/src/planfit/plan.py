"""Implementation-intention plan structures and the XML-in-prose wire grammar.

Agent messages interleave prose with ``<If>``/``<Then>`` blocks; a ``<Then>``
holding ``<Exercise>`` + ``<Amount>`` is a primary rule, one holding
``<CopingPlan>`` is a plan-B rule.  This is tag extraction over prose, not
general XML: tags are matched case-sensitively and nothing else is validated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidPlan, MissingDay, NoPlanFound, UnparseableAmount
from .vocab import Intensity, Weekday, first_day_token, strip_first_day_token

_IF_RE = re.compile(r"<If>(.*?)</If>", re.DOTALL)
_THEN_RE = re.compile(r"<Then>(.*?)</Then>", re.DOTALL)
_EXERCISE_RE = re.compile(r"<Exercise>(.*?)</Exercise>", re.DOTALL)
_AMOUNT_RE = re.compile(r"<Amount>(.*?)</Amount>", re.DOTALL)
_COPING_RE = re.compile(r"<CopingPlan>(.*?)</CopingPlan>", re.DOTALL)
_OUTPUT_RE = re.compile(r"<Output>(.*?)</Output>", re.DOTALL)
_ROWID_RE = re.compile(r"<RowID>(.*?)</RowID>", re.DOTALL)

# "60 minutes - moderate intensity", tolerant of case, spacing, dash flavor,
# and a missing trailing "intensity"
_AMOUNT_TEXT_RE = re.compile(
    r"(\d+)\s*min(?:ute)?s?\s*(?:[-–—:]\s*)?(moderate|vigorous)(?:\s*intensity)?",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class PlanRule:
    id: str
    day: Weekday
    situation: str
    exercise_row_id: str
    exercise_name: str
    amount_minutes: int
    intensity: Intensity

    def __post_init__(self):
        if self.amount_minutes <= 0:
            raise InvalidPlan(f"rule {self.id}: amount must be positive")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "day": self.day.label,
            "situation": self.situation,
            "exercise_row_id": self.exercise_row_id,
            "exercise_name": self.exercise_name,
            "amount_minutes": self.amount_minutes,
            "intensity": self.intensity.value,
        }

    @staticmethod
    def from_json(data: dict) -> "PlanRule":
        return PlanRule(
            id=data["id"],
            day=Weekday[data["day"].upper()],
            situation=data["situation"],
            exercise_row_id=data["exercise_row_id"],
            exercise_name=data["exercise_name"],
            amount_minutes=data["amount_minutes"],
            intensity=Intensity(data["intensity"]),
        )


@dataclass(frozen=True)
class CopingPlan:
    id: str
    parent_rule_ids: tuple[str, ...]
    obstacle_clause: str
    alternative: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "parent_rule_ids": list(self.parent_rule_ids),
            "obstacle_clause": self.obstacle_clause,
            "alternative": self.alternative,
        }

    @staticmethod
    def from_json(data: dict) -> "CopingPlan":
        return CopingPlan(
            id=data["id"],
            parent_rule_ids=tuple(data["parent_rule_ids"]),
            obstacle_clause=data["obstacle_clause"],
            alternative=data["alternative"],
        )


@dataclass(frozen=True)
class WeeklyPlan:
    rules: tuple[PlanRule, ...] = ()
    coping_plans: tuple[CopingPlan, ...] = ()

    def __post_init__(self):
        ids = [r.id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise InvalidPlan("duplicate rule ids")
        known = set(ids)
        for cp in self.coping_plans:
            if not cp.parent_rule_ids:
                raise InvalidPlan(f"coping plan {cp.id} has no parents")
            missing = [p for p in cp.parent_rule_ids if p not in known]
            if missing:
                raise InvalidPlan(f"coping plan {cp.id} references unknown rules {missing}")

    def to_json(self) -> dict:
        return {
            "rules": [r.to_json() for r in self.rules],
            "coping_plans": [c.to_json() for c in self.coping_plans],
        }

    @staticmethod
    def from_json(data: dict) -> "WeeklyPlan":
        return WeeklyPlan(
            rules=tuple(PlanRule.from_json(r) for r in data["rules"]),
            coping_plans=tuple(CopingPlan.from_json(c) for c in data["coping_plans"]),
        )


@dataclass(frozen=True)
class RecommendationItem:
    exercise_row_id: str
    exercise_name: str
    rationale: str

    def to_json(self) -> dict:
        return {
            "exercise_row_id": self.exercise_row_id,
            "exercise_name": self.exercise_name,
            "rationale": self.rationale,
        }


def parse_amount(text: str) -> tuple[int, Intensity]:
    """Parse an ``<Amount>`` body like ``60 minutes - moderate intensity``."""
    m = _AMOUNT_TEXT_RE.search(text)
    if not m:
        raise UnparseableAmount(text.strip())
    return int(m.group(1)), Intensity(m.group(2).lower())


def _paired_blocks(message: str) -> list[tuple[str, str]]:
    """(if_text, then_text) pairs: each <If> pairs with the next <Then> before
    any further <If>."""
    ifs = list(_IF_RE.finditer(message))
    thens = list(_THEN_RE.finditer(message))
    pairs: list[tuple[str, str]] = []
    for i, if_m in enumerate(ifs):
        limit = ifs[i + 1].start() if i + 1 < len(ifs) else len(message)
        then_m = next(
            (t for t in thens if if_m.end() <= t.start() < limit),
            None,
        )
        if then_m is not None:
            pairs.append((if_m.group(1).strip(), then_m.group(1)))
    return pairs


def parse_plan_xml(message: str) -> WeeklyPlan:
    """Extract a WeeklyPlan from prose carrying If/Then blocks.

    Primary rules take their day from the first weekday token of the IF text;
    a day-less IF inherits the previous rule's day (chained rules such as an
    "After running" follow-up).  Coping pairs attach to the preceding rules
    whose day matches the first weekday token of their IF clause, falling back
    to every rule when no token matches.
    """
    pairs = _paired_blocks(message)
    rules: list[PlanRule] = []
    pending_coping: list[tuple[str, str, Weekday | None]] = []

    for if_text, then_text in pairs:
        coping_m = _COPING_RE.search(then_text)
        if coping_m:
            pending_coping.append(
                (if_text, coping_m.group(1).strip(), first_day_token(if_text))
            )
            continue
        ex_m = _EXERCISE_RE.search(then_text)
        amount_m = _AMOUNT_RE.search(then_text)
        if not ex_m or not amount_m:
            continue  # prose or unrelated tags inside a Then block
        amount, intensity = parse_amount(amount_m.group(1))
        day = first_day_token(if_text)
        if day is None:
            if not rules:
                raise MissingDay(if_text)
            day = rules[-1].day
            situation = if_text.strip()
        else:
            situation = strip_first_day_token(if_text)
        rules.append(
            PlanRule(
                id=f"r{len(rules) + 1}",
                day=day,
                situation=situation,
                exercise_row_id="",
                exercise_name=ex_m.group(1).strip(),
                amount_minutes=amount,
                intensity=intensity,
            )
        )

    if not rules:
        raise NoPlanFound("no If/Then exercise pairs in message")

    coping_plans: list[CopingPlan] = []
    for clause, alternative, day in pending_coping:
        parents = [r.id for r in rules if day is not None and r.day == day]
        if not parents:
            parents = [r.id for r in rules]
        coping_plans.append(
            CopingPlan(
                id=f"c{len(coping_plans) + 1}",
                parent_rule_ids=tuple(parents),
                obstacle_clause=clause,
                alternative=alternative,
            )
        )
    return WeeklyPlan(tuple(rules), tuple(coping_plans))


def serialize_plan_xml(plan: WeeklyPlan) -> str:
    """Canonical writer for the If/Then grammar; output re-parses to an equal plan."""
    blocks: list[str] = []
    for rule in plan.rules:
        if_text = f"{rule.day.label} {rule.situation}".strip()
        blocks.append(
            "<If>{}</If>\n<Then>\n  <Exercise>{}</Exercise>\n"
            "  <Amount>{} minutes - {} intensity</Amount>\n</Then>".format(
                if_text, rule.exercise_name, rule.amount_minutes, rule.intensity.value
            )
        )
    for cp in plan.coping_plans:
        blocks.append(
            "<If>{}</If>\n<Then>\n  <CopingPlan>{}</CopingPlan>\n</Then>".format(
                cp.obstacle_clause, cp.alternative
            )
        )
    return "\n".join(blocks)


def parse_recommendations_xml(message: str) -> list[RecommendationItem]:
    """One item per <Output> block; zero items is a valid result."""
    items: list[RecommendationItem] = []
    for m in _OUTPUT_RE.finditer(message):
        block = m.group(1)
        ex_m = _EXERCISE_RE.search(block)
        row_m = _ROWID_RE.search(block)
        if not ex_m or not row_m:
            continue
        rationale = block[row_m.end() :]
        rationale = re.sub(r"^[\s):]*", "", rationale).strip()
        items.append(
            RecommendationItem(
                exercise_row_id=row_m.group(1).strip(),
                exercise_name=ex_m.group(1).strip(),
                rationale=rationale,
            )
        )
    return items


def effective_minutes(plan: WeeklyPlan, vigorous_multiplier: int = 2) -> int:
    """Weekly dose with vigorous minutes counted double (2x + y)."""
    return sum(
        r.amount_minutes * (vigorous_multiplier if r.intensity is Intensity.VIGOROUS else 1)
        for r in plan.rules
    )


def exercise_days(plan: WeeklyPlan) -> set[Weekday]:
    return {r.day for r in plan.rules}
