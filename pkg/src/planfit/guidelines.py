"""Intrinsic plan validation: weekly amount, cardio/strength balance, rest gaps.

All checks are pure functions over a WeeklyPlan.  Waivers record explicit user
mandates (fixed days, reduced amount, injury exclusion) so a report can say
"compliant given user mandate" instead of hiding a violation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .catalog import Catalog
from .plan import WeeklyPlan, effective_minutes, exercise_days
from .vocab import Category, Weekday


class WaiverKind(str, enum.Enum):
    USER_FIXED_DAYS = "user_fixed_days"
    USER_REDUCED_AMOUNT = "user_reduced_amount"
    INJURY_EXCLUSION = "injury_exclusion"


@dataclass(frozen=True)
class Waiver:
    kind: WaiverKind
    note: str = ""
    # for USER_FIXED_DAYS: the days the user mandated; None covers the whole week
    days: frozenset[Weekday] | None = None

    def to_json(self) -> dict:
        data: dict = {"kind": self.kind.value, "note": self.note}
        if self.days is not None:
            data["days"] = sorted(d.label for d in self.days)
        return data

    @staticmethod
    def from_json(data: dict) -> "Waiver":
        days = data.get("days")
        return Waiver(
            kind=WaiverKind(data["kind"]),
            note=data.get("note", ""),
            days=frozenset(Weekday[d.upper()] for d in days) if days is not None else None,
        )


@dataclass(frozen=True)
class GuidelineConfig:
    weekly_minimum_effective_minutes: int = 150
    vigorous_multiplier: int = 2
    require_rest_gap: bool = True
    week_is_cyclic: bool = True

    def __post_init__(self):
        if self.weekly_minimum_effective_minutes <= 0:
            raise ValueError("weekly minimum must be positive")
        if self.vigorous_multiplier < 1:
            raise ValueError("vigorous multiplier must be >= 1")


@dataclass(frozen=True)
class GuidelineReport:
    effective_minutes: int
    amount_ok: bool
    categories_present: frozenset[Category]
    balance_ok: bool
    rest_ok: bool
    violating_day_pairs: tuple[tuple[Weekday, Weekday], ...]
    waivers: tuple[Waiver, ...] = ()

    @property
    def all_ok(self) -> bool:
        return self.amount_ok and self.balance_ok and self.rest_ok

    def to_json(self) -> dict:
        return {
            "effective_minutes": self.effective_minutes,
            "amount_ok": self.amount_ok,
            "categories_present": sorted(c.value for c in self.categories_present),
            "balance_ok": self.balance_ok,
            "rest_ok": self.rest_ok,
            "violating_day_pairs": [
                [a.label, b.label] for a, b in self.violating_day_pairs
            ],
            "waivers": [w.to_json() for w in self.waivers],
        }

    @staticmethod
    def from_json(data: dict) -> "GuidelineReport":
        return GuidelineReport(
            effective_minutes=data["effective_minutes"],
            amount_ok=data["amount_ok"],
            categories_present=frozenset(
                Category(c) for c in data["categories_present"]
            ),
            balance_ok=data["balance_ok"],
            rest_ok=data["rest_ok"],
            violating_day_pairs=tuple(
                (Weekday[a.upper()], Weekday[b.upper()])
                for a, b in data["violating_day_pairs"]
            ),
            waivers=tuple(Waiver.from_json(w) for w in data.get("waivers", [])),
        )


def check_amount(
    plan: WeeklyPlan, config: GuidelineConfig = GuidelineConfig()
) -> tuple[int, bool]:
    """Weekly effective minutes and whether they meet the >= threshold."""
    total = effective_minutes(plan, config.vigorous_multiplier)
    return total, total >= config.weekly_minimum_effective_minutes


def check_balance(plan: WeeklyPlan, catalog: Catalog) -> tuple[frozenset[Category], bool]:
    """Categories present among the plan's exercises; ok iff both appear."""
    present = frozenset(catalog.get(r.exercise_row_id).category for r in plan.rules)
    return present, Category.CARDIO in present and Category.STRENGTH in present


def _adjacent_pairs(
    days: set[Weekday], cyclic: bool
) -> list[tuple[Weekday, Weekday]]:
    pairs = []
    for day in Weekday:
        if not cyclic and day is Weekday.SUNDAY:
            continue
        nxt = day.next()
        if day in days and nxt in days:
            pairs.append((day, nxt))
    return pairs


def _pair_covered(pair: tuple[Weekday, Weekday], waivers: tuple[Waiver, ...]) -> bool:
    for w in waivers:
        if w.kind is not WaiverKind.USER_FIXED_DAYS:
            continue
        if w.days is None or (pair[0] in w.days and pair[1] in w.days):
            return True
    return False


def check_rest(
    plan: WeeklyPlan,
    config: GuidelineConfig = GuidelineConfig(),
    waivers: tuple[Waiver, ...] = (),
) -> tuple[list[tuple[Weekday, Weekday]], bool]:
    """Consecutive exercise-day pairs; ok iff none remain uncovered by waivers."""
    days = exercise_days(plan)
    pairs = _adjacent_pairs(days, config.week_is_cyclic)
    if not config.require_rest_gap:
        return pairs, True
    ok = all(_pair_covered(p, tuple(waivers)) for p in pairs)
    return pairs, ok


def evaluate(
    plan: WeeklyPlan,
    catalog: Catalog,
    config: GuidelineConfig = GuidelineConfig(),
    waivers: tuple[Waiver, ...] = (),
) -> GuidelineReport:
    """Compose the amount, balance, and rest checks into one report."""
    waivers = tuple(waivers)
    total, amount_ok = check_amount(plan, config)
    if not amount_ok and any(
        w.kind is WaiverKind.USER_REDUCED_AMOUNT for w in waivers
    ):
        amount_ok = True
    present, balance_ok = check_balance(plan, catalog)
    pairs, rest_ok = check_rest(plan, config, waivers)
    return GuidelineReport(
        effective_minutes=total,
        amount_ok=amount_ok,
        categories_present=present,
        balance_ok=balance_ok,
        rest_ok=rest_ok,
        violating_day_pairs=tuple(pairs),
        waivers=waivers,
    )
