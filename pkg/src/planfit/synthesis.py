"""Deterministic weekly-plan synthesis and repair.

Turns a plan summary (availabilities, obstacles, selected exercises) into a
guideline-compliant WeeklyPlan:

  expand availabilities to per-weekday slots -> pick maximally spaced days ->
  allocate session minutes until the effective weekly target is met ->
  attach per-obstacle coping plans -> validate.

The same machinery repairs externally produced plans: extend sessions to fix
the amount, move rules off adjacent days to restore rest gaps, and surface
balance gaps as advisories (exercises are never added silently).  When the
user's availability simply cannot honor a rest gap, the concession is
recorded as a fixed-days waiver instead of being hidden.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .catalog import Catalog, ExerciseEntry
from .errors import (
    CapsSaturated,
    NoAvailability,
    NoExercisesSelected,
    UnknownExercise,
    UnrepairableWithinConstraints,
)
from .guidelines import (
    GuidelineConfig,
    GuidelineReport,
    Waiver,
    WaiverKind,
    _adjacent_pairs,
    _pair_covered,
    evaluate,
)
from .plan import CopingPlan, PlanRule, WeeklyPlan, effective_minutes, exercise_days
from .summary import PlanSummary, SummaryEntity
from .vocab import (
    Category,
    Intensity,
    Weekday,
    find_day_tokens,
    weekday_range,
)


@dataclass(frozen=True)
class AvailabilitySlot:
    day: Weekday
    time_spec: str
    source_entity_id: str


@dataclass(frozen=True)
class SynthesisConfig:
    target_effective_minutes: int = 150
    default_session_minutes: int = 30
    soft_session_cap: int = 60
    hard_session_cap: int = 90
    # progression adds 10% of weekly effective minutes, in 5-minute steps
    progression_fraction: float = 0.10

    def __post_init__(self):
        if not (
            self.default_session_minutes
            <= self.soft_session_cap
            <= self.hard_session_cap
        ):
            raise ValueError("session caps must satisfy default <= soft <= hard")


@dataclass(frozen=True)
class Advisory:
    kind: str
    message: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message}

    @staticmethod
    def from_json(data: dict) -> "Advisory":
        return Advisory(data["kind"], data["message"])


@dataclass(frozen=True)
class DaySelection:
    days: tuple[Weekday, ...]
    conceded_pairs: tuple[tuple[Weekday, Weekday], ...] = ()


@dataclass(frozen=True)
class AllocationResult:
    rules: tuple[PlanRule, ...]
    insufficient: bool


@dataclass(frozen=True)
class SynthesisResult:
    plan: WeeklyPlan
    report: GuidelineReport
    advisories: tuple[Advisory, ...]
    waivers: tuple[Waiver, ...]


# --- availability expansion --------------------------------------------------

_NEGATION_RE = re.compile(r"^\s*(unable|cannot|can'?t|not able)\b", re.IGNORECASE)
_WEEKDAYS_RE = re.compile(r"\bweek\s?days?\b", re.IGNORECASE)
_WEEKENDS_RE = re.compile(r"\bweek\s?ends?\b", re.IGNORECASE)
_EVERYDAY_RE = re.compile(r"\b(?:every\s?day|daily|any\s?day)\b", re.IGNORECASE)
_WORK_CUE_RE = re.compile(r"\b(?:work|school|office)\b", re.IGNORECASE)
_EXCEPT_RE = re.compile(r"\bexcept(?:\s+for)?\b", re.IGNORECASE)
_RANGE_SEP_RE = re.compile(r"\s*(?:--|-|–|—|\bto\b|\bthrough\b)\s*", re.IGNORECASE)
_CONNECTOR_EDGE_RE = re.compile(r"^(?:[,&\s]+|and\b|or\b)+", re.IGNORECASE)


def _delete_spans(text: str, spans: list[tuple[int, int]]) -> str:
    if not spans:
        return re.sub(r"\s+", " ", text).strip()
    keep = []
    pos = 0
    for start, end in sorted(spans):
        keep.append(text[pos:start])
        pos = max(pos, end)
    keep.append(text[pos:])
    out = re.sub(r"\s+", " ", " ".join(keep)).strip()
    prev = None
    while prev != out:
        prev = out
        out = _CONNECTOR_EDGE_RE.sub("", out).strip()
    return out


def parse_day_phrase(text: str) -> tuple[list[Weekday], str]:
    """Split an availability phrase into explicit weekdays and the time remainder.

    Recognizes weekday keywords ("weekdays", "weekends", "everyday"), day
    lists and inclusive ranges ("Thu--Sun"), and a trailing "except ..."
    exclusion.  Phrases without any day token default to Mon-Fri when they
    are anchored to work or school, and to all seven days otherwise.
    """
    days: set[Weekday] = set()
    excluded: set[Weekday] = set()
    consumed: list[tuple[int, int]] = []
    explicit = False

    except_m = _EXCEPT_RE.search(text)
    except_start = except_m.start() if except_m else len(text)
    if except_m:
        tail_tokens = find_day_tokens(text[except_m.end() :])
        if tail_tokens:
            excluded = {d for d, _ in tail_tokens}
            last_end = except_m.end() + tail_tokens[-1][1][1]
            consumed.append((except_m.start(), last_end))
        else:
            except_start = len(text)  # "except ..." is about time, keep it

    head = text[:except_start]
    for regex, day_set in (
        (_WEEKDAYS_RE, set(weekday_range(Weekday.MONDAY, Weekday.FRIDAY))),
        (_WEEKENDS_RE, {Weekday.SATURDAY, Weekday.SUNDAY}),
        (_EVERYDAY_RE, set(Weekday)),
    ):
        for m in regex.finditer(head):
            days |= day_set
            consumed.append(m.span())
            explicit = True

    tokens = [
        (d, span)
        for d, span in find_day_tokens(head)
        if not any(s <= span[0] and span[1] <= e for s, e in consumed)
    ]
    i = 0
    while i < len(tokens):
        day, span = tokens[i]
        if i + 1 < len(tokens):
            between = head[span[1] : tokens[i + 1][1][0]]
            if _RANGE_SEP_RE.fullmatch(between):
                end_day, end_span = tokens[i + 1]
                days |= set(weekday_range(day, end_day))
                consumed.append((span[0], end_span[1]))
                explicit = True
                i += 2
                continue
        days.add(day)
        consumed.append(span)
        explicit = True
        i += 1

    if not explicit:
        if excluded:
            days = set(Weekday)
        elif _WORK_CUE_RE.search(text):
            days = set(weekday_range(Weekday.MONDAY, Weekday.FRIDAY))
            return sorted(days), re.sub(r"\s+", " ", text).strip()
        else:
            return sorted(Weekday), re.sub(r"\s+", " ", text).strip()

    days -= excluded
    remainder = _delete_spans(text, consumed)
    return sorted(days), remainder


def expand_availabilities(summary: PlanSummary) -> list[AvailabilitySlot]:
    """Expand each availability entity to one slot per explicit weekday.

    Phrases that read as an inability ("Unable to exercise on ...") contribute
    no slots; they stay on the dashboard but never schedule sessions.
    """
    if not summary.availabilities:
        raise NoAvailability("summary has no availabilities")
    slots: list[AvailabilitySlot] = []
    for entity in summary.availabilities:
        day_spec = str(entity.payload.get("day_spec") or "")
        time_spec = str(entity.payload.get("time_spec") or "")
        full = f"{day_spec} {time_spec}".strip()
        if not full or _NEGATION_RE.search(full):
            continue
        days, remainder = parse_day_phrase(full)
        for day in days:
            slots.append(AvailabilitySlot(day, remainder, entity.id))
    if not slots:
        raise NoAvailability("no availability expands to any weekday")
    return slots


# --- day choice and amount allocation ----------------------------------------


def _session_multipliers(
    n_days: int, intensities: list[Intensity], vigorous_multiplier: int = 2
) -> list[int]:
    if not intensities:
        return [1] * n_days
    return [
        vigorous_multiplier if intensities[i % len(intensities)] is Intensity.VIGOROUS else 1
        for i in range(n_days)
    ]


def _day_distance(a: Weekday, b: Weekday, cyclic: bool) -> int:
    return Weekday.cyclic_distance(a, b) if cyclic else abs(int(a) - int(b))


def choose_days(
    slots: list[AvailabilitySlot],
    intensities: list[Intensity] | None = None,
    config: SynthesisConfig = SynthesisConfig(),
    cyclic: bool = True,
) -> DaySelection:
    """Pick exercise days greedily with at least one rest day in between.

    Additional days are admitted only when needed to reach the weekly target:
    rest-preserving days first; adjacent days are admitted last, only when
    even hard-cap sessions on the current days cannot reach the target, and
    every adjacency introduced this way is recorded as a concession.
    """
    if not slots:
        raise NoAvailability("no slots to choose from")
    intensities = list(intensities or [])
    available = sorted({s.day for s in slots})
    target = config.target_effective_minutes

    picked: list[Weekday] = []
    for day in available:
        if all(_day_distance(day, p, cyclic) >= 2 for p in picked):
            picked.append(day)

    def capacity(days: list[Weekday], cap: int) -> int:
        return sum(cap * m for m in _session_multipliers(len(days), intensities))

    conceded: list[tuple[Weekday, Weekday]] = []
    while capacity(picked, config.soft_session_cap) < target:
        rest = [d for d in available if d not in picked]
        if not rest:
            break
        spaced = [
            d for d in rest if all(_day_distance(d, p, cyclic) >= 2 for p in picked)
        ]
        if spaced:
            picked.append(spaced[0])
            picked.sort()
            continue
        if capacity(picked, config.hard_session_cap) >= target:
            break  # longer sessions beat breaking the rest rule
        day = min(
            rest,
            key=lambda d: (
                sum(1 for p in picked if _day_distance(d, p, cyclic) == 1),
                int(d),
            ),
        )
        for p in picked:
            if _day_distance(day, p, cyclic) == 1:
                pair = (p, day) if day == p.next() else (day, p)
                conceded.append(pair)
        picked.append(day)
        picked.sort()
    return DaySelection(tuple(picked), tuple(conceded))


def allocate_amounts(
    days: list[Weekday] | tuple[Weekday, ...],
    selected_exercises: list[ExerciseEntry],
    config: SynthesisConfig = SynthesisConfig(),
    situations: dict[Weekday, str] | None = None,
    vigorous_multiplier: int = 2,
) -> AllocationResult:
    """Assign exercises round-robin to days and grow sessions to the target.

    Sessions start at the default length and rise uniformly in 5-minute steps
    (vigorous minutes counting double) up to the soft cap, then to the hard
    cap, stopping at the first step that reaches the target.  When both
    selected categories cannot appear across the days, the last day swaps to
    the missing category; a single-day plan instead chains a second rule on
    that day so neither category is dropped.
    """
    if not selected_exercises:
        raise NoExercisesSelected("select at least one exercise first")
    if not days:
        raise NoAvailability("no days to allocate onto")
    days = list(days)
    situations = situations or {}

    assignment = [selected_exercises[i % len(selected_exercises)] for i in range(len(days))]
    selected_cats = {e.category for e in selected_exercises}
    missing = selected_cats - {e.category for e in assignment}
    chained: ExerciseEntry | None = None
    if missing:
        replacement = next(e for e in selected_exercises if e.category in missing)
        if len(days) >= 2:
            assignment[-1] = replacement
        else:
            chained = replacement

    sessions: list[tuple[Weekday, ExerciseEntry, str]] = [
        (day, entry, situations.get(day, "")) for day, entry in zip(days, assignment)
    ]
    if chained is not None:
        sessions.append(
            (days[0], chained, f"After {assignment[0].name.lower()}")
        )

    mults = [
        vigorous_multiplier if e.intensity is Intensity.VIGOROUS else 1
        for _, e, _ in sessions
    ]
    total_mult = sum(mults)
    target = config.target_effective_minutes
    minutes = config.default_session_minutes
    while minutes * total_mult < target and minutes < config.soft_session_cap:
        minutes += 5
    while minutes * total_mult < target and minutes < config.hard_session_cap:
        minutes += 5

    rules = tuple(
        PlanRule(
            id=f"r{i + 1}",
            day=day,
            situation=situation,
            exercise_row_id=entry.row_id,
            exercise_name=entry.name,
            amount_minutes=minutes,
            intensity=entry.intensity,
        )
        for i, (day, entry, situation) in enumerate(sessions)
    )
    return AllocationResult(rules, insufficient=minutes * total_mult < target)


# --- coping plans ------------------------------------------------------------


def _neighbors(day: Weekday, cyclic: bool = True) -> set[Weekday]:
    out = set()
    if cyclic or day is not Weekday.SUNDAY:
        out.add(day.next(1))
    if cyclic or day is not Weekday.MONDAY:
        out.add(day.next(6))
    return out


def _alternative_day(
    failed_day: Weekday, session_days: set[Weekday], cyclic: bool = True
) -> Weekday | None:
    """Next free day after *failed_day* that breaks no rest gap.

    The failed day itself is ignored in the adjacency check: its session did
    not happen, so exercising right next to it is fine.
    """
    others = session_days - {failed_day}
    for step in range(1, 7):
        day = failed_day.next(step)
        if day in session_days:
            continue
        if _neighbors(day, cyclic) & others:
            continue
        return day
    return None


def _obstacle_payload(obstacle) -> tuple[str, list[str] | None]:
    if isinstance(obstacle, SummaryEntity):
        label = str(obstacle.payload.get("label", "")).strip()
        linked = obstacle.payload.get("linked_availability_ids")
        return label, list(linked) if linked else None
    return str(obstacle).strip(), None


def attach_coping_plans(
    rules: tuple[PlanRule, ...] | list[PlanRule],
    obstacles: list,
    slots: list[AvailabilitySlot] | None = None,
) -> tuple[CopingPlan, ...]:
    """One coping plan per (exercise day, obstacle) pair.

    Obstacles linked to an availability cover only the rules scheduled from
    it (falling back to every rule when that availability contributed no
    sessions); unlinked obstacles cover every rule.  Rules sharing a day share
    one coping plan so re-parsing the serialized plan reproduces the parents.
    """
    rules = list(rules)
    if not rules or not obstacles:
        return ()
    source_by_day: dict[Weekday, str] = {}
    for slot in slots or []:
        source_by_day.setdefault(slot.day, slot.source_entity_id)
    session_days = {r.day for r in rules}

    ordered_days: list[Weekday] = []
    for r in rules:
        if r.day not in ordered_days:
            ordered_days.append(r.day)

    coping: list[CopingPlan] = []
    for day in ordered_days:
        day_rules = [r for r in rules if r.day == day]
        for obstacle in obstacles:
            label, linked = _obstacle_payload(obstacle)
            if not label:
                continue
            if linked is not None:
                covered = {
                    r.id for r in rules if source_by_day.get(r.day) in linked
                } or {r.id for r in rules}
                if not any(r.id in covered for r in day_rules):
                    continue
            alt = _alternative_day(day, session_days)
            alternative = (
                f"Do the same exercises on {alt.label}"
                if alt is not None
                else "Do the same exercises later the same day"
            )
            coping.append(
                CopingPlan(
                    id=f"c{len(coping) + 1}",
                    parent_rule_ids=tuple(r.id for r in day_rules),
                    obstacle_clause=f"{label} on {day.label}",
                    alternative=alternative,
                )
            )
    return tuple(coping)


# --- full synthesis ----------------------------------------------------------


def _balance_advisory(selected: list[ExerciseEntry]) -> Advisory | None:
    cats = {e.category for e in selected}
    if len(cats) != 1:
        return None
    only = next(iter(cats))
    other = Category.STRENGTH if only is Category.CARDIO else Category.CARDIO
    return Advisory(
        "balance",
        f"Every selected exercise is {only.value}; consider adding a "
        f"{other.value} exercise to balance the week.",
    )


def synthesize(
    summary: PlanSummary,
    catalog: Catalog,
    config: SynthesisConfig = SynthesisConfig(),
    guideline_config: GuidelineConfig = GuidelineConfig(),
    extra_waivers: tuple[Waiver, ...] = (),
) -> SynthesisResult:
    """Compose expand -> choose days -> allocate -> coping, then validate."""
    if not summary.selected_exercise_row_ids:
        raise NoExercisesSelected("select at least one exercise first")
    selected = [catalog.get(rid) for rid in summary.selected_exercise_row_ids]
    slots = expand_availabilities(summary)
    selection = choose_days(
        slots,
        [e.intensity for e in selected],
        config,
        cyclic=guideline_config.week_is_cyclic,
    )
    situations: dict[Weekday, str] = {}
    for slot in slots:
        situations.setdefault(slot.day, slot.time_spec)
    allocation = allocate_amounts(
        list(selection.days),
        selected,
        config,
        situations,
        guideline_config.vigorous_multiplier,
    )
    coping = attach_coping_plans(allocation.rules, summary.obstacles, slots)
    plan = WeeklyPlan(allocation.rules, coping)

    waivers = list(extra_waivers)
    advisories: list[Advisory] = []
    if selection.conceded_pairs:
        pair_text = ", ".join(
            f"{a.label}/{b.label}" for a, b in selection.conceded_pairs
        )
        waivers.append(
            Waiver(
                WaiverKind.USER_FIXED_DAYS,
                note=f"availability leaves no rest day between {pair_text}",
                days=frozenset(d for pair in selection.conceded_pairs for d in pair),
            )
        )
        advisories.append(
            Advisory(
                "rest_concession",
                f"Scheduled back-to-back sessions ({pair_text}) because your "
                "availability allows no alternative.",
            )
        )
    if allocation.insufficient:
        advisories.append(
            Advisory(
                "insufficient_availability",
                "The available days cannot reach the weekly exercise target "
                "even at maximum session length; please share more available "
                "times.",
            )
        )
    balance = _balance_advisory(selected)
    if balance:
        advisories.append(balance)

    report = evaluate(plan, catalog, guideline_config, tuple(waivers))
    return SynthesisResult(plan, report, tuple(advisories), tuple(waivers))


# --- progression and repair --------------------------------------------------


def _round5(value: float) -> int:
    return int(5 * math.floor(value / 5 + 0.5))


def progression_step(plan: WeeklyPlan, config: SynthesisConfig = SynthesisConfig()) -> int:
    return _round5(effective_minutes(plan) * config.progression_fraction)


def apply_progression(
    plan: WeeklyPlan, config: SynthesisConfig = SynthesisConfig()
) -> WeeklyPlan:
    """Grow the weekly dose by 10% (rounded to 5-minute granularity).

    Extra minutes are distributed round-robin in 5-minute increments,
    preferring a moderate session for the final increment when only 5
    effective minutes remain, so the increase lands exactly whenever the mix
    of intensities allows it.
    """
    if not plan.rules:
        raise CapsSaturated("empty plan cannot progress")
    if all(r.amount_minutes >= config.hard_session_cap for r in plan.rules):
        raise CapsSaturated("every session is at the hard cap")
    step = progression_step(plan, config)
    if step == 0:
        return plan

    minutes = [r.amount_minutes for r in plan.rules]
    mults = [2 if r.intensity is Intensity.VIGOROUS else 1 for r in plan.rules]
    n = len(minutes)
    added = 0
    cursor = 0
    while added < step:
        candidates = [j for j in range(n) if minutes[j] < config.hard_session_cap]
        if not candidates:
            break
        ordered = [(cursor + k) % n for k in range(n)]
        pick = next(j for j in ordered if j in candidates)
        if step - added == 5 and mults[pick] != 1:
            moderate = next(
                (j for j in ordered if j in candidates and mults[j] == 1), None
            )
            if moderate is not None:
                pick = moderate
        minutes[pick] += 5
        added += 5 * mults[pick]
        cursor = (pick + 1) % n

    rules = tuple(
        PlanRule(
            id=r.id,
            day=r.day,
            situation=r.situation,
            exercise_row_id=r.exercise_row_id,
            exercise_name=r.exercise_name,
            amount_minutes=m,
            intensity=r.intensity,
        )
        for r, m in zip(plan.rules, minutes)
    )
    return WeeklyPlan(rules, plan.coping_plans)


def resolve_exercises(plan: WeeklyPlan, catalog: Catalog) -> WeeklyPlan:
    """Fill empty rule row_ids by (case-insensitive) name or keyword lookup."""
    by_name: dict[str, ExerciseEntry] = {}
    for entry in catalog.entries:
        by_name.setdefault(entry.name.lower(), entry)
        for kw in entry.alt_keywords:
            by_name.setdefault(kw.lower(), entry)
    rules = []
    for r in plan.rules:
        if r.exercise_row_id and r.exercise_row_id in catalog:
            rules.append(r)
            continue
        entry = by_name.get(r.exercise_name.lower())
        if entry is None:
            raise UnknownExercise(r.exercise_row_id or r.exercise_name)
        rules.append(
            PlanRule(
                id=r.id,
                day=r.day,
                situation=r.situation,
                exercise_row_id=entry.row_id,
                exercise_name=r.exercise_name,
                amount_minutes=r.amount_minutes,
                intensity=r.intensity,
            )
        )
    return WeeklyPlan(tuple(rules), plan.coping_plans)


@dataclass(frozen=True)
class RepairResult:
    plan: WeeklyPlan
    advisories: tuple[Advisory, ...]
    waivers: tuple[Waiver, ...]


def _extend_sessions(
    plan: WeeklyPlan, config: SynthesisConfig, vigorous_multiplier: int
) -> WeeklyPlan:
    minutes = [r.amount_minutes for r in plan.rules]
    mults = [
        vigorous_multiplier if r.intensity is Intensity.VIGOROUS else 1
        for r in plan.rules
    ]

    def eff() -> int:
        return sum(m * k for m, k in zip(minutes, mults))

    for cap in (config.soft_session_cap, config.hard_session_cap):
        while eff() < config.target_effective_minutes and any(
            m < cap for m in minutes
        ):
            minutes = [m + 5 if m < cap else m for m in minutes]
    rules = tuple(
        PlanRule(
            id=r.id,
            day=r.day,
            situation=r.situation,
            exercise_row_id=r.exercise_row_id,
            exercise_name=r.exercise_name,
            amount_minutes=m,
            intensity=r.intensity,
        )
        for r, m in zip(plan.rules, minutes)
    )
    return WeeklyPlan(rules, plan.coping_plans)


def _move_rules(plan: WeeklyPlan, from_day: Weekday, to_day: Weekday) -> WeeklyPlan:
    rules = tuple(
        PlanRule(
            id=r.id,
            day=to_day if r.day == from_day else r.day,
            situation=r.situation,
            exercise_row_id=r.exercise_row_id,
            exercise_name=r.exercise_name,
            amount_minutes=r.amount_minutes,
            intensity=r.intensity,
        )
        for r in plan.rules
    )
    return WeeklyPlan(rules, plan.coping_plans)


def repair(
    plan: WeeklyPlan,
    summary: PlanSummary,
    catalog: Catalog,
    config: SynthesisConfig = SynthesisConfig(),
    guideline_config: GuidelineConfig = GuidelineConfig(),
    extra_waivers: tuple[Waiver, ...] = (),
) -> RepairResult:
    """Minimally edit *plan* until it validates or the gaps are on record.

    Priority order: extend sessions for the amount, move (never delete) rules
    off adjacent days for rest, and flag one-sided category selections as an
    advisory.  Unfixable rest violations become fixed-days waivers.
    """
    if not plan.rules:
        raise UnrepairableWithinConstraints("plan has no rules")
    plan = resolve_exercises(plan, catalog)

    waivers = list(extra_waivers)
    advisories: list[Advisory] = []

    reduced = any(w.kind is WaiverKind.USER_REDUCED_AMOUNT for w in waivers)
    if (
        not reduced
        and effective_minutes(plan, guideline_config.vigorous_multiplier)
        < config.target_effective_minutes
    ):
        plan = _extend_sessions(plan, config, guideline_config.vigorous_multiplier)
        if (
            effective_minutes(plan, guideline_config.vigorous_multiplier)
            < config.target_effective_minutes
        ):
            advisories.append(
                Advisory(
                    "insufficient_availability",
                    "Sessions are at their caps but the weekly target is "
                    "still out of reach; more exercise days are needed.",
                )
            )

    try:
        allowed_days = {s.day for s in expand_availabilities(summary)}
    except NoAvailability:
        allowed_days = set(Weekday)

    cyclic = guideline_config.week_is_cyclic
    while True:
        pairs = _adjacent_pairs(exercise_days(plan), cyclic)
        uncovered = [p for p in pairs if not _pair_covered(p, tuple(waivers))]
        if not uncovered or not guideline_config.require_rest_gap:
            break
        pair = uncovered[0]
        move_day = pair[1]
        stay_days = exercise_days(plan) - {move_day}
        candidate = next(
            (
                d
                for d in Weekday
                if d in allowed_days
                and d not in exercise_days(plan)
                and not (_neighbors(d, cyclic) & stay_days)
            ),
            None,
        )
        if candidate is not None:
            plan = _move_rules(plan, move_day, candidate)
            continue
        waivers.append(
            Waiver(
                WaiverKind.USER_FIXED_DAYS,
                note=f"no free non-adjacent day to move the {move_day.label} session to",
                days=frozenset(pair),
            )
        )
        advisories.append(
            Advisory(
                "rest_concession",
                f"Sessions on {pair[0].label} and {pair[1].label} stay "
                "back-to-back; availability offers no alternative day.",
            )
        )

    present = {catalog.get(r.exercise_row_id).category for r in plan.rules}
    if len(present) == 1:
        only = next(iter(present))
        other = Category.STRENGTH if only is Category.CARDIO else Category.CARDIO
        advisories.append(
            Advisory(
                "balance",
                f"The plan only contains {only.value} exercises; consider "
                f"adding a {other.value} exercise.",
            )
        )

    return RepairResult(plan, tuple(advisories), tuple(waivers))
