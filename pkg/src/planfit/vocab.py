"""Shared vocabulary: weekdays, intensities, exercise categories, day-token scanning."""

from __future__ import annotations

import enum
import re


class Weekday(enum.IntEnum):
    MONDAY = 0
    TUESDAY = 1
    WEDNESDAY = 2
    THURSDAY = 3
    FRIDAY = 4
    SATURDAY = 5
    SUNDAY = 6

    @property
    def label(self) -> str:
        return self.name.capitalize()

    def next(self, step: int = 1) -> "Weekday":
        return Weekday((int(self) + step) % 7)

    @staticmethod
    def cyclic_distance(a: "Weekday", b: "Weekday") -> int:
        d = abs(int(a) - int(b))
        return min(d, 7 - d)


class Intensity(str, enum.Enum):
    MODERATE = "moderate"
    VIGOROUS = "vigorous"


class Category(str, enum.Enum):
    CARDIO = "cardio"
    STRENGTH = "strength"


WEEKDAY_ORDER: tuple[Weekday, ...] = tuple(Weekday)

_DAY_ALIASES: dict[str, Weekday] = {
    "monday": Weekday.MONDAY,
    "mon": Weekday.MONDAY,
    "tuesday": Weekday.TUESDAY,
    "tue": Weekday.TUESDAY,
    "tues": Weekday.TUESDAY,
    "wednesday": Weekday.WEDNESDAY,
    "wed": Weekday.WEDNESDAY,
    "thursday": Weekday.THURSDAY,
    "thu": Weekday.THURSDAY,
    "thur": Weekday.THURSDAY,
    "thurs": Weekday.THURSDAY,
    "friday": Weekday.FRIDAY,
    "fri": Weekday.FRIDAY,
    "saturday": Weekday.SATURDAY,
    "sat": Weekday.SATURDAY,
    "sunday": Weekday.SUNDAY,
    "sun": Weekday.SUNDAY,
}

_DAY_TOKEN_RE = re.compile(
    r"\b(" + "|".join(sorted(_DAY_ALIASES, key=len, reverse=True)) + r")\b",
    re.IGNORECASE,
)


def find_day_tokens(text: str) -> list[tuple[Weekday, tuple[int, int]]]:
    """All weekday tokens in *text* with their character spans, in order."""
    return [
        (_DAY_ALIASES[m.group(1).lower()], m.span())
        for m in _DAY_TOKEN_RE.finditer(text)
    ]


def first_day_token(text: str) -> Weekday | None:
    m = _DAY_TOKEN_RE.search(text)
    return _DAY_ALIASES[m.group(1).lower()] if m else None


def strip_first_day_token(text: str) -> str:
    """Remove the first weekday token (plus adjoining separators) from *text*."""
    m = _DAY_TOKEN_RE.search(text)
    if not m:
        return text.strip()
    out = text[: m.start()] + " " + text[m.end() :]
    out = re.sub(r"^\s*[,:-]\s*", "", out.strip())
    return re.sub(r"\s+", " ", out).strip()


def weekday_range(start: Weekday, end: Weekday) -> list[Weekday]:
    """Inclusive range of days from *start* to *end*, wrapping past Sunday."""
    days = [start]
    d = start
    while d != end:
        d = d.next()
        days.append(d)
    return days
