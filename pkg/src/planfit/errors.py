"""Exception types shared across the package."""

from __future__ import annotations


class PlanfitError(Exception):
    """Base class for every error raised by this package."""


# --- catalog / retrieval ---------------------------------------------------


class MalformedRow(PlanfitError):
    def __init__(self, line: int, reason: str = ""):
        self.line = line
        self.reason = reason
        super().__init__(f"malformed catalog row at line {line}: {reason}".rstrip(": "))


class DuplicateRowId(PlanfitError):
    def __init__(self, row_id: str):
        self.row_id = row_id
        super().__init__(f"duplicate row_id {row_id!r}")


class UnknownIntensity(PlanfitError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown intensity {token!r}")


class EmptyText(PlanfitError):
    def __init__(self, text: str = ""):
        self.text = text
        super().__init__("nothing embeddable in input text")


class ProviderUnavailable(PlanfitError):
    pass


class DimensionMismatch(PlanfitError):
    def __init__(self, a: int, b: int):
        self.a = a
        self.b = b
        super().__init__(f"embedding dims differ: {a} vs {b}")


class ZeroVector(PlanfitError):
    pass


class EmptyQuery(PlanfitError):
    pass


class IndexNotBuilt(PlanfitError):
    pass


# --- plan model ------------------------------------------------------------


class NoPlanFound(PlanfitError):
    pass


class UnparseableAmount(PlanfitError):
    def __init__(self, text: str):
        self.text = text
        super().__init__(f"cannot parse amount {text!r}")


class MissingDay(PlanfitError):
    def __init__(self, if_text: str):
        self.if_text = if_text
        super().__init__(f"no weekday in IF clause {if_text!r}")


class InvalidPlan(PlanfitError):
    pass


# --- plan summary ----------------------------------------------------------


class UnknownTarget(PlanfitError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown edit target {token!r}")


class UnknownId(PlanfitError):
    def __init__(self, target: str, entity_id: str):
        self.target = target
        self.entity_id = entity_id
        super().__init__(f"no {target} entity with id {entity_id!r}")


class MalformedCommand(PlanfitError):
    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"malformed command at index {index}: {reason}")


class NoArrayFound(PlanfitError):
    pass


class UnknownExercise(PlanfitError):
    def __init__(self, row_id: str):
        self.row_id = row_id
        super().__init__(f"no exercise with row_id {row_id!r}")


# --- synthesis -------------------------------------------------------------


class NoAvailability(PlanfitError):
    pass


class NoExercisesSelected(PlanfitError):
    pass


class CapsSaturated(PlanfitError):
    pass


class UnrepairableWithinConstraints(PlanfitError):
    pass


# --- orchestration / service ----------------------------------------------


class ScriptExhausted(PlanfitError):
    def __init__(self, stage: str):
        self.stage = stage
        super().__init__(f"scripted replies exhausted for stage {stage}")


class NoPlanYet(PlanfitError):
    pass


class SessionBusy(PlanfitError):
    pass


class SessionComplete(PlanfitError):
    pass


class UnknownSession(PlanfitError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"no session {session_id!r}")


class PersonaRunError(PlanfitError):
    def __init__(self, persona_id: str, reason: str, transcript: list | None = None):
        self.persona_id = persona_id
        self.reason = reason
        self.transcript = transcript or []
        super().__init__(f"persona {persona_id} failed: {reason}")
