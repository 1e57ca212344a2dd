"""Conversational weekly exercise planning: catalog retrieval, dialogue-driven
constraint gathering, and guideline-checked implementation-intention plans."""

from .catalog import (
    Catalog,
    EmbeddingVector,
    ExerciseEntry,
    RetrievalConfig,
    cosine_similarity,
    embed_text,
    load_bundled_catalog,
    load_catalog,
    retrieve_top_k,
)
from .guidelines import (
    GuidelineConfig,
    GuidelineReport,
    Waiver,
    WaiverKind,
    check_amount,
    check_balance,
    check_rest,
    evaluate,
)
from .plan import (
    CopingPlan,
    PlanRule,
    RecommendationItem,
    WeeklyPlan,
    effective_minutes,
    exercise_days,
    parse_plan_xml,
    parse_recommendations_xml,
    serialize_plan_xml,
)
from .summary import (
    EditCommand,
    PlanSummary,
    SummaryEntity,
    apply_edits,
    parse_commands_json,
    select_exercise,
)
from .synthesis import (
    Advisory,
    AvailabilitySlot,
    SynthesisConfig,
    apply_progression,
    attach_coping_plans,
    allocate_amounts,
    choose_days,
    expand_availabilities,
    repair,
    synthesize,
)
from .vocab import Category, Intensity, Weekday

__version__ = "0.1.0"
