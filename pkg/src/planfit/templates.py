"""English reply templates and instruction text for the template provider.

Tone rules carried by every template: empathize with what the user just said
and end in a question, except when wrapping up.
"""

from __future__ import annotations

from .plan import WeeklyPlan, serialize_plan_xml
from .summary import PlanSummary
from .vocab import Category

GREETING = (
    "Hi {name}! I'm here to help you put together a weekly exercise plan that "
    "fits your life. To start, what are your main goals for exercising?"
)

GOALS_FOLLOW_UP = (
    "Got it, {latest} sounds like a great goal. Is there anything else you "
    "want to get out of exercising?"
)

GOALS_REASK = "No rush! What would you like to achieve by exercising?"

AVAILABILITY_ENTRY = (
    "Thanks, those goals give us a clear direction. When during the week are "
    "you usually free to exercise?"
)

AVAILABILITY_FOLLOW_UP = (
    "Noted: {latest}. Are there any other times that could work for you?"
)

AVAILABILITY_REASK = (
    "Whenever suits you is fine. When during the week could you fit in some exercise?"
)

OBSTACLE_QUESTION = (
    "Let's think about \"{availability}\". Will your work or study schedule, "
    "or anything else you can foresee, make it hard to exercise then?"
)

RECOMMEND_INTRO = (
    "Thanks for sharing all of that! Based on your goals and constraints, "
    "here are some exercises that could fit:"
)

RECOMMEND_QUESTION = (
    "Which of these would you like to include in your plan? You can also ask "
    "for other options."
)

SELECTION_REASK = (
    "No problem. Which exercises would you like to include? You can pick from "
    "the list or name any exercise you enjoy."
)

BALANCE_QUESTION = (
    "Nice choices! I notice everything you picked is {only} exercise. Would "
    "you like to add a {other} exercise to balance your week?"
)

PLAN_INTRO = "Here is your weekly plan:"

PLAN_QUESTION = "Are you happy with this plan, or would you like to change anything?"

ITERATION_ENTRY = (
    "Welcome back, {name}! Did you manage to follow last week's plan, and "
    "were you satisfied with it?"
)

PROGRESSION_OFFER = (
    "That's great to hear! To keep building up gradually, shall I extend your "
    "sessions by about {step} effective minutes this week?"
)

PROGRESSION_APPLIED = (
    "Done! I've extended your sessions a little. Here is the updated plan:"
)

PROGRESSION_DECLINED = (
    "No problem, we'll keep the plan as it is. Is there anything else you'd "
    "like to adjust?"
)

PROGRESSION_SATURATED = (
    "Your sessions are already at their maximum length, so let's keep the "
    "current plan. Is there anything else you'd like to adjust?"
)

DISSATISFIED_QUESTION = (
    "I'm sorry the plan didn't fit well. What would you like to change: the "
    "days, the exercises, or the amounts?"
)

REPLAN_INTRO = "Thanks for the update. Here is your revised plan:"

ANYTHING_ELSE = "Is there anything else you'd like to adjust?"

WRAP_UP = (
    "Perfect. Enjoy your week, {name}, and come back any time you want to "
    "adjust the plan. Good luck!"
)

REDIRECT = (
    "I may not be the best help with that, but I'm happy to keep working on "
    "your exercise plan. Is there anything about it you'd like to change?"
)

APOLOGY = (
    "I'm sorry, I'm having trouble responding right now. Could you send that "
    "again in a moment?"
)

INSUFFICIENT_AVAILABILITY = (
    "One note: with the current availability I couldn't reach the recommended "
    "weekly amount even with longer sessions. Could you share any other times "
    "you might be free?"
)

_STAGE_TASKS = {
    "GatherGoals": (
        "Collect the user's exercise goals step by step; after each answer, "
        "ask if there is anything to add."
    ),
    "GatherAvailability": (
        "Collect the user's available times for exercise; after each answer, "
        "ask if there is anything to add."
    ),
    "GatherObstacles": (
        "For each availability, in a separate message, ask about anticipated "
        "obstacles, offering examples based on the time of day."
    ),
    "Recommend": (
        "Recommend up to five retrieved exercises in <Output> blocks with "
        "<Exercise> and <RowID> tags plus a short rationale; ask the user to "
        "choose."
    ),
    "AwaitSelection": (
        "Help the user settle on exercises; if every selected exercise is one "
        "category, ask whether to add the other type."
    ),
    "Plan": (
        "Return the weekly plan as IF-THEN rules in <If>/<Then>/<Exercise>/"
        "<Amount> tags (intensity inside the amount), with coping plans in "
        "<CopingPlan> tags; ask if the user is satisfied."
    ),
    "Iterate": (
        "Ask whether the user followed the plan and was satisfied; offer to "
        "extend the time if satisfied, otherwise collect what to revise."
    ),
    "Done": "Wrap up the conversation warmly without asking a question.",
}


def build_instruction(stage: str, summary: PlanSummary, user_name: str) -> str:
    """Task description plus current planning status, for the response generator."""
    task = _STAGE_TASKS.get(stage, "Continue assisting with the exercise plan.")
    return (
        f"You are a helpful, supportive assistant helping {user_name} establish "
        "an exercise plan for the following week. Empathize with the previous "
        "message and reply as a question, except when wrapping up.\n"
        f"Current task: {task}\n"
        f"Planning status: {summary.to_json_str()}"
    )


def recommendation_block(items: list) -> str:
    lines = [
        "<Output><Exercise>{}</Exercise> (<RowID>{}</RowID>): {}</Output>".format(
            item.exercise_name, item.exercise_row_id, item.rationale
        )
        for item in items
    ]
    return "\n".join(lines)


def plan_message(plan: WeeklyPlan, intro: str = PLAN_INTRO, question: str = PLAN_QUESTION) -> str:
    return f"{intro}\n{serialize_plan_xml(plan)}\n{question}"


def balance_question(only: Category) -> str:
    other = Category.STRENGTH if only is Category.CARDIO else Category.CARDIO
    return BALANCE_QUESTION.format(only=only.value, other=other.value)
