// Dashboard view state derived purely from API payloads. No guideline math,
// no domain logic: the server's summary/plan/report JSON is kept verbatim and
// only regrouped for rendering (coping cards nested under their parent rules).

import type {
  AdvisoryJson,
  CopingPlanJson,
  GuidelineReportJson,
  PlanStateJson,
  SummaryJson,
} from "./api.js";

export interface RecommendationView {
  rowId: string;
  name: string;
  rationale: string;
  selected: boolean;
}

export interface CopingCardView {
  id: string;
  obstacleClause: string;
  alternative: string;
}

export interface PlanCardView {
  ruleId: string;
  day: string;
  situation: string;
  exercise: string;
  amountMinutes: number;
  intensity: string;
  coping: CopingCardView[];
}

export interface GuidelineBadges {
  effectiveMinutes: number;
  amountOk: boolean;
  balanceOk: boolean;
  restOk: boolean;
}

export interface DashboardViewState {
  summary: SummaryJson; // verbatim server snapshot
  plan: PlanStateJson | null; // verbatim server snapshot
  recommendations: RecommendationView[];
  planCards: PlanCardView[];
  badges: GuidelineBadges | null;
  advisories: AdvisoryJson[];
  revision: number;
}

function nestCoping(ruleId: string, coping: CopingPlanJson[]): CopingCardView[] {
  return coping
    .filter((c) => c.parent_rule_ids.includes(ruleId))
    .map((c) => ({
      id: c.id,
      obstacleClause: c.obstacle_clause,
      alternative: c.alternative,
    }));
}

function badgesFrom(report: GuidelineReportJson): GuidelineBadges {
  return {
    effectiveMinutes: report.effective_minutes,
    amountOk: report.amount_ok,
    balanceOk: report.balance_ok,
    restOk: report.rest_ok,
  };
}

export function viewStateFrom(
  summary: SummaryJson,
  plan: PlanStateJson | null,
): DashboardViewState {
  const selected = new Set(summary.selected_exercise_row_ids);
  const recommendations = summary.recommended_exercises.map((e) => ({
    rowId: String(e.exercise_row_id ?? ""),
    name: String(e.exercise_name ?? ""),
    rationale: String(e.rationale ?? ""),
    selected: selected.has(String(e.exercise_row_id ?? "")),
  }));
  const planCards = (plan?.plan.rules ?? []).map((rule) => ({
    ruleId: rule.id,
    day: rule.day,
    situation: rule.situation,
    exercise: rule.exercise_name,
    amountMinutes: rule.amount_minutes,
    intensity: rule.intensity,
    coping: nestCoping(rule.id, plan?.plan.coping_plans ?? []),
  }));
  return {
    summary,
    plan,
    recommendations,
    planCards,
    badges: plan ? badgesFrom(plan.report) : null,
    advisories: plan?.advisories ?? [],
    revision: summary.revision,
  };
}
