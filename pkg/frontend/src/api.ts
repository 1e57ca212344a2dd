// Typed client for the planfit HTTP service. The UI consumes these endpoints
// only; every piece of dashboard state originates here.

export interface SummaryEntity {
  id: string;
  label?: string;
  day_spec?: string;
  time_spec?: string;
  exercise_row_id?: string;
  exercise_name?: string;
  rationale?: string;
  [key: string]: unknown;
}

export interface SummaryJson {
  goals: SummaryEntity[];
  availabilities: SummaryEntity[];
  obstacles: SummaryEntity[];
  recommended_exercises: SummaryEntity[];
  selected_exercise_row_ids: string[];
  implementation_intentions: SummaryEntity[];
  revision: number;
}

export interface PlanRuleJson {
  id: string;
  day: string;
  situation: string;
  exercise_row_id: string;
  exercise_name: string;
  amount_minutes: number;
  intensity: string;
}

export interface CopingPlanJson {
  id: string;
  parent_rule_ids: string[];
  obstacle_clause: string;
  alternative: string;
}

export interface GuidelineReportJson {
  effective_minutes: number;
  amount_ok: boolean;
  categories_present: string[];
  balance_ok: boolean;
  rest_ok: boolean;
  violating_day_pairs: string[][];
  waivers: { kind: string; note: string; days?: string[] }[];
}

export interface AdvisoryJson {
  kind: string;
  message: string;
}

export interface PlanStateJson {
  plan: { rules: PlanRuleJson[]; coping_plans: CopingPlanJson[] };
  report: GuidelineReportJson;
  advisories: AdvisoryJson[];
}

export interface MessageResponse {
  session_id: string;
  reply: string;
  stage: string;
  summary: SummaryJson;
  plan: PlanStateJson | null;
  revision: number;
}

export interface ExerciseDetail {
  row_id: string;
  name: string;
  alt_keywords: string[];
  intensity: string;
  description: string;
  muscles: string;
  category: string;
}

export interface EventJson {
  session_id: string;
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
  timestamp: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get busy(): boolean {
    return this.status === 409;
  }

  get providerDown(): boolean {
    return this.status === 502;
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: unknown };
      if (body.detail !== undefined) detail = JSON.stringify(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class PlanfitApi {
  constructor(
    public baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson<T>(r));
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.url(path)).then((r) => asJson<T>(r));
  }

  createSession(userName: string): Promise<{ session_id: string; greeting: string }> {
    return this.post("/sessions", { user_name: userName });
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.post(`/sessions/${sessionId}/messages`, { text });
  }

  select(sessionId: string, rowId: string): Promise<{ summary: SummaryJson }> {
    return this.post(`/sessions/${sessionId}/selection`, { row_id: rowId });
  }

  summary(sessionId: string): Promise<SummaryJson> {
    return this.get(`/sessions/${sessionId}/summary`);
  }

  plan(sessionId: string): Promise<PlanStateJson | null> {
    return this.get<PlanStateJson>(`/sessions/${sessionId}/plan`).catch((err) => {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    });
  }

  exercise(rowId: string): Promise<ExerciseDetail> {
    return this.get(`/exercises/${rowId}`);
  }

  events(sessionId: string, since: number): Promise<{ events: EventJson[] }> {
    return this.get(`/sessions/${sessionId}/events?since=${since}`);
  }

  beginIteration(sessionId: string): Promise<MessageResponse> {
    return this.post(`/sessions/${sessionId}/iteration`, {});
  }
}
