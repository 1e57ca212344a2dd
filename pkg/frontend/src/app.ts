// Headless UI controller: owns session state, the send queue, and dashboard
// refreshes. The DOM layer (main.ts) only renders what this emits and routes
// clicks back in, so every behavior here is testable without a browser.

import { ApiError, PlanfitApi } from "./api.js";
import type { ExerciseDetail, PlanStateJson } from "./api.js";
import { EventPoller } from "./poll.js";
import type { ChatMessage } from "./render.js";
import { viewStateFrom } from "./state.js";
import type { DashboardViewState } from "./state.js";

export interface Banner {
  kind: "retry" | "busy" | "network";
  message: string;
}

export interface SendOutcome {
  ok: boolean;
  /** input to restore into the text box when the send failed */
  preservedInput?: string;
}

export class AppController {
  sessionId: string | null = null;
  chat: ChatMessage[] = [];
  view: DashboardViewState | null = null;
  modal: ExerciseDetail | null = null;
  banner: Banner | null = null;
  inFlight = false;
  poller: EventPoller | null = null;
  private pendingSelections: string[] = [];

  constructor(
    private api: PlanfitApi,
    private onChange: () => void = () => {},
    private pollIntervalMs = 1000,
  ) {}

  async createSession(userName: string): Promise<void> {
    const { session_id, greeting } = await this.api.createSession(userName);
    this.sessionId = session_id;
    this.chat = [{ role: "agent", text: greeting }];
    await this.refresh();
    this.poller = new EventPoller(
      this.api,
      session_id,
      () => this.refresh(),
      this.pollIntervalMs,
    );
    this.poller.start();
    this.onChange();
  }

  /** Replace the dashboard from fresh GETs; the view never drifts from the server. */
  async refresh(): Promise<void> {
    if (!this.sessionId) return;
    const summary = await this.api.summary(this.sessionId);
    const plan = await this.api.plan(this.sessionId);
    this.view = viewStateFrom(summary, plan);
    this.onChange();
  }

  async sendMessage(text: string): Promise<SendOutcome> {
    if (!this.sessionId || this.inFlight || !text.trim()) {
      return { ok: false, preservedInput: text };
    }
    this.inFlight = true;
    this.banner = null;
    this.poller?.pause();
    this.onChange();
    try {
      const response = await this.api.sendMessage(this.sessionId, text);
      this.chat.push({ role: "user", text });
      this.chat.push({ role: "agent", text: response.reply });
      this.view = viewStateFrom(response.summary, response.plan);
      return { ok: true };
    } catch (err) {
      if (err instanceof ApiError && err.busy) {
        this.banner = { kind: "busy", message: "Another turn is still running; try again in a moment." };
      } else if (err instanceof ApiError && err.providerDown) {
        this.banner = { kind: "retry", message: "The assistant is unavailable right now. Retry?" };
      } else {
        this.banner = { kind: "network", message: "Could not reach the service. Retry?" };
      }
      return { ok: false, preservedInput: text };
    } finally {
      this.inFlight = false;
      this.poller?.resume();
      await this.drainPendingSelections();
      this.onChange();
    }
  }

  /** Chip click. During an in-flight turn the click is queued, not dropped. */
  async selectExercise(rowId: string): Promise<void> {
    if (!this.sessionId) return;
    if (this.inFlight) {
      if (!this.pendingSelections.includes(rowId)) this.pendingSelections.push(rowId);
      return;
    }
    try {
      const { summary } = await this.api.select(this.sessionId, rowId);
      // chip state comes from the server response, never flipped locally
      this.view = viewStateFrom(summary, this.view?.plan ?? null);
    } catch (err) {
      if (err instanceof ApiError && err.busy) {
        this.pendingSelections.push(rowId);
      } else {
        this.banner = { kind: "network", message: "Selection failed. Retry?" };
      }
    }
    this.onChange();
  }

  private async drainPendingSelections(): Promise<void> {
    const queued = this.pendingSelections.splice(0);
    for (const rowId of queued) {
      await this.selectExercise(rowId);
    }
  }

  async showMore(rowId: string): Promise<ExerciseDetail> {
    const detail = await this.api.exercise(rowId);
    this.modal = detail;
    this.onChange();
    return detail;
  }

  closeModal(): void {
    this.modal = null;
    this.onChange();
  }

  dismissBanner(): void {
    this.banner = null;
    this.onChange();
  }

  get planSnapshot(): PlanStateJson | null {
    return this.view?.plan ?? null;
  }

  stop(): void {
    this.poller?.stop();
  }
}
