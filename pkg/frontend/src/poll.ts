// 1-second event polling for dashboard sync, paused while a turn is in flight.

import type { PlanfitApi } from "./api.js";

export class EventPoller {
  private lastSeq = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private paused = false;
  private ticking = false;

  constructor(
    private api: PlanfitApi,
    private sessionId: string,
    private onNewEvents: () => Promise<void> | void,
    private intervalMs = 1000,
  ) {}

  start(): void {
    if (this.timer) return;
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer) clearInterval(this.timer);
    this.timer = null;
  }

  pause(): void {
    this.paused = true;
  }

  resume(): void {
    this.paused = false;
  }

  get isPaused(): boolean {
    return this.paused;
  }

  async tick(): Promise<boolean> {
    if (this.paused || this.ticking) return false;
    this.ticking = true;
    try {
      const { events } = await this.api.events(this.sessionId, this.lastSeq);
      if (!events.length) return false;
      this.lastSeq = events[events.length - 1].seq;
      await this.onNewEvents();
      return true;
    } catch {
      return false; // transient polling errors never surface to the user
    } finally {
      this.ticking = false;
    }
  }

  /** Adopt the server's current sequence without firing the callback. */
  markCaughtUp(seq: number): void {
    this.lastSeq = Math.max(this.lastSeq, seq);
  }
}
