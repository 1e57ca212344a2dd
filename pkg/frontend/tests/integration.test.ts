// Live-service acceptance: spawns the real Python backend and drives one
// persona script through the UI controller. After every scripted action the
// rendered dashboard state must deep-equal fresh GET /summary + GET /plan,
// and the selection-click and "more"-modal paths must round-trip.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { PlanfitApi } from "../src/api.js";
import { AppController } from "../src/app.js";

const PORT = 8600 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, "..", "..");

let server: ChildProcess;
let dataDir: string;
let api: PlanfitApi;
let app: AppController;

async function waitForService(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/docs`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolveSleep) => setTimeout(resolveSleep, 250));
  }
  throw new Error(`service did not come up on ${BASE}: ${lastError}`);
}

/** The rendered snapshot must equal what fresh GETs return. */
async function expectDashboardConsistent(): Promise<void> {
  const summary = await api.summary(app.sessionId!);
  const plan = await api.plan(app.sessionId!);
  expect(app.view?.summary).toEqual(summary);
  expect(app.view?.plan ?? null).toEqual(plan);
}

async function send(text: string): Promise<void> {
  const outcome = await app.sendMessage(text);
  expect(outcome.ok).toBe(true);
  await expectDashboardConsistent();
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "planfit-ui-"));
  server = spawn(
    "python3",
    ["-m", "planfit.cli", "serve", "--port", String(PORT), "--data-dir", dataDir],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitForService();
  api = new PlanfitApi(BASE);
  app = new AppController(api, () => {}, 100000);
}, 30000);

afterAll(() => {
  app?.stop();
  server?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

describe("live service round-trip (persona P4)", () => {
  it("runs the scripted conversation with a consistent dashboard", async () => {
    await app.createSession("P4");
    expect(app.chat[0].role).toBe("agent");
    await expectDashboardConsistent();

    await send("Weight loss");
    await send("Overcome exercise shortage since pandemic");
    expect(app.view?.summary.goals.map((g) => g.label)).toEqual([
      "Weight loss",
      "Overcome exercise shortage since pandemic",
    ]);
    await send("Nothing else.");
    await send("Thu--Sun after 7 pm");
    await send("Nothing else.");
    await send("Don't want to exercise on rainy days");

    // recommendation stage reached: five chips, none selected yet
    expect(app.view?.recommendations).toHaveLength(5);
    expect(app.view?.recommendations.every((r) => !r.selected)).toBe(true);
    expect(app.view?.planCards).toEqual([]);
  }, 30000);

  it("selection click toggles the chip state from the server", async () => {
    const first = app.view!.recommendations[0];
    await app.selectExercise(first.rowId);
    const chip = app.view!.recommendations.find((r) => r.rowId === first.rowId)!;
    expect(chip.selected).toBe(true);
    expect(app.view!.summary.selected_exercise_row_ids).toContain(first.rowId);
    await expectDashboardConsistent();

    // clicking again stays selected (server selection is idempotent)
    await app.selectExercise(first.rowId);
    expect(
      app.view!.summary.selected_exercise_row_ids.filter((id) => id === first.rowId),
    ).toHaveLength(1);
    await expectDashboardConsistent();
  }, 15000);

  it("the more button round-trips the catalog detail", async () => {
    const first = app.view!.recommendations[0];
    const detail = await app.showMore(first.rowId);
    expect(detail.row_id).toBe(first.rowId);
    expect(detail.name).toBe(first.name);
    expect(detail.description.length).toBeGreaterThan(0);
    expect(detail.muscles.length).toBeGreaterThan(0);
    expect(app.modal?.row_id).toBe(first.rowId);
    app.closeModal();
    expect(app.modal).toBeNull();
  }, 15000);

  it("typed selection produces a validated plan with verbatim badges", async () => {
    await send("I'd like running and squats too.");
    expect(app.view!.planCards.length).toBeGreaterThanOrEqual(2);
    const report = app.view!.plan!.report;
    expect(app.view!.badges).toEqual({
      effectiveMinutes: report.effective_minutes,
      amountOk: report.amount_ok,
      balanceOk: report.balance_ok,
      restOk: report.rest_ok,
    });
    expect(report.amount_ok).toBe(true);
    // the rainy-day obstacle appears as nested coping cards
    const coping = app.view!.planCards.flatMap((c) => c.coping);
    expect(coping.some((c) => c.obstacleClause.includes("rainy"))).toBe(true);
  }, 30000);

  it("iteration wraps up and the dashboard stays consistent", async () => {
    await send("I was satisfied with it");
    await send("yes please");
    await send("no, that's all");
    const history = await fetch(`${BASE}/sessions/${app.sessionId}/history`).then((r) =>
      r.json(),
    );
    expect(history.at(-1).role).toBe("agent");
    await expectDashboardConsistent();
  }, 30000);

  it("polling picks up server-side changes", async () => {
    // a second browser tab selects an exercise; our poller must notice
    const other = app.view!.recommendations.find((r) => !r.selected)!;
    await api.select(app.sessionId!, other.rowId);
    const ticked = await app.poller!.tick();
    expect(ticked).toBe(true);
    const chip = app.view!.recommendations.find((r) => r.rowId === other.rowId)!;
    expect(chip.selected).toBe(true);
    await expectDashboardConsistent();
  }, 15000);
});
