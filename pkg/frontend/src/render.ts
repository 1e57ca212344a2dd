// Pure HTML-string renderers for the dashboard and chat. Kept DOM-free so the
// exact rendered output is testable in node.

import type { ExerciseDetail } from "./api.js";
import type { DashboardViewState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface ChatMessage {
  role: "agent" | "user";
  text: string;
}

export function renderChat(messages: ChatMessage[]): string {
  return messages
    .map(
      (m) =>
        `<div class="msg msg-${m.role}"><span class="who">${m.role}</span>` +
        `<p>${escapeHtml(m.text).replace(/\n/g, "<br>")}</p></div>`,
    )
    .join("\n");
}

function chip(label: string, id: string): string {
  return `<li class="chip" data-id="${escapeHtml(id)}">${escapeHtml(label)}</li>`;
}

export function renderConstraints(view: DashboardViewState): string {
  const s = view.summary;
  const section = (title: string, items: string[]): string =>
    `<section class="card"><h3>${title}</h3><ul>` +
    (items.length ? items.join("") : '<li class="empty">none yet</li>') +
    "</ul></section>";
  return [
    section(
      "Goals",
      s.goals.map((g) => chip(String(g.label ?? ""), g.id)),
    ),
    section(
      "Availability",
      s.availabilities.map((a) =>
        chip([a.day_spec, a.time_spec].filter(Boolean).join(" "), a.id),
      ),
    ),
    section(
      "Obstacles",
      s.obstacles.map((o) => chip(String(o.label ?? ""), o.id)),
    ),
  ].join("\n");
}

export function renderRecommendations(view: DashboardViewState): string {
  if (!view.recommendations.length) {
    return '<section class="card"><h3>Recommended exercises</h3><p class="empty">no recommendations yet</p></section>';
  }
  const items = view.recommendations
    .map(
      (r) =>
        `<li class="rec${r.selected ? " selected" : ""}" data-row-id="${escapeHtml(r.rowId)}">` +
        `<button class="select-btn" data-row-id="${escapeHtml(r.rowId)}">` +
        `${escapeHtml(r.name)}</button>` +
        `<span class="rationale">${escapeHtml(r.rationale)}</span>` +
        `<button class="more-btn" data-row-id="${escapeHtml(r.rowId)}">more</button></li>`,
    )
    .join("\n");
  return `<section class="card"><h3>Recommended exercises</h3><ul class="recs">${items}</ul></section>`;
}

export function renderBadges(view: DashboardViewState): string {
  if (!view.badges) return "";
  const b = view.badges;
  const badge = (name: string, ok: boolean): string =>
    `<span class="badge ${ok ? "ok" : "violated"}">${name}: ${ok ? "ok" : "check"}</span>`;
  return (
    `<div class="badges"><span class="badge total">${b.effectiveMinutes} effective min</span>` +
    badge("amount", b.amountOk) +
    badge("balance", b.balanceOk) +
    badge("rest", b.restOk) +
    "</div>"
  );
}

export function renderPlan(view: DashboardViewState): string {
  if (!view.planCards.length) {
    return '<section class="card"><h3>Weekly plan</h3><p class="empty">no plan yet</p></section>';
  }
  const cards = view.planCards
    .map((card) => {
      const coping = card.coping
        .map(
          (c) =>
            `<li class="coping"><span class="if">IF ${escapeHtml(c.obstacleClause)}</span>` +
            `<span class="then">THEN ${escapeHtml(c.alternative)}</span></li>`,
        )
        .join("");
      const copingBlock = coping
        ? `<details class="coping-list"><summary>coping plans (${card.coping.length})</summary><ul>${coping}</ul></details>`
        : "";
      return (
        `<article class="plan-card" data-rule-id="${escapeHtml(card.ruleId)}">` +
        `<header><span class="if">IF ${escapeHtml(card.day)} ${escapeHtml(card.situation)}</span></header>` +
        `<p class="then">THEN ${escapeHtml(card.exercise)} for ` +
        `<strong>${card.amountMinutes} minutes</strong> at ${escapeHtml(card.intensity)} intensity</p>` +
        copingBlock +
        "</article>"
      );
    })
    .join("\n");
  const advisories = view.advisories
    .map((a) => `<p class="advisory">${escapeHtml(a.message)}</p>`)
    .join("");
  return (
    `<section class="card"><h3>Weekly plan</h3>${renderBadges(view)}` +
    `${cards}${advisories}</section>`
  );
}

export function renderDashboard(view: DashboardViewState): string {
  return [
    renderConstraints(view),
    renderRecommendations(view),
    renderPlan(view),
    `<footer class="revision">revision ${view.revision}</footer>`,
  ].join("\n");
}

export function renderExerciseModal(detail: ExerciseDetail): string {
  return (
    `<div class="modal" data-row-id="${escapeHtml(detail.row_id)}">` +
    `<h3>${escapeHtml(detail.name)}</h3>` +
    `<p class="meta">${escapeHtml(detail.intensity)} intensity, ${escapeHtml(detail.category)}</p>` +
    `<p class="description">${escapeHtml(detail.description)}</p>` +
    `<p class="muscles">${escapeHtml(detail.muscles)}</p>` +
    `<button class="close-btn">close</button></div>`
  );
}

export function renderErrorBanner(kind: "retry" | "busy" | "network", message: string): string {
  const action =
    kind === "busy"
      ? ""
      : '<button class="retry-btn">retry</button>';
  return `<div class="banner banner-${kind}">${escapeHtml(message)}${action}</div>`;
}
