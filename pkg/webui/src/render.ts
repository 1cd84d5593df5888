/** Pure HTML renderers for the explorer.
 *
 * Every function maps state to a string; no DOM access, so the whole view
 * layer is testable in plain node. Probabilities and deltas are formatted
 * from service responses verbatim, never recomputed.
 */

import type { PredictRequest, PredictResponse, RoleName } from "./api.js";
import type { SessionState } from "./state.js";

export interface LegendEntry {
  role: RoleName;
  color: string;
}

/** The eight substantive roles plus None, in display order. */
export const ROLE_LEGEND: readonly LegendEntry[] = [
  { role: "Fact", color: "#7fb3d5" },
  { role: "Issue", color: "#f5b041" },
  { role: "Argument", color: "#c39bd3" },
  { role: "Statute", color: "#76d7c4" },
  { role: "Precedent", color: "#f1948a" },
  { role: "RatioOfDecision", color: "#f7dc6f" },
  { role: "RulingByLowerCourt", color: "#aab7b8" },
  { role: "RulingByPresentCourt", color: "#82e0aa" },
  { role: "None", color: "#d7dbdd" },
];

const ROLE_COLOR: ReadonlyMap<RoleName, string> = new Map(
  ROLE_LEGEND.map((entry) => [entry.role, entry.color]),
);

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderLegend(): string {
  const items = ROLE_LEGEND.map(
    (entry) =>
      `<li class="legend-item"><span class="swatch" style="background:${entry.color}"></span>` +
      `${escapeHtml(entry.role)}</li>`,
  );
  return `<ul class="legend">${items.join("")}</ul>`;
}

function deltaBadge(delta: number): string {
  const sign = delta >= 0 ? "+" : "";
  return `<span class="delta">&Delta; ${sign}${delta.toFixed(4)}</span>`;
}

/** One button per sentence, colored by role, struck through when excluded.
 *
 * In binary view every non-Fact role renders in the muted non-fact style,
 * so fact sentences stand apart. Top-k occlusion sentences carry a signed
 * delta badge straight from the explanation response.
 */
export function renderSentences(state: SessionState, binaryView: boolean): string {
  if (state.taggedSentences.length === 0) {
    return `<p class="empty-state">No sentences yet. Paste a judgment above and tag it.</p>`;
  }
  const deltas = new Map<number, number>(
    (state.lastExplanation?.ranked ?? []).map((r) => [r.sentence, r.delta]),
  );
  const blocks = state.taggedSentences.map((s) => {
    const excluded = state.excluded.has(s.index);
    const fact = s.role === "Fact";
    const classes = ["sentence", `role-${s.role}`];
    classes.push(fact ? "fact" : "nonfact");
    if (excluded) classes.push("excluded");
    if (deltas.has(s.index)) classes.push("highlight");
    const color = ROLE_COLOR.get(s.role) ?? "#d7dbdd";
    const badge = deltas.has(s.index) && !excluded ? deltaBadge(deltas.get(s.index)!) : "";
    return (
      `<button type="button" class="${classes.join(" ")}" data-index="${s.index}"` +
      ` style="--role-color:${color}" title="${escapeHtml(s.role)}">` +
      `<span class="role-tag">${escapeHtml(s.role)}</span>` +
      `${escapeHtml(s.text)}${badge}</button>`
    );
  });
  const mode = binaryView ? "binary" : "full-roles";
  return `<div class="sentences ${mode}">${blocks.join("")}</div>`;
}

/** Two-sided gauge: p near 0 favors the respondent, near 1 the appellant. */
export function renderGauge(
  prediction: PredictResponse | null,
  stale: boolean,
): string {
  if (prediction === null) {
    return `<div class="gauge empty"><p class="empty-state">No verdict yet.</p></div>`;
  }
  const pct = (prediction.p * 100).toFixed(1);
  const shown = prediction.p.toFixed(4);
  const verdict = prediction.label === 1 ? "appellant/petitioner favored" : "respondent favored";
  const staleTag = stale ? `<span class="stale-tag">stale</span>` : "";
  return (
    `<div class="gauge${stale ? " stale" : ""}">` +
    `<div class="gauge-labels"><span>respondent favored</span>` +
    `<span>appellant/petitioner favored</span></div>` +
    `<div class="gauge-track"><div class="gauge-marker" style="left:${pct}%"></div></div>` +
    `<p class="gauge-reading">p = <strong>${shown}</strong> &middot; ${verdict}${staleTag}</p>` +
    `</div>`
  );
}

export function renderBanner(state: SessionState): string {
  if (state.error !== null) {
    return `<div class="banner error">${escapeHtml(state.error)}</div>`;
  }
  if (state.notice !== null) {
    return `<div class="banner notice">${escapeHtml(state.notice)}</div>`;
  }
  return "";
}

export function renderExplanationNote(state: SessionState): string {
  if (state.explanationNote === null) return "";
  return `<p class="explain-note">explanation unavailable: ${escapeHtml(state.explanationNote)}</p>`;
}

/** The replayable request: POSTing this JSON verbatim reproduces the gauge. */
export function renderRequestJson(request: PredictRequest | null): string {
  if (request === null) {
    return `<p class="empty-state">No request sent yet.</p>`;
  }
  return `<pre class="request-json">${escapeHtml(JSON.stringify(request, null, 2))}</pre>`;
}
