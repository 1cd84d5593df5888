/** Browser entry point: wires the store and renderers to the page.
 *
 * The service base URL defaults to the page's own origin; append
 * ?api=http://127.0.0.1:8037 to point elsewhere (the service must list
 * that origin in cors_allow_list).
 */

import { HttpTransport, type Selection, type Technique } from "./api.js";
import {
  renderBanner,
  renderExplanationNote,
  renderGauge,
  renderLegend,
  renderRequestJson,
  renderSentences,
} from "./render.js";
import { Session, type SessionState } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

const apiBase = new URLSearchParams(location.search).get("api") ?? "";
const transport = new HttpTransport(apiBase);

const docInput = byId<HTMLTextAreaElement>("doc-input");
const tagButton = byId<HTMLButtonElement>("tag-btn");
const selectionBox = byId<HTMLSelectElement>("selection");
const techniqueBox = byId<HTMLSelectElement>("technique");
const binaryToggle = byId<HTMLInputElement>("binary-toggle");
const sentencesRegion = byId<HTMLDivElement>("sentences");
const gaugeRegion = byId<HTMLDivElement>("gauge");
const bannerRegion = byId<HTMLDivElement>("banner");
const requestRegion = byId<HTMLDivElement>("request-json");
const healthRegion = byId<HTMLSpanElement>("health");

function redraw(state: SessionState): void {
  bannerRegion.innerHTML = renderBanner(state);
  sentencesRegion.innerHTML =
    renderSentences(state, binaryToggle.checked) + renderExplanationNote(state);
  gaugeRegion.innerHTML = renderGauge(state.lastPrediction, state.stale);
  requestRegion.innerHTML = renderRequestJson(state.lastPredictRequest);
}

const session = new Session(transport, redraw);

byId<HTMLDivElement>("legend").innerHTML = renderLegend();
redraw(session.state);

tagButton.addEventListener("click", () => {
  void session.loadDocument(docInput.value);
});

selectionBox.addEventListener("change", () => {
  void session.setSelection(selectionBox.value as Selection);
});

techniqueBox.addEventListener("change", () => {
  void session.setTechnique(Number(techniqueBox.value) as Technique);
});

binaryToggle.addEventListener("change", () => redraw(session.state));

sentencesRegion.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLButtonElement>(".sentence");
  if (target?.dataset.index !== undefined) {
    void session.toggleSentence(Number(target.dataset.index));
  }
});

transport
  .health()
  .then((h) => {
    healthRegion.textContent = `${h.status} (${h.modelVersion})`;
  })
  .catch(() => {
    healthRegion.textContent = "service unreachable";
  });
