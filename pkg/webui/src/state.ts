/** Session store for the what-if explorer.
 *
 * Holds the document, its tagged sentences, the exclusion set, and the two
 * pipeline controls. Every change that affects the verdict issues exactly
 * one predict round trip; at most one is in flight and the latest wins.
 * The store never computes probabilities itself: lastPrediction is always
 * a verbatim service response, and lastPredictRequest is the exact JSON
 * that produced it, so replaying that JSON reproduces the display.
 */

import {
  ApiError,
  buildExplainRequest,
  buildPredictRequest,
  buildTagRequest,
  type ExplainResponse,
  type PredictRequest,
  type PredictResponse,
  type Selection,
  type TaggedSentence,
  type Technique,
  type Transport,
} from "./api.js";

export const EXPLAIN_K = 3;

export interface SessionState {
  documentText: string;
  taggedSentences: TaggedSentence[];
  /** Always a subset of the tagged sentence indices. */
  excluded: ReadonlySet<number>;
  selection: Selection;
  technique: Technique;
  lastPrediction: PredictResponse | null;
  /** The request JSON lastPrediction answered; null until the first reply. */
  lastPredictRequest: PredictRequest | null;
  lastExplanation: ExplainResponse | null;
  /** True whenever lastPrediction does not reflect the current controls. */
  stale: boolean;
  /** A predict round trip is in flight. */
  predicting: boolean;
  /** "No usable input" style notice (the 409 path). */
  notice: string | null;
  /** Error banner text for other 4xx/5xx replies. */
  error: string | null;
  /** Muted note when explanation is unavailable for this document. */
  explanationNote: string | null;
}

function initialState(): SessionState {
  return {
    documentText: "",
    taggedSentences: [],
    excluded: new Set(),
    selection: "factsOnly",
    technique: 1,
    lastPrediction: null,
    lastPredictRequest: null,
    lastExplanation: null,
    stale: false,
    predicting: false,
    notice: null,
    error: null,
    explanationNote: null,
  };
}

function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export type Listener = (state: SessionState) => void;

export class Session {
  private current: SessionState = initialState();
  private predictSeq = 0;
  private controller: AbortController | null = null;

  constructor(
    private readonly transport: Transport,
    private readonly listener: Listener = () => {},
  ) {}

  get state(): SessionState {
    return this.current;
  }

  private update(patch: Partial<SessionState>): void {
    this.current = { ...this.current, ...patch };
    this.listener(this.current);
  }

  /** Tag the document, reset exclusions, then fetch verdict and explanation. */
  async loadDocument(text: string): Promise<void> {
    this.update({ notice: null, error: null, explanationNote: null });
    let sentences: TaggedSentence[];
    try {
      sentences = (await this.transport.tag(buildTagRequest(text))).sentences;
    } catch (err) {
      if (isAbort(err)) return;
      this.update({ error: describe(err) });
      return;
    }
    this.update({
      documentText: text,
      taggedSentences: sentences,
      excluded: new Set(),
      lastPrediction: null,
      lastPredictRequest: null,
      lastExplanation: null,
      stale: sentences.length > 0,
    });
    if (sentences.length === 0) return;
    await Promise.all([this.refreshPrediction(), this.refreshExplanation()]);
  }

  /** Flip one sentence in or out of the input; exactly one predict follows. */
  async toggleSentence(index: number): Promise<void> {
    if (!this.current.taggedSentences.some((s) => s.index === index)) {
      throw new RangeError(`no sentence with index ${index}`);
    }
    const next = new Set(this.current.excluded);
    if (next.has(index)) {
      next.delete(index);
    } else {
      next.add(index);
    }
    this.update({ excluded: next });
    await this.refreshPrediction();
  }

  async setSelection(selection: Selection): Promise<void> {
    if (selection === this.current.selection) return;
    this.update({ selection });
    await this.refreshPrediction();
  }

  async setTechnique(technique: Technique): Promise<void> {
    if (technique === this.current.technique) return;
    this.update({ technique });
    await this.refreshPrediction();
  }

  private async refreshPrediction(): Promise<void> {
    if (this.current.taggedSentences.length === 0) return;
    const seq = ++this.predictSeq;
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const body = buildPredictRequest(
      this.current.documentText,
      this.current.selection,
      this.current.technique,
      this.current.excluded,
    );
    this.update({ stale: true, predicting: true, notice: null, error: null });
    try {
      const reply = await this.transport.predict(body, controller.signal);
      if (seq !== this.predictSeq) return;
      this.update({
        lastPrediction: reply,
        lastPredictRequest: body,
        stale: false,
        predicting: false,
      });
    } catch (err) {
      if (seq !== this.predictSeq || isAbort(err)) return;
      if (err instanceof ApiError && err.status === 409) {
        this.update({ predicting: false, notice: "no usable input: " + err.message });
        return;
      }
      this.update({ predicting: false, error: describe(err) });
    }
  }

  private async refreshExplanation(): Promise<void> {
    const body = buildExplainRequest(this.current.documentText, EXPLAIN_K);
    try {
      const reply = await this.transport.explain(body);
      this.update({ lastExplanation: reply, explanationNote: null });
    } catch (err) {
      if (isAbort(err)) return;
      this.update({ lastExplanation: null, explanationNote: describe(err) });
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}
