/** Contract tests against recorded service traffic.
 *
 * The fixture file holds real request/response pairs captured from the
 * HTTP service. These tests prove two things about the UI: its request
 * builders emit exactly the recorded wire format, and every probability
 * it would display is a value the service returned, never one it
 * computed. Regenerate the fixture with tests/record_service_fixtures.py
 * if the service contract changes.
 */

import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import {
  ApiError,
  buildExplainRequest,
  buildPredictRequest,
  buildTagRequest,
  type ExplainRequest,
  type ExplainResponse,
  type PredictRequest,
  type PredictResponse,
  type Selection,
  type TagRequest,
  type TagResponse,
  type Transport,
} from "../src/api.js";
import { renderGauge } from "../src/render.js";
import { EXPLAIN_K, Session } from "../src/state.js";
import { ROLE_LEGEND } from "../src/render.js";

interface Exchange {
  endpoint: string;
  method: string;
  status: number;
  request: Record<string, unknown> | null;
  response: Record<string, unknown>;
}

const FIXTURE = new URL("../../tests/fixtures/service_recorded.json", import.meta.url);
const EXCHANGES: Exchange[] = JSON.parse(readFileSync(FIXTURE, "utf8")).exchanges;

const SELECTIONS: ReadonlySet<string> = new Set(["full", "var1", "var2", "factsOnly", "factsRLC"]);
const ROLES: ReadonlySet<string> = new Set(ROLE_LEGEND.map((e) => e.role));

function only<T>(items: T[]): T {
  expect(items.length).toBe(1);
  return items[0]!;
}

const predictExchanges = EXCHANGES.filter((e) => e.endpoint === "/api/predict");
const predictBase = only(
  predictExchanges.filter((e) => e.status === 200 && !("what_if_excluded" in (e.request ?? {}))),
);
const predictWhatIf = only(
  predictExchanges.filter((e) => e.status === 200 && "what_if_excluded" in (e.request ?? {})),
);
const predictAllExcluded = only(predictExchanges.filter((e) => e.status === 409));
const explainOk = only(
  EXCHANGES.filter((e) => e.endpoint === "/api/explain" && e.status === 200),
);

describe("request builders reproduce the recorded wire format", () => {
  it("tag", () => {
    const recorded = only(
      EXCHANGES.filter((e) => e.endpoint === "/api/tag" && e.status === 200),
    ).request as unknown as TagRequest;
    expect(buildTagRequest(recorded.text)).toEqual(recorded);
  });

  it("predict, with and without exclusions", () => {
    for (const exchange of [predictBase, predictWhatIf, predictAllExcluded]) {
      const recorded = exchange.request as unknown as PredictRequest;
      expect(SELECTIONS.has(recorded.input_selection)).toBe(true);
      const built = buildPredictRequest(
        recorded.text,
        recorded.input_selection,
        recorded.technique,
        new Set(recorded.what_if_excluded ?? []),
      );
      expect(built).toEqual(recorded);
    }
  });

  it("explain", () => {
    const recorded = explainOk.request as unknown as ExplainRequest;
    expect(buildExplainRequest(recorded.text, recorded.k)).toEqual(recorded);
  });
});

describe("recorded responses fit the client's types", () => {
  it("tag sentences carry index, text, a known role, and a score", () => {
    const body = only(
      EXCHANGES.filter((e) => e.endpoint === "/api/tag" && e.status === 200),
    ).response as unknown as TagResponse;
    expect(body.sentences.length).toBeGreaterThan(0);
    for (const s of body.sentences) {
      expect(Number.isInteger(s.index)).toBe(true);
      expect(typeof s.text).toBe("string");
      expect(ROLES.has(s.role)).toBe(true);
      expect(typeof s.score).toBe("number");
    }
  });

  it("predict responses carry label, p in [0,1], alpha, used_sentences", () => {
    for (const exchange of [predictBase, predictWhatIf]) {
      const body = exchange.response as unknown as PredictResponse;
      expect([0, 1]).toContain(body.label);
      expect(body.p).toBeGreaterThanOrEqual(0);
      expect(body.p).toBeLessThanOrEqual(1);
      expect(body.alpha.every((a) => typeof a === "number")).toBe(true);
      expect(body.used_sentences.every((i) => Number.isInteger(i))).toBe(true);
    }
  });

  it("explain responses rank sentences with numeric deltas", () => {
    const body = explainOk.response as unknown as ExplainResponse;
    expect(body.k).toBeGreaterThanOrEqual(1);
    expect([0, 1]).toContain(body.base_label);
    expect(body.ranked.length).toBeGreaterThan(0);
    for (const r of body.ranked) {
      expect(Number.isInteger(r.sentence)).toBe(true);
      expect(typeof r.delta).toBe("number");
    }
  });

  it("schemes map role names from the legend to integer weights", () => {
    const body = only(EXCHANGES.filter((e) => e.endpoint === "/api/schemes")).response as {
      schemes: Record<string, Record<string, number>>;
    };
    expect(Object.keys(body.schemes).sort()).toEqual(["variation1", "variation2"]);
    for (const weights of Object.values(body.schemes)) {
      for (const [role, weight] of Object.entries(weights)) {
        expect(ROLES.has(role)).toBe(true);
        expect(Number.isInteger(weight)).toBe(true);
        expect(weight).toBeGreaterThanOrEqual(0);
      }
    }
  });

  it("every 4xx reply uses the error envelope ApiError expects", () => {
    const failures = EXCHANGES.filter((e) => e.status >= 400);
    expect(failures.length).toBeGreaterThan(0);
    for (const exchange of failures) {
      const body = exchange.response as { error?: { code?: unknown; message?: unknown } };
      expect(typeof body.error?.code).toBe("string");
      expect(typeof body.error?.message).toBe("string");
    }
  });
});

/** Serves the recorded exchanges; rejects anything off-script. */
class RecordedTransport implements Transport {
  sentenceCount = (predictAllExcluded.request as unknown as PredictRequest).what_if_excluded!
    .length;

  tag(body: TagRequest): Promise<TagResponse> {
    // the recorded tag exchange used a different document, so synthesize
    // a tag response for the predict document: the session only needs the
    // sentence ids
    const text = (predictBase.request as unknown as PredictRequest).text;
    expect(body.text).toBe(text);
    return Promise.resolve({
      sentences: Array.from({ length: this.sentenceCount }, (_, index) => ({
        index,
        text: `sentence ${index}`,
        role: "Fact" as const,
        score: 0,
      })),
    });
  }

  predict(body: PredictRequest): Promise<PredictResponse> {
    for (const exchange of predictExchanges) {
      if (JSON.stringify(exchange.request) === JSON.stringify(body)) {
        if (exchange.status >= 400) {
          const err = exchange.response as { error: { code: string; message: string } };
          return Promise.reject(new ApiError(exchange.status, err.error.code, err.error.message));
        }
        return Promise.resolve(exchange.response as unknown as PredictResponse);
      }
    }
    return Promise.reject(new Error(`no recorded exchange for ${JSON.stringify(body)}`));
  }

  explain(body: ExplainRequest): Promise<ExplainResponse> {
    expect(JSON.stringify(body)).toBe(JSON.stringify(explainOk.request));
    return Promise.resolve(explainOk.response as unknown as ExplainResponse);
  }
}

describe("a session driven by recorded traffic displays service values verbatim", () => {
  const text = (predictBase.request as unknown as PredictRequest).text;
  const baseResponse = predictBase.response as unknown as PredictResponse;
  const whatIfRequest = predictWhatIf.request as unknown as PredictRequest;
  const whatIfResponse = predictWhatIf.response as unknown as PredictResponse;
  const toggled = whatIfRequest.what_if_excluded![0]!;

  it("replays the base and what-if exchanges end to end", async () => {
    const session = new Session(new RecordedTransport());
    expect(EXPLAIN_K).toBe((explainOk.request as unknown as ExplainRequest).k);

    await session.loadDocument(text);
    // the displayed probability IS the recorded one, by identity
    expect(session.state.lastPrediction!.p).toBe(baseResponse.p);
    expect(session.state.lastPredictRequest).toEqual(predictBase.request);
    expect(renderGauge(session.state.lastPrediction, false)).toContain(
      baseResponse.p.toFixed(4),
    );
    expect(session.state.lastExplanation).toEqual(explainOk.response);

    await session.toggleSentence(toggled);
    expect(session.state.lastPrediction!.p).toBe(whatIfResponse.p);
    expect(session.state.lastPredictRequest).toEqual(whatIfRequest);
    expect(renderGauge(session.state.lastPrediction, false)).toContain(
      whatIfResponse.p.toFixed(4),
    );

    await session.toggleSentence(toggled);
    expect(session.state.lastPrediction!.p).toBe(baseResponse.p);
  });

  it("excluding every sentence yields the recorded no-usable-input notice", async () => {
    const transport = new RecordedTransport();
    const session = new Session(transport);
    await session.loadDocument(text);
    for (let i = 0; i < transport.sentenceCount; i += 1) {
      await session.toggleSentence(i);
    }
    expect(session.state.excluded.size).toBe(transport.sentenceCount);
    expect(session.state.notice).toContain("no usable input");
    expect(session.state.error).toBeNull();
  });

  it("the top-ranked explanation sentence moves p in its delta's direction", () => {
    const ranked = (explainOk.response as unknown as ExplainResponse).ranked;
    const top = ranked[0]!;
    expect(top.sentence).toBe(toggled);
    const shift = baseResponse.p - whatIfResponse.p;
    expect(Math.sign(shift)).toBe(Math.sign(top.delta));
  });
});
