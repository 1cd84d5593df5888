import { describe, expect, it } from "vitest";

import {
  ApiError,
  type ExplainRequest,
  type ExplainResponse,
  type PredictRequest,
  type PredictResponse,
  type TagRequest,
  type TagResponse,
  type Transport,
} from "../src/api.js";
import { renderGauge } from "../src/render.js";
import { Session } from "../src/state.js";

const THREE_SENTENCES: TagResponse = {
  sentences: [
    { index: 0, text: "The complainant filed the report.", role: "Fact", score: 1.0 },
    { index: 1, text: "Whether the claim stands is the question.", role: "Issue", score: 2.0 },
    { index: 2, text: "The appeal is allowed.", role: "RulingByPresentCourt", score: 3.0 },
  ],
};

const EXPLANATION: ExplainResponse = {
  k: 3,
  base_probability: 0.9,
  base_label: 1,
  ranked: [{ sentence: 0, delta: 0.4 }],
};

interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (err: unknown) => void;
}

function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

/** Transport that logs every call and answers predicts from a rule. */
class FakeTransport implements Transport {
  predictCalls: PredictRequest[] = [];
  tagCalls: TagRequest[] = [];
  signals: (AbortSignal | undefined)[] = [];
  pending: Deferred<PredictResponse>[] = [];

  constructor(
    private readonly rule: (body: PredictRequest) => PredictResponse | ApiError = (body) => ({
      label: 1,
      p: 0.75 - 0.1 * (body.what_if_excluded?.length ?? 0),
      alpha: [1.0],
      used_sentences: [0, 1, 2],
    }),
    private readonly manual = false,
  ) {}

  tag(body: TagRequest): Promise<TagResponse> {
    this.tagCalls.push(body);
    return Promise.resolve(THREE_SENTENCES);
  }

  predict(body: PredictRequest, signal?: AbortSignal): Promise<PredictResponse> {
    this.predictCalls.push(body);
    this.signals.push(signal);
    if (this.manual) {
      const d = deferred<PredictResponse>();
      this.pending.push(d);
      return d.promise;
    }
    const out = this.rule(body);
    return out instanceof ApiError ? Promise.reject(out) : Promise.resolve(out);
  }

  explain(_body: ExplainRequest): Promise<ExplainResponse> {
    return Promise.resolve(EXPLANATION);
  }
}

const TEXT = "The complainant filed the report. Whether the claim stands. Allowed.";

describe("toggle round trips", () => {
  it("issues exactly one predict request with the toggled index excluded", async () => {
    const transport = new FakeTransport();
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    const before = transport.predictCalls.length;
    expect(before).toBe(1);

    await session.toggleSentence(1);

    expect(transport.predictCalls.length).toBe(before + 1);
    const sent = transport.predictCalls.at(-1)!;
    expect(sent.what_if_excluded).toContain(1);
    expect(session.state.excluded.has(1)).toBe(true);
    expect(session.state.stale).toBe(false);
  });

  it("double-toggle restores the state and the displayed probability", async () => {
    const transport = new FakeTransport();
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    const originalP = session.state.lastPrediction!.p;
    const originalGauge = renderGauge(session.state.lastPrediction, session.state.stale);

    await session.toggleSentence(1);
    expect(session.state.lastPrediction!.p).not.toBe(originalP);

    await session.toggleSentence(1);
    expect(session.state.excluded.size).toBe(0);
    expect(session.state.lastPrediction!.p).toBe(originalP);
    expect(renderGauge(session.state.lastPrediction, session.state.stale)).toBe(originalGauge);
    // the restoring request is byte-identical to the original one
    expect(transport.predictCalls.at(-1)).toEqual(transport.predictCalls[0]);
  });

  it("omits what_if_excluded entirely when nothing is excluded", async () => {
    const transport = new FakeTransport();
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    expect("what_if_excluded" in transport.predictCalls[0]!).toBe(false);
  });

  it("rejects indices outside the tagged document without a round trip", async () => {
    const transport = new FakeTransport();
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    const before = transport.predictCalls.length;
    await expect(session.toggleSentence(99)).rejects.toThrow(RangeError);
    expect(transport.predictCalls.length).toBe(before);
    expect(session.state.excluded.size).toBe(0);
  });

  it("keeps the exclusion set inside the tagged ids across many toggles", async () => {
    const transport = new FakeTransport();
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    const ids = new Set(session.state.taggedSentences.map((s) => s.index));
    for (const i of [0, 2, 0, 1, 2, 1, 0]) {
      await session.toggleSentence(i);
      for (const excluded of session.state.excluded) {
        expect(ids.has(excluded)).toBe(true);
      }
    }
  });
});

describe("staleness and concurrency", () => {
  it("marks the prediction stale while a request is in flight", async () => {
    const transport = new FakeTransport(undefined, true);
    const session = new Session(transport);
    const loading = session.loadDocument(TEXT);
    await Promise.resolve();
    expect(session.state.predicting).toBe(true);
    expect(session.state.stale).toBe(true);
    transport.pending[0]!.resolve({ label: 1, p: 0.8, alpha: [1], used_sentences: [0] });
    await loading;
    expect(session.state.stale).toBe(false);
    expect(session.state.predicting).toBe(false);
  });

  it("latest request wins when replies arrive out of order", async () => {
    const transport = new FakeTransport(undefined, true);
    const session = new Session(transport);
    const loading = session.loadDocument(TEXT);
    await Promise.resolve();
    transport.pending[0]!.resolve({ label: 1, p: 0.9, alpha: [1], used_sentences: [0] });
    await loading;

    const first = session.toggleSentence(0);
    const second = session.toggleSentence(1);
    // the second request aborts the first
    expect(transport.signals[1]?.aborted).toBe(true);
    transport.pending[2]!.resolve({ label: 0, p: 0.2, alpha: [1], used_sentences: [1] });
    await second;
    expect(session.state.lastPrediction!.p).toBe(0.2);

    // the first, now stale, reply must not clobber the newer one
    transport.pending[1]!.resolve({ label: 1, p: 0.99, alpha: [1], used_sentences: [0] });
    await first;
    expect(session.state.lastPrediction!.p).toBe(0.2);
    expect(session.state.lastPredictRequest!.what_if_excluded).toEqual([0, 1]);
  });

  it("control changes re-predict with the matching request field", async () => {
    const transport = new FakeTransport();
    const session = new Session(transport);
    await session.loadDocument(TEXT);

    await session.setSelection("full");
    expect(transport.predictCalls.at(-1)!.input_selection).toBe("full");

    await session.setTechnique(3);
    expect(transport.predictCalls.at(-1)!.technique).toBe(3);

    // no-op changes do not spend a round trip
    const count = transport.predictCalls.length;
    await session.setTechnique(3);
    expect(transport.predictCalls.length).toBe(count);
  });
});

describe("error paths", () => {
  it("renders a no-usable-input notice on 409 and keeps the last verdict", async () => {
    const transport = new FakeTransport((body) =>
      (body.what_if_excluded?.length ?? 0) >= 3
        ? new ApiError(409, "empty_input", "every sentence of 'request' was excluded")
        : { label: 1, p: 0.7, alpha: [1], used_sentences: [0, 1, 2] },
    );
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    await session.toggleSentence(0);
    await session.toggleSentence(1);
    await session.toggleSentence(2);

    expect(session.state.notice).toContain("no usable input");
    expect(session.state.error).toBeNull();
    expect(session.state.lastPrediction!.p).toBe(0.7);
    // the kept verdict answers an older request, so it stays marked stale
    expect(session.state.stale).toBe(true);
  });

  it("shows the error banner on other 4xx replies", async () => {
    const transport = new FakeTransport(
      () => new ApiError(400, "bad_request", "unknown input selection 'onlyFacts'"),
    );
    const session = new Session(transport);
    await session.loadDocument(TEXT);
    expect(session.state.error).toBe("bad_request: unknown input selection 'onlyFacts'");
    expect(session.state.notice).toBeNull();
  });

  it("surfaces tag failures as the banner and keeps the old document", async () => {
    const failing: Transport = {
      tag: () => Promise.reject(new ApiError(422, "unparseable_document", "no sentences found")),
      predict: () => Promise.reject(new Error("unreachable")),
      explain: () => Promise.reject(new Error("unreachable")),
    };
    const session = new Session(failing);
    await session.loadDocument("   ");
    expect(session.state.error).toBe("unparseable_document: no sentences found");
    expect(session.state.taggedSentences).toEqual([]);
  });

  it("an empty tag response yields the empty state and no predict call", async () => {
    const transport = new FakeTransport();
    transport.tag = (body) => {
      transport.tagCalls.push(body);
      return Promise.resolve({ sentences: [] });
    };
    const session = new Session(transport);
    await session.loadDocument("x");
    expect(session.state.taggedSentences).toEqual([]);
    expect(session.state.lastPrediction).toBeNull();
    expect(transport.predictCalls.length).toBe(0);
    expect(session.state.stale).toBe(false);
  });
});
