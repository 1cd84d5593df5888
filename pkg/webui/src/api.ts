/** Typed client for the verdict service HTTP API.
 *
 * Every probability, label, and delta shown in the UI comes out of these
 * response types verbatim; nothing is recomputed client-side. Request
 * bodies are built by pure functions so tests can check them against
 * recorded wire traffic without a network.
 */

export type RoleName =
  | "Fact"
  | "Issue"
  | "Argument"
  | "Statute"
  | "Precedent"
  | "RatioOfDecision"
  | "RulingByLowerCourt"
  | "RulingByPresentCourt"
  | "None";

export type Selection = "full" | "var1" | "var2" | "factsOnly" | "factsRLC";
export type Technique = 1 | 2 | 3;

export interface TaggedSentence {
  index: number;
  text: string;
  role: RoleName;
  score: number;
}

export interface TagResponse {
  sentences: TaggedSentence[];
}

export interface PredictResponse {
  label: 0 | 1;
  p: number;
  alpha: number[];
  used_sentences: number[];
}

export interface ExplainResponse {
  k: number;
  base_probability: number;
  base_label: 0 | 1;
  ranked: { sentence: number; delta: number }[];
}

export interface SchemesResponse {
  schemes: Record<string, Partial<Record<RoleName, number>>>;
}

export interface HealthResponse {
  status: string;
  modelVersion: string;
}

export interface TagRequest {
  text: string;
}

export interface PredictRequest {
  text: string;
  input_selection: Selection;
  technique: Technique;
  what_if_excluded?: number[];
}

export interface ExplainRequest {
  text: string;
  k: number;
}

/** Non-2xx reply, carrying the service's machine-readable error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export function buildTagRequest(text: string): TagRequest {
  return { text };
}

/** The field omitted entirely, not sent as [], when nothing is excluded. */
export function buildPredictRequest(
  text: string,
  selection: Selection,
  technique: Technique,
  excluded: ReadonlySet<number>,
): PredictRequest {
  const body: PredictRequest = { text, input_selection: selection, technique };
  if (excluded.size > 0) {
    body.what_if_excluded = [...excluded].sort((a, b) => a - b);
  }
  return body;
}

export function buildExplainRequest(text: string, k: number): ExplainRequest {
  return { text, k };
}

/** Transport seam: the store talks to this, tests swap in a fake. */
export interface Transport {
  tag(body: TagRequest, signal?: AbortSignal): Promise<TagResponse>;
  predict(body: PredictRequest, signal?: AbortSignal): Promise<PredictResponse>;
  explain(body: ExplainRequest, signal?: AbortSignal): Promise<ExplainResponse>;
}

interface ErrorEnvelope {
  error?: { code?: string; message?: string };
}

async function post<T>(url: string, body: unknown, signal?: AbortSignal): Promise<T> {
  const reply = await fetch(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
  if (!reply.ok) {
    let envelope: ErrorEnvelope = {};
    try {
      envelope = (await reply.json()) as ErrorEnvelope;
    } catch {
      // non-JSON error body; fall through to the generic message
    }
    throw new ApiError(
      reply.status,
      envelope.error?.code ?? "http_error",
      envelope.error?.message ?? `HTTP ${reply.status}`,
    );
  }
  return (await reply.json()) as T;
}

export class HttpTransport implements Transport {
  constructor(readonly baseUrl: string) {}

  tag(body: TagRequest, signal?: AbortSignal): Promise<TagResponse> {
    return post(this.baseUrl + "/api/tag", body, signal);
  }

  predict(body: PredictRequest, signal?: AbortSignal): Promise<PredictResponse> {
    return post(this.baseUrl + "/api/predict", body, signal);
  }

  explain(body: ExplainRequest, signal?: AbortSignal): Promise<ExplainResponse> {
    return post(this.baseUrl + "/api/explain", body, signal);
  }

  async health(): Promise<HealthResponse> {
    const reply = await fetch(this.baseUrl + "/api/health");
    if (!reply.ok) {
      throw new ApiError(reply.status, "http_error", `HTTP ${reply.status}`);
    }
    return (await reply.json()) as HealthResponse;
  }
}
