// Thin typed client for the scoring API. Every number on screen comes from
// one of these calls; the UI itself never computes scores.

import type {
  Envelope,
  FilterBody,
  FindingRow,
  HeatmapData,
  NormDocument,
  ScorePage,
  SessionSummary,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError("Unreachable", String(err));
    }
    const envelope = (await response.json()) as Envelope<T>;
    if (!envelope.ok) {
      throw new ApiError(envelope.error.code, envelope.error.message);
    }
    return envelope.data;
  }

  health(): Promise<{ status: string; session: { session_id: string } | null }> {
    return this.call("GET", "/api/health");
  }

  createSession(logPath: string, norm: NormDocument): Promise<SessionSummary> {
    return this.call("POST", "/api/session", { log_path: logPath, norm });
  }

  scores(view: string, offset = 0, limit = 50): Promise<ScorePage> {
    const query = `view=${encodeURIComponent(view)}&offset=${offset}&limit=${limit}`;
    return this.call("GET", `/api/scores?${query}`);
  }

  heatmap(view: string, feature: string, filter?: FilterBody): Promise<HeatmapData> {
    const body: Record<string, unknown> = { view, feature };
    if (filter && (filter.equals.length > 0 || filter.score_quantile !== null)) {
      body.filter = filter;
    }
    return this.call("POST", "/api/heatmap", body);
  }

  findings(view: string, k = 5, minSupport = 1): Promise<FindingRow[]> {
    return this.call("POST", "/api/findings", { view, k, min_support: minSupport });
  }
}
