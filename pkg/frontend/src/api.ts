import type {
  BatchList,
  DecisionRequest,
  DecisionResponse,
  Health,
  PairDetail,
  PairPage,
  SampleDoc,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/**
 * Thin typed client over the review service. The fetch implementation is
 * injectable so tests can serve recorded fixtures without a server.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: string };
        if (body.detail) detail = String(body.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<Health> {
    return this.request("/health");
  }

  pairs(filter: { status?: string; rule?: string; page?: number } = {}): Promise<PairPage> {
    const params = new URLSearchParams();
    if (filter.status) params.set("status", filter.status);
    if (filter.rule) params.set("rule", filter.rule);
    if (filter.page) params.set("page", String(filter.page));
    const query = params.toString();
    return this.request(`/pairs${query ? `?${query}` : ""}`);
  }

  pairDetail(s1: string, s2: string): Promise<PairDetail> {
    return this.request(`/pairs/${s1}/${s2}`);
  }

  sample(id: string): Promise<SampleDoc> {
    return this.request(`/samples/${id}`);
  }

  batches(): Promise<BatchList> {
    return this.request("/batches");
  }

  decide(decision: DecisionRequest): Promise<DecisionResponse> {
    return this.request("/decisions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(decision),
    });
  }

  reevaluate(): Promise<{ pairs: number }> {
    return this.request("/evaluate", { method: "POST" });
  }
}
