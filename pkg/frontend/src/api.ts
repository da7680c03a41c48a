/** Typed client for the edgesearch HTTP API. The UI talks to the service
 *  exclusively through this module. */

export interface SearchResult {
  doc_id: string;
  title: string;
  score: number;
  snippet?: string;
}

export interface TraceTerm {
  term: string;
  provenance: "NAME_ENTITY" | "CONTEXT" | "DERIVED";
  parent: string | null;
  weight: number | null;
}

export interface Theta {
  label: string;
  confidence: number;
  source: string;
}

export interface Trace {
  trimmed: string[];
  context: string[];
  name_entities: string[];
  mu: number | null;
  theta: Theta | null;
  terms: TraceTerm[];
}

export interface SearchResponse {
  query: string;
  query_id: string;
  user_id: string;
  mode: "PLAIN" | "ENCRYPTED";
  variant: string;
  results: SearchResult[];
  trace: Trace;
  timings: Record<string, number>;
}

export interface ClickItem {
  doc_id: string;
  dwell_seconds: number;
}

export interface InterestInfo {
  user_id: string;
  interest: Theta | null;
  history: string[];
}

export interface DocBody {
  doc_id: string;
  title: string;
  body: string;
}

export interface Health {
  status: string;
  mode: "PLAIN" | "ENCRYPTED";
  doc_count: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SearchClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const error = body?.error ?? {};
      throw new ApiError(
        response.status,
        error.code ?? "http_error",
        error.message ?? `request failed with status ${response.status}`,
      );
    }
    return body as T;
  }

  health(): Promise<Health> {
    return this.request<Health>("/healthz");
  }

  search(userId: string, query: string, top?: number): Promise<SearchResponse> {
    return this.request<SearchResponse>("/search", {
      method: "POST",
      body: JSON.stringify({ user_id: userId, query, top }),
    });
  }

  feedback(userId: string, queryId: string, clicked: ClickItem[]): Promise<unknown> {
    return this.request("/feedback", {
      method: "POST",
      body: JSON.stringify({ user_id: userId, query_id: queryId, clicked }),
    });
  }

  interest(userId: string): Promise<InterestInfo> {
    return this.request<InterestInfo>(`/interest/${encodeURIComponent(userId)}`);
  }

  doc(docId: string): Promise<DocBody> {
    return this.request<DocBody>(`/doc/${encodeURIComponent(docId)}`);
  }
}
