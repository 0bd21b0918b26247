/** Typed client for the review service JSON API (see the repo README). */

export type TargetFilter = "all" | "unreviewed" | "entities" | "relations";

export interface TargetRow {
  target: string;
  kind: "entity" | "relation";
  anonymous: boolean;
  candidate_count: number;
  reviewed: boolean;
}

export interface Progress {
  targets: number;
  reviewed: number;
  remaining: number;
}

export interface Candidate {
  id: string;
  rank: number;
  notation?: string;
  phrase?: string;
  template?: string;
  example?: string;
  pronoun_example?: string;
  probability?: number;
  coverage?: number | null;
  combined?: number | null;
  confidence?: number;
  score?: number;
}

export interface SelectionRecord {
  candidates: string[];
  timestamp: string;
}

export interface CandidatesResponse {
  target: string;
  kind: "entity" | "relation";
  anonymous: boolean;
  candidates: Candidate[];
  selections: Record<string, SelectionRecord>;
}

export interface TargetsResponse {
  targets: TargetRow[];
  progress: Progress;
}

export interface SelectionAck {
  ok: boolean;
  target: string;
  selection: SelectionRecord;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private base: string = "",
    public selector: string = "reviewer",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.base}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      /* non-JSON error body */
    }
    if (!response.ok) {
      const message =
        payload && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return payload as T;
  }

  listTargets(filter: TargetFilter = "all"): Promise<TargetsResponse> {
    return this.request<TargetsResponse>(`/api/v1/targets?filter=${filter}`);
  }

  candidates(target: string): Promise<CandidatesResponse> {
    return this.request<CandidatesResponse>(
      `/api/v1/candidates?target=${encodeURIComponent(target)}`,
    );
  }

  progress(): Promise<Progress> {
    return this.request<Progress>("/api/v1/progress");
  }

  /** Mark one candidate as best, or pass null for "none correct". */
  select(target: string, candidateId: string | null): Promise<SelectionAck> {
    return this.request<SelectionAck>("/api/v1/selection", {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "X-Selector-Id": this.selector,
      },
      body: JSON.stringify({ target, candidate: candidateId }),
    });
  }

  agreement(): Promise<Record<string, number>> {
    return this.request<Record<string, number>>("/api/v1/metrics/agreement");
  }
}
