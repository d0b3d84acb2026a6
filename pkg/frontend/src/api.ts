export interface SelectedSentence {
  sentence: string;
  score: number;
  index: number;
}

export interface AskResponse {
  question: string;
  answer: string;
  selected: SelectedSentence[];
  approach: string;
  metric: string;
  dedup_applied: boolean;
  raw_text: string;
  timings_ms: Record<string, number>;
  disclaimer: string;
}

export interface ApproachInfo {
  name: string;
  ready: boolean;
}

export interface HealthInfo {
  status: string;
  documents: number;
}

export interface AskParams {
  question: string;
  approach: string;
  metric: string;
  dedup: boolean;
}

/** Error payload from the service, carrying the failed pipeline stage. */
export class ApiError extends Error {
  constructor(
    public status: number,
    public stage: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  setBaseUrl(url: string): void {
    this.baseUrl = url.replace(/\/+$/, "");
  }

  async ask(params: AskParams): Promise<AskResponse> {
    const response = await fetch(`${this.baseUrl}/api/ask`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(params),
    });
    if (!response.ok) {
      const body = await response.json().catch(() => ({}));
      throw new ApiError(
        response.status,
        typeof body.stage === "string" ? body.stage : "unknown",
        typeof body.error === "string" ? body.error : `request failed with ${response.status}`,
      );
    }
    return (await response.json()) as AskResponse;
  }

  async approaches(): Promise<ApproachInfo[]> {
    const response = await fetch(`${this.baseUrl}/api/approaches`);
    if (!response.ok) {
      throw new ApiError(response.status, "unknown", `approaches failed with ${response.status}`);
    }
    const body = (await response.json()) as { approaches: ApproachInfo[] };
    return body.approaches;
  }

  async health(): Promise<HealthInfo> {
    const response = await fetch(`${this.baseUrl}/api/health`);
    if (!response.ok) {
      throw new ApiError(response.status, "unknown", `health failed with ${response.status}`);
    }
    return (await response.json()) as HealthInfo;
  }
}
