/** Typed client for the recommendation service's REST contract. */

import type {
  BatchResponse,
  PivotSpec,
  SessionConfig,
  SessionSummary,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function throwApiError(response: Response): Promise<never> {
  let code = "internal";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body: keep the defaults
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async uploadDataset(
    csvText: string,
    typeOverrides?: Record<string, string>
  ): Promise<string> {
    const response = await fetch(this.url("/datasets"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        csv_text: csvText,
        ...(typeOverrides ? { type_overrides: typeOverrides } : {}),
      }),
    });
    if (!response.ok) await throwApiError(response);
    const body = await response.json();
    return body.dataset_id as string;
  }

  async createSession(datasetId: string, config: SessionConfig): Promise<string> {
    const response = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ dataset_id: datasetId, config }),
    });
    if (!response.ok) await throwApiError(response);
    const body = await response.json();
    return body.session_id as string;
  }

  async getRecommendations(sessionId: string): Promise<BatchResponse> {
    const response = await fetch(
      this.url(`/sessions/${encodeURIComponent(sessionId)}/recommendations`)
    );
    if (!response.ok) await throwApiError(response);
    return (await response.json()) as BatchResponse;
  }

  async postFeedback(
    sessionId: string,
    spec: PivotSpec,
    verdict: Verdict
  ): Promise<SessionSummary> {
    const response = await fetch(
      this.url(`/sessions/${encodeURIComponent(sessionId)}/feedback`),
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ spec, verdict }),
      }
    );
    if (!response.ok) await throwApiError(response);
    return (await response.json()) as SessionSummary;
  }
}
