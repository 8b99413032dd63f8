// Thin fetch client for the annotation service.
//
// Submits carry an idempotency token so a network retry (or a double click)
// can never create a second stage event: the server replays the original
// response for a token it has already applied.

import type { ApiError, NextTaskResponse, SessionView, SubmitResponse } from "./types.js";

export class ServiceError extends Error {
  readonly payload: ApiError;
  readonly status: number;

  constructor(status: number, payload: ApiError) {
    super(payload.message || payload.error);
    this.payload = payload;
    this.status = status;
  }
}

async function parseError(response: Response): Promise<ServiceError> {
  let payload: ApiError;
  try {
    payload = (await response.json()) as ApiError;
  } catch {
    payload = { error: `HTTP ${response.status}`, message: response.statusText };
  }
  return new ServiceError(response.status, payload);
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  registerJudge(judgeId: string): Promise<{ judge_id: string }> {
    return this.request("/judges", {
      method: "POST",
      body: JSON.stringify({ judge_id: judgeId }),
    });
  }

  /** Resolves to null when the service has no open task for this judge. */
  async nextTask(judgeId: string): Promise<NextTaskResponse | null> {
    try {
      return await this.request<NextTaskResponse>(
        `/tasks/next?judge=${encodeURIComponent(judgeId)}`);
    } catch (error) {
      if (error instanceof ServiceError && error.payload.error === "NoWork") {
        return null;
      }
      throw error;
    }
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}`);
  }

  /**
   * Submit one stage. Network failures are retried with the same token,
   * so the server applies the submission at most once.
   */
  async submit(
    sessionId: string,
    judgeId: string,
    selected: number[],
    defective: number[],
    token: string,
    retries = 2,
  ): Promise<SubmitResponse> {
    const body = JSON.stringify({
      judge: judgeId,
      selected: [...selected].sort((a, b) => a - b),
      defective: [...defective].sort((a, b) => a - b),
      token,
    });
    let lastFailure: unknown;
    for (let attempt = 0; attempt <= retries; attempt += 1) {
      try {
        return await this.request<SubmitResponse>(`/sessions/${sessionId}/submit`, {
          method: "POST",
          body,
        });
      } catch (error) {
        if (error instanceof ServiceError) {
          throw error; // the server spoke; surface its verdict
        }
        lastFailure = error; // network-level failure: safe to retry same token
      }
    }
    throw lastFailure;
  }

  abandon(sessionId: string, judgeId: string): Promise<{ status: string }> {
    return this.request(`/sessions/${sessionId}/abandon`, {
      method: "POST",
      body: JSON.stringify({ judge: judgeId }),
    });
  }

  annotations(docId: string): Promise<{ doc_id: string; annotations: unknown[] }> {
    return this.request(`/documents/${encodeURIComponent(docId)}/annotations`);
  }
}

export function freshToken(sessionId: string, stageNumber: number): string {
  const noise = Math.random().toString(36).slice(2, 10);
  return `${sessionId}:${stageNumber}:${noise}`;
}
