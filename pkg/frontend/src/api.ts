// Thin fetch client for the steering service. Every call either resolves
// with the parsed body or throws ServiceApiError carrying the service's
// {code, message, pointer?} payload, so the UI can route messages to the
// offending field.

import type {
  ApiError,
  CreateSessionRequest,
  CycleRecord,
  CycleRequest,
  Snapshot,
} from "./types.js";

export class ServiceApiError extends Error {
  readonly code: string;
  readonly pointer?: string;
  readonly status: number;

  constructor(status: number, body: ApiError) {
    super(body.message);
    this.code = body.code;
    this.pointer = body.pointer;
    this.status = status;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let body: ApiError;
    try {
      body = (await resp.json()) as ApiError;
    } catch {
      body = { code: "http_error", message: `HTTP ${resp.status}` };
    }
    throw new ServiceApiError(resp.status, body);
  }
  return (await resp.json()) as T;
}

export class SteeringClient {
  constructor(readonly baseUrl: string = "") {}

  health(): Promise<{ status: string; version: string }> {
    return request(`${this.baseUrl}/healthz`);
  }

  createSession(body: CreateSessionRequest): Promise<Snapshot> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(sessionId: string): Promise<Snapshot> {
    return request(`${this.baseUrl}/sessions/${sessionId}`);
  }

  startCycle(
    sessionId: string,
    body: CycleRequest,
  ): Promise<{ session_id: string; cycle: number; status: string }> {
    return request(`${this.baseUrl}/sessions/${sessionId}/cycles`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getCycle(sessionId: string, k: number): Promise<CycleRecord> {
    return request(`${this.baseUrl}/sessions/${sessionId}/cycles/${k}`);
  }

  deleteSession(sessionId: string): Promise<{ deleted: boolean }> {
    return request(`${this.baseUrl}/sessions/${sessionId}`, { method: "DELETE" });
  }

  /** Poll the session until it reports idle; onTick sees every snapshot. */
  async waitForIdle(
    sessionId: string,
    onTick?: (snap: Snapshot) => void,
    intervalMs = 1000,
    timeoutMs = 10 * 60 * 1000,
  ): Promise<Snapshot> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const snap = await this.getSession(sessionId);
      onTick?.(snap);
      if (snap.status === "idle") return snap;
      if (Date.now() > deadline) throw new Error("cycle polling timed out");
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
