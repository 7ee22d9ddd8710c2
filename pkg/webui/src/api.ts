import type { ApiError, SessionState } from "./types.js";

export class SessionApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, payload: ApiError) {
    super(payload.message);
    this.code = payload.code;
    this.status = status;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  const body = await res.json();
  if (!res.ok) {
    throw new SessionApiError(res.status, body as ApiError);
  }
  return body as T;
}

export class SessionApi {
  constructor(readonly baseUrl: string) {}

  async createSession(
    d: number,
    totalRent: string,
    epsilon: string,
    mode: "human" | "simulated" = "human",
    seed?: number,
  ): Promise<{ id: string; state: SessionState }> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ d, total_rent: totalRent, epsilon, mode, seed }),
    });
  }

  async getState(id: string): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}`);
  }

  async submitAnswer(id: string, agent: number, room: number): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}/answer`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ agent, room }),
    });
  }
}
