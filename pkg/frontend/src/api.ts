/**
 * Thin HTTP client for the survey service. No retries, no caches, no
 * policy logic: every method is one request, parsed against the strict
 * response schema for its route.
 */

import {
  DebugView,
  HealthView,
  RespondentView,
  SessionOptions,
  debugViewSchema,
  healthSchema,
  respondentViewSchema,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Network failure or unreachable server, as opposed to an HTTP error. */
export class ServerUnreachableError extends Error {
  constructor(cause: unknown) {
    super(`server unreachable: ${String(cause)}`);
    this.name = "ServerUnreachableError";
  }
}

async function parseJson(response: Response): Promise<unknown> {
  try {
    return await response.json();
  } catch (cause) {
    throw new ApiError(`invalid JSON from server: ${String(cause)}`, response.status);
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // bind so callers can pass the bare global without losing `this`
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request(
    path: string,
    init: RequestInit,
  ): Promise<{ status: number; body: unknown }> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (cause) {
      throw new ServerUnreachableError(cause);
    }
    return { status: response.status, body: await parseJson(response) };
  }

  async health(): Promise<HealthView> {
    const { status, body } = await this.request("/healthz", { method: "GET" });
    if (status !== 200) throw new ApiError("health check failed", status);
    return healthSchema.parse(body);
  }

  async createSession(options: SessionOptions): Promise<RespondentView> {
    const { status, body } = await this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
    if (status !== 201) {
      throw new ApiError(`session creation failed (${status})`, status);
    }
    return respondentViewSchema.parse(body);
  }

  /**
   * Submit one response. The idempotency key makes network-level retries
   * of the same logical send safe; a replayed key returns the cached
   * outcome instead of consuming another exchange.
   */
  async sendMessage(
    sessionId: string,
    text: string,
    idempotencyKey: string,
  ): Promise<RespondentView> {
    const { status, body } = await this.request(
      `/sessions/${encodeURIComponent(sessionId)}/messages`,
      {
        method: "POST",
        headers: {
          "Content-Type": "application/json",
          "Idempotency-Key": idempotencyKey,
        },
        body: JSON.stringify({ text }),
      },
    );
    if (status !== 200) {
      throw new ApiError(`message rejected (${status})`, status);
    }
    return respondentViewSchema.parse(body);
  }

  async getDebug(sessionId: string, adminToken: string): Promise<DebugView> {
    const { status, body } = await this.request(
      `/sessions/${encodeURIComponent(sessionId)}/debug`,
      {
        method: "GET",
        headers: { "X-Admin-Token": adminToken },
      },
    );
    if (status !== 200) {
      throw new ApiError(`debug view rejected (${status})`, status);
    }
    return debugViewSchema.parse(body);
  }

  async endSession(sessionId: string): Promise<RespondentView> {
    const { status, body } = await this.request(
      `/sessions/${encodeURIComponent(sessionId)}`,
      { method: "DELETE" },
    );
    if (status !== 200) {
      throw new ApiError(`session finalization failed (${status})`, status);
    }
    return respondentViewSchema.parse(body);
  }
}
