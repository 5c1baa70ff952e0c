/**
 * Controller for the respondent chat flow. Holds the view state, talks to
 * the service through the thin client, and notifies the view layer after
 * every transition. All adaptation happens server-side; this layer only
 * relays questions and answers.
 */

import { ApiClient, ApiError, ServerUnreachableError } from "./api.js";
import {
  ChatViewState,
  appendMessage,
  beginSend,
  canSubmit,
  finishSend,
  initialState,
} from "./state.js";
import { RespondentView, SessionOptions } from "./types.js";

const BUSY_RETRY_LIMIT = 5;
const BUSY_RETRY_DELAY_MS = 300;

export type StateListener = (state: ChatViewState) => void;
export type SleepFn = (ms: number) => Promise<void>;

const defaultSleep: SleepFn = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

function newIdempotencyKey(): string {
  const cryptoApi = globalThis.crypto;
  if (cryptoApi && "randomUUID" in cryptoApi) {
    return cryptoApi.randomUUID();
  }
  return `key-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class ChatController {
  state: ChatViewState = initialState();
  private startInFlight: Promise<RespondentView | null> | null = null;
  private readonly listeners: StateListener[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly sleep: SleepFn = defaultSleep,
  ) {}

  onChange(listener: StateListener): void {
    this.listeners.push(listener);
  }

  private setState(next: ChatViewState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  /**
   * Create a session and show the opening question. Rapid duplicate calls
   * share one request: the first click wins, later clicks get the same
   * pending promise instead of creating extra sessions.
   */
  start(options: SessionOptions): Promise<RespondentView | null> {
    if (this.startInFlight) return this.startInFlight;
    if (this.state.sessionId !== null) return Promise.resolve(null);
    this.startInFlight = this.doStart(options).finally(() => {
      this.startInFlight = null;
    });
    return this.startInFlight;
  }

  private async doStart(options: SessionOptions): Promise<RespondentView | null> {
    this.setState({ ...this.state, status: "starting", errorBanner: null });
    try {
      const view = await this.api.createSession(options);
      let next: ChatViewState = { ...this.state, sessionId: view.session_id, status: "active" };
      if (view.question !== null) {
        next = appendMessage(next, "interviewer", view.question);
      }
      this.setState(next);
      return view;
    } catch (error) {
      this.setState({
        ...this.state,
        status: "idle",
        errorBanner: describeError(error),
      });
      return null;
    }
  }

  /**
   * Submit one answer. Empty text and double-sends are blocked client-side.
   * A 409 (server still processing an earlier request) queues a retry with
   * the same idempotency key, so the exchange is consumed at most once.
   */
  async send(text: string): Promise<RespondentView | null> {
    if (!canSubmit(this.state, text) || this.state.sessionId === null) {
      return null;
    }
    const sessionId = this.state.sessionId;
    this.setState(appendMessage(beginSend(this.state), "respondent", text));
    const key = newIdempotencyKey();
    try {
      for (let attempt = 0; ; attempt += 1) {
        try {
          const view = await this.api.sendMessage(sessionId, text, key);
          this.applyRespondentView(view);
          return view;
        } catch (error) {
          const busy = error instanceof ApiError && error.status === 409;
          if (!busy || attempt >= BUSY_RETRY_LIMIT) throw error;
          await this.sleep(BUSY_RETRY_DELAY_MS);
        }
      }
    } catch (error) {
      this.setState({ ...finishSend(this.state), errorBanner: describeError(error) });
      return null;
    }
  }

  async end(): Promise<void> {
    if (this.state.sessionId === null) return;
    try {
      const view = await this.api.endSession(this.state.sessionId);
      this.applyRespondentView(view);
    } catch (error) {
      this.setState({ ...this.state, errorBanner: describeError(error) });
    }
  }

  setAdminMode(enabled: boolean): void {
    this.setState({ ...this.state, adminMode: enabled });
  }

  clearError(): void {
    this.setState({ ...this.state, errorBanner: null });
  }

  private applyRespondentView(view: RespondentView): void {
    let next = finishSend(this.state);
    next = { ...next, exchange: view.t, errorBanner: null };
    if (view.question !== null) {
      next = appendMessage(next, "interviewer", view.question);
    }
    if (view.status === "completed") {
      next = appendMessage(
        { ...next, status: "completed" },
        "system",
        "That completes the survey. Thank you for your time.",
      );
    } else if (view.status === "terminated") {
      next = { ...next, status: "terminated" };
    }
    this.setState(next);
  }
}

function describeError(error: unknown): string {
  if (error instanceof ServerUnreachableError) {
    return "Cannot reach the survey server. Check the connection and retry.";
  }
  if (error instanceof ApiError) {
    return `The server rejected the request (${error.status}).`;
  }
  return `Unexpected error: ${String(error)}`;
}
