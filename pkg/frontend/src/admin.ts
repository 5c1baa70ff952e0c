/**
 * Admin-side poller for the token-gated debug endpoint. Polls once a
 * second while enabled, turns each snapshot into a flat timeline the
 * panel can render, and downgrades to an access-denied view on a bad
 * token. The token lives only in memory.
 */

import { ApiClient, ApiError } from "./api.js";
import { DebugView } from "./types.js";

export const POLL_INTERVAL_MS = 1000;

export interface TimelineRow {
  t: number;
  state: string;
  action: string | null;
  epsilon: number | null;
  explored: boolean | null;
  composite: number;
  reward: number | null;
  evBefore: number | null;
  evAfter: number | null;
  evDelta: number | null;
}

export interface AdminViewModel {
  accessDenied: boolean;
  lastError: string | null;
  snapshot: DebugView | null;
  timeline: TimelineRow[];
}

export function buildTimeline(snapshot: DebugView): TimelineRow[] {
  return snapshot.exchanges.map((exchange) => ({
    t: exchange.t,
    state: exchange.state,
    action: exchange.action,
    epsilon: exchange.epsilon,
    explored: exchange.explored,
    composite: exchange.lsde.composite,
    reward: exchange.reward,
    evBefore: exchange.ev_update?.before ?? null,
    evAfter: exchange.ev_update?.after ?? null,
    evDelta:
      exchange.ev_update === null
        ? null
        : exchange.ev_update.after - exchange.ev_update.before,
  }));
}

export type AdminListener = (model: AdminViewModel) => void;

export class AdminPoller {
  model: AdminViewModel = { accessDenied: false, lastError: null, snapshot: null, timeline: [] };
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly listeners: AdminListener[] = [];
  private ticking = false;

  constructor(
    private readonly api: ApiClient,
    private readonly intervalMs: number = POLL_INTERVAL_MS,
  ) {}

  onChange(listener: AdminListener): void {
    this.listeners.push(listener);
  }

  private publish(model: AdminViewModel): void {
    this.model = model;
    for (const listener of this.listeners) listener(model);
  }

  start(sessionId: string, token: string): void {
    this.stop();
    void this.tick(sessionId, token);
    this.timer = setInterval(() => void this.tick(sessionId, token), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** One poll cycle; overlapping ticks collapse rather than stack. */
  async tick(sessionId: string, token: string): Promise<void> {
    if (this.ticking) return;
    this.ticking = true;
    try {
      const snapshot = await this.api.getDebug(sessionId, token);
      this.publish({
        accessDenied: false,
        lastError: null,
        snapshot,
        timeline: buildTimeline(snapshot),
      });
    } catch (error) {
      if (error instanceof ApiError && (error.status === 401 || error.status === 403)) {
        this.stop();
        this.publish({ ...this.model, accessDenied: true, lastError: null });
      } else {
        this.publish({ ...this.model, lastError: String(error) });
      }
    } finally {
      this.ticking = false;
    }
  }
}
