import { afterEach, describe, expect, it, vi } from "vitest";

import { AdminPoller, buildTimeline } from "../src/admin.js";
import { ApiClient } from "../src/api.js";
import { DebugView } from "../src/types.js";

function exchange(t: number, overrides: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    t,
    question: `Q${t}`,
    response: `A${t}`,
    lsde: { length: 0.5, disclosure: 0.3, emotion: 0.2, specificity: 0.4, composite: 0.33 },
    specificity_flags: { entities: 1, temporal: 0, spatial: 0 },
    degraded: [],
    state: "medium",
    reward: t === 1 ? null : 0.05,
    ev_update: t === 1 ? null : { state: "medium", action: "specification", before: 0.1, after: 0.16 },
    action: "specification",
    epsilon: 0.3,
    explored: t === 2,
    next_question: `Q${t + 1}`,
    generation_fallback: false,
    ...overrides,
  };
}

function snapshot(exchanges: Array<Record<string, unknown>>): DebugView {
  return {
    session_id: "s1",
    status: "active",
    t: exchanges.length,
    question: "next?",
    completed: false,
    role: "student",
    topic: "campus life",
    horizon: 15,
    alpha: 0.3,
    seed: 7,
    state: "medium",
    ev_row: { specification: 0.16 },
    exchanges,
  } as DebugView;
}

function scriptedClient(steps: Array<() => Response | Promise<Response>>): {
  client: ApiClient;
  calls: string[];
} {
  const calls: string[] = [];
  const fetchFn = async (url: string): Promise<Response> => {
    calls.push(url);
    return steps[Math.min(calls.length - 1, steps.length - 1)]!();
  };
  return { client: new ApiClient("http://svc.test", fetchFn), calls };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.useRealTimers();
});

describe("timeline construction", () => {
  it("flattens exchanges into rows with EV deltas", () => {
    const rows = buildTimeline(snapshot([exchange(1), exchange(2)]));
    expect(rows).toHaveLength(2);
    expect(rows[0]!).toMatchObject({ t: 1, state: "medium", action: "specification" });
    expect(rows[0]!.evDelta).toBeNull();
    expect(rows[0]!.explored).toBe(false);
    expect(rows[1]!.evDelta).toBeCloseTo(0.06, 12);
    expect(rows[1]!.evBefore).toBe(0.1);
    expect(rows[1]!.evAfter).toBe(0.16);
    expect(rows[1]!.explored).toBe(true);
  });

  it("keeps terminal rows where the policy chose nothing", () => {
    const last = exchange(15, { action: null, epsilon: null, explored: null, next_question: null });
    const rows = buildTimeline(snapshot([last]));
    expect(rows[0]!.action).toBeNull();
    expect(rows[0]!.epsilon).toBeNull();
    expect(rows[0]!.evDelta).toBeCloseTo(0.06, 12);
  });
});

describe("admin poller", () => {
  it("publishes snapshots and keeps polling", async () => {
    vi.useFakeTimers();
    const { client, calls } = scriptedClient([() => json(200, snapshot([exchange(1)]))]);
    const poller = new AdminPoller(client, 10);
    poller.start("s1", "secret");
    await vi.advanceTimersByTimeAsync(35);
    poller.stop();
    expect(calls.length).toBeGreaterThanOrEqual(3);
    expect(poller.model.snapshot?.session_id).toBe("s1");
    expect(poller.model.timeline).toHaveLength(1);
    const frozen = calls.length;
    await vi.advanceTimersByTimeAsync(50);
    expect(calls.length).toBe(frozen);
  });

  it("stops and shows access denied on a bad token", async () => {
    vi.useFakeTimers();
    const { client, calls } = scriptedClient([() => json(403, { detail: "bad admin token" })]);
    const poller = new AdminPoller(client, 10);
    poller.start("s1", "wrong");
    await vi.advanceTimersByTimeAsync(50);
    expect(poller.model.accessDenied).toBe(true);
    expect(calls).toHaveLength(1); // timer cancelled after the rejection
  });

  it("records other failures without giving up", async () => {
    vi.useFakeTimers();
    const { client, calls } = scriptedClient([
      () => json(500, { detail: "boom" }),
      () => json(200, snapshot([exchange(1)])),
    ]);
    const poller = new AdminPoller(client, 10);
    poller.start("s1", "secret");
    await vi.advanceTimersByTimeAsync(5);
    expect(poller.model.lastError).toContain("500");
    await vi.advanceTimersByTimeAsync(30);
    poller.stop();
    expect(poller.model.lastError).toBeNull();
    expect(poller.model.snapshot).not.toBeNull();
    expect(calls.length).toBeGreaterThanOrEqual(2);
  });

  it("collapses overlapping ticks", async () => {
    let release!: (r: Response) => void;
    const gate = new Promise<Response>((resolve) => {
      release = resolve;
    });
    const { client, calls } = scriptedClient([() => gate]);
    const poller = new AdminPoller(client, 10_000);
    const first = poller.tick("s1", "secret");
    const second = poller.tick("s1", "secret");
    await second; // returns immediately, no second request
    expect(calls).toHaveLength(1);
    release(json(200, snapshot([exchange(1)])));
    await first;
    expect(poller.model.snapshot).not.toBeNull();
  });
});
