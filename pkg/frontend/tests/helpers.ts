import { ApiClient } from "../src/api.js";
import { DebugView } from "../src/types.js";

export type Step = (url: string, init?: RequestInit) => Response | Promise<Response>;

export interface Call {
  url: string;
  method: string;
  headers: Record<string, string>;
}

export function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Sequential fetch script; extra requests replay the final step. */
export function scriptedClient(steps: Step[]): { client: ApiClient; calls: Call[] } {
  const calls: Call[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      headers: (init?.headers as Record<string, string>) ?? {},
    });
    return steps[Math.min(calls.length - 1, steps.length - 1)]!(url, init);
  };
  return { client: new ApiClient("http://svc.test", fetchFn), calls };
}

export const OPENING = {
  session_id: "s1",
  status: "active",
  t: 0,
  question: "To start, tell me about campus life.",
  completed: false,
};

export function followUp(t: number): unknown {
  return { ...OPENING, t, question: `Follow-up ${t}?` };
}

export function exchangeDict(
  t: number,
  overrides: Record<string, unknown> = {},
): Record<string, unknown> {
  return {
    t,
    question: `Q${t}`,
    response: `A${t}`,
    lsde: { length: 0.5, disclosure: 0.3, emotion: 0.2, specificity: 0.4, composite: 0.33 },
    specificity_flags: { entities: 1, temporal: 0, spatial: 0 },
    degraded: [],
    state: "medium",
    reward: t === 1 ? null : 0.05,
    ev_update:
      t === 1 ? null : { state: "medium", action: "specification", before: 0.1, after: 0.16 },
    action: "specification",
    epsilon: 0.3,
    explored: t === 2,
    next_question: `Q${t + 1}`,
    generation_fallback: false,
    ...overrides,
  };
}

export function debugSnapshot(exchanges: Array<Record<string, unknown>>): DebugView {
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

/** Let queued promises and zero-delay timers run. */
export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
