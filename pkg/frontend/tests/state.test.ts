import { describe, expect, it } from "vitest";

import {
  StateInvariantError,
  appendMessage,
  beginSend,
  canSubmit,
  finishSend,
  initialState,
} from "../src/state.js";

describe("chat view state", () => {
  it("starts idle and empty", () => {
    const state = initialState();
    expect(state.messages).toHaveLength(0);
    expect(state.status).toBe("idle");
    expect(state.pendingSend).toBe(false);
    expect(state.adminMode).toBe(false);
  });

  it("appends messages with strictly increasing sequence numbers", () => {
    let state = initialState();
    state = appendMessage(state, "interviewer", "q1", () => 100);
    state = appendMessage(state, "respondent", "a1", () => 100);
    state = appendMessage(state, "interviewer", "q2", () => 101);
    expect(state.messages.map((m) => m.seq)).toEqual([1, 2, 3]);
    expect(state.messages.map((m) => m.speaker)).toEqual([
      "interviewer",
      "respondent",
      "interviewer",
    ]);
  });

  it("does not mutate the previous state", () => {
    const before = initialState();
    appendMessage(before, "system", "x");
    expect(before.messages).toHaveLength(0);
  });

  it("allows at most one in-flight send", () => {
    const sending = beginSend(initialState());
    expect(sending.pendingSend).toBe(true);
    expect(() => beginSend(sending)).toThrow(StateInvariantError);
    expect(finishSend(sending).pendingSend).toBe(false);
  });

  it("gates submission on status, pending flag, and non-blank text", () => {
    const active = { ...initialState(), status: "active" as const };
    expect(canSubmit(active, "hello")).toBe(true);
    expect(canSubmit(active, "   ")).toBe(false);
    expect(canSubmit(active, "")).toBe(false);
    expect(canSubmit({ ...active, pendingSend: true }, "hello")).toBe(false);
    expect(canSubmit({ ...active, status: "completed" }, "hello")).toBe(false);
    expect(canSubmit(initialState(), "hello")).toBe(false);
  });
});
