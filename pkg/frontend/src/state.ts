/**
 * View state for one chat tab. Pure data plus transition helpers; nothing
 * here talks to the network. Invariants enforced on every transition:
 * messages stay strictly ordered by sequence number, and at most one send
 * can be in flight.
 */

export type Speaker = "interviewer" | "respondent" | "system";

export interface ChatMessage {
  seq: number;
  speaker: Speaker;
  text: string;
  timestamp: number;
}

export type SessionStatus = "idle" | "starting" | "active" | "completed" | "terminated";

export interface ChatViewState {
  messages: ChatMessage[];
  sessionId: string | null;
  status: SessionStatus;
  exchange: number;
  pendingSend: boolean;
  adminMode: boolean;
  errorBanner: string | null;
}

export function initialState(): ChatViewState {
  return {
    messages: [],
    sessionId: null,
    status: "idle",
    exchange: 0,
    pendingSend: false,
    adminMode: false,
    errorBanner: null,
  };
}

export class StateInvariantError extends Error {}

function assertOrdered(messages: ChatMessage[]): void {
  for (let i = 1; i < messages.length; i += 1) {
    const prev = messages[i - 1]!;
    const curr = messages[i]!;
    if (curr.seq <= prev.seq) {
      throw new StateInvariantError(`messages out of order at seq ${curr.seq}`);
    }
  }
}

export function appendMessage(
  state: ChatViewState,
  speaker: Speaker,
  text: string,
  now: () => number = Date.now,
): ChatViewState {
  const seq = state.messages.length === 0 ? 1 : state.messages[state.messages.length - 1]!.seq + 1;
  const messages = [...state.messages, { seq, speaker, text, timestamp: now() }];
  assertOrdered(messages);
  return { ...state, messages };
}

export function beginSend(state: ChatViewState): ChatViewState {
  if (state.pendingSend) {
    throw new StateInvariantError("a send is already in flight");
  }
  return { ...state, pendingSend: true };
}

export function finishSend(state: ChatViewState): ChatViewState {
  return { ...state, pendingSend: false };
}

export function canSubmit(state: ChatViewState, text: string): boolean {
  return state.status === "active" && !state.pendingSend && text.trim().length > 0;
}
