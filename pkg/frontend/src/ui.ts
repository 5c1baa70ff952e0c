/**
 * DOM layer. Builds the page once, then re-renders the dynamic regions
 * (message log, composer, error banner, admin panel) whenever the
 * controller or poller publishes new state. No framework: the page is one
 * chat column and one optional panel.
 */

import { AdminPoller, AdminViewModel, TimelineRow } from "./admin.js";
import { ChatController } from "./chat.js";
import { ChatViewState } from "./state.js";

const ROLES = ["student", "academic", "staff"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface AppHandles {
  root: HTMLElement;
  controller: ChatController;
  poller: AdminPoller;
}

export function mountApp(
  root: HTMLElement,
  controller: ChatController,
  poller: AdminPoller,
): AppHandles {
  root.replaceChildren();

  // error banner with retry
  const banner = el("div", { class: "banner", "data-testid": "error-banner", hidden: "" });
  const bannerText = el("span");
  const retryButton = el("button", { type: "button", "data-testid": "retry" }, "Retry");
  banner.append(bannerText, retryButton);

  // role/topic picker
  const picker = el("form", { class: "picker", "data-testid": "picker" });
  const roleSelect = el("select", { name: "role", "data-testid": "role" });
  for (const role of ROLES) roleSelect.append(el("option", { value: role }, role));
  const topicInput = el("input", {
    name: "topic",
    value: "campus life",
    "data-testid": "topic",
  });
  const startButton = el("button", { type: "submit", "data-testid": "start" }, "Start survey");
  picker.append(roleSelect, topicInput, startButton);

  // chat column
  const log = el("ol", { class: "log", "data-testid": "log" });
  const composer = el("form", { class: "composer", "data-testid": "composer" });
  const answerInput = el("input", {
    name: "answer",
    autocomplete: "off",
    "data-testid": "answer",
  });
  const sendButton = el("button", { type: "submit", "data-testid": "send" }, "Send");
  composer.append(answerInput, sendButton);
  const completionNote = el(
    "p",
    { class: "completion", "data-testid": "completion", hidden: "" },
    "Survey complete. Your responses have been recorded.",
  );

  // admin panel
  const adminSection = el("section", { class: "admin", "data-testid": "admin" });
  const tokenInput = el("input", {
    type: "password",
    placeholder: "admin token",
    autocomplete: "off",
    "data-testid": "admin-token",
  });
  const adminButton = el("button", { type: "button", "data-testid": "admin-enable" }, "Inspect");
  const adminBody = el("div", { "data-testid": "admin-body" });
  adminSection.append(tokenInput, adminButton, adminBody);

  root.append(banner, picker, log, composer, completionNote, adminSection);

  let lastStartOptions = { role: ROLES[0]!, topic: "campus life" };

  picker.addEventListener("submit", (event) => {
    event.preventDefault();
    lastStartOptions = {
      role: roleSelect.value,
      topic: topicInput.value.trim() || "campus life",
    };
    void controller.start(lastStartOptions);
  });

  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = answerInput.value;
    if (text.trim().length === 0) return; // blocked client-side
    answerInput.value = "";
    void controller.send(text);
  });

  retryButton.addEventListener("click", () => {
    controller.clearError();
    if (controller.state.sessionId === null) {
      void controller.start(lastStartOptions);
    }
  });

  adminButton.addEventListener("click", () => {
    const sessionId = controller.state.sessionId;
    if (sessionId === null || tokenInput.value === "") return;
    controller.setAdminMode(true);
    poller.start(sessionId, tokenInput.value);
  });

  controller.onChange((state) => renderChat(state));
  poller.onChange((model) => renderAdmin(model));

  function renderChat(state: ChatViewState): void {
    if (state.errorBanner !== null) {
      banner.hidden = false;
      bannerText.textContent = state.errorBanner;
    } else {
      banner.hidden = true;
    }

    picker.hidden = state.sessionId !== null || state.status === "starting";

    log.replaceChildren(
      ...state.messages.map((message) =>
        el("li", { class: `msg ${message.speaker}`, "data-seq": String(message.seq) }, message.text),
      ),
    );

    const inputLocked = state.status !== "active" || state.pendingSend;
    answerInput.disabled = inputLocked;
    sendButton.disabled = inputLocked;
    completionNote.hidden = state.status !== "completed";
  }

  function renderAdmin(model: AdminViewModel): void {
    if (model.accessDenied) {
      adminBody.replaceChildren(
        el("p", { class: "denied", "data-testid": "admin-denied" }, "Access denied: bad admin token."),
      );
      return;
    }
    if (model.snapshot === null) {
      adminBody.replaceChildren(el("p", {}, model.lastError ?? "No data yet."));
      return;
    }
    const heading = el(
      "p",
      { "data-testid": "admin-heading" },
      `exchange ${model.snapshot.t}/${model.snapshot.horizon}, state ${model.snapshot.state ?? "n/a"}`,
    );
    adminBody.replaceChildren(heading, renderTimeline(model.timeline));
  }

  renderChat(controller.state);
  renderAdmin(poller.model);
  return { root, controller, poller };
}

function formatNumber(value: number | null, digits = 3): string {
  return value === null ? "-" : value.toFixed(digits);
}

function renderTimeline(rows: TimelineRow[]): HTMLTableElement {
  const table = el("table", { class: "timeline", "data-testid": "timeline" });
  const head = el("tr");
  for (const label of ["t", "state", "action", "eps", "Q", "reward", "EV delta", ""]) {
    head.append(el("th", {}, label));
  }
  table.append(head);
  for (const row of rows) {
    const tr = el("tr", {
      class: row.explored === true ? "exchange explored" : "exchange",
      "data-testid": `timeline-row-${row.t}`,
    });
    tr.append(
      el("td", {}, String(row.t)),
      el("td", {}, row.state),
      el("td", {}, row.action ?? "-"),
      el("td", {}, formatNumber(row.epsilon, 4)),
      el("td", {}, formatNumber(row.composite)),
      el("td", {}, formatNumber(row.reward)),
      renderEvDeltaCell(row),
      el("td", { class: "flag" }, row.explored === true ? "explore" : ""),
    );
    table.append(tr);
  }
  return table;
}

/** Signed horizontal bar, width proportional to the EV movement. */
function renderEvDeltaCell(row: TimelineRow): HTMLTableCellElement {
  const cell = el("td", { class: "ev-delta" });
  if (row.evDelta === null) {
    cell.textContent = "-";
    return cell;
  }
  const bar = el("span", {
    class: row.evDelta >= 0 ? "bar pos" : "bar neg",
    "data-testid": `ev-bar-${row.t}`,
  });
  bar.style.width = `${Math.min(100, Math.abs(row.evDelta) * 200)}px`;
  bar.title = `${formatNumber(row.evBefore)} -> ${formatNumber(row.evAfter)}`;
  cell.append(bar, el("span", { class: "num" }, formatNumber(row.evDelta, 4)));
  return cell;
}
