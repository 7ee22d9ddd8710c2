// Pure DOM rendering: the screen is a function of the last server state.
// No protocol logic lives here; correctness is entirely server-side.

import { sumAmounts } from "./money.js";
import type { DoneState, FailedState, QueryState, SessionState } from "./types.js";

export interface ViewHandlers {
  onRoomClick(agent: number, room: number): void;
}

export function render(root: HTMLElement, state: SessionState, handlers: ViewHandlers): void {
  root.innerHTML = "";
  if (state.phase === "failed") {
    renderFailed(root, state);
    return;
  }
  if (state.phase === "done") {
    renderDone(root, state);
    return;
  }
  renderQuery(root, state, handlers);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function renderQuery(root: HTMLElement, state: QueryState, handlers: ViewHandlers): void {
  const section = el("section", { id: "query", "data-agent": String(state.agent) });
  const label = state.selection
    ? `Tenant ${state.agent}, final check: which room suits you at these prices?`
    : `Tenant ${state.agent}, which room suits you at these prices?`;
  section.appendChild(el("h2", {}, label));
  const cards = el("div", { class: "price-cards" });
  for (const card of state.prices) {
    const button = el(
      "button",
      {
        class: "price-card",
        "data-room": String(card.room),
        "data-share": card.share,
        "data-agent": String(state.agent),
        title: `exact share ${card.share}`,
      },
      `Room ${card.room}: ${card.amount}`,
    );
    button.addEventListener("click", () => handlers.onRoomClick(state.agent, card.room));
    cards.appendChild(button);
  }
  section.appendChild(cards);
  section.appendChild(
    el("p", { class: "progress" },
       `Answer ${state.answers_used + 1} of at most ${state.max_answers}`),
  );
  root.appendChild(section);
  root.appendChild(renderHistory(state));
}

function renderHistory(state: QueryState | DoneState): HTMLElement {
  const section = el("section", { id: "history" });
  section.appendChild(el("h3", {}, "Answers so far"));
  const list = el("ol", {});
  for (const entry of state.history) {
    const prices = entry.prices.map((p) => `${p.room}: ${p.amount}`).join(", ");
    list.appendChild(
      el("li", {}, `Tenant ${entry.agent} chose room ${entry.room} at (${prices})`),
    );
  }
  section.appendChild(list);
  return section;
}

function renderDone(root: HTMLElement, state: DoneState): void {
  const section = el("section", { id: "done" });
  section.appendChild(el("h2", {}, "Agreement reached"));
  const table = el("table", { class: "assignment" });
  const head = el("tr", {});
  for (const title of ["Tenant", "Room", "Rent"]) {
    head.appendChild(el("th", {}, title));
  }
  table.appendChild(head);
  for (const row of state.assignment) {
    const tr = el("tr", {
      "data-tenant": String(row.tenant),
      "data-room": String(row.room),
    });
    tr.appendChild(el("td", {}, `Tenant ${row.tenant}`));
    tr.appendChild(el("td", {}, `Room ${row.room}`));
    tr.appendChild(el("td", { class: "rent", title: `exact ${row.rent_exact}` }, row.rent));
    table.appendChild(tr);
  }
  section.appendChild(table);
  const total = sumAmounts(state.assignment.map((r) => r.rent));
  section.appendChild(el("p", { class: "total" }, `Total: ${total}`));
  const note = state.note ?? (state.verified ? "verified against ground truth" : "");
  if (note) {
    section.appendChild(el("p", { class: "verify-note" }, note));
  }
  root.appendChild(section);
  root.appendChild(renderHistory(state));
}

function renderFailed(root: HTMLElement, state: FailedState): void {
  const section = el("section", { id: "failed" });
  section.appendChild(el("h2", {}, "Session failed"));
  section.appendChild(el("p", {}, state.reason));
  root.appendChild(section);
}

export function renderNotice(root: HTMLElement, text: string): void {
  let notice = root.querySelector("#notice");
  if (!notice) {
    notice = document.createElement("p");
    notice.id = "notice";
    root.prepend(notice);
  }
  notice.textContent = text;
}

export function clearNotice(root: HTMLElement): void {
  root.querySelector("#notice")?.remove();
}
