// Session controller: owns the last server state and re-renders on change.
// Every screen update comes from a server response; the only client-side
// smarts are input validation and the polling loop in main.ts.

import { SessionApi, SessionApiError } from "./api.js";
import { validEpsilonInput, validRentInput } from "./money.js";
import { clearNotice, render, renderNotice } from "./view.js";
import type { SessionState } from "./types.js";

export class AppController {
  readonly api: SessionApi;
  readonly root: HTMLElement;
  sessionId: string | null = null;
  lastState: SessionState | null = null;

  constructor(baseUrl: string, root: HTMLElement) {
    this.api = new SessionApi(baseUrl);
    this.root = root;
  }

  validateStartInputs(d: number, totalRent: string, epsilon: string): string | null {
    if (!Number.isInteger(d) || d < 2) {
      return "need at least 2 tenants";
    }
    if (!validRentInput(totalRent)) {
      return "total rent must be a positive amount with at most 2 decimals";
    }
    if (!validEpsilonInput(epsilon)) {
      return "epsilon must be a positive fraction like 1/64";
    }
    return null;
  }

  async start(d: number, totalRent: string, epsilon: string): Promise<SessionState | null> {
    const problem = this.validateStartInputs(d, totalRent, epsilon);
    if (problem !== null) {
      renderNotice(this.root, problem);
      return null;
    }
    try {
      const created = await this.api.createSession(d, totalRent, epsilon);
      this.sessionId = created.id;
      this.apply(created.state);
      return created.state;
    } catch (err) {
      this.showError(err);
      return null;
    }
  }

  async answer(agent: number, room: number): Promise<SessionState | null> {
    if (this.sessionId === null) {
      return null;
    }
    try {
      const state = await this.api.submitAnswer(this.sessionId, agent, room);
      this.apply(state);
      return state;
    } catch (err) {
      // A wrong turn (or any rejection) is a notice, not a state change.
      this.showError(err);
      return null;
    }
  }

  async refresh(): Promise<SessionState | null> {
    if (this.sessionId === null) {
      return null;
    }
    try {
      const state = await this.api.getState(this.sessionId);
      this.apply(state);
      return state;
    } catch (err) {
      this.showError(err);
      return null;
    }
  }

  get finished(): boolean {
    return this.lastState !== null && this.lastState.phase !== "awaiting_answer"
      && this.lastState.phase !== "selection_answer";
  }

  private apply(state: SessionState): void {
    this.lastState = state;
    clearNotice(this.root);
    render(this.root, state, {
      onRoomClick: (agent, room) => void this.answer(agent, room),
    });
  }

  private showError(err: unknown): void {
    if (err instanceof SessionApiError) {
      renderNotice(this.root, `${err.code}: ${err.message}`);
    } else {
      renderNotice(this.root, `request failed: ${String(err)}`);
    }
  }
}
