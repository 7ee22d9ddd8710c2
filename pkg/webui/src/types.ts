// Server payload shapes, mirrored from the session API.

export interface PriceCard {
  room: number;
  amount: string; // "1000.00"
  share: string; // exact fraction "1/3"
}

export interface HistoryEntry {
  agent: number;
  selection: boolean;
  prices: PriceCard[];
  point: string[];
  room: number;
}

export interface AssignmentRow {
  tenant: number;
  room: number;
  rent: string;
  rent_exact: string;
}

export interface QueryState {
  phase: "awaiting_answer" | "selection_answer";
  id: string;
  d: number;
  agent: number;
  selection: boolean;
  prices: PriceCard[];
  point: string[];
  allowed_rooms: number[];
  answers_used: number;
  max_answers: number;
  history: HistoryEntry[];
}

export interface DoneState {
  phase: "done";
  id: string;
  d: number;
  certificate: Record<string, unknown>;
  assignment: AssignmentRow[];
  rents: Record<string, string>;
  total_rent: string;
  answers_used: number;
  max_answers: number;
  history: HistoryEntry[];
  verified?: boolean;
  note?: string;
}

export interface FailedState {
  phase: "failed";
  id: string;
  reason: string;
}

export type SessionState = QueryState | DoneState | FailedState;

export interface ApiError {
  code: string;
  message: string;
}
