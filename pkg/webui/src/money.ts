// Cent-exact money helpers for amounts rendered by the server ("62.50").

export function parseCents(amount: string): number {
  const m = amount.match(/^(\d+)\.(\d{2})$/);
  if (!m) {
    throw new Error(`bad money amount ${amount}`);
  }
  return Number(m[1]) * 100 + Number(m[2]);
}

export function formatCents(cents: number): string {
  const whole = Math.floor(cents / 100);
  const rest = cents % 100;
  return `${whole}.${String(rest).padStart(2, "0")}`;
}

export function sumAmounts(amounts: string[]): string {
  return formatCents(amounts.reduce((acc, a) => acc + parseCents(a), 0));
}

// Client-side mirror of the server's money validation: positive, at most
// two decimal places.
export function validRentInput(text: string): boolean {
  return /^\d+(\.\d{1,2})?$/.test(text.trim()) && Number(text) > 0;
}

// Epsilon must be a positive rational like "1/64" (or a positive integer).
export function validEpsilonInput(text: string): boolean {
  const m = text.trim().match(/^(\d+)(?:\/(\d+))?$/);
  if (!m) return false;
  const num = Number(m[1]);
  const den = m[2] === undefined ? 1 : Number(m[2]);
  return num > 0 && den > 0;
}
