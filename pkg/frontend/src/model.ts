// Pure view helpers.  Everything here is a projection of server payloads;
// no proof state lives on the client.

import type { BindingView, SessionView, SpaceNodeView } from "./api.js";

export const HISTORY_WARNING_DEPTH = 10;

const BADGES: Record<string, string> = {
  open: "Open",
  "closed-t1": "Closed-T1",
  "stuck-t2": "Stuck-T2",
};

export function badgeText(status: string): string {
  return BADGES[status] ?? status;
}

/** Bindings for each goal index, aligned with state_text.  A goal with no
 * entry in the server's applicable list gets an empty slot, which the view
 * renders as "no applicable operators". */
export function bindingsPerGoal(view: SessionView): BindingView[][] {
  const slots: BindingView[][] = view.state_text.map(() => []);
  for (const b of view.applicable) {
    if (b.goal >= 0 && b.goal < slots.length) slots[b.goal].push(b);
  }
  return slots;
}

export function historyWarning(depth: number): string | null {
  if (depth <= HISTORY_WARNING_DEPTH) return null;
  return `history is ${depth} steps deep; this branch may be repeating itself`;
}

/** Parser errors from the server end with "(at position N)". */
export function parseErrorPosition(message: string): number | null {
  const m = /\(at position (\d+)\)\s*$/.exec(message);
  return m ? Number(m[1]) : null;
}

/** Two-line marker for an inline parse error: the offending text with a
 * caret under the reported position. */
export function caretLine(text: string, position: number): string {
  const col = Math.max(0, Math.min(position, text.length));
  return `${text}\n${" ".repeat(col)}^`;
}

export function countSpaceNodes(node: SpaceNodeView): number {
  let total = 1;
  for (const alt of node.alts) {
    for (const child of alt.children) total += countSpaceNodes(child);
  }
  return total;
}

/** Shape check before rendering a space payload; anything that fails this
 * goes to the raw-json fallback. */
export function isSpaceNode(value: unknown): value is SpaceNodeView {
  if (typeof value !== "object" || value === null) return false;
  const node = value as Record<string, unknown>;
  if (typeof node.text !== "string" || typeof node.expanded !== "boolean") return false;
  if (node.cyclic !== null && typeof node.cyclic !== "number") return false;
  if (!Array.isArray(node.alts)) return false;
  for (const alt of node.alts) {
    if (typeof alt !== "object" || alt === null) return false;
    const a = alt as Record<string, unknown>;
    if (!Array.isArray(a.via) || !a.via.every((v: unknown) => typeof v === "string")) return false;
    if (!Array.isArray(a.children) || !a.children.every(isSpaceNode)) return false;
  }
  return true;
}
