// DOM rendering for one session.  The view is rebuilt from scratch on every
// server response: what you see is always the last GET, never a local edit.

import type { SessionView } from "./api.js";
import { badgeText, bindingsPerGoal, historyWarning } from "./model.js";

export interface SessionHandlers {
  onApply(label: string): void;
  onUndo(): void;
  onTactic(text: string): void;
}

export interface RenderOptions {
  /** A mutation round-trip is in flight; all controls are disabled. */
  busy: boolean;
  /** Label removed by the last undo, shown greyed out for orientation. */
  undone: string | null;
  /** One-shot message (stale-binding refresh, tactic failure, ...). */
  notice: string | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderSession(
  root: HTMLElement,
  view: SessionView,
  opts: RenderOptions,
  handlers: SessionHandlers,
): void {
  root.textContent = "";

  const head = el("div", "session-head");
  head.appendChild(el("span", `badge badge-${view.status}`, badgeText(view.status)));
  head.appendChild(el("span", "session-goal", view.goal_text));
  head.appendChild(el("span", "session-depth", `history depth ${view.depth}`));
  root.appendChild(head);

  const warning = historyWarning(view.depth);
  if (warning) root.appendChild(el("div", "warning", warning));
  if (opts.notice) root.appendChild(el("div", "notice", opts.notice));

  const goals = el("ol", "goals");
  goals.start = 0;
  const slots = bindingsPerGoal(view);
  view.state_text.forEach((text, i) => {
    const item = el("li", "goal");
    item.appendChild(el("span", "goal-text", text));
    const row = el("div", "bindings");
    if (slots[i].length === 0) {
      row.appendChild(el("span", "no-bindings", "no applicable operators"));
    }
    for (const binding of slots[i]) {
      const button = el("button", "binding", binding.label);
      button.dataset.label = binding.label;
      button.disabled = opts.busy;
      button.onclick = () => handlers.onApply(binding.label);
      row.appendChild(button);
    }
    item.appendChild(row);
    goals.appendChild(item);
  });
  if (view.state_text.length === 0) {
    goals.appendChild(el("li", "goal goal-done", "□  nothing left to prove"));
  }
  root.appendChild(goals);

  const controls = el("div", "controls");
  const undo = el("button", "undo", "Undo");
  undo.disabled = opts.busy || view.depth === 0;
  undo.onclick = () => handlers.onUndo();
  controls.appendChild(undo);

  const tacticInput = el("input", "tactic-input");
  tacticInput.placeholder = "tactic, e.g. (Ax + ImpL)*";
  tacticInput.disabled = opts.busy;
  const tacticRun = el("button", "tactic-run", "Run tactic");
  tacticRun.disabled = opts.busy;
  tacticRun.onclick = () => handlers.onTactic(tacticInput.value);
  controls.appendChild(tacticInput);
  controls.appendChild(tacticRun);
  root.appendChild(controls);

  const history = el("ol", "moves");
  for (const label of view.moves) {
    history.appendChild(el("li", "move", label));
  }
  if (opts.undone) {
    history.appendChild(el("li", "move move-undone", opts.undone));
  }
  root.appendChild(history);
}
