// Reduction-space panel.  Draws the bounded unfolding the server returns:
// one tree per open goal, alternatives marked with a bullet, empty
// alternatives as the closed box, repeats as dashed back-edges.

import type { SpaceNodeView, SpacePayload } from "./api.js";
import { countSpaceNodes, isSpaceNode } from "./model.js";

export const MAX_DEPTH = 5;
export const MAX_RENDER_NODES = 200;

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

function renderNode(node: SpaceNodeView, budget: { left: number }): HTMLElement {
  const box = el("div", "space-node");
  budget.left -= 1;

  const line = el("div", "node-line");
  line.appendChild(el("span", "node-text", node.text));
  if (node.cyclic !== null) {
    line.appendChild(el("span", "back-edge", `↺ repeats depth ${node.cyclic}`));
  } else if (!node.expanded) {
    line.appendChild(el("span", "frontier", "…"));
  } else if (node.alts.length === 0) {
    line.appendChild(el("span", "irreducible", "no reductions"));
  }
  box.appendChild(line);

  for (const alt of node.alts) {
    const row = el("div", "alt");
    const head = el("div", "alt-head");
    head.appendChild(el("span", "bullet", "•"));
    head.appendChild(el("span", "via", alt.via.join(", ")));
    if (alt.children.length === 0) {
      head.appendChild(el("span", "box", "□"));
    }
    row.appendChild(head);
    if (alt.children.length > 0) {
      const kids = el("div", "alt-children");
      for (const child of alt.children) {
        if (budget.left <= 0) {
          kids.appendChild(el("div", "truncated", "⋯"));
          break;
        }
        kids.appendChild(renderNode(child, budget));
      }
      row.appendChild(kids);
    }
    box.appendChild(row);
  }
  return box;
}

function fallback(root: HTMLElement, payload: unknown): void {
  const pre = el("pre", "raw-json");
  try {
    pre.textContent = JSON.stringify(payload, null, 2);
  } catch {
    pre.textContent = String(payload);
  }
  root.appendChild(el("div", "warning", "unexpected space payload, showing raw response"));
  root.appendChild(pre);
}

export function renderSpacePanel(root: HTMLElement, payload: unknown): void {
  root.textContent = "";

  const shaped =
    typeof payload === "object" &&
    payload !== null &&
    Array.isArray((payload as SpacePayload).spaces) &&
    (payload as SpacePayload).spaces.every(isSpaceNode);
  if (!shaped) {
    fallback(root, payload);
    return;
  }

  const doc = payload as SpacePayload;
  if (doc.spaces.length === 0) {
    root.appendChild(el("div", "space-empty", "□  no open goals"));
    return;
  }

  const total = doc.spaces.reduce((n, s) => n + countSpaceNodes(s), 0);
  const budget = { left: MAX_RENDER_NODES };
  doc.spaces.forEach((space, i) => {
    const panel = el("div", "space");
    if (doc.spaces.length > 1) panel.appendChild(el("div", "space-title", `goal ${i}`));
    if (budget.left > 0) {
      panel.appendChild(renderNode(space, budget));
    } else {
      panel.appendChild(el("div", "truncated", "⋯"));
    }
    root.appendChild(panel);
  });
  if (total > MAX_RENDER_NODES) {
    root.appendChild(
      el("div", "truncation-banner", `space has ${total} nodes, showing the first ${MAX_RENDER_NODES}`),
    );
  }
}
