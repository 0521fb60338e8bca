// Browser wiring.  One session per tab, at most one mutation in flight.
// Every mutation is followed by a fresh GET; the panels only ever show
// server responses.

import { ApiError, Client, type SessionView } from "./api.js";
import { caretLine, parseErrorPosition } from "./model.js";
import { renderSession, type SessionHandlers } from "./render.js";
import { MAX_DEPTH, renderSpacePanel } from "./space.js";

interface Ui {
  goalInput: HTMLInputElement;
  goalError: HTMLElement;
  sessionPanel: HTMLElement;
  spacePanel: HTMLElement;
  depthSlider: HTMLInputElement;
  depthLabel: HTMLElement;
}

const state = {
  client: new Client(defaultBase()),
  sessionId: null as string | null,
  view: null as SessionView | null,
  busy: false,
  undone: null as string | null,
  notice: null as string | null,
};

let ui: Ui;

function defaultBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? "http://127.0.0.1:8421";
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return `cannot reach the server: ${err.message}`;
  return String(err);
}

function handlers(): SessionHandlers {
  return {
    onApply: (label) => void mutate(() => state.client.apply(state.sessionId!, label)),
    onUndo: () =>
      void mutate(async () => {
        const undone = state.view?.moves.at(-1) ?? null;
        const view = await state.client.backtrack(state.sessionId!);
        state.undone = undone;
        return view;
      }),
    onTactic: (text) =>
      void mutate(async () => {
        const outcome = await state.client.runTactic(state.sessionId!, text);
        state.notice = `tactic applied: ${outcome.applied.join(", ") || "nothing"}`;
        return outcome;
      }),
  };
}

function paintSession(): void {
  if (!state.view) return;
  renderSession(
    ui.sessionPanel,
    state.view,
    { busy: state.busy, undone: state.undone, notice: state.notice },
    handlers(),
  );
}

async function paintSpace(): Promise<void> {
  if (!state.sessionId) return;
  const depth = Number(ui.depthSlider.value);
  ui.depthLabel.textContent = `depth ${depth}`;
  try {
    const payload = await state.client.space(state.sessionId, depth);
    renderSpacePanel(ui.spacePanel, payload);
  } catch (err) {
    renderSpacePanel(ui.spacePanel, { error: describe(err) });
  }
}

async function refresh(): Promise<void> {
  if (!state.sessionId) return;
  state.view = await state.client.getSession(state.sessionId);
  paintSession();
  await paintSpace();
}

/** Run one mutation: disable the controls, let the round-trip finish, then
 * re-fetch no matter how it went.  A 409 means the step no longer fits the
 * server's state, so the refresh doubles as the recovery. */
async function mutate(step: () => Promise<SessionView>): Promise<void> {
  if (state.busy || !state.sessionId) return;
  state.busy = true;
  state.notice = null;
  state.undone = null;
  paintSession();
  try {
    await step();
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      state.notice = `out of step with the server (${err.message}); view refreshed`;
    } else {
      state.notice = describe(err);
    }
  } finally {
    state.busy = false;
  }
  try {
    await refresh();
  } catch (err) {
    state.notice = describe(err);
    paintSession();
  }
}

async function startSession(): Promise<void> {
  if (state.busy) return;
  const text = ui.goalInput.value;
  ui.goalError.textContent = "";
  state.busy = true;
  try {
    const view = await state.client.createSession(text);
    state.sessionId = view.id;
    state.view = view;
    state.undone = null;
    state.notice = null;
  } catch (err) {
    const message = describe(err);
    ui.goalError.appendChild(document.createTextNode(message));
    const position = parseErrorPosition(message);
    if (position !== null) {
      const pre = document.createElement("pre");
      pre.className = "caret";
      pre.textContent = caretLine(text, position);
      ui.goalError.appendChild(pre);
    }
    state.busy = false;
    return;
  }
  state.busy = false;
  paintSession();
  await paintSpace();
}

function install(): void {
  const app = document.querySelector("#app")!;

  const entry = document.createElement("div");
  entry.className = "goal-entry";
  const goalInput = document.createElement("input");
  goalInput.id = "goal";
  goalInput.placeholder = "p, p -> q |- q";
  goalInput.onkeydown = (e) => {
    if (e.key === "Enter") void startSession();
  };
  entry.appendChild(goalInput);
  const start = document.createElement("button");
  start.id = "start";
  start.textContent = "Start";
  start.onclick = () => void startSession();
  entry.appendChild(start);
  const goalError = document.createElement("div");
  goalError.id = "goal-error";
  goalError.className = "goal-error";
  entry.appendChild(goalError);
  app.appendChild(entry);

  const sessionPanel = document.createElement("div");
  sessionPanel.id = "session";
  app.appendChild(sessionPanel);

  const spaceHead = document.createElement("div");
  spaceHead.className = "space-head";
  spaceHead.appendChild(document.createTextNode("reduction space "));
  const depthSlider = document.createElement("input");
  depthSlider.id = "depth";
  depthSlider.type = "range";
  depthSlider.min = "1";
  depthSlider.max = String(MAX_DEPTH);
  depthSlider.value = "2";
  depthSlider.oninput = () => void paintSpace();
  spaceHead.appendChild(depthSlider);
  const depthLabel = document.createElement("span");
  depthLabel.id = "depth-label";
  depthLabel.textContent = "depth 2";
  spaceHead.appendChild(depthLabel);
  app.appendChild(spaceHead);

  const spacePanel = document.createElement("div");
  spacePanel.id = "space";
  app.appendChild(spacePanel);

  ui = { goalInput, goalError, sessionPanel, spacePanel, depthSlider, depthLabel };
}

install();
