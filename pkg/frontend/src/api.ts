// Typed client for the session protocol.  Every call hits the HTTP
// service; nothing is computed or cached on this side.

export interface BindingView {
  schema: string;
  principal: number | null;
  goal: number;
  label: string;
}

export interface SessionView {
  id: string;
  goal_text: string;
  status: string;
  depth: number;
  state_text: string[];
  moves: string[];
  applicable: BindingView[];
}

export interface TacticOutcome extends SessionView {
  applied: string[];
}

export interface SpaceAlt {
  via: string[];
  children: SpaceNodeView[];
}

export interface SpaceNodeView {
  text: string;
  expanded: boolean;
  cyclic: number | null;
  alts: SpaceAlt[];
}

export interface SpacePayload {
  id: string;
  depth: number;
  spaces: SpaceNodeView[];
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(method: string, url: string, body?: unknown): Promise<T> {
  const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
  if (body !== undefined) init.body = JSON.stringify(body);
  const res = await fetch(url, init);
  const text = await res.text();
  let data: unknown = null;
  try {
    data = text ? JSON.parse(text) : null;
  } catch {
    data = null;
  }
  if (!res.ok) {
    const detail =
      data && typeof data === "object" && typeof (data as { error?: unknown }).error === "string"
        ? (data as { error: string }).error
        : `${res.status} ${res.statusText}`;
    throw new ApiError(res.status, detail);
  }
  return data as T;
}

export class Client {
  constructor(readonly base: string) {}

  createSession(goal: string): Promise<SessionView> {
    return request("POST", `${this.base}/sessions`, { goal });
  }

  listSessions(): Promise<{ sessions: string[] }> {
    return request("GET", `${this.base}/sessions`);
  }

  getSession(id: string): Promise<SessionView> {
    return request("GET", `${this.base}/sessions/${id}`);
  }

  apply(id: string, label: string): Promise<SessionView> {
    return request("POST", `${this.base}/sessions/${id}/apply`, { binding: label });
  }

  backtrack(id: string): Promise<SessionView> {
    return request("POST", `${this.base}/sessions/${id}/backtrack`);
  }

  runTactic(id: string, tactic: string, starBudget?: number): Promise<TacticOutcome> {
    const body: Record<string, unknown> = { tactic };
    if (starBudget !== undefined) body.star_budget = starBudget;
    return request("POST", `${this.base}/sessions/${id}/tactic`, body);
  }

  space(id: string, depth: number): Promise<SpacePayload> {
    return request("GET", `${this.base}/sessions/${id}/space?depth=${depth}`);
  }
}
