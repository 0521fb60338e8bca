"""Interactive reduction sessions.

A session holds one root goal and the full history of states reached from
it, so backtracking is a pop rather than a recomputation.  Every mutation
is journalled as one JSON line in an append-only file when the store has a
journal directory; replaying a journal reconstructs the session exactly,
which is what the command line relies on to carry sessions across
invocations.

Applying a tactic means taking the first derivation, in greedy order, that
moves the current state, and committing its bindings as one journal entry.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .lang import Goal, render_sequent, sequent_from_json, sequent_to_json
from .reduction import (
    OperatorBinding,
    State,
    applicable_bindings,
    classify,
    step_interleave,
)
from .tactics import first_derivation, parse_tactic


class SessionError(Exception):
    pass


class UnknownSessionError(SessionError):
    pass


class StaleBindingError(SessionError):
    """The binding does not apply to the session's current state."""


class CannotBacktrackError(SessionError):
    pass


class TacticFailedError(SessionError):
    pass


@dataclass
class Session:
    session_id: str
    goal: Goal
    states: list[State]
    moves: list[OperatorBinding] = field(default_factory=list)

    @property
    def state(self) -> State:
        return self.states[-1]

    @property
    def status(self) -> str:
        return classify(self.state)

    @property
    def depth(self) -> int:
        return len(self.states) - 1


def session_to_json(session: Session) -> dict:
    return {
        "id": session.session_id,
        "goal": sequent_to_json(session.goal),
        "goal_text": render_sequent(session.goal),
        "status": session.status,
        "depth": session.depth,
        "state": [sequent_to_json(g) for g in session.state],
        "state_text": [render_sequent(g) for g in session.state],
        "moves": [b.label() for b in session.moves],
        "applicable": [
            {**b.to_json(), "label": b.label()}
            for b in applicable_bindings(session.state)
        ],
    }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class SessionStore:
    """In-memory sessions, with one JSONL journal per session when given a
    directory.  All mutating calls take a per-session lock."""

    def __init__(self, journal_dir: Optional[str] = None):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._mutex = threading.Lock()
        self._dir: Optional[Path] = None
        if journal_dir is not None:
            self._dir = Path(journal_dir)
            self._dir.mkdir(parents=True, exist_ok=True)

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._mutex:
            return self._locks.setdefault(session_id, threading.Lock())

    def _journal_path(self, session_id: str) -> Optional[Path]:
        if self._dir is None:
            return None
        return self._dir / f"{session_id}.jsonl"

    def _record(self, session_id: str, event: dict) -> None:
        path = self._journal_path(session_id)
        if path is None:
            return
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def ids(self) -> list[str]:
        known = set(self._sessions)
        if self._dir is not None:
            known.update(p.stem for p in self._dir.glob("*.jsonl"))
        return sorted(known)

    def create(self, goal: Goal, session_id: Optional[str] = None) -> Session:
        session_id = session_id or uuid.uuid4().hex[:12]
        if session_id in self._sessions:
            raise SessionError(f"session {session_id} already exists")
        session = Session(session_id=session_id, goal=goal, states=[(goal,)])
        self._sessions[session_id] = session
        self._record(
            session_id,
            {
                "event": "created",
                "session": session_id,
                "goal": sequent_to_json(goal),
                "time": _now(),
            },
        )
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is not None:
            return session
        path = self._journal_path(session_id)
        if path is not None and path.exists():
            session = replay_journal(path)
            self._sessions[session_id] = session
            return session
        raise UnknownSessionError(f"no session {session_id}")

    def apply(self, session_id: str, binding: OperatorBinding) -> Session:
        with self._lock_for(session_id):
            session = self.get(session_id)
            _push_binding(session, binding)
            self._record(session_id, {"event": "applied", "binding": binding.to_json()})
            return session

    def backtrack(self, session_id: str) -> Session:
        with self._lock_for(session_id):
            session = self.get(session_id)
            if session.depth == 0:
                raise CannotBacktrackError("already at the root state")
            session.states.pop()
            session.moves.pop()
            self._record(session_id, {"event": "backtracked"})
            return session

    def run_tactic(
        self, session_id: str, text: str, star_budget: int = 8
    ) -> tuple[Session, list[OperatorBinding]]:
        tactic = parse_tactic(text)
        with self._lock_for(session_id):
            session = self.get(session_id)
            derivation = first_derivation(session.state, tactic, star_budget)
            if derivation is None:
                raise TacticFailedError(
                    f"tactic {text!r} does not move the current state"
                )
            bindings = [binding for binding, _ in derivation]
            for binding in bindings:
                _push_binding(session, binding)
            self._record(
                session_id,
                {
                    "event": "tactic",
                    "text": text,
                    "bindings": [b.to_json() for b in bindings],
                },
            )
            return session, bindings


def _push_binding(session: Session, binding: OperatorBinding) -> None:
    if binding not in applicable_bindings(session.state):
        raise StaleBindingError(
            f"{binding.label()} does not apply to the current state"
        )
    session.states.append(step_interleave(session.state, binding))
    session.moves.append(binding)


def derivation_tree(session: Session) -> "ReductionTree":
    """The derivation built so far, with open goals as bare leaves."""
    from .reduction import apply_operator
    from .space import ReductionTree

    class _Node:
        __slots__ = ("goal", "via", "children")

        def __init__(self, goal: Goal):
            self.goal = goal
            self.via = ""
            self.children: list["_Node"] = []

    root = _Node(session.goal)
    pending: list[_Node] = [root]
    state: State = (session.goal,)
    for binding in session.moves:
        node = pending[binding.goal]
        subgoals = apply_operator(state[binding.goal], binding.schema, binding.principal)
        node.via = binding.operator_name()
        node.children = [_Node(g) for g in subgoals]
        pending[binding.goal : binding.goal + 1] = node.children
        state = step_interleave(state, binding)

    def freeze(n: _Node) -> ReductionTree:
        return ReductionTree(n.goal, n.via, tuple(freeze(c) for c in n.children))

    return freeze(root)


def replay_journal(path) -> Session:
    """Rebuild a session from its journal; the result matches the live
    session event for event."""
    session: Optional[Session] = None
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            event = json.loads(line)
            kind = event["event"]
            if kind == "created":
                goal = sequent_from_json(event["goal"])
                session = Session(
                    session_id=event["session"], goal=goal, states=[(goal,)]
                )
                continue
            if session is None:
                raise SessionError(f"journal {path} does not start with creation")
            if kind == "applied":
                _push_binding(session, OperatorBinding.from_json(event["binding"]))
            elif kind == "backtracked":
                session.states.pop()
                session.moves.pop()
            elif kind == "tactic":
                for raw in event["bindings"]:
                    _push_binding(session, OperatorBinding.from_json(raw))
            else:
                raise SessionError(f"unknown journal event {kind!r}")
    if session is None:
        raise SessionError(f"journal {path} is empty")
    return session
