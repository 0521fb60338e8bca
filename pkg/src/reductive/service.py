"""A small HTTP front door for sessions.

Runs on the standard library server, loopback by default.  Everything is
JSON except the DOT export.  Routes:

  POST /sessions                    {"goal": "p, p -> q |- q"}  -> 201
  GET  /sessions                    known session ids
  GET  /sessions/{id}               current state, status, applicable bindings
  POST /sessions/{id}/apply         {"binding": "ImpL@1#0"} or the JSON form
  POST /sessions/{id}/backtrack     drop the latest step
  POST /sessions/{id}/tactic        {"tactic": "(Ax + ImpL)*"}
  GET  /sessions/{id}/space?depth=2 reduction space around each open goal
  GET  /sessions/{id}/export?format=dot|json   derivation built so far

Session errors map onto status codes: bad input 400, missing session 404,
inapplicable binding or backtrack at the root 409, a tactic that cannot
move the state 422.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .lang import FragmentError, ParseError, parse_sequent, sequent_from_json
from .reduction import InvalidBindingError, OperatorBinding
from .sessions import (
    CannotBacktrackError,
    SessionError,
    SessionStore,
    StaleBindingError,
    TacticFailedError,
    UnknownSessionError,
    derivation_tree,
    session_to_json,
)
from .space import space_to_json, tree_to_dot, tree_to_json, unfold
from .tactics import TacticSyntaxError, UnknownPrimitiveError

MAX_SPACE_DEPTH = 8


class _BadRequest(ValueError):
    pass


def _binding_from_payload(raw) -> OperatorBinding:
    try:
        if isinstance(raw, str):
            return OperatorBinding.from_label(raw)
        if isinstance(raw, dict):
            return OperatorBinding.from_json(raw)
    except InvalidBindingError as exc:
        raise _BadRequest(str(exc)) from exc
    raise _BadRequest("binding must be a label string or an object")


def _goal_from_payload(raw):
    if isinstance(raw, str):
        return parse_sequent(raw)
    if isinstance(raw, dict):
        return sequent_from_json(raw)
    raise _BadRequest("goal must be a sequent string or an object")


class _Handler(BaseHTTPRequestHandler):
    server_version = "reductive"
    protocol_version = "HTTP/1.1"

    @property
    def store(self) -> SessionStore:
        return self.server.store  # type: ignore[attr-defined]

    def log_message(self, fmt, *args) -> None:
        pass

    # -- plumbing ----------------------------------------------------------

    def _reply(self, code: int, payload, content_type: str = "application/json") -> None:
        if content_type == "application/json":
            body = json.dumps(payload, sort_keys=True).encode("utf-8")
        else:
            body = payload.encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, message: str) -> None:
        self._reply(code, {"error": message})

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        try:
            parsed = json.loads(self.rfile.read(length))
        except json.JSONDecodeError as exc:
            raise _BadRequest(f"body is not JSON: {exc}") from exc
        if not isinstance(parsed, dict):
            raise _BadRequest("body must be a JSON object")
        return parsed

    def _dispatch(self, method: str) -> None:
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        query = parse_qs(url.query)
        try:
            self._route(method, parts, query)
        except _BadRequest as exc:
            self._error(400, str(exc))
        except (ParseError, FragmentError, TacticSyntaxError, UnknownPrimitiveError) as exc:
            self._error(400, str(exc))
        except UnknownSessionError as exc:
            self._error(404, str(exc))
        except (StaleBindingError, CannotBacktrackError) as exc:
            self._error(409, str(exc))
        except TacticFailedError as exc:
            self._error(422, str(exc))
        except SessionError as exc:
            self._error(400, str(exc))

    def do_GET(self) -> None:  # noqa: N802  (stdlib naming)
        self._dispatch("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._dispatch("POST")

    def do_OPTIONS(self) -> None:  # noqa: N802
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # -- routes ------------------------------------------------------------

    def _route(self, method: str, parts: list[str], query: dict) -> None:
        if parts == []:
            if method == "GET":
                return self._reply(
                    200,
                    {
                        "service": "reductive",
                        "endpoints": [
                            "POST /sessions",
                            "GET /sessions",
                            "GET /sessions/{id}",
                            "POST /sessions/{id}/apply",
                            "POST /sessions/{id}/backtrack",
                            "POST /sessions/{id}/tactic",
                            "GET /sessions/{id}/space",
                            "GET /sessions/{id}/export",
                        ],
                    },
                )
            return self._error(405, "method not allowed")

        if parts == ["sessions"]:
            if method == "GET":
                return self._reply(200, {"sessions": self.store.ids()})
            if method == "POST":
                body = self._body()
                if "goal" not in body:
                    raise _BadRequest("missing goal")
                session = self.store.create(_goal_from_payload(body["goal"]))
                return self._reply(201, session_to_json(session))
            return self._error(405, "method not allowed")

        if len(parts) >= 2 and parts[0] == "sessions":
            session_id = parts[1]
            rest = parts[2:]
            if rest == [] and method == "GET":
                return self._reply(200, session_to_json(self.store.get(session_id)))
            if rest == ["apply"] and method == "POST":
                body = self._body()
                if "binding" not in body:
                    raise _BadRequest("missing binding")
                binding = _binding_from_payload(body["binding"])
                session = self.store.apply(session_id, binding)
                return self._reply(200, session_to_json(session))
            if rest == ["backtrack"] and method == "POST":
                session = self.store.backtrack(session_id)
                return self._reply(200, session_to_json(session))
            if rest == ["tactic"] and method == "POST":
                body = self._body()
                if "tactic" not in body or not isinstance(body["tactic"], str):
                    raise _BadRequest("missing tactic")
                budget = body.get("star_budget", 8)
                if not isinstance(budget, int) or budget < 1:
                    raise _BadRequest("star_budget must be a positive integer")
                session, applied = self.store.run_tactic(
                    session_id, body["tactic"], star_budget=budget
                )
                payload = session_to_json(session)
                payload["applied"] = [b.label() for b in applied]
                return self._reply(200, payload)
            if rest == ["space"] and method == "GET":
                depth = _int_param(query, "depth", default=2)
                if depth < 0 or depth > MAX_SPACE_DEPTH:
                    raise _BadRequest(f"depth must be between 0 and {MAX_SPACE_DEPTH}")
                session = self.store.get(session_id)
                spaces = [space_to_json(unfold(g, depth)) for g in session.state]
                return self._reply(
                    200,
                    {"id": session.session_id, "depth": depth, "spaces": spaces},
                )
            if rest == ["export"] and method == "GET":
                fmt = query.get("format", ["dot"])[0]
                session = self.store.get(session_id)
                tree = derivation_tree(session)
                if fmt == "dot":
                    return self._reply(200, tree_to_dot(tree), content_type="text/plain")
                if fmt == "json":
                    return self._reply(200, tree_to_json(tree))
                raise _BadRequest(f"unknown export format {fmt!r}")

        self._error(404, f"no route for {method} /{'/'.join(parts)}")


def _int_param(query: dict, name: str, default: int) -> int:
    values = query.get(name)
    if not values:
        return default
    try:
        return int(values[0])
    except ValueError as exc:
        raise _BadRequest(f"{name} must be an integer") from exc


def make_server(
    host: str = "127.0.0.1",
    port: int = 0,
    journal_dir: Optional[str] = None,
    store: Optional[SessionStore] = None,
) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), _Handler)
    server.store = store if store is not None else SessionStore(journal_dir)  # type: ignore[attr-defined]
    return server


def start_background(server: ThreadingHTTPServer) -> threading.Thread:
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread


def serve(host: str = "127.0.0.1", port: int = 8421, journal_dir: Optional[str] = None) -> None:
    server = make_server(host, port, journal_dir)
    bound_host, bound_port = server.server_address[:2]
    print(f"serving on http://{bound_host}:{bound_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
