import json
import threading
import urllib.error
import urllib.request

import pytest

from reductive.service import make_server, start_background


@pytest.fixture(scope="module")
def base_url():
    server = make_server(port=0)
    start_background(server)
    host, port = server.server_address[:2]
    yield f"http://{host}:{port}"
    server.shutdown()
    server.server_close()


def call(base, method, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(
        base + path,
        data=data,
        method=method,
        headers={"Content-Type": "application/json"} if data else {},
    )
    try:
        with urllib.request.urlopen(req) as resp:
            raw = resp.read().decode()
            ctype = resp.headers.get("Content-Type", "")
            doc = json.loads(raw) if "json" in ctype else raw
            return resp.status, doc, resp.headers
    except urllib.error.HTTPError as err:
        raw = err.read().decode()
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError:
            doc = raw
        return err.code, doc, err.headers


def new_session(base, goal="p, p -> q |- q"):
    status, doc, _ = call(base, "POST", "/sessions", {"goal": goal})
    assert status == 201
    return doc["id"]


def test_index_lists_endpoints(base_url):
    status, doc, _ = call(base_url, "GET", "/")
    assert status == 200
    assert "POST /sessions" in doc["endpoints"]


def test_create_and_fetch(base_url):
    sid = new_session(base_url)
    status, doc, _ = call(base_url, "GET", f"/sessions/{sid}")
    assert status == 200
    assert doc["goal_text"] == "p, p -> q |- q"
    assert doc["status"] == "open"
    assert {a["label"] for a in doc["applicable"]} == {"ImpL@1#0"}

    status, listing, _ = call(base_url, "GET", "/sessions")
    assert status == 200
    assert sid in listing["sessions"]


def test_apply_walks_to_closed(base_url):
    sid = new_session(base_url)
    for label in ("ImpL@1#0", "Ax@0#0", "Ax@0#0"):
        status, doc, _ = call(
            base_url, "POST", f"/sessions/{sid}/apply", {"binding": label}
        )
        assert status == 200
    assert doc["status"] == "closed-t1"
    assert doc["state"] == []
    assert doc["moves"] == ["ImpL@1#0", "Ax@0#0", "Ax@0#0"]


def test_apply_accepts_the_json_binding_form(base_url):
    sid = new_session(base_url)
    status, doc, _ = call(
        base_url,
        "POST",
        f"/sessions/{sid}/apply",
        {"binding": {"schema": "ImpL", "principal": 1, "goal": 0}},
    )
    assert status == 200
    assert doc["moves"] == ["ImpL@1#0"]


def test_backtrack_round_trip(base_url):
    sid = new_session(base_url)
    call(base_url, "POST", f"/sessions/{sid}/apply", {"binding": "ImpL@1#0"})
    status, doc, _ = call(base_url, "POST", f"/sessions/{sid}/backtrack")
    assert status == 200
    assert doc["depth"] == 0 and doc["moves"] == []


def test_tactic_endpoint_reports_applied_bindings(base_url):
    sid = new_session(base_url)
    status, doc, _ = call(
        base_url, "POST", f"/sessions/{sid}/tactic", {"tactic": "(Ax + ImpL)*"}
    )
    assert status == 200
    assert doc["applied"] == ["ImpL@1#0", "Ax@0#0", "Ax@0#0"]
    assert doc["status"] == "closed-t1"


def test_space_depth_two(base_url):
    sid = new_session(base_url, goal="p -> p |- p")
    status, doc, _ = call(base_url, "GET", f"/sessions/{sid}/space?depth=2")
    assert status == 200
    assert doc["depth"] == 2
    assert len(doc["spaces"]) == 1
    root = doc["spaces"][0]
    assert root["expanded"] is True
    assert len(root["alts"]) >= 1


def test_space_default_depth_is_two(base_url):
    sid = new_session(base_url)
    _, with_default, _ = call(base_url, "GET", f"/sessions/{sid}/space")
    assert with_default["depth"] == 2


def test_export_dot_and_json(base_url):
    sid = new_session(base_url)
    call(base_url, "POST", f"/sessions/{sid}/apply", {"binding": "ImpL@1#0"})

    status, dot, headers = call(base_url, "GET", f"/sessions/{sid}/export?format=dot")
    assert status == 200
    assert "digraph" in dot
    assert "text/plain" in headers.get("Content-Type", "")

    status, doc, _ = call(base_url, "GET", f"/sessions/{sid}/export?format=json")
    assert status == 200
    assert doc["via"] == "ImpL@1"
    assert len(doc["children"]) == 2


# --- error mapping -------------------------------------------------------------


def test_unknown_session_is_404(base_url):
    status, doc, _ = call(base_url, "GET", "/sessions/nonesuch")
    assert status == 404
    assert "error" in doc


def test_unroutable_path_is_404(base_url):
    status, _, _ = call(base_url, "GET", "/frobnicate")
    assert status == 404


def test_method_not_allowed_is_405(base_url):
    status, _, _ = call(base_url, "POST", "/")
    assert status == 405


def test_bad_goal_is_400(base_url):
    status, doc, _ = call(base_url, "POST", "/sessions", {"goal": "p |-"})
    assert status == 400
    status, _, _ = call(base_url, "POST", "/sessions", {"goal": 7})
    assert status == 400
    status, _, _ = call(base_url, "POST", "/sessions", {})
    assert status == 400


def test_unparseable_body_is_400(base_url):
    req = urllib.request.Request(
        base_url + "/sessions",
        data=b"{not json",
        method="POST",
        headers={"Content-Type": "application/json"},
    )
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(req)
    assert err.value.code == 400


def test_stale_binding_is_409(base_url):
    sid = new_session(base_url)
    status, doc, _ = call(
        base_url, "POST", f"/sessions/{sid}/apply", {"binding": "Ax@0#0"}
    )
    assert status == 409


def test_backtrack_at_root_is_409(base_url):
    sid = new_session(base_url)
    status, _, _ = call(base_url, "POST", f"/sessions/{sid}/backtrack")
    assert status == 409


def test_failed_tactic_is_422(base_url):
    sid = new_session(base_url, goal="|- p")
    status, doc, _ = call(
        base_url, "POST", f"/sessions/{sid}/tactic", {"tactic": "Ax*"}
    )
    assert status == 422


def test_bad_tactic_syntax_is_400(base_url):
    sid = new_session(base_url)
    status, _, _ = call(
        base_url, "POST", f"/sessions/{sid}/tactic", {"tactic": "((Ax"}
    )
    assert status == 400
    status, _, _ = call(
        base_url, "POST", f"/sessions/{sid}/tactic", {"tactic": "Frob"}
    )
    assert status == 400


def test_bad_binding_label_is_400(base_url):
    sid = new_session(base_url)
    status, _, _ = call(
        base_url, "POST", f"/sessions/{sid}/apply", {"binding": "Nonsense@9"}
    )
    assert status == 400
    status, _, _ = call(base_url, "POST", f"/sessions/{sid}/apply", {"binding": 3})
    assert status == 400


def test_space_depth_limits(base_url):
    sid = new_session(base_url)
    status, _, _ = call(base_url, "GET", f"/sessions/{sid}/space?depth=9")
    assert status == 400
    status, _, _ = call(base_url, "GET", f"/sessions/{sid}/space?depth=-1")
    assert status == 400
    status, _, _ = call(base_url, "GET", f"/sessions/{sid}/space?depth=lots")
    assert status == 400


def test_unknown_export_format_is_400(base_url):
    sid = new_session(base_url)
    status, _, _ = call(base_url, "GET", f"/sessions/{sid}/export?format=xml")
    assert status == 400


# --- cross-origin access ---------------------------------------------------------


def test_cors_headers_present(base_url):
    _, _, headers = call(base_url, "GET", "/sessions")
    assert headers.get("Access-Control-Allow-Origin") == "*"


def test_preflight(base_url):
    req = urllib.request.Request(base_url + "/sessions", method="OPTIONS")
    with urllib.request.urlopen(req) as resp:
        assert resp.status == 204
        assert "POST" in resp.headers.get("Access-Control-Allow-Methods", "")


# --- concurrency ------------------------------------------------------------------


def test_concurrent_creates_all_land(base_url):
    ids = []
    errors = []

    def hit():
        try:
            ids.append(new_session(base_url, goal="p |- p"))
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=hit) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(set(ids)) == 16
    _, listing, _ = call(base_url, "GET", "/sessions")
    assert set(ids) <= set(listing["sessions"])
