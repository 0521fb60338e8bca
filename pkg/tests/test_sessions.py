import json
import random

import pytest

from helpers import random_sequent
from reductive.lang import parse_sequent, render_sequent
from reductive.reduction import OperatorBinding, applicable_bindings
from reductive.sessions import (
    CannotBacktrackError,
    SessionStore,
    StaleBindingError,
    TacticFailedError,
    UnknownSessionError,
    derivation_tree,
    replay_journal,
    session_to_json,
)
from reductive.space import ReductionTree


def seq(text):
    return parse_sequent(text)


def binding(label):
    return OperatorBinding.from_label(label)


MODUS_PONENS = seq("p, p -> q |- q")


@pytest.fixture
def store(tmp_path):
    return SessionStore(journal_dir=tmp_path / "journals")


# --- the happy path ----------------------------------------------------------


def test_create_apply_close(store):
    s = store.create(MODUS_PONENS)
    assert s.status == "open"
    assert s.depth == 0

    store.apply(s.session_id, binding("ImpL@1#0"))
    store.apply(s.session_id, binding("Ax@0#0"))
    s = store.apply(s.session_id, binding("Ax@0#0"))

    assert s.state == ()
    assert s.status == "closed-t1"
    assert s.depth == 3
    assert [b.label() for b in s.moves] == ["ImpL@1#0", "Ax@0#0", "Ax@0#0"]


def test_backtrack_pops_one_level(store):
    s = store.create(MODUS_PONENS)
    store.apply(s.session_id, binding("ImpL@1#0"))
    mid = s.state
    store.apply(s.session_id, binding("Ax@0#0"))
    store.backtrack(s.session_id)
    assert s.state == mid
    assert len(s.moves) == 1


def test_apply_after_backtrack_is_identity(store):
    s = store.create(MODUS_PONENS)
    before_states = list(s.states)
    before_moves = list(s.moves)
    store.apply(s.session_id, binding("ImpL@1#0"))
    store.backtrack(s.session_id)
    assert s.states == before_states
    assert s.moves == before_moves


def test_tactic_run_commits_the_first_derivation(store):
    s = store.create(MODUS_PONENS)
    _, bindings = store.run_tactic(s.session_id, "(Ax + ImpL)*")
    assert [b.label() for b in bindings] == ["ImpL@1#0", "Ax@0#0", "Ax@0#0"]
    assert s.status == "closed-t1"


def test_session_ids_are_distinct(store):
    a = store.create(seq("p |- p"))
    b = store.create(seq("p |- p"))
    assert a.session_id != b.session_id
    assert set(store.ids()) >= {a.session_id, b.session_id}


# --- refusals ----------------------------------------------------------------


def test_unknown_session(store):
    with pytest.raises(UnknownSessionError):
        store.get("nonesuch")
    with pytest.raises(UnknownSessionError):
        store.apply("nonesuch", binding("Ax@0#0"))


def test_stale_binding_is_refused(store):
    s = store.create(MODUS_PONENS)
    with pytest.raises(StaleBindingError):
        store.apply(s.session_id, binding("Ax@0#0"))  # q is not in the context yet
    assert s.depth == 0


def test_backtrack_at_root_is_refused(store):
    s = store.create(MODUS_PONENS)
    with pytest.raises(CannotBacktrackError):
        store.backtrack(s.session_id)


def test_failing_tactic_leaves_the_session_alone(store):
    s = store.create(seq("|- p"))
    with pytest.raises(TacticFailedError):
        store.run_tactic(s.session_id, "Ax*")
    assert s.depth == 0
    path = store._journal_path(s.session_id)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 1  # only the creation event


def test_duplicate_session_id_is_refused(store):
    store.create(seq("p |- p"), session_id="fixed")
    with pytest.raises(Exception):
        store.create(seq("q |- q"), session_id="fixed")


# --- journals ----------------------------------------------------------------


def test_journal_lines_are_json_events(store):
    s = store.create(MODUS_PONENS)
    store.apply(s.session_id, binding("ImpL@1#0"))
    store.backtrack(s.session_id)
    store.run_tactic(s.session_id, "ImpL; Ax; Ax")

    path = store._journal_path(s.session_id)
    events = [json.loads(line) for line in path.read_text().splitlines()]
    assert [e["event"] for e in events] == ["created", "applied", "backtracked", "tactic"]
    assert events[0]["goal"] == json.loads(json.dumps(events[0]["goal"]))
    assert events[3]["text"] == "ImpL; Ax; Ax"
    assert len(events[3]["bindings"]) == 3


def test_replay_reconstructs_the_session(store):
    s = store.create(MODUS_PONENS)
    store.apply(s.session_id, binding("ImpL@1#0"))
    store.apply(s.session_id, binding("Ax@0#0"))
    store.backtrack(s.session_id)
    store.apply(s.session_id, binding("Ax@0#0"))

    replayed = replay_journal(store._journal_path(s.session_id))
    assert replayed.session_id == s.session_id
    assert replayed.goal == s.goal
    assert replayed.states == s.states
    assert replayed.moves == s.moves


def test_fresh_store_loads_from_journal(tmp_path):
    dirname = tmp_path / "j"
    first = SessionStore(journal_dir=dirname)
    s = first.create(MODUS_PONENS, session_id="carried")
    first.apply("carried", binding("ImpL@1#0"))

    second = SessionStore(journal_dir=dirname)
    assert "carried" in second.ids()
    loaded = second.get("carried")
    assert loaded.states == s.states
    assert loaded.moves == s.moves


def test_memoryless_store_keeps_no_journal():
    store = SessionStore()
    s = store.create(seq("p |- p"))
    store.apply(s.session_id, binding("Ax@0#0"))
    assert store._journal_path(s.session_id) is None
    assert s.status == "closed-t1"


# --- views -------------------------------------------------------------------


def test_session_json_shape(store):
    s = store.create(MODUS_PONENS)
    store.apply(s.session_id, binding("ImpL@1#0"))
    doc = session_to_json(s)
    assert doc["id"] == s.session_id
    assert doc["goal_text"] == "p, p -> q |- q"
    assert doc["status"] == "open"
    assert doc["depth"] == 1
    assert doc["state_text"] == ["p, p -> q |- p", "q, p, p -> q |- q"]
    assert doc["moves"] == ["ImpL@1#0"]
    labels = [a["label"] for a in doc["applicable"]]
    assert "Ax@0#0" in labels and "Ax@0#1" in labels


def test_derivation_tree_marks_open_goals(store):
    s = store.create(MODUS_PONENS)
    store.apply(s.session_id, binding("ImpL@1#0"))
    store.apply(s.session_id, binding("Ax@0#0"))
    tree = derivation_tree(s)
    assert tree.via == "ImpL@1"
    closed, open_leaf = tree.children
    assert closed.via == "Ax@0" and closed.children == ()
    assert open_leaf.via == "" and open_leaf.children == ()
    assert render_sequent(open_leaf.goal) == "q, p, p -> q |- q"


def test_derivation_tree_of_fresh_session_is_bare_root(store):
    s = store.create(MODUS_PONENS)
    assert derivation_tree(s) == ReductionTree(MODUS_PONENS, "", ())


# --- randomized action sequences ----------------------------------------------


def _random_walk(store, rng, goal, steps=12):
    s = store.create(goal)
    for _ in range(steps):
        options = applicable_bindings(s.state)
        roll = rng.random()
        if options and roll < 0.6:
            store.apply(s.session_id, rng.choice(list(options)))
        elif s.depth > 0 and roll < 0.9:
            store.backtrack(s.session_id)
        else:
            continue
    return s


def test_random_walks_preserve_replay(tmp_path):
    rng = random.Random(7)
    store = SessionStore(journal_dir=tmp_path / "walks")
    for n in range(30):
        goal = random_sequent(random.Random(n), max_size=5, max_context=2)
        s = _random_walk(store, rng, goal)
        replayed = replay_journal(store._journal_path(s.session_id))
        assert replayed.states == s.states
        assert replayed.moves == s.moves
        assert replayed.status == s.status
