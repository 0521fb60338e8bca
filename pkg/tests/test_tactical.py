import pytest

from reductive.lang import parse_sequent, render_sequent
from reductive.oracle import decide_ipl
from reductive.tactical import (
    EVENING,
    NOON,
    WATERLOO,
    MeetingEvent,
    Tactic,
    arrival_goal,
    check_operator_validity,
    check_tactic_validity,
    compose_tactics,
    meeting_goal,
    meeting_instance,
    meeting_tactic,
    milner_ax_tactic,
    milner_impl_tactic,
    milner_instance,
    schema_operator,
)


@pytest.fixture(scope="module")
def meeting():
    return meeting_instance()


@pytest.fixture(scope="module")
def milner():
    return milner_instance()


# -- the meeting story --------------------------------------------------------


def test_meeting_tactic_is_valid_within_bound(meeting):
    verdict = check_tactic_validity(meeting, meeting_tactic(meeting), bound=50)
    assert verdict.status == "valid-within-bound"
    assert verdict.checked > 0
    assert verdict.valid_within_bound


def test_evening_mutation_yields_counterexample(meeting):
    mutant = meeting_tactic(meeting, deadline=EVENING)
    verdict = check_tactic_validity(meeting, mutant, bound=50)
    assert verdict.status == "counterexample"
    assert verdict.witness is not None


def test_evening_counterexample_fails_the_validity_definition(meeting):
    """Re-check the reported witness against the definition by hand: its
    events achieve the mutant's subgoals, yet the named procedure does not
    turn them into an event achieving the goal."""
    mutant = meeting_tactic(meeting, deadline=EVENING)
    verdict = check_tactic_validity(meeting, mutant, bound=50)
    w = verdict.witness
    goal, events = w["goal"], w["events"]
    subgoals, proc_name = mutant.reduce(goal)
    assert len(events) == len(subgoals)
    for sub, event in zip(subgoals, events):
        assert meeting.achieves(sub, event)
    output = meeting.procedures[proc_name](events)
    assert output is None or not meeting.achieves(goal, output)


def test_wait_procedure_on_the_nominal_story(meeting):
    wait = meeting.procedures["wait"]
    a = MeetingEvent("arrival", "alice", WATERLOO, 713)
    b = MeetingEvent("arrival", "bob", WATERLOO, 717)
    met = wait((a, b))
    assert met is not None
    assert met.time == 717
    assert meeting.achieves(meeting_goal(NOON), met)


def test_wait_is_partial(meeting):
    wait = meeting.procedures["wait"]
    late = MeetingEvent("arrival", "bob", WATERLOO, 840)
    early = MeetingEvent("arrival", "alice", WATERLOO, 700)
    assert wait((early, late)) is None
    elsewhere = MeetingEvent("arrival", "bob", "victoria", 700)
    assert wait((early, elsewhere)) is None


def test_meeting_goals_include_arrivals(meeting):
    assert meeting_goal(NOON) in meeting.goals
    assert arrival_goal("alice", NOON) in meeting.goals
    assert arrival_goal("bob", EVENING) in meeting.goals


# -- the sequent instance ------------------------------------------------------


def test_milner_universe_is_certified_by_the_oracle(milner):
    assert milner.events
    for event in sorted(milner.events, key=str)[:40]:
        assert decide_ipl(event).valid
    assert frozenset(milner.events) == milner.certified


def test_milner_ax_tactic_valid(milner):
    verdict = check_tactic_validity(milner, milner_ax_tactic(milner), bound=200)
    assert verdict.status == "valid-within-bound"


def test_milner_impl_tactic_valid(milner):
    verdict = check_tactic_validity(milner, milner_impl_tactic(milner), bound=200)
    assert verdict.status == "valid-within-bound"


def test_milner_operators_valid(milner):
    for schema in ("Ax", "ImpL"):
        verdict = check_operator_validity(
            milner, schema_operator(schema), bound=len(milner.goals)
        )
        assert verdict.status == "valid-within-bound", schema


def test_dropping_a_conjunct_is_caught(milner):
    """An operator that reduces Γ ▷ φ∧ψ to just Γ ▷ φ cannot be justified
    by any registered procedure."""
    from reductive.lang import And, Sequent

    def drop_right(g):
        if isinstance(g.conclusion, And):
            return (Sequent(g.context, g.conclusion.left),)
        return None

    verdict = check_operator_validity(milner, drop_right, bound=len(milner.goals))
    assert verdict.status == "counterexample"
    assert verdict.witness is not None


def test_validity_bound_semantics(milner):
    with pytest.raises(ValueError):
        check_tactic_validity(milner, milner_ax_tactic(milner), bound=0)
    small = check_tactic_validity(milner, milner_ax_tactic(milner), bound=1)
    assert small.status == "valid-within-bound"
    assert small.checked <= check_tactic_validity(
        milner, milner_ax_tactic(milner), bound=50
    ).checked


def test_unregistered_procedure_is_an_error(milner):
    rogue = Tactic(name="mystery", reduce=lambda g: ((), "no-such-procedure"))
    with pytest.raises(ValueError):
        check_tactic_validity(milner, rogue, bound=10)


def test_verdict_serialises(meeting):
    verdict = check_tactic_validity(meeting, meeting_tactic(meeting), bound=10)
    payload = verdict.to_json()
    assert payload["status"] == "valid-within-bound"
    assert isinstance(payload["checked"], int)


# -- composition ----------------------------------------------------------------


def test_composition_with_an_undefined_tail_has_empty_domain(meeting):
    # the noon tactic is undefined on arrival goals, so chaining it after
    # itself never fires
    noon = meeting_tactic(meeting)
    widened, composite = compose_tactics(meeting, noon, noon, name="meet-twice")
    assert composite.name == "meet-twice"
    assert all(composite.reduce(g) is None for g in meeting.goals)
    verdict = check_tactic_validity(widened, composite, bound=60)
    assert verdict.status == "valid-within-bound"
    assert verdict.checked == 0


def test_composition_registers_composite_procedures(milner):
    ax = milner_ax_tactic(milner)
    widened, composite = compose_tactics(milner, ax, ax, name="ax-twice")
    new_names = set(widened.procedures) - set(milner.procedures)
    assert new_names, "composition should add reassembly procedures"
    assert all(name.startswith("then[") for name in new_names)
    verdict = check_tactic_validity(widened, composite, bound=200)
    assert verdict.status == "valid-within-bound"
    assert verdict.checked > 0


def test_milner_composition_sequences_impl_then_ax():
    # size 5 admits goals like (p, p -> q |- q) whose ImpL premisses are
    # both axiom-shaped, so the two-stage composite actually fires
    inst = milner_instance(atom_bound=2, size_bound=5)
    impl, ax = milner_impl_tactic(inst), milner_ax_tactic(inst)
    widened, composite = compose_tactics(inst, impl, ax, name="impl-then-ax")
    fired = [g for g in inst.goals if composite.reduce(g) is not None]
    assert fired
    verdict = check_tactic_validity(widened, composite, bound=len(inst.goals))
    assert verdict.status == "valid-within-bound"
    assert verdict.checked > 0
