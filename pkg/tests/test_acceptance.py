"""End-to-end gates for the whole engine, one printed line per gate.

Run with `pytest tests/test_acceptance.py -s` to see the lines; each gate
also asserts, so the module doubles as a plain test file.  Budgeted gates
fail when they run over.
"""

import contextlib
import random
import time

from helpers import random_mul_sequent, random_sequent, random_state, random_tactic
from reductive.control import (
    BUDGET_EXCEEDED,
    EXHAUSTED,
    PROVED,
    Strategy,
    multiplicative_corpus,
    search,
    splitting_agreement,
)
from reductive.lang import Imp, Sequent, parse_sequent
from reductive.oracle import (
    check_adequacy,
    check_completeness,
    check_faithfulness,
    check_soundness,
    decide_ipl,
    engine_oracle_sweep,
    forward_rule_instances,
    pinned_corpus,
    random_ipl_goals,
)
from reductive.reduction import OperatorBinding, apply_operator, classify, step_interleave
from reductive.sessions import SessionStore, replay_journal
from reductive.space import coherence_check, unfold
from reductive.tactical import (
    EVENING,
    check_operator_validity,
    check_tactic_validity,
    meeting_instance,
    meeting_tactic,
    milner_ax_tactic,
    milner_impl_tactic,
    milner_instance,
)
from reductive.tactics import Choice, Seq, Star, check_pentagon, transitions


def seq(text):
    return parse_sequent(text)


@contextlib.contextmanager
def gate(name, limit=None):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - t0
    if limit is not None and elapsed > limit:
        print(f"[FAIL] {name}  ({elapsed:.2f}s, limit {limit:.0f}s)")
        raise AssertionError(f"{name} took {elapsed:.2f}s, limit {limit}s")
    print(f"[PASS] {name}  ({elapsed:.2f}s)")


def test_scripted_replay_closes_in_three_steps():
    with gate("scripted-replay-closes-in-three-steps", limit=1.0):
        state = (seq("p, p -> q |- q"),)
        script = ["ImpL@1#0", "Ax@0#0", "Ax@0#0"]
        for step, label in enumerate(script, start=1):
            state = step_interleave(state, OperatorBinding.from_label(label))
            if step < len(script):
                assert state != ()
        assert state == ()
        assert classify(state) == "closed-t1"


def test_divergence_is_burned_by_budgets_and_closed_by_loop_checking():
    with gate("divergence-contained", limit=1.0):
        g = seq("p -> p |- p")
        for k in (2, 5, 12):
            out = search(g, Strategy(loop_check="off", depth_budget=k))
            assert out.status == BUDGET_EXCEEDED
        deepened = search(
            g, Strategy(traversal="iterative-deepening", loop_check="branch-repeat")
        )
        assert deepened.status == EXHAUSTED
        assert not decide_ipl(g).valid


def test_two_step_space_has_one_closing_and_one_cyclic_alternative():
    with gate("depth-two-space-shape"):
        node = unfold(seq("p, p -> p |- p"), 2)
        assert len(node.alternatives) == 2
        closing = [alt for alt in node.alternatives if alt.children == ()]
        looping = [alt for alt in node.alternatives if alt.children != ()]
        assert len(closing) == 1 and len(looping) == 1
        assert closing[0].via == ("Ax@0",)
        children = looping[0].children
        assert len(children) == 2
        assert all(child.cyclic == 0 for child in children)
        assert all(child.goal == node.goal for child in children)


def test_both_unfoldings_agree_on_a_hundred_goals():
    with gate("unfolding-coherence", limit=30.0):
        goals = random_ipl_goals(seed=404, count=100, max_size=6)
        for g in goals:
            for depth in (1, 2, 3, 4):
                assert coherence_check(g, depth).agree, (g, depth)


def test_engine_and_decision_procedure_agree_on_the_whole_small_corpus():
    with gate("engine-matches-oracle-on-pinned-corpus", limit=300.0):
        corpus = pinned_corpus()
        assert len(corpus) == 71708
        rows = engine_oracle_sweep(corpus)
        sound = check_soundness(corpus, rows=rows)
        complete = check_completeness(corpus, rows=rows)
        assert sound.passed, sound.failures[:3]
        assert complete.passed, complete.failures[:3]
        assert sum(1 for r in rows if r.proved) == 50132
        assert all(r.status in (PROVED, EXHAUSTED) for r in rows)


def test_operators_and_rule_table_describe_each_other():
    with gate("rule-table-round-trip"):
        goals = random_ipl_goals(seed=505, count=500)
        faithful = check_faithfulness(goals)
        adequate = check_adequacy(goals)
        assert faithful.passed, faithful.failures[:3]
        assert adequate.passed, adequate.failures[:3]

        def swapped(g, schema, principal):
            out = apply_operator(g, schema, principal)
            if schema == "ImpL" and len(out) == 2:
                return (out[1], out[0])
            return out

        assert not check_faithfulness(goals, apply=swapped).passed

        def padded(g):
            rows = forward_rule_instances(g)
            rows.append(
                ("Mystery", (Sequent(g.context, Imp(g.conclusion, g.conclusion)),))
            )
            return rows

        assert not check_adequacy(goals, rules=padded).passed


def test_synchronous_stepping_commutes_with_concatenation():
    with gate("sync-step-concatenation", limit=10.0):
        pool = [random_sequent(random.Random(n), max_size=5) for n in range(60)]
        rng = random.Random(606)
        samples = [
            [random_state(rng, pool) for _ in range(rng.randrange(0, 4))]
            for _ in range(200)
        ]
        report = check_pentagon(samples)
        assert report.passed and report.checked == 200
        g = seq("p, p -> q |- q")
        assert check_pentagon([[]]).passed
        assert check_pentagon([[(), (g,)], [(g,), (g, g)]]).passed


def test_combinator_laws_hold_on_random_samples():
    with gate("combinator-laws"):
        pool = [random_sequent(random.Random(n), max_size=5) for n in range(60)]
        rng = random.Random(707)

        def targets(s, t, budget=3):
            return transitions(s, t, star_budget=budget).targets

        for _ in range(200):
            s = random_state(rng, pool)
            a, b, c = (random_tactic(rng, 1) for _ in range(3))
            assert targets(s, Seq(Seq(a, b), c)) == targets(s, Seq(a, Seq(b, c)))
            assert targets(s, Choice(a, b)) == targets(s, Choice(b, a))
            assert targets(s, Choice(a, a)) == targets(s, a)
            # unrolling needs a star-free body; the budget knob is shared
            # by every star node
            u = random_tactic(rng, 1, allow_star=False)
            k = rng.randrange(0, 3)
            unrolled = {s} | {
                v2
                for v1 in targets(s, u, budget=k + 1)
                for v2 in targets(v1, Star(u), budget=k)
            }
            assert targets(s, Star(u), budget=k + 1) == frozenset(unrolled)


def test_tactic_and_operator_validity_verdicts():
    with gate("tactical-validity-verdicts", limit=60.0):
        inst = meeting_instance()
        noon = meeting_tactic(inst)
        verdict = check_tactic_validity(inst, noon, bound=len(inst.goals))
        assert verdict.status == "valid-within-bound"

        evening = meeting_tactic(inst, deadline=EVENING)
        broken = check_tactic_validity(inst, evening, bound=len(inst.goals))
        assert broken.status == "counterexample"
        witness = broken.witness
        subgoals, proc_name = evening.reduce(witness["goal"])
        assert all(
            inst.achieves(sub, e) for sub, e in zip(subgoals, witness["events"])
        )
        output = inst.procedures[proc_name](witness["events"])
        assert output is None or not inst.achieves(witness["goal"], output)

        milner = milner_instance()  # two atoms, formulas up to size four
        for tactic in (milner_ax_tactic(milner), milner_impl_tactic(milner)):

            def operator(g, tactic=tactic):
                hit = tactic.reduce(g)
                return None if hit is None else hit[0]

            ok = check_operator_validity(milner, operator, bound=len(milner.goals))
            assert ok.status == "valid-within-bound"
            assert ok.checked > 0


def test_resource_disciplines_agree_on_the_exhaustive_corpus():
    with gate("resource-disciplines-agree", limit=60.0):
        corpus = multiplicative_corpus()
        assert len(corpus) == 1260
        assert splitting_agreement(corpus) == []


def test_random_session_action_sequences_replay_and_undo(tmp_path):
    with gate("session-action-sequences"):
        from reductive.reduction import applicable_bindings
        from reductive.sessions import TacticFailedError

        store = SessionStore(journal_dir=tmp_path / "journals")
        rng = random.Random(808)
        tactic_pool = ("Ax", "Ax + ImpL", "(Ax + AndR)*", "(Ax + OrL + ImpR)*")
        apply_undo_checks = 0
        tactic_runs = 0
        for n in range(1000):
            goal = random_sequent(random.Random(n), max_size=5, max_context=2)
            session = store.create(goal)
            for _ in range(rng.randrange(2, 8)):
                options = list(applicable_bindings(session.state))
                roll = rng.random()
                if options and roll < 0.45:
                    store.apply(session.session_id, rng.choice(options))
                elif options and roll < 0.65:
                    before_states = list(session.states)
                    before_moves = list(session.moves)
                    store.apply(session.session_id, rng.choice(options))
                    store.backtrack(session.session_id)
                    assert session.states == before_states
                    assert session.moves == before_moves
                    apply_undo_checks += 1
                elif roll < 0.85:
                    before_depth = session.depth
                    try:
                        store.run_tactic(session.session_id, rng.choice(tactic_pool))
                        tactic_runs += 1
                    except TacticFailedError:
                        assert session.depth == before_depth
                elif session.depth > 0:
                    store.backtrack(session.session_id)
            replayed = replay_journal(store._journal_path(session.session_id))
            assert replayed.states == session.states
            assert replayed.moves == session.moves
        assert apply_undo_checks > 100
        assert tactic_runs > 100
