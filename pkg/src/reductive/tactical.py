"""Tactics as goal decomposers paired with forward procedures on events.

An instance of the theory supplies goals, events, an achievement relation
between them, and a finite named family of partial procedures mapping event
tuples to events.  A tactic maps a goal to a list of subgoals plus the name
of the procedure that is supposed to reassemble achieving events for the
subgoals into an achieving event for the goal.  Validity of a tactic says
that reassembly never fails; validity of a bare reduction operator asks the
same with the procedure existentially quantified.

Both properties are checked by bounded enumeration and the checker only
ever answers valid-within-bound or produces a concrete counterexample: the
universes here stand in for arbitrarily large ones, so an unbounded claim
would overreach.

Two instances are built in: a sequent instance whose events are oracle
certified consequences (achievement is conclusion match plus context
inclusion) and whose procedures read the ten schemas forwards, and a small
scheduling story (two people arriving at a station, meeting once both are
there) showing that nothing about the theory is proof-specific.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

from .lang import (
    And,
    Atom,
    Bot,
    Formula,
    Imp,
    Or,
    Sequent,
    Top,
    render,
    render_sequent,
    size_of,
)
from .oracle import decide_ipl
from .reduction import apply_operator, goal_instances

Procedure = Callable[[tuple], Optional[object]]


@dataclass(frozen=True)
class TacticalInstance:
    name: str
    goals: tuple
    events: tuple
    achieves: Callable[[object, object], bool]
    procedures: dict[str, Procedure] = field(default_factory=dict)
    # cached oracle certifications, where the instance has any
    certified: frozenset = frozenset()


@dataclass(frozen=True)
class Tactic:
    """A partial map from goals to (subgoals, procedure name)."""

    name: str
    reduce: Callable[[object], Optional[tuple[tuple, str]]]


@dataclass(frozen=True)
class ValidityVerdict:
    status: str  # "valid-within-bound" | "counterexample"
    checked: int
    witness: Optional[dict] = None

    @property
    def valid_within_bound(self) -> bool:
        return self.status == "valid-within-bound"

    def to_json(self) -> dict:
        out = {"status": self.status, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = {k: str(v) for k, v in self.witness.items()}
        return out


def _achieving_events(inst: TacticalInstance, goal: object, bound: int) -> list:
    found = []
    for e in inst.events:
        if inst.achieves(goal, e):
            found.append(e)
            if len(found) >= bound:
                break
    return found


def check_tactic_validity(
    inst: TacticalInstance, tactic: Tactic, bound: int
) -> ValidityVerdict:
    """Sweep up to `bound` goals in the tactic's domain; for each, feed the
    named procedure every tuple of achieving events (each axis truncated at
    `bound`) and demand an achieving output."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    checked = 0
    in_domain = 0
    for g in inst.goals:
        outcome = tactic.reduce(g)
        if outcome is None:
            continue
        in_domain += 1
        if in_domain > bound:
            break
        subgoals, proc_name = outcome
        if proc_name not in inst.procedures:
            raise ValueError(f"tactic {tactic.name!r} names no procedure {proc_name!r}")
        procedure = inst.procedures[proc_name]
        axes = [_achieving_events(inst, sub, bound) for sub in subgoals]
        for events in itertools.product(*axes):
            checked += 1
            output = procedure(tuple(events))
            if output is None or not inst.achieves(g, output):
                return ValidityVerdict(
                    status="counterexample",
                    checked=checked,
                    witness={
                        "goal": g,
                        "events": tuple(events),
                        "procedure": proc_name,
                        "output": output,
                    },
                )
    return ValidityVerdict(status="valid-within-bound", checked=checked)


def check_operator_validity(
    inst: TacticalInstance,
    operator: Callable[[object], Optional[Sequence]],
    bound: int,
) -> ValidityVerdict:
    """Like tactic validity, but some procedure in the instance has to
    reassemble each tuple; a counterexample means no procedure serves."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    checked = 0
    in_domain = 0
    for g in inst.goals:
        subgoals = operator(g)
        if subgoals is None:
            continue
        in_domain += 1
        if in_domain > bound:
            break
        axes = [_achieving_events(inst, sub, bound) for sub in subgoals]
        for events in itertools.product(*axes):
            checked += 1
            if not any(
                (output := proc(tuple(events))) is not None
                and inst.achieves(g, output)
                for proc in inst.procedures.values()
            ):
                return ValidityVerdict(
                    status="counterexample",
                    checked=checked,
                    witness={"goal": g, "events": tuple(events)},
                )
    return ValidityVerdict(status="valid-within-bound", checked=checked)


def compose_tactics(
    inst: TacticalInstance, first: Tactic, second: Tactic, name: str = ""
) -> tuple[TacticalInstance, Tactic]:
    """Sequential composition: run `first`, then `second` on every subgoal,
    reassembling with `first`'s procedure fed by `second`'s outputs.  The
    composite procedures are registered in a widened instance."""
    fresh: dict[str, Procedure] = {}

    def reduce(g: object) -> Optional[tuple[tuple, str]]:
        head = first.reduce(g)
        if head is None:
            return None
        mids, head_proc = head
        parts = []
        for mid in mids:
            tail = second.reduce(mid)
            if tail is None:
                return None
            parts.append(tail)
        arities = tuple((proc, len(subs)) for subs, proc in parts)
        key = f"then[{head_proc}/" + ",".join(f"{p}:{n}" for p, n in arities) + "]"

        def composite(events: tuple, arities=arities, head_proc=head_proc):
            mids_events = []
            at = 0
            for proc_name, n in arities:
                chunk = events[at : at + n]
                at += n
                mid = inst.procedures[proc_name](chunk)
                if mid is None:
                    return None
                mids_events.append(mid)
            return inst.procedures[head_proc](tuple(mids_events))

        fresh[key] = composite
        flattened = tuple(s for subs, _ in parts for s in subs)
        return (flattened, key)

    # force registration over the whole domain so the widened instance is
    # stable before any checking starts
    for g in inst.goals:
        reduce(g)
    widened = replace(inst, procedures={**inst.procedures, **fresh})
    return widened, Tactic(name or f"{first.name};{second.name}", reduce)


# ---------------------------------------------------------------------------
# The sequent instance.


def _canonical(context, conclusion: Formula) -> Sequent:
    ordered = sorted(set(context), key=lambda f: (len(render(f)), render(f)))
    return Sequent(tuple(ordered), conclusion)


def _formulas_up_to(atom_bound: int, size_bound: int) -> list[Formula]:
    names = ("p", "q", "r", "s")[:atom_bound]
    by_size: dict[int, list[Formula]] = {
        1: [Atom(n) for n in names] + [Top(), Bot()]
    }
    for size in range(2, size_bound + 1):
        layer: list[Formula] = []
        for left_size in range(1, size - 1):
            right_size = size - 1 - left_size
            if right_size < 1:
                continue
            for l in by_size.get(left_size, ()):
                for r in by_size.get(right_size, ()):
                    for con in (And, Or, Imp):
                        layer.append(con(l, r))
        by_size[size] = layer
    return [f for size in sorted(by_size) for f in by_size[size]]


def _sequents_up_to(atom_bound: int, size_bound: int) -> list[Sequent]:
    formulas = _formulas_up_to(atom_bound, size_bound)
    out = []
    for concl in formulas:
        room = size_bound - size_of(concl)
        if room < 0:
            continue
        fitting = [f for f in formulas if size_of(f) <= room]
        contexts: list[tuple[Formula, ...]] = [()]
        for k in (1, 2):
            for combo in itertools.combinations(fitting, k):
                if sum(size_of(f) for f in combo) <= room:
                    contexts.append(combo)
        for ctx in contexts:
            out.append(_canonical(ctx, concl))
    seen = set()
    unique = []
    for s in out:
        if s not in seen:
            seen.add(s)
            unique.append(s)
    unique.sort(key=lambda s: (len(render_sequent(s)), render_sequent(s)))
    return unique


def milner_instance(atom_bound: int = 2, size_bound: int = 4) -> TacticalInstance:
    """Goals are small sequents; events are oracle-certified consequences,
    achieved when conclusions match and the event context is included in
    the goal context; procedures read the schemas forwards."""
    universe = _sequents_up_to(atom_bound, size_bound)
    events = tuple(s for s in universe if decide_ipl(s).valid)
    event_set = frozenset(events)
    formulas = _formulas_up_to(atom_bound, size_bound)

    def achieves(g: Sequent, e: Sequent) -> bool:
        return g.conclusion == e.conclusion and set(e.context) <= set(g.context)

    def bounded(s: Sequent) -> Optional[Sequent]:
        return s if sum(size_of(f) for f in (*s.context, s.conclusion)) <= size_bound else None

    procedures: dict[str, Procedure] = {}

    def axiom_shaped(e: Sequent) -> bool:
        return (
            e.conclusion in e.context
            or isinstance(e.conclusion, Top)
            or any(isinstance(f, Bot) for f in e.context)
        )

    for e in events:
        if axiom_shaped(e):
            procedures[f"const[{render_sequent(e)}]"] = (
                lambda events, e=e: e if events == () else None
            )

    def and_intro(events: tuple) -> Optional[Sequent]:
        if len(events) != 2:
            return None
        e1, e2 = events
        return bounded(
            _canonical((*e1.context, *e2.context), And(e1.conclusion, e2.conclusion))
        )

    procedures["and_intro"] = and_intro

    for f in formulas:
        if isinstance(f, Imp):

            def imp_elim(events: tuple, f: Imp = f) -> Optional[Sequent]:
                if len(events) != 2:
                    return None
                e1, e2 = events
                if e1.conclusion != f.left:
                    return None
                ctx = [g for g in e2.context if g != f.right]
                ctx.extend(e1.context)
                ctx.append(f)
                return bounded(_canonical(ctx, e2.conclusion))

            procedures[f"imp_elim[{render(f)}]"] = imp_elim

            def imp_intro(events: tuple, f: Imp = f) -> Optional[Sequent]:
                if len(events) != 1:
                    return None
                (e,) = events
                if e.conclusion != f.right:
                    return None
                return bounded(
                    _canonical([g for g in e.context if g != f.left], f)
                )

            procedures[f"imp_intro[{render(f)}]"] = imp_intro
        if isinstance(f, And):

            def and_left(events: tuple, f: And = f) -> Optional[Sequent]:
                if len(events) != 1:
                    return None
                (e,) = events
                ctx = [g for g in e.context if g != f.left and g != f.right]
                ctx.append(f)
                return bounded(_canonical(ctx, e.conclusion))

            procedures[f"and_left[{render(f)}]"] = and_left
        if isinstance(f, Or):

            def or_left(events: tuple, f: Or = f) -> Optional[Sequent]:
                if len(events) != 2:
                    return None
                e1, e2 = events
                if e1.conclusion != e2.conclusion:
                    return None
                ctx = [g for g in e1.context if g != f.left]
                ctx += [g for g in e2.context if g != f.right]
                ctx.append(f)
                return bounded(_canonical(ctx, e1.conclusion))

            procedures[f"or_left[{render(f)}]"] = or_left

            def or_intro_l(events: tuple, f: Or = f) -> Optional[Sequent]:
                if len(events) != 1:
                    return None
                (e,) = events
                if e.conclusion != f.left:
                    return None
                return bounded(_canonical(e.context, f))

            procedures[f"or_intro_l[{render(f)}]"] = or_intro_l

            def or_intro_r(events: tuple, f: Or = f) -> Optional[Sequent]:
                if len(events) != 1:
                    return None
                (e,) = events
                if e.conclusion != f.right:
                    return None
                return bounded(_canonical(e.context, f))

            procedures[f"or_intro_r[{render(f)}]"] = or_intro_r

        def weaken(events: tuple, f: Formula = f) -> Optional[Sequent]:
            if len(events) != 1:
                return None
            (e,) = events
            return bounded(_canonical((f, *e.context), e.conclusion))

        procedures[f"weaken[{render(f)}]"] = weaken

    return TacticalInstance(
        name="milner-sequents",
        goals=tuple(universe),
        events=events,
        achieves=achieves,
        procedures=procedures,
        certified=event_set,
    )


def milner_ax_tactic(inst: TacticalInstance) -> Tactic:
    """Close a goal whose conclusion sits in its context, reassembling with
    the constant procedure for the matching axiom event."""

    def reduce(g: Sequent) -> Optional[tuple[tuple, str]]:
        if g.conclusion not in g.context:
            return None
        event = _canonical((g.conclusion,), g.conclusion)
        name = f"const[{render_sequent(event)}]"
        if name not in inst.procedures:
            return None
        return ((), name)

    return Tactic("ax", reduce)


def milner_impl_tactic(inst: TacticalInstance) -> Tactic:
    """Reduce at the leftmost context implication, reassembling with the
    forward elimination procedure for that implication."""

    def reduce(g: Sequent) -> Optional[tuple[tuple, str]]:
        for i, f in enumerate(g.context):
            if isinstance(f, Imp):
                name = f"imp_elim[{render(f)}]"
                if name not in inst.procedures:
                    return None
                return (apply_operator(g, "ImpL", i), name)
        return None

    return Tactic("impl", reduce)


def schema_operator(schema: str) -> Callable[[Sequent], Optional[tuple]]:
    """A reduction operator as a partial map: the schema applied at its
    leftmost applicable position."""

    def operator(g: Sequent) -> Optional[tuple]:
        for name, principal in goal_instances(g):
            if name == schema:
                return apply_operator(g, name, principal)
        return None

    return operator


# ---------------------------------------------------------------------------
# The meeting instance.

NOON = 12 * 60
EVENING = 18 * 60
WATERLOO = "waterloo clock"


def _clock(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


@dataclass(frozen=True)
class MeetingGoal:
    kind: str  # "meet" | "arrive"
    person: Optional[str]
    place: str
    deadline: int  # minutes from midnight

    def __str__(self) -> str:
        who = self.person or "both"
        return f"{who} {self.kind} at {self.place} before {_clock(self.deadline)}"


@dataclass(frozen=True)
class MeetingEvent:
    kind: str  # "meeting" | "arrival"
    person: Optional[str]
    place: str
    time: int

    def __str__(self) -> str:
        who = self.person or "both"
        return f"{who} {self.kind} at {self.place} at {_clock(self.time)}"


def meeting_goal(deadline: int = NOON) -> MeetingGoal:
    return MeetingGoal("meet", None, WATERLOO, deadline)


def arrival_goal(person: str, deadline: int = NOON) -> MeetingGoal:
    return MeetingGoal("arrive", person, WATERLOO, deadline)


def meeting_instance() -> TacticalInstance:
    times = (11 * 60 + 40, 11 * 60 + 53, 11 * 60 + 57, 11 * 60 + 59, 14 * 60)
    places = (WATERLOO, "victoria")
    events: list[MeetingEvent] = []
    for t in times:
        for place in places:
            for person in ("alice", "bob"):
                events.append(MeetingEvent("arrival", person, place, t))
            events.append(MeetingEvent("meeting", None, place, t))

    goals = (
        meeting_goal(),
        arrival_goal("alice"),
        arrival_goal("bob"),
        meeting_goal(EVENING),
        arrival_goal("alice", EVENING),
        arrival_goal("bob", EVENING),
    )

    def achieves(g: MeetingGoal, e: MeetingEvent) -> bool:
        if g.kind == "meet":
            return e.kind == "meeting" and e.place == g.place and e.time < g.deadline
        return (
            e.kind == "arrival"
            and e.person == g.person
            and e.place == g.place
            and e.time < g.deadline
        )

    def wait(events: tuple) -> Optional[MeetingEvent]:
        # both have to be standing at the station before noon; the meeting
        # happens when the later one arrives
        if len(events) != 2:
            return None
        a, b = events
        for e, person in ((a, "alice"), (b, "bob")):
            if not (
                isinstance(e, MeetingEvent)
                and e.kind == "arrival"
                and e.person == person
                and e.place == WATERLOO
                and e.time < NOON
            ):
                return None
        return MeetingEvent("meeting", None, WATERLOO, max(a.time, b.time))

    return TacticalInstance(
        name="meeting",
        goals=goals,
        events=tuple(events),
        achieves=achieves,
        procedures={"wait": wait},
    )


def meeting_tactic(inst: TacticalInstance, deadline: int = NOON) -> Tactic:
    """Split the meeting goal into the two arrivals and wait."""

    def reduce(g: MeetingGoal) -> Optional[tuple[tuple, str]]:
        if g != meeting_goal():
            return None
        return ((arrival_goal("alice", deadline), arrival_goal("bob", deadline)), "wait")

    suffix = "" if deadline == NOON else f"-until-{_clock(deadline)}"
    return Tactic(f"wait{suffix}", reduce)
