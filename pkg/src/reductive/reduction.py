"""Reduction operators over sequent goals, and one-step state transitions.

A reduction operator is a partial map from goals to a finite list of
subgoals, read as using an inference rule backwards: the input is the
conclusion, the output lists the premisses that would suffice.  Operators
come from ten schemas; a schema applied at a concrete context position (its
principal) is an operator instance.

States are finite lists of goals.  The empty state is written box() and is
the success terminal; a nonempty state in which some goal admits no operator
is the failure terminal.  Two stepping disciplines are provided: interleaved
(reduce exactly one goal, splicing its subgoals in place) and synchronous
(reduce every goal at once, collecting all combinations).

Context discipline: contexts are ordered lists, but formulas are added to a
context only when not already present, so a context never acquires
duplicates that were not written by the user.  This keeps repeated operator
application from inflating goals and makes looping reductions visibly loop.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .lang import (
    And,
    Bot,
    Formula,
    Goal,
    Imp,
    Or,
    Sequent,
    Top,
    render_sequent,
)

State = tuple[Goal, ...]


def box() -> State:
    """The empty state, the success terminal."""
    return ()


def state(*goals: Goal) -> State:
    return tuple(goals)


class NotApplicableError(ValueError):
    pass


class InvalidBindingError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorBinding:
    """A schema applied at a context position of one goal in a state."""

    schema: str
    principal: Optional[int]  # context position, None for right rules
    goal: int  # index into the state

    def label(self) -> str:
        base = self.schema if self.principal is None else f"{self.schema}@{self.principal}"
        return f"{base}#{self.goal}"

    def operator_name(self) -> str:
        return self.schema if self.principal is None else f"{self.schema}@{self.principal}"

    def to_json(self) -> dict:
        return {"schema": self.schema, "principal": self.principal, "goal": self.goal}

    @staticmethod
    def from_json(data: dict) -> "OperatorBinding":
        if not isinstance(data, dict) or "schema" not in data:
            raise InvalidBindingError(f"not a binding object: {data!r}")
        schema = data["schema"]
        if schema not in SCHEMAS:
            raise InvalidBindingError(f"unknown schema {schema!r}")
        principal = data.get("principal")
        goal = data.get("goal", 0)
        if principal is not None and (not isinstance(principal, int) or principal < 0):
            raise InvalidBindingError(f"bad principal {principal!r}")
        if not isinstance(goal, int) or goal < 0:
            raise InvalidBindingError(f"bad goal index {goal!r}")
        return OperatorBinding(schema, principal, goal)

    @staticmethod
    def from_label(text: str) -> "OperatorBinding":
        """Parse "ImpL@1#0".  A missing #goal part defaults to goal 0; a
        missing @position means a binding with no principal, which only
        resolves for right rules."""
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9]*)(?:@(\d+))?(?:#(\d+))?", text.strip())
        if m is None:
            raise InvalidBindingError(f"cannot parse binding label {text!r}")
        name, principal, goal = m.groups()
        if name not in SCHEMAS:
            raise InvalidBindingError(f"unknown schema {name!r}")
        return OperatorBinding(
            schema=name,
            principal=None if principal is None else int(principal),
            goal=0 if goal is None else int(goal),
        )


def _extend(context: tuple[Formula, ...], formula: Formula) -> tuple[Formula, ...]:
    """Prepend a formula unless the context already carries it."""
    if formula in context:
        return context
    return (formula,) + context


def _replace(
    context: tuple[Formula, ...], at: int, formulas: tuple[Formula, ...]
) -> tuple[Formula, ...]:
    """Replace position `at` by the given formulas, skipping ones already present."""
    rest = context[:at] + context[at + 1 :]
    fresh: list[Formula] = []
    for f in formulas:
        if f not in rest and f not in fresh:
            fresh.append(f)
    return context[:at] + tuple(fresh) + context[at + 1 :]


# ---------------------------------------------------------------------------
# Schemas.  Each schema knows at which principal positions (or None for
# right rules) it applies to a goal, and what subgoals it produces there.


@dataclass(frozen=True)
class Schema:
    name: str
    principal_positions: Callable[[Goal], tuple[Optional[int], ...]]
    subgoals: Callable[[Goal, Optional[int]], tuple[Goal, ...]]


def _positions_where(pred: Callable[[Formula], bool]) -> Callable[[Goal], tuple[int, ...]]:
    def positions(g: Goal) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(g.context) if pred(f))

    return positions


def _right_rule(pred: Callable[[Goal], bool]) -> Callable[[Goal], tuple[Optional[int], ...]]:
    def positions(g: Goal) -> tuple[Optional[int], ...]:
        return (None,) if pred(g) else ()

    return positions


def _ax_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    return ()


def _botl_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    return ()


def _topr_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    return ()


def _andr_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    c = g.conclusion
    assert isinstance(c, And)
    return (Sequent(g.context, c.left), Sequent(g.context, c.right))


def _andl_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    assert principal is not None
    f = g.context[principal]
    assert isinstance(f, And)
    return (Sequent(_replace(g.context, principal, (f.left, f.right)), g.conclusion),)


def _orr1_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    c = g.conclusion
    assert isinstance(c, Or)
    return (Sequent(g.context, c.left),)


def _orr2_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    c = g.conclusion
    assert isinstance(c, Or)
    return (Sequent(g.context, c.right),)


def _orl_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    assert principal is not None
    f = g.context[principal]
    assert isinstance(f, Or)
    return (
        Sequent(_replace(g.context, principal, (f.left,)), g.conclusion),
        Sequent(_replace(g.context, principal, (f.right,)), g.conclusion),
    )


def _impr_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    c = g.conclusion
    assert isinstance(c, Imp)
    return (Sequent(_extend(g.context, c.left), c.right),)


def _impl_subgoals(g: Goal, principal: Optional[int]) -> tuple[Goal, ...]:
    # The principal implication stays in context in both premisses, so the
    # operator can be replayed; this is what makes reductions like
    # (p -> p |- p) run forever.
    assert principal is not None
    f = g.context[principal]
    assert isinstance(f, Imp)
    return (
        Sequent(g.context, f.left),
        Sequent(_extend(g.context, f.right), g.conclusion),
    )


SCHEMAS: dict[str, Schema] = {
    s.name: s
    for s in (
        Schema(
            "Ax",
            lambda g: tuple(i for i, f in enumerate(g.context) if f == g.conclusion),
            _ax_subgoals,
        ),
        Schema("BotL", _positions_where(lambda f: isinstance(f, Bot)), _botl_subgoals),
        Schema("TopR", _right_rule(lambda g: isinstance(g.conclusion, Top)), _topr_subgoals),
        Schema("AndR", _right_rule(lambda g: isinstance(g.conclusion, And)), _andr_subgoals),
        Schema("AndL", _positions_where(lambda f: isinstance(f, And)), _andl_subgoals),
        Schema("OrR1", _right_rule(lambda g: isinstance(g.conclusion, Or)), _orr1_subgoals),
        Schema("OrR2", _right_rule(lambda g: isinstance(g.conclusion, Or)), _orr2_subgoals),
        Schema("OrL", _positions_where(lambda f: isinstance(f, Or)), _orl_subgoals),
        Schema("ImpR", _right_rule(lambda g: isinstance(g.conclusion, Imp)), _impr_subgoals),
        Schema("ImpL", _positions_where(lambda f: isinstance(f, Imp)), _impl_subgoals),
    )
}

SCHEMA_ORDER: tuple[str, ...] = tuple(SCHEMAS)


def red_set(fragment: str = "IPL") -> tuple[str, ...]:
    """The operator schema names realising the calculus of the fragment."""
    if fragment != "IPL":
        raise ValueError(f"no reduction operator set for fragment {fragment!r}")
    return SCHEMA_ORDER


def goal_instances(g: Goal) -> Iterator[tuple[str, Optional[int]]]:
    """All (schema, principal) pairs applicable to a goal, in schema order."""
    for name in SCHEMA_ORDER:
        for principal in SCHEMAS[name].principal_positions(g):
            yield name, principal


def apply_operator(g: Goal, schema: str, principal: Optional[int]) -> tuple[Goal, ...]:
    """Run one operator instance on a goal, yielding its subgoal list."""
    if schema not in SCHEMAS:
        raise NotApplicableError(f"unknown schema {schema!r}")
    positions = SCHEMAS[schema].principal_positions(g)
    if principal not in positions:
        raise NotApplicableError(
            f"{schema} does not apply to {render_sequent(g)!r} at principal {principal!r}"
        )
    return SCHEMAS[schema].subgoals(g, principal)


def applicable_bindings(s: State) -> list[OperatorBinding]:
    """Every applicable operator instance of every goal, deterministically
    ordered by goal index, then schema order, then principal position."""
    out = []
    for gi, g in enumerate(s):
        for name, principal in goal_instances(g):
            out.append(OperatorBinding(name, principal, gi))
    return out


def resolve_binding(s: State, binding: OperatorBinding) -> tuple[Goal, ...]:
    if binding.goal >= len(s):
        raise InvalidBindingError(
            f"state has {len(s)} goals, binding addresses goal {binding.goal}"
        )
    g = s[binding.goal]
    try:
        return apply_operator(g, binding.schema, binding.principal)
    except NotApplicableError as e:
        raise InvalidBindingError(str(e)) from e


def step_interleave(s: State, binding: OperatorBinding) -> State:
    """Reduce one goal of the state, splicing its subgoals in place."""
    subgoals = resolve_binding(s, binding)
    return s[: binding.goal] + subgoals + s[binding.goal + 1 :]


def step_sync(s: State) -> frozenset[State]:
    """All states reachable by reducing every goal at once.

    The empty state steps to itself.  The result is empty exactly when the
    state is nonempty and some goal admits no operator at all.
    """
    if not s:
        return frozenset((s,))
    per_goal: list[list[tuple[Goal, ...]]] = []
    for g in s:
        options = [apply_operator(g, name, p) for name, p in goal_instances(g)]
        if not options:
            return frozenset()
        per_goal.append(options)
    return frozenset(
        tuple(itertools.chain.from_iterable(choice))
        for choice in itertools.product(*per_goal)
    )


def is_reducible(g: Goal) -> bool:
    return next(goal_instances(g), None) is not None


def classify(s: State) -> str:
    """'closed-t1' for the empty state, 'stuck-t2' for a nonempty state with
    no applicable binding at all, otherwise 'open'."""
    if not s:
        return "closed-t1"
    if all(not is_reducible(g) for g in s):
        return "stuck-t2"
    return "open"


def destruct(g: Goal) -> frozenset[frozenset[Goal]]:
    """The one-step behaviour of a goal: the set, over every applicable
    operator instance, of the instance's subgoal list taken as a set."""
    return frozenset(
        frozenset(apply_operator(g, name, p)) for name, p in goal_instances(g)
    )
