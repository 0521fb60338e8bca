"""Tactic expressions over reduction operators and their step semantics.

The language is a ::= prim | a ; a | a + a | a*, where a primitive names an
operator schema, optionally pinned to a context position with @k and to a
goal index with #j.  A bare schema name resolves to the leftmost applicable
binding.  Sequencing binds tighter than choice and star is postfix, so
  Ax + ImpL ; Ax*   parses as   Ax + (ImpL ; (Ax*)).

transitions() computes the set of states a tactic can step a state to.
Star is unrolled breadth first up to an explicit budget; the report's
truncated flag says whether one more unrolling would have reached new
states.  Alongside the stepper live the synchronous-vs-concatenation
distribution map and its coherence check over sampled state lists: stepping
a concatenation synchronously is the same as stepping the parts and
concatenating every combination.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

from .lang import Goal
from .reduction import (
    SCHEMAS,
    OperatorBinding,
    State,
    applicable_bindings,
    step_interleave,
    step_sync,
)


@dataclass(frozen=True)
class Prim:
    schema: str
    principal: Optional[int] = None
    goal: Optional[int] = None

    def __str__(self) -> str:
        text = self.schema
        if self.principal is not None:
            text += f"@{self.principal}"
        if self.goal is not None:
            text += f"#{self.goal}"
        return text


@dataclass(frozen=True)
class Seq:
    first: "TacticExpr"
    second: "TacticExpr"

    def __str__(self) -> str:
        return f"{_wrap(self.first, (Choice,))} ; {_wrap(self.second, (Choice, Seq))}"


@dataclass(frozen=True)
class Choice:
    left: "TacticExpr"
    right: "TacticExpr"

    def __str__(self) -> str:
        return f"{self.left} + {_wrap(self.right, (Choice,))}"


@dataclass(frozen=True)
class Star:
    body: "TacticExpr"

    def __str__(self) -> str:
        return f"{_wrap(self.body, (Choice, Seq))}*"


TacticExpr = Union[Prim, Seq, Choice, Star]


def _wrap(t: TacticExpr, needs_parens: tuple) -> str:
    text = str(t)
    return f"({text})" if isinstance(t, needs_parens) else text


class TacticSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownPrimitiveError(ValueError):
    pass


_TACTIC_TOKEN = re.compile(
    r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9]*(?:@\d+)?(?:#\d+)?)"
    r"|(?P<seq>;)|(?P<choice>\+)|(?P<star>\*)|(?P<lpar>\()|(?P<rpar>\)))"
)


def parse_tactic(text: str) -> TacticExpr:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    while i < len(text):
        m = _TACTIC_TOKEN.match(text, i)
        if m is None:
            stripped = text[i:].lstrip()
            if not stripped:
                break
            raise TacticSyntaxError(f"unexpected character {stripped[0]!r}", i)
        kind = m.lastgroup
        assert kind is not None
        tokens.append((kind, m.group(kind), m.start(kind)))
        i = m.end()
    tokens.append(("end", "", len(text)))

    pos = [0]

    def peek() -> tuple[str, str, int]:
        return tokens[pos[0]]

    def take(kind: str) -> tuple[str, str, int]:
        tok = tokens[pos[0]]
        if tok[0] != kind:
            raise TacticSyntaxError(
                f"expected {kind}, found {tok[1] or 'end of input'!r}", tok[2]
            )
        pos[0] += 1
        return tok

    def choice_level() -> TacticExpr:
        t = seq_level()
        while peek()[0] == "choice":
            take("choice")
            t = Choice(t, seq_level())
        return t

    def seq_level() -> TacticExpr:
        t = star_level()
        while peek()[0] == "seq":
            take("seq")
            t = Seq(t, star_level())
        return t

    def star_level() -> TacticExpr:
        t = unit_level()
        while peek()[0] == "star":
            take("star")
            t = Star(t)
        return t

    def unit_level() -> TacticExpr:
        kind, value, at = peek()
        if kind == "lpar":
            take("lpar")
            t = choice_level()
            take("rpar")
            return t
        if kind == "name":
            take("name")
            m = re.fullmatch(r"([A-Za-z][A-Za-z0-9]*)(?:@(\d+))?(?:#(\d+))?", value)
            assert m is not None
            schema, principal, goal = m.groups()
            return Prim(
                schema,
                int(principal) if principal is not None else None,
                int(goal) if goal is not None else None,
            )
        raise TacticSyntaxError(f"expected a tactic, found {value or 'end of input'!r}", at)

    t = choice_level()
    take("end")
    return t


@dataclass(frozen=True)
class TransitionReport:
    source: State
    tactic: TacticExpr
    targets: frozenset[State]
    derivations: int
    truncated: bool


def resolve_prim(s: State, prim: Prim) -> Optional[OperatorBinding]:
    """The leftmost applicable binding matching the primitive's constraints."""
    if prim.schema not in SCHEMAS:
        raise UnknownPrimitiveError(f"unknown operator schema {prim.schema!r}")
    for binding in applicable_bindings(s):
        if binding.schema != prim.schema:
            continue
        if prim.principal is not None and binding.principal != prim.principal:
            continue
        if prim.goal is not None and binding.goal != prim.goal:
            continue
        return binding
    return None


class _Stepper:
    def __init__(self, star_budget: int):
        self.star_budget = star_budget
        self.derivations = 0
        self.truncated = False

    def targets(self, s: State, t: TacticExpr) -> frozenset[State]:
        if isinstance(t, Prim):
            binding = resolve_prim(s, t)
            if binding is None:
                return frozenset()
            self.derivations += 1
            return frozenset((step_interleave(s, binding),))
        if isinstance(t, Seq):
            mids = self.targets(s, t.first)
            return frozenset(
                out for mid in mids for out in self.targets(mid, t.second)
            )
        if isinstance(t, Choice):
            return self.targets(s, t.left) | self.targets(s, t.right)
        if isinstance(t, Star):
            return self._star(s, t.body)
        raise TypeError(f"not a tactic: {t!r}")

    def _star(self, s: State, body: TacticExpr) -> frozenset[State]:
        reached = {s}
        frontier = [s]
        for _ in range(self.star_budget):
            if not frontier:
                return frozenset(reached)
            new = set()
            for f in frontier:
                new |= self.targets(f, body) - reached
            reached |= new
            frontier = list(new)
        if frontier:
            # budget spent with live frontier: probe one more unrolling
            for f in frontier:
                if self.targets(f, body) - reached:
                    self.truncated = True
                    break
        return frozenset(reached)


def transitions(s: State, t: TacticExpr, star_budget: int = 8) -> TransitionReport:
    """Every state the tactic can take s to, within the star budget."""
    stepper = _Stepper(star_budget)
    targets = stepper.targets(s, t)
    return TransitionReport(
        source=s,
        tactic=t,
        targets=targets,
        derivations=stepper.derivations,
        truncated=stepper.truncated,
    )


def reaches_box(g: Goal, t: TacticExpr, star_budget: int = 8) -> bool:
    return () in transitions((g,), t, star_budget).targets


Derivation = tuple[tuple[OperatorBinding, State], ...]


def derivations(
    s: State, t: TacticExpr, star_budget: int = 8
) -> Iterator[Derivation]:
    """Enumerate the tactic's derivations from s, greediest first: a star
    unrolls before stopping and a choice tries its left arm first.  Each
    derivation lists the bindings applied with the state after each."""

    def walk(current: State, expr: TacticExpr, fuel: int) -> Iterator[Derivation]:
        if isinstance(expr, Prim):
            binding = resolve_prim(current, expr)
            if binding is not None:
                yield ((binding, step_interleave(current, binding)),)
        elif isinstance(expr, Seq):
            for head in walk(current, expr.first, fuel):
                end = head[-1][1] if head else current
                for tail in walk(end, expr.second, fuel):
                    yield head + tail
        elif isinstance(expr, Choice):
            yield from walk(current, expr.left, fuel)
            yield from walk(current, expr.right, fuel)
        else:
            assert isinstance(expr, Star)
            if fuel > 0:
                for head in walk(current, expr.body, fuel):
                    end = head[-1][1] if head else current
                    for tail in walk(end, expr, fuel - 1):
                        yield head + tail
            yield ()

    return walk(s, t, star_budget)


def first_derivation(
    s: State, t: TacticExpr, star_budget: int = 8
) -> Optional[Derivation]:
    """First derivation that actually moves, in the greedy order."""
    for d in derivations(s, t, star_budget):
        if d and d[-1][1] != s:
            return d
    return None


# ---------------------------------------------------------------------------
# Synchronous stepping of concatenations.


def distribute(parts: Sequence[Iterable[State]]) -> frozenset[tuple[State, ...]]:
    """All ways of picking one element from each part, in order.  With no
    parts the single empty pick remains; an empty part kills everything."""
    return frozenset(itertools.product(*parts))


def concat(states: Sequence[State]) -> State:
    out: tuple[Goal, ...] = ()
    for s in states:
        out += s
    return out


@dataclass(frozen=True)
class PentagonReport:
    checked: int
    failures: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def check_pentagon(samples: Sequence[Sequence[State]]) -> PentagonReport:
    """Synchronous stepping commutes with concatenation: stepping the
    concatenation of a state list equals concatenating one synchronous step
    of each part, over every combination."""
    failures = []
    for sample in samples:
        sample = tuple(sample)
        left = step_sync(concat(sample))
        right = frozenset(
            concat(choice) for choice in distribute([step_sync(s) for s in sample])
        )
        if left != right:
            failures.append(
                {
                    "sample": sample,
                    "stepped_concatenation": left,
                    "concatenated_steps": right,
                }
            )
    return PentagonReport(checked=len(samples), failures=tuple(failures))
