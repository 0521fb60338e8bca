"""Search strategies over reductions, and resource-managed proving.

Proof search here is reduction plus explicit control: a strategy fixes how
the next goal is selected, the order operators are tried in, the traversal
discipline, loop checking, and budgets.  The searcher commits to one goal
per state (any order of attack preserves provability) but backtracks over
operator choices, recording every choice and retreat in a trace; a proved
outcome carries a finished reduction tree, and replaying the trace with a
stack of states lands on the empty state.

The second half handles the multiplicative fragment (atoms and * only),
where the context is a resource multiset that right-splitting has to
divide.  naive_split_prove enumerates every two-part division; io_prove
threads the input context through the left branch and hands the leftover
to the right branch, which is the input/output discipline.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .lang import (
    Atom,
    Formula,
    Goal,
    Sequent,
    Star,
    require_multiplicative,
    sequent_size,
)
from .reduction import (
    SCHEMA_ORDER,
    OperatorBinding,
    State,
    apply_operator,
    goal_instances,
    step_interleave,
)
from .space import ReductionTree

PROVED = "proved"
EXHAUSTED = "exhausted"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class Strategy:
    goal_selection: str = "leftmost"  # or "smallest-goal"
    operator_order: tuple[str, ...] = SCHEMA_ORDER
    traversal: str = "dfs"  # "dfs" | "bfs" | "iterative-deepening"
    loop_check: str = "branch-repeat"  # or "off"
    depth_budget: int = 20
    node_budget: int = 100_000

    def __post_init__(self) -> None:
        if self.goal_selection not in ("leftmost", "smallest-goal"):
            raise ValueError(f"unknown goal selection {self.goal_selection!r}")
        if self.traversal not in ("dfs", "bfs", "iterative-deepening"):
            raise ValueError(f"unknown traversal {self.traversal!r}")
        if self.loop_check not in ("off", "branch-repeat"):
            raise ValueError(f"unknown loop check {self.loop_check!r}")
        if self.depth_budget < 1 or self.node_budget < 1:
            raise ValueError("budgets must be at least 1")


@dataclass(frozen=True)
class Applied:
    binding: OperatorBinding


@dataclass(frozen=True)
class Backtracked:
    pass


@dataclass(frozen=True)
class Pruned:
    binding: OperatorBinding


TraceEvent = Union[Applied, Backtracked, Pruned]


@dataclass
class SearchOutcome:
    status: str
    tree: Optional[ReductionTree] = None
    trace: list[TraceEvent] = field(default_factory=list)
    nodes_visited: int = 0
    deepest: int = 0


def replay_trace(g: Goal, trace: list[TraceEvent]) -> State:
    """Fold a trace over a stack of states: apply pushes, backtrack pops."""
    stack: list[State] = [(g,)]
    for event in trace:
        if isinstance(event, Applied):
            stack.append(step_interleave(stack[-1], event.binding))
        elif isinstance(event, Backtracked):
            stack.pop()
    return stack[-1]


# Entries pair each open goal with the set and count of its branch ancestors.
_Entry = tuple[Goal, frozenset, int]


def _select(entries: tuple[_Entry, ...], strategy: Strategy) -> int:
    if strategy.goal_selection == "smallest-goal":
        return min(range(len(entries)), key=lambda i: (sequent_size(entries[i][0]), i))
    return 0


def _ordered_instances(g: Goal, strategy: Strategy) -> list[tuple[str, Optional[int]]]:
    rank = {name: i for i, name in enumerate(strategy.operator_order)}
    instances = [
        (name, principal)
        for name, principal in goal_instances(g)
        if name in rank
    ]
    instances.sort(key=lambda it: (rank[it[0]], -1 if it[1] is None else it[1]))
    return instances


class _NodesExhausted(Exception):
    pass


class _Searcher:
    def __init__(self, strategy: Strategy):
        self.strategy = strategy
        self.nodes = 0
        self.deepest = 0
        self.trace: list[TraceEvent] = []
        self.path: list[OperatorBinding] = []

    def spend_node(self) -> None:
        self.nodes += 1
        if self.nodes > self.strategy.node_budget:
            raise _NodesExhausted()

    def dfs(self, entries: tuple[_Entry, ...], depth_cap: int) -> str:
        if not entries:
            return PROVED
        idx = _select(entries, self.strategy)
        goal, chain, depth = entries[idx]
        self.deepest = max(self.deepest, depth)
        if depth >= depth_cap:
            return "cut"
        cut = False
        for name, principal in _ordered_instances(goal, self.strategy):
            subgoals = apply_operator(goal, name, principal)
            binding = OperatorBinding(name, principal, idx)
            if self.strategy.loop_check == "branch-repeat" and any(
                sub == goal or sub in chain for sub in subgoals
            ):
                self.trace.append(Pruned(binding))
                continue
            self.spend_node()
            grown = chain | {goal}
            next_entries = (
                entries[:idx]
                + tuple((sub, grown, depth + 1) for sub in subgoals)
                + entries[idx + 1 :]
            )
            self.trace.append(Applied(binding))
            self.path.append(binding)
            result = self.dfs(next_entries, depth_cap)
            if result == PROVED:
                return PROVED
            if result == "cut":
                cut = True
            self.trace.append(Backtracked())
            self.path.pop()
        return "cut" if cut else "failed"

    def bfs(self, root: Goal, depth_cap: int) -> tuple[str, tuple[OperatorBinding, ...]]:
        start: tuple[_Entry, ...] = ((root, frozenset(), 0),)
        queue: deque[tuple[tuple[_Entry, ...], tuple[OperatorBinding, ...]]] = deque(
            [(start, ())]
        )
        seen = {start}
        cut = False
        while queue:
            entries, path = queue.popleft()
            if not entries:
                return PROVED, path
            if len(path) >= depth_cap:
                cut = True
                continue
            idx = _select(entries, self.strategy)
            goal, chain, depth = entries[idx]
            self.deepest = max(self.deepest, depth)
            for name, principal in _ordered_instances(goal, self.strategy):
                subgoals = apply_operator(goal, name, principal)
                binding = OperatorBinding(name, principal, idx)
                if self.strategy.loop_check == "branch-repeat" and any(
                    sub == goal or sub in chain for sub in subgoals
                ):
                    self.trace.append(Pruned(binding))
                    continue
                self.spend_node()
                grown = chain | {goal}
                next_entries = (
                    entries[:idx]
                    + tuple((sub, grown, depth + 1) for sub in subgoals)
                    + entries[idx + 1 :]
                )
                if next_entries in seen:
                    continue
                seen.add(next_entries)
                queue.append((next_entries, path + (binding,)))
        return ("cut" if cut else "failed"), ()


def _tree_from_path(g: Goal, path: list[OperatorBinding]) -> ReductionTree:
    class _Node:
        __slots__ = ("goal", "via", "children")

        def __init__(self, goal: Goal):
            self.goal = goal
            self.via = ""
            self.children: list["_Node"] = []

    root = _Node(g)
    pending: list[_Node] = [root]
    state: State = (g,)
    for binding in path:
        node = pending[binding.goal]
        subgoals = apply_operator(state[binding.goal], binding.schema, binding.principal)
        node.via = binding.operator_name()
        node.children = [_Node(s) for s in subgoals]
        pending[binding.goal : binding.goal + 1] = node.children
        state = step_interleave(state, binding)
    assert not pending and not state

    def freeze(n: _Node) -> ReductionTree:
        return ReductionTree(n.goal, n.via, tuple(freeze(c) for c in n.children))

    return freeze(root)


def search(g: Goal, strategy: Strategy = Strategy()) -> SearchOutcome:
    """Drive the chosen traversal from the single-goal state [g]."""
    searcher = _Searcher(strategy)

    try:
        if strategy.traversal == "bfs":
            status, path = searcher.bfs(g, strategy.depth_budget)
            if status == PROVED:
                searcher.trace = [Applied(b) for b in path]
                return SearchOutcome(
                    PROVED,
                    tree=_tree_from_path(g, list(path)),
                    trace=searcher.trace,
                    nodes_visited=searcher.nodes,
                    deepest=searcher.deepest,
                )
            final = EXHAUSTED if status == "failed" else BUDGET_EXCEEDED
            return SearchOutcome(
                final,
                trace=searcher.trace,
                nodes_visited=searcher.nodes,
                deepest=searcher.deepest,
            )

        caps = (
            range(1, strategy.depth_budget + 1)
            if strategy.traversal == "iterative-deepening"
            else (strategy.depth_budget,)
        )
        start: tuple[_Entry, ...] = ((g, frozenset(), 0),)
        result = "cut"
        for cap in caps:
            searcher.trace = []
            searcher.path = []
            result = searcher.dfs(start, cap)
            if result == PROVED:
                return SearchOutcome(
                    PROVED,
                    tree=_tree_from_path(g, searcher.path),
                    trace=searcher.trace,
                    nodes_visited=searcher.nodes,
                    deepest=searcher.deepest,
                )
            if result == "failed":
                # the whole pruned space fit under this cap; deeper caps
                # would retread the same ground
                return SearchOutcome(
                    EXHAUSTED,
                    trace=searcher.trace,
                    nodes_visited=searcher.nodes,
                    deepest=searcher.deepest,
                )
        return SearchOutcome(
            BUDGET_EXCEEDED,
            trace=searcher.trace,
            nodes_visited=searcher.nodes,
            deepest=searcher.deepest,
        )
    except _NodesExhausted:
        return SearchOutcome(
            BUDGET_EXCEEDED,
            trace=searcher.trace,
            nodes_visited=searcher.nodes,
            deepest=searcher.deepest,
        )


# ---------------------------------------------------------------------------
# Multiplicative fragment: the context is a resource multiset.


def _atom_leaves(f: Formula) -> list[str]:
    if isinstance(f, Atom):
        return [f.name]
    if isinstance(f, Star):
        return _atom_leaves(f.left) + _atom_leaves(f.right)
    raise ValueError(f"not a multiplicative formula: {f!r}")


def naive_split_prove(s: Sequent) -> bool:
    """Decide the fragment by trying, at every Star conclusion, every way of
    dividing the context multiset between the two branches."""
    require_multiplicative(s)

    def prove(ctx: tuple[Formula, ...], concl: Formula) -> bool:
        if isinstance(concl, Atom) and ctx == (concl,):
            return True  # identity consumes exactly its principal
        for i, f in enumerate(ctx):
            if isinstance(f, Star):
                opened = ctx[:i] + (f.left, f.right) + ctx[i + 1 :]
                if prove(opened, concl):
                    return True
        if isinstance(concl, Star):
            indices = range(len(ctx))
            for k in range(len(ctx) + 1):
                for chosen in itertools.combinations(indices, k):
                    left = tuple(ctx[i] for i in chosen)
                    right = tuple(ctx[i] for i in indices if i not in chosen)
                    if prove(left, concl.left) and prove(right, concl.right):
                        return True
        return False

    return prove(tuple(s.context), s.conclusion)


def io_prove(s: Sequent) -> bool:
    """Decide the fragment by threading resources: the left branch of a
    Star receives everything and its leftover feeds the right branch; the
    whole sequent holds when the root leftover is empty."""
    require_multiplicative(s)
    available = Counter(
        leaf for f in s.context for leaf in _atom_leaves(f)
    )

    def consume(avail: Counter, f: Formula) -> Optional[Counter]:
        if isinstance(f, Atom):
            if avail[f.name] <= 0:
                return None
            spent = avail.copy()
            spent[f.name] -= 1
            return spent
        assert isinstance(f, Star)
        mid = consume(avail, f.left)
        if mid is None:
            return None
        return consume(mid, f.right)

    leftover = consume(available, s.conclusion)
    return leftover is not None and sum(leftover.values()) == 0


def multiplicative_corpus() -> list[Sequent]:
    """Contexts of up to four formulas over p and q with small Star shapes,
    conclusions of size up to three."""
    p, q = Atom("p"), Atom("q")
    small: list[Formula] = [p, q, Star(p, p), Star(p, q), Star(q, p), Star(q, q)]
    out = []
    for k in range(0, 5):
        for ctx in itertools.combinations_with_replacement(small, k):
            for concl in small:
                out.append(Sequent(ctx, concl))
    return out


def splitting_agreement(corpus: Optional[list[Sequent]] = None) -> list[Sequent]:
    """Sequents where the two resource-management disciplines disagree."""
    corpus = corpus if corpus is not None else multiplicative_corpus()
    return [s for s in corpus if io_prove(s) != naive_split_prove(s)]
