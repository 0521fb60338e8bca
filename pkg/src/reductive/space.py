"""Reduction spaces: the and/or unfolding of a goal under every operator.

The space of a goal is the greatest tree alternating goal nodes with
or-alternatives: a goal node carries one alternative per element of the
goal's one-step behaviour (destruct), and an alternative carries one child
per subgoal of the operator application that produced it.  Alternatives are
keyed by subgoal set, so two operators with the same premisses share one
alternative; children follow the producing operator's subgoal list, so a
repeated premiss is drawn twice.

Spaces are in general infinite, so unfolding is by finite depth with an
explicit expanded flag on frontier nodes.  Two constructions are provided:
unfold, a direct corecursion, and unfold_iterative, which builds the depth
bound as a chain of approximations and must agree with unfold node for
node; coherence_check compares them.  Nodes whose goal already occurs on
their ancestor path carry a cycle marker (the index of the shallowest such
ancestor), which is an annotation only: expansion continues past it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .lang import Goal, render_sequent, sequent_to_json
from .reduction import (
    OperatorBinding,
    State,
    apply_operator,
    goal_instances,
    step_interleave,
)


@dataclass(frozen=True)
class OrNode:
    """One alternative of a goal node: an element of destruct(goal)."""

    via: tuple[str, ...]  # operator names producing this subgoal set
    children: tuple["SpaceNode", ...]


@dataclass(frozen=True)
class SpaceNode:
    goal: Goal
    alternatives: tuple[OrNode, ...]
    expanded: bool
    cyclic: Optional[int] = None  # index into the root-to-parent goal path

    def is_closed_here(self) -> bool:
        return any(not alt.children for alt in self.alternatives)


@dataclass(frozen=True)
class ReductionTree:
    """A finished reduction: every leaf is closed by a zero-premiss operator."""

    goal: Goal
    via: str  # operator name applied at this goal
    children: tuple["ReductionTree", ...]


def _operator_name(schema: str, principal: Optional[int]) -> str:
    return schema if principal is None else f"{schema}@{principal}"


def _parse_operator_name(name: str) -> tuple[str, Optional[int]]:
    if "@" in name:
        schema, _, idx = name.partition("@")
        return schema, int(idx)
    return name, None


def alternatives_of(g: Goal) -> list[tuple[tuple[str, ...], tuple[Goal, ...]]]:
    """destruct(g) with labels: one entry per distinct subgoal set, carrying
    every producing operator name and the first producer's subgoal list.
    Entries are sorted by operator name then principal index."""
    groups: dict[frozenset[Goal], tuple[list[str], tuple[Goal, ...]]] = {}
    for schema, principal in goal_instances(g):
        subgoals = apply_operator(g, schema, principal)
        key = frozenset(subgoals)
        if key in groups:
            groups[key][0].append(_operator_name(schema, principal))
        else:
            groups[key] = ([_operator_name(schema, principal)], subgoals)

    def sort_key(entry: tuple[list[str], tuple[Goal, ...]]) -> tuple[str, int]:
        schema, principal = _parse_operator_name(entry[0][0])
        return (schema, -1 if principal is None else principal)

    return [
        (tuple(labels), subgoals)
        for labels, subgoals in sorted(groups.values(), key=sort_key)
    ]


def unfold(g: Goal, depth: int, _path: tuple[Goal, ...] = ()) -> SpaceNode:
    """Corecursive unfolding truncated after `depth` goal layers."""
    cyclic = next((i for i, anc in enumerate(_path) if anc == g), None)
    if depth <= 0:
        return SpaceNode(g, (), expanded=False, cyclic=cyclic)
    path = _path + (g,)
    alts = tuple(
        OrNode(via, tuple(unfold(h, depth - 1, path) for h in subgoals))
        for via, subgoals in alternatives_of(g)
    )
    return SpaceNode(g, alts, expanded=True, cyclic=cyclic)


def unfold_iterative(g: Goal, depth: int) -> SpaceNode:
    """The same tree built as a chain of depth approximations: stage zero
    leaves every goal unexpanded, each further stage pastes destruct on the
    front of the previous stage.  Cycle markers are annotated afterwards."""

    def stage_zero(goal: Goal) -> SpaceNode:
        return SpaceNode(goal, (), expanded=False)

    def next_stage(prev: Callable[[Goal], SpaceNode]) -> Callable[[Goal], SpaceNode]:
        def stage(goal: Goal) -> SpaceNode:
            alts = tuple(
                OrNode(via, tuple(prev(h) for h in subgoals))
                for via, subgoals in alternatives_of(goal)
            )
            return SpaceNode(goal, alts, expanded=True)

        return stage

    build = stage_zero
    for _ in range(depth):
        build = next_stage(build)

    def annotate(node: SpaceNode, path: tuple[Goal, ...]) -> SpaceNode:
        cyclic = next((i for i, anc in enumerate(path) if anc == node.goal), None)
        alts = tuple(
            OrNode(a.via, tuple(annotate(c, path + (node.goal,)) for c in a.children))
            for a in node.alternatives
        )
        return SpaceNode(node.goal, alts, node.expanded, cyclic)

    return annotate(build(g), ())


def _first_mismatch(a: SpaceNode, b: SpaceNode, at: str) -> Optional[str]:
    if a.goal != b.goal:
        return f"{at}: goals differ"
    if a.expanded != b.expanded or a.cyclic != b.cyclic:
        return f"{at}: flags differ"
    if len(a.alternatives) != len(b.alternatives):
        return f"{at}: alternative counts differ"
    for i, (x, y) in enumerate(zip(a.alternatives, b.alternatives)):
        if x.via != y.via:
            return f"{at}.alt[{i}]: labels differ"
        if len(x.children) != len(y.children):
            return f"{at}.alt[{i}]: child counts differ"
        for j, (c, d) in enumerate(zip(x.children, y.children)):
            found = _first_mismatch(c, d, f"{at}.alt[{i}].child[{j}]")
            if found:
                return found
    return None


@dataclass(frozen=True)
class CoherenceReport:
    agree: bool
    counterexample: Optional[str] = None


def coherence_check(g: Goal, depth: int) -> CoherenceReport:
    """Structural agreement of the two unfolding constructions at a depth."""
    direct = unfold(g, depth)
    iterative = unfold_iterative(g, depth)
    if direct == iterative:
        return CoherenceReport(agree=True)
    return CoherenceReport(
        agree=False,
        counterexample=_first_mismatch(direct, iterative, "root") or "unlocated",
    )


# ---------------------------------------------------------------------------
# Extracting finished reductions from a truncated space.


def _trees_of(node: SpaceNode) -> Iterator[ReductionTree]:
    if not node.expanded:
        return  # frontier: cannot certify anything below
    for alt in node.alternatives:
        via = alt.via[0]
        if not alt.children:
            yield ReductionTree(node.goal, via, ())
            continue
        yield from (
            ReductionTree(node.goal, via, chosen)
            for chosen in _product_trees(alt.children)
        )


def _product_trees(children: tuple[SpaceNode, ...]) -> Iterator[tuple[ReductionTree, ...]]:
    if not children:
        yield ()
        return
    for head in _trees_of(children[0]):
        for rest in _product_trees(children[1:]):
            yield (head,) + rest


def extract_trees(node: SpaceNode, bound: int) -> list[ReductionTree]:
    """Up to `bound` complete reduction trees embedded in the space."""
    out = []
    for tree in _trees_of(node):
        out.append(tree)
        if len(out) >= bound:
            break
    return out


def replay_tree(tree: ReductionTree) -> list[tuple[OperatorBinding, State]]:
    """Drive step_interleave by the tree's operators, depth first; the final
    state of a complete tree is the empty state."""
    steps: list[tuple[OperatorBinding, State]] = []

    def run(t: ReductionTree, s: State, at: int) -> State:
        schema, principal = _parse_operator_name(t.via)
        binding = OperatorBinding(schema, principal, at)
        s = step_interleave(s, binding)
        steps.append((binding, s))
        for child in t.children:
            s = run(child, s, at)
        return s

    run(tree, (tree.goal,), 0)
    return steps


# ---------------------------------------------------------------------------
# Exports.


def space_to_json(node: SpaceNode) -> dict:
    return {
        "goal": sequent_to_json(node.goal),
        "text": render_sequent(node.goal),
        "expanded": node.expanded,
        "cyclic": node.cyclic,
        "alts": [
            {
                "via": list(alt.via),
                "children": [space_to_json(c) for c in alt.children],
            }
            for alt in node.alternatives
        ],
    }


def space_to_json_text(node: SpaceNode) -> str:
    return json.dumps(space_to_json(node), sort_keys=True)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def space_to_dot(node: SpaceNode) -> str:
    lines = [
        "digraph reduction_space {",
        '  node [fontname="monospace"];',
    ]
    counter = {"n": 0}

    def fresh(prefix: str) -> str:
        counter["n"] += 1
        return f"{prefix}{counter['n']}"

    def walk(n: SpaceNode, node_id: str, ancestors: list[str]) -> None:
        style = ', style="dashed"' if not n.expanded else ""
        lines.append(
            f'  {node_id} [label="{_dot_escape(render_sequent(n.goal))}", shape=box{style}];'
        )
        if n.cyclic is not None and n.cyclic < len(ancestors):
            lines.append(
                f"  {node_id} -> {ancestors[n.cyclic]} [style=dashed, constraint=false];"
            )
        for alt in n.alternatives:
            alt_id = fresh("a")
            label = _dot_escape(", ".join(alt.via))
            lines.append(f'  {alt_id} [label="•", shape=plaintext];')
            lines.append(f'  {node_id} -> {alt_id} [label="{label}"];')
            if not alt.children:
                leaf_id = fresh("box")
                lines.append(f'  {leaf_id} [label="□", shape=plaintext];')
                lines.append(f"  {alt_id} -> {leaf_id};")
            for child in alt.children:
                child_id = fresh("g")
                walk(child, child_id, ancestors + [node_id])
                lines.append(f"  {alt_id} -> {child_id};")

    walk(node, "g0", [])
    lines.append("}")
    return "\n".join(lines)


def tree_to_json(tree: ReductionTree) -> dict:
    return {
        "goal": sequent_to_json(tree.goal),
        "text": render_sequent(tree.goal),
        "via": tree.via,
        "children": [tree_to_json(c) for c in tree.children],
    }


def tree_to_dot(tree: ReductionTree) -> str:
    lines = [
        "digraph reduction_tree {",
        '  node [fontname="monospace"];',
    ]
    counter = {"n": 0}

    def walk(t: ReductionTree, node_id: str) -> None:
        style = ', style="dashed"' if not t.children and not t.via else ""
        lines.append(
            f'  {node_id} [label="{_dot_escape(render_sequent(t.goal))}", shape=box{style}];'
        )
        if not t.children:
            if not t.via:
                return  # open leaf, no operator applied yet
            counter["n"] += 1
            leaf = f"box{counter['n']}"
            lines.append(f'  {leaf} [label="□", shape=plaintext];')
            lines.append(f'  {node_id} -> {leaf} [label="{_dot_escape(t.via)}"];')
            return
        for child in t.children:
            counter["n"] += 1
            child_id = f"g{counter['n']}"
            walk(child, child_id)
            lines.append(f'  {node_id} -> {child_id} [label="{_dot_escape(t.via)}"];')

    walk(tree, "g0")
    lines.append("}")
    return "\n".join(lines)
