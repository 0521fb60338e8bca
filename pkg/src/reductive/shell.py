"""Command line entry points.

  decide        ask the independent decision procedure about a sequent
  prove         run strategy-driven reduction search
  mprove        decide a multiplicative sequent by resource splitting
  harness       cross-check the engine against the decision procedure
  check-tactic  judge a named tactic over a bounded instance
  session       create and drive interactive sessions on disk
  serve         expose sessions over HTTP

Exit codes: 0 for a positive answer (valid, proved, all checks passed),
1 for a negative one, 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import control, oracle, service, space, tactical, tactics
from .lang import FragmentError, ParseError, Sequent, parse, parse_sequent, render_sequent
from .reduction import InvalidBindingError, OperatorBinding
from .sessions import SessionError, SessionStore, derivation_tree
from .space import ReductionTree


def _read_sequent(text: str) -> Sequent:
    if "|-" in text:
        return parse_sequent(text)
    return Sequent((), parse(text))


def _tree_lines(tree: ReductionTree, depth: int = 0):
    mark = f"  [{tree.via}]" if tree.via else ""
    closed = "  □" if tree.via and not tree.children else ""
    yield "  " * depth + render_sequent(tree.goal) + mark + closed
    for child in tree.children:
        yield from _tree_lines(child, depth + 1)


def _print_session(session) -> None:
    print(f"session {session.session_id}")
    print(f"goal:   {render_sequent(session.goal)}")
    print(f"status: {session.status}  (depth {session.depth})")
    if session.state:
        print("open goals:")
        for i, g in enumerate(session.state):
            print(f"  #{i}  {render_sequent(g)}")
    from .reduction import applicable_bindings

    labels = [b.label() for b in applicable_bindings(session.state)]
    if labels:
        print("applicable: " + ", ".join(labels))


def _cmd_decide(args) -> int:
    s = _read_sequent(args.sequent)
    verdict = oracle.decide_ipl(s)
    print(render_sequent(s))
    print(("valid" if verdict.valid else "invalid") + f" ({verdict.method})")
    if args.classical:
        print(f"classically {'valid' if oracle.classically_valid(s) else 'invalid'}")
    if not verdict.valid and args.countermodel:
        model = oracle.kripke_countermodel(s, max_worlds=args.max_worlds)
        if model is None:
            print(f"no countermodel with up to {args.max_worlds} worlds")
        else:
            print(f"countermodel on {len(model.worlds)} world(s):")
            for w in model.worlds:
                above = sorted(v for (u, v) in model.order if u == w and v != w)
                holds = sorted(a for (a, u) in model.valuation if u == w)
                arrows = " <= " + ", ".join(f"w{v}" for v in above) if above else ""
                print(f"  w{w}{arrows}: {', '.join(holds) if holds else '(no atoms)'}")
    return 0 if verdict.valid else 1


def _strategy_from(args) -> control.Strategy:
    return control.Strategy(
        goal_selection=args.goal_selection,
        traversal=args.traversal,
        loop_check="branch-repeat" if args.loop_check == "on" else "off",
        depth_budget=args.depth,
        node_budget=args.nodes,
    )


def _cmd_prove(args) -> int:
    s = _read_sequent(args.sequent)
    outcome = control.search(s, _strategy_from(args))
    print(render_sequent(s))
    print(f"{outcome.status}  (nodes {outcome.nodes_visited}, deepest {outcome.deepest})")
    if args.trace:
        for event in outcome.trace:
            if isinstance(event, control.Applied):
                print(f"  apply {event.binding.label()}")
            elif isinstance(event, control.Backtracked):
                print("  backtrack")
            else:
                print(f"  prune {event.binding.label()}")
    if outcome.tree is not None:
        if args.dot:
            print(space.tree_to_dot(outcome.tree))
        else:
            for line in _tree_lines(outcome.tree):
                print(line)
    return 0 if outcome.status == control.PROVED else 1


def _cmd_mprove(args) -> int:
    s = parse_sequent(args.sequent) if "|-" in args.sequent else _read_sequent(args.sequent)
    answers = {}
    if args.method in ("io", "both"):
        answers["io"] = control.io_prove(s)
    if args.method in ("naive", "both"):
        answers["naive"] = control.naive_split_prove(s)
    print(render_sequent(s))
    for name, value in answers.items():
        print(f"{name}: {'provable' if value else 'not provable'}")
    if len(answers) == 2 and answers["io"] != answers["naive"]:
        print("warning: the disciplines disagree", file=sys.stderr)
        return 2
    return 0 if all(answers.values()) else 1


def _harness_corpus(args) -> list[Sequent]:
    if args.corpus == "curated":
        return oracle.curated_provable()
    if args.corpus == "pinned":
        return oracle.pinned_corpus()
    return oracle.random_ipl_goals(seed=args.seed, count=args.sample)


def _cmd_harness(args) -> int:
    reports = []
    wanted = args.check
    if wanted in ("soundness", "all"):
        reports.append(oracle.check_soundness(_harness_corpus(args), depth_budget=args.depth))
    if wanted in ("completeness", "all"):
        reports.append(oracle.check_completeness(_harness_corpus(args), depth_budget=args.depth))
    if wanted in ("faithfulness", "all"):
        goals = oracle.random_ipl_goals(seed=args.seed, count=args.sample)
        reports.append(oracle.check_faithfulness(goals))
    if wanted in ("adequacy", "all"):
        goals = oracle.random_ipl_goals(seed=args.seed + 1, count=args.sample)
        reports.append(oracle.check_adequacy(goals))
    if wanted in ("agreement", "all"):
        mismatches = control.splitting_agreement()
        ok = not mismatches
        print(f"agreement: {'passed' if ok else 'FAILED'} "
              f"({len(control.multiplicative_corpus())} sequents, {len(mismatches)} mismatches)")
        if not ok:
            for s in mismatches[:10]:
                print(f"  {render_sequent(s)}")
        if wanted == "agreement":
            return 0 if ok else 1
        reports.append(ok)
    failed = False
    for report in reports:
        if isinstance(report, bool):
            failed = failed or not report
            continue
        print(report.summary())
        failed = failed or not report.passed
    return 1 if failed else 0


def _cmd_check_tactic(args) -> int:
    if args.instance == "milner":
        inst = tactical.milner_instance(atom_bound=args.atoms, size_bound=args.size)
        if args.tactic == "ax":
            tac = tactical.milner_ax_tactic(inst)
        elif args.tactic == "imp-left":
            tac = tactical.milner_impl_tactic(inst)
        else:
            raise ValueError(f"milner instance has no tactic {args.tactic!r}")
    else:
        inst = tactical.meeting_instance()
        if args.tactic == "meet-by-noon":
            tac = tactical.meeting_tactic(inst)
        elif args.tactic == "meet-by-evening":
            tac = tactical.meeting_tactic(inst, deadline=tactical.EVENING)
        else:
            raise ValueError(f"meeting instance has no tactic {args.tactic!r}")
    verdict = tactical.check_tactic_validity(inst, tac, bound=args.bound)
    print(json.dumps(verdict.to_json(), indent=2, sort_keys=True))
    return 0 if verdict.valid_within_bound else 1


def _cmd_session(args) -> int:
    store = SessionStore(args.dir)
    if args.action == "new":
        session = store.create(_read_sequent(args.sequent))
        _print_session(session)
        return 0
    if args.action == "list":
        for sid in store.ids():
            print(sid)
        return 0
    if args.action == "show":
        _print_session(store.get(args.id))
        return 0
    if args.action == "apply":
        session = store.apply(args.id, OperatorBinding.from_label(args.binding))
        _print_session(session)
        return 0
    if args.action == "undo":
        session = store.backtrack(args.id)
        _print_session(session)
        return 0
    if args.action == "tactic":
        session, applied = store.run_tactic(args.id, args.tactic)
        print("applied: " + ", ".join(b.label() for b in applied))
        _print_session(session)
        return 0
    if args.action == "space":
        session = store.get(args.id)
        nodes = [space.unfold(g, args.depth) for g in session.state]
        if args.dot:
            for node in nodes:
                print(space.space_to_dot(node))
        else:
            payload = [space.space_to_json(node) for node in nodes]
            print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    if args.action == "export":
        tree = derivation_tree(store.get(args.id))
        if args.format == "dot":
            print(space.tree_to_dot(tree))
        else:
            print(json.dumps(space.tree_to_json(tree), indent=2, sort_keys=True))
        return 0
    raise ValueError(f"unknown session action {args.action!r}")


def _cmd_serve(args) -> int:
    service.serve(host=args.host, port=args.port, journal_dir=args.journal_dir)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reductive",
        description="Reduction-based proof search with sessions and checkers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="run the decision procedure on a sequent")
    p.add_argument("sequent", help="e.g. 'p, p -> q |- q' or a bare formula")
    p.add_argument("--countermodel", action="store_true",
                   help="on an invalid sequent, search for a small countermodel")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--classical", action="store_true",
                   help="also report the classical truth-table verdict")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("prove", help="search for a reduction to the empty state")
    p.add_argument("sequent")
    p.add_argument("--traversal", choices=("dfs", "bfs", "iterative-deepening"),
                   default="dfs")
    p.add_argument("--goal-selection", choices=("leftmost", "smallest-goal"),
                   default="leftmost")
    p.add_argument("--loop-check", choices=("on", "off"), default="on")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--nodes", type=int, default=100_000)
    p.add_argument("--trace", action="store_true", help="print every choice and retreat")
    p.add_argument("--dot", action="store_true", help="print the proof tree as DOT")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("mprove", help="decide a multiplicative (atoms and *) sequent")
    p.add_argument("sequent")
    p.add_argument("--method", choices=("io", "naive", "both"), default="both")
    p.set_defaults(func=_cmd_mprove)

    p = sub.add_parser("harness", help="cross-check the engine against the oracle")
    p.add_argument("check",
                   choices=("soundness", "completeness", "faithfulness",
                            "adequacy", "agreement", "all"))
    p.add_argument("--corpus", choices=("random", "curated", "pinned"), default="random",
                   help="'pinned' sweeps the full small-sequent corpus and is slow")
    p.add_argument("--sample", type=int, default=200)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--depth", type=int, default=14)
    p.set_defaults(func=_cmd_harness)

    p = sub.add_parser("check-tactic", help="judge a named tactic over a bounded instance")
    p.add_argument("instance", choices=("milner", "meeting"))
    p.add_argument("tactic",
                   help="milner: ax, imp-left; meeting: meet-by-noon, meet-by-evening")
    p.add_argument("--bound", type=int, default=50)
    p.add_argument("--atoms", type=int, default=2)
    p.add_argument("--size", type=int, default=4)
    p.set_defaults(func=_cmd_check_tactic)

    p = sub.add_parser("session", help="drive interactive sessions kept on disk")
    p.add_argument("--dir", default=".reductive-sessions",
                   help="journal directory (default ./.reductive-sessions)")
    actions = p.add_subparsers(dest="action", required=True)
    a = actions.add_parser("new"); a.add_argument("sequent")
    actions.add_parser("list")
    a = actions.add_parser("show"); a.add_argument("id")
    a = actions.add_parser("apply"); a.add_argument("id"); a.add_argument("binding")
    a = actions.add_parser("undo"); a.add_argument("id")
    a = actions.add_parser("tactic"); a.add_argument("id"); a.add_argument("tactic")
    a = actions.add_parser("space"); a.add_argument("id")
    a.add_argument("--depth", type=int, default=2); a.add_argument("--dot", action="store_true")
    a = actions.add_parser("export"); a.add_argument("id")
    a.add_argument("--format", choices=("dot", "json"), default="dot")
    p.set_defaults(func=_cmd_session)

    p = sub.add_parser("serve", help="serve sessions over HTTP on the loopback")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8421)
    p.add_argument("--journal-dir", default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FragmentError, InvalidBindingError,
            tactics.TacticSyntaxError, tactics.UnknownPrimitiveError,
            SessionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
