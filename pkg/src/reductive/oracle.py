"""Independent decision procedure for IPL plus engine-vs-oracle harnesses.

decide_ipl settles derivability of an intuitionistic propositional sequent
by exhaustive backward search in a terminating contraction-free calculus
whose implication-left rule is split by the shape of the antecedent.  It is
deliberately written against the formula types only and shares no code with
the reduction engine, so the two can be played against each other:

  * soundness harness: goals the engine closes must be oracle-valid;
  * completeness harness: oracle-valid goals must be closed by the engine;
  * faithfulness harness: every operator application must instantiate the
    declared forward rule table;
  * adequacy harness: every forward rule instance must be reachable as an
    operator application.

A bounded Kripke countermodel search and a classical truth-table check are
included as spot-checks on the oracle itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .lang import (
    And,
    Atom,
    Bot,
    Formula,
    Goal,
    Imp,
    Or,
    Sequent,
    Top,
    atoms_of,
    parse_sequent,
    render,
    render_sequent,
    require_ipl,
)

Context = frozenset[Formula]


@dataclass(frozen=True)
class Verdict:
    valid: bool
    method: str
    certificate: Optional[str] = None


def _fkey(f: Formula) -> tuple:
    return (len(render(f)), render(f))


def _pick(candidates: Iterable[Formula]) -> list[Formula]:
    return sorted(candidates, key=_fkey)


class _Prover:
    """Backward search with memoisation; branches never revisit a sequent
    because every rule strictly shrinks the usual formula-weight measure."""

    def __init__(self) -> None:
        self.memo: dict[tuple[Context, Formula], bool] = {}
        self.trace: list[str] = []

    def holds(self, ctx: Context, goal: Formula) -> bool:
        key = (ctx, goal)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        result = self._attempt(ctx, goal)
        self.memo[key] = result
        return result

    def _log(self, rule: str, ctx: Context, goal: Formula) -> None:
        named = ", ".join(render(f) for f in _pick(ctx))
        self.trace.append(f"{rule}: {named} |- {render(goal)}")

    def _attempt(self, ctx: Context, goal: Formula) -> bool:
        if isinstance(goal, Top):
            self._log("top-right", ctx, goal)
            return True
        if any(isinstance(f, Bot) for f in ctx):
            self._log("absurd-left", ctx, goal)
            return True
        if goal in ctx:
            self._log("assumption", ctx, goal)
            return True

        # Invertible context steps, applied eagerly one at a time.
        for f in _pick(ctx):
            rest = ctx - {f}
            if isinstance(f, Top):
                return self._via("drop-top", rest, goal, ctx)
            if isinstance(f, And):
                return self._via("split-and", rest | {f.left, f.right}, goal, ctx)
            if isinstance(f, Or):
                ok = self.holds(rest | {f.left}, goal) and self.holds(
                    rest | {f.right}, goal
                )
                if ok:
                    self._log("cases", ctx, goal)
                return ok
            if isinstance(f, Imp):
                a = f.left
                if isinstance(a, Top):
                    return self._via("use-top-arrow", rest | {f.right}, goal, ctx)
                if isinstance(a, Bot):
                    return self._via("drop-absurd-arrow", rest, goal, ctx)
                if isinstance(a, And):
                    curried = Imp(a.left, Imp(a.right, f.right))
                    return self._via("curry-arrow", rest | {curried}, goal, ctx)
                if isinstance(a, Or):
                    both = rest | {Imp(a.left, f.right), Imp(a.right, f.right)}
                    return self._via("fan-arrow", both, goal, ctx)
                if isinstance(a, Atom) and a in ctx:
                    return self._via("modus-ponens", rest | {f.right}, goal, ctx)

        # Invertible conclusion steps.
        if isinstance(goal, And):
            ok = self.holds(ctx, goal.left) and self.holds(ctx, goal.right)
            if ok:
                self._log("pair", ctx, goal)
            return ok
        if isinstance(goal, Imp):
            ok = self.holds(ctx | {goal.left}, goal.right)
            if ok:
                self._log("hypothesise", ctx, goal)
            return ok

        # Branching steps: try a disjunct, or break a nested implication.
        if isinstance(goal, Or):
            if self.holds(ctx, goal.left) or self.holds(ctx, goal.right):
                self._log("inject", ctx, goal)
                return True
        for f in _pick(ctx):
            if isinstance(f, Imp) and isinstance(f.left, Imp):
                rest = ctx - {f}
                inner = f.left
                if self.holds(rest | {Imp(inner.right, f.right)}, inner) and self.holds(
                    rest | {f.right}, goal
                ):
                    self._log("nested-arrow", ctx, goal)
                    return True
        return False

    def _via(self, rule: str, ctx: Context, goal: Formula, original: Context) -> bool:
        ok = self.holds(ctx, goal)
        if ok:
            self._log(rule, original, goal)
        return ok


def decide_ipl(s: Sequent) -> Verdict:
    """Decide IPL derivability; the certificate is a rule trace when valid."""
    require_ipl(s)
    prover = _Prover()
    valid = prover.holds(frozenset(s.context), s.conclusion)
    certificate = "\n".join(prover.trace) if valid else None
    return Verdict(valid=valid, method="decision-procedure", certificate=certificate)


# ---------------------------------------------------------------------------
# Spot-checks on the oracle.


def classically_valid(s: Sequent) -> bool:
    """Truth-table validity; anything IPL-valid must pass this."""
    names = sorted(set().union(*(atoms_of(f) for f in (*s.context, s.conclusion))) or set())

    def ev(f: Formula, row: dict[str, bool]) -> bool:
        if isinstance(f, Atom):
            return row[f.name]
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, And):
            return ev(f.left, row) and ev(f.right, row)
        if isinstance(f, Or):
            return ev(f.left, row) or ev(f.right, row)
        if isinstance(f, Imp):
            return (not ev(f.left, row)) or ev(f.right, row)
        raise ValueError(f"not a classical formula: {f!r}")

    for bits in itertools.product((False, True), repeat=len(names)):
        row = dict(zip(names, bits))
        if all(ev(f, row) for f in s.context) and not ev(s.conclusion, row):
            return False
    return True


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[int, ...]
    order: frozenset[tuple[int, int]]  # reflexive-transitive accessibility
    valuation: frozenset[tuple[str, int]]  # atom holds at world

    def leq(self, a: int, b: int) -> bool:
        return (a, b) in self.order

    def forces(self, w: int, f: Formula) -> bool:
        if isinstance(f, Atom):
            return (f.name, w) in self.valuation
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, And):
            return self.forces(w, f.left) and self.forces(w, f.right)
        if isinstance(f, Or):
            return self.forces(w, f.left) or self.forces(w, f.right)
        if isinstance(f, Imp):
            return all(
                self.forces(v, f.right)
                for v in self.worlds
                if self.leq(w, v) and self.forces(v, f.left)
            )
        raise ValueError(f"no Kripke clause for {f!r}")


def _posets(n: int) -> Iterable[frozenset[tuple[int, int]]]:
    worlds = range(n)
    diagonal = {(w, w) for w in worlds}
    strict_pairs = [(a, b) for a in worlds for b in worlds if a != b]
    for bits in itertools.product((False, True), repeat=len(strict_pairs)):
        rel = diagonal | {p for p, keep in zip(strict_pairs, bits) if keep}
        if any((b, a) in rel for (a, b) in rel if a != b):
            continue  # antisymmetry
        if any(
            (a, c) not in rel
            for (a, b) in rel
            for (b2, c) in rel
            if b == b2
        ):
            continue  # transitivity
        yield frozenset(rel)


def kripke_countermodel(s: Sequent, max_worlds: int = 3) -> Optional[KripkeModel]:
    """Search all Kripke models with up to max_worlds worlds for one that
    forces the context somewhere without forcing the conclusion there."""
    require_ipl(s)
    names = sorted(set().union(*(atoms_of(f) for f in (*s.context, s.conclusion))) or set())
    for n in range(1, max_worlds + 1):
        worlds = tuple(range(n))
        for order in _posets(n):
            upsets = [
                frozenset(u)
                for u in itertools.chain.from_iterable(
                    itertools.combinations(worlds, k) for k in range(n + 1)
                )
                if all((a, b) not in order or b in u for a in u for b in worlds)
            ]
            for choice in itertools.product(upsets, repeat=len(names)):
                val = frozenset(
                    (name, w) for name, up in zip(names, choice) for w in up
                )
                model = KripkeModel(worlds, order, val)
                for w in worlds:
                    if all(model.forces(w, f) for f in s.context) and not model.forces(
                        w, s.conclusion
                    ):
                        return model
    return None


# ---------------------------------------------------------------------------
# The declared forward calculus, as an explicit rule table.  This is the
# reference the reduction operators are audited against; it is written as
# its own pattern match rather than through the engine.


def _table_extend(ctx: tuple[Formula, ...], f: Formula) -> tuple[Formula, ...]:
    return ctx if f in ctx else (f,) + ctx


def _table_replace(
    ctx: tuple[Formula, ...], at: int, fs: tuple[Formula, ...]
) -> tuple[Formula, ...]:
    rest = ctx[:at] + ctx[at + 1 :]
    fresh: list[Formula] = []
    for f in fs:
        if f not in rest and f not in fresh:
            fresh.append(f)
    return ctx[:at] + tuple(fresh) + ctx[at + 1 :]


def forward_rule_instances(g: Goal) -> list[tuple[str, tuple[Goal, ...]]]:
    """All rule instances of the declared calculus concluding g, each as a
    (rule name, ordered premiss list) pair."""
    ctx, concl = g.context, g.conclusion
    out: list[tuple[str, tuple[Goal, ...]]] = []
    for i, f in enumerate(ctx):
        if f == concl:
            out.append((f"Ax@{i}", ()))
        if isinstance(f, Bot):
            out.append((f"BotL@{i}", ()))
        if isinstance(f, And):
            out.append(
                (f"AndL@{i}", (Sequent(_table_replace(ctx, i, (f.left, f.right)), concl),))
            )
        if isinstance(f, Or):
            out.append(
                (
                    f"OrL@{i}",
                    (
                        Sequent(_table_replace(ctx, i, (f.left,)), concl),
                        Sequent(_table_replace(ctx, i, (f.right,)), concl),
                    ),
                )
            )
        if isinstance(f, Imp):
            out.append(
                (
                    f"ImpL@{i}",
                    (
                        Sequent(ctx, f.left),
                        Sequent(_table_extend(ctx, f.right), concl),
                    ),
                )
            )
    if isinstance(concl, Top):
        out.append(("TopR", ()))
    if isinstance(concl, And):
        out.append(("AndR", (Sequent(ctx, concl.left), Sequent(ctx, concl.right))))
    if isinstance(concl, Or):
        out.append(("OrR1", (Sequent(ctx, concl.left),)))
        out.append(("OrR2", (Sequent(ctx, concl.right),)))
    if isinstance(concl, Imp):
        out.append(("ImpR", (Sequent(_table_extend(ctx, concl.left), concl.right),)))
    return out


# ---------------------------------------------------------------------------
# Corpora.

CORPUS_ATOMS = ("p", "q")
CORPUS_FORMULA_SIZE = 3
CORPUS_CONTEXT_LIMIT = 2


def corpus_formulas() -> list[Formula]:
    leaves: list[Formula] = [Atom(a) for a in CORPUS_ATOMS] + [Top(), Bot()]
    out = list(leaves)
    for con in (And, Or, Imp):
        for l in leaves:
            for r in leaves:
                out.append(con(l, r))
    return out


def pinned_corpus() -> list[Sequent]:
    """Every sequent over atoms p, q with formulas of size at most 3 and at
    most 2 context formulas; contexts are taken as sorted duplicate-free
    lists since order and multiplicity change neither verdicts nor
    reachability of the empty state."""
    formulas = sorted(corpus_formulas(), key=_fkey)
    contexts: list[tuple[Formula, ...]] = [()]
    contexts += [(f,) for f in formulas]
    contexts += [
        (a, b) for a, b in itertools.combinations(formulas, 2)
    ]
    return [Sequent(ctx, concl) for ctx in contexts for concl in formulas]


def curated_provable() -> list[Sequent]:
    """Twelve classics, each checked by hand against the usual natural
    deduction presentations."""
    shapes = [
        "p |- p",
        "p, p -> q |- q",
        "|- p -> p",
        "|- p -> q -> p",
        "|- (p -> q -> r) -> (p -> q) -> p -> r",
        "|- p /\\ q -> p",
        "|- p -> p \\/ q",
        "p \\/ q |- q \\/ p",
        "p /\\ q |- q /\\ p",
        "F |- q",
        "|- T",
        "|- ((p \\/ (p -> F)) -> F) -> F",
    ]
    return [parse_sequent(s) for s in shapes]


def random_ipl_goals(
    seed: int,
    count: int,
    max_size: int = 6,
    atoms: Sequence[str] = CORPUS_ATOMS,
    max_context: int = 2,
) -> list[Sequent]:
    """Deterministic sample of random IPL sequents for harness sweeps."""
    import random

    rng = random.Random(seed)

    def formula(budget: int) -> Formula:
        if budget < 3 or rng.random() < 0.3:
            roll = rng.random()
            if roll < 0.8:
                return Atom(rng.choice(list(atoms)))
            return Top() if roll < 0.9 else Bot()
        con = rng.choice((And, Or, Imp))
        left_budget = rng.randint(1, budget - 2)
        return con(formula(left_budget), formula(budget - 1 - left_budget))

    out = []
    for _ in range(count):
        ctx = tuple(formula(max_size) for _ in range(rng.randint(0, max_context)))
        out.append(Sequent(ctx, formula(max_size)))
    return out


# ---------------------------------------------------------------------------
# Harnesses.


@dataclass
class HarnessReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        state = "passed" if self.passed else f"FAILED ({len(self.failures)} failures)"
        return f"{self.name}: checked {self.checked}, {state}"


@dataclass(frozen=True)
class SweepRow:
    goal: Goal
    proved: bool
    valid: bool
    status: str
    deepest: int


def engine_oracle_sweep(
    corpus: Sequence[Goal], depth_budget: int = 14, node_budget: int = 200_000
) -> list[SweepRow]:
    """Run the engine's exhaustive loop-pruned search and the oracle side by
    side over a corpus."""
    from .control import Strategy, search

    strategy = Strategy(
        traversal="iterative-deepening",
        loop_check="branch-repeat",
        depth_budget=depth_budget,
        node_budget=node_budget,
    )
    rows = []
    for g in corpus:
        outcome = search(g, strategy)
        verdict = decide_ipl(g)
        rows.append(
            SweepRow(
                goal=g,
                proved=outcome.status == "proved",
                valid=verdict.valid,
                status=outcome.status,
                deepest=outcome.deepest,
            )
        )
    return rows


def check_soundness(
    corpus: Sequence[Goal],
    depth_budget: int = 14,
    rows: Optional[list[SweepRow]] = None,
) -> HarnessReport:
    """Wherever the engine reaches the empty state, the oracle must agree."""
    rows = rows if rows is not None else engine_oracle_sweep(corpus, depth_budget)
    report = HarnessReport("soundness")
    for row in rows:
        report.checked += 1
        if row.proved and not row.valid:
            report.failures.append(
                {"sequent": render_sequent(row.goal), "engine": "proved", "oracle": "invalid"}
            )
    return report


def check_completeness(
    corpus: Sequence[Goal],
    depth_budget: int = 14,
    rows: Optional[list[SweepRow]] = None,
) -> HarnessReport:
    """Wherever the oracle certifies validity, the engine must reach the
    empty state within budget; failures carry the deepest frontier."""
    rows = rows if rows is not None else engine_oracle_sweep(corpus, depth_budget)
    report = HarnessReport("completeness")
    for row in rows:
        report.checked += 1
        if row.valid and not row.proved:
            report.failures.append(
                {
                    "sequent": render_sequent(row.goal),
                    "engine": row.status,
                    "deepest_frontier": row.deepest,
                    "oracle": "valid",
                }
            )
    return report


def check_faithfulness(
    sample_goals: Sequence[Goal],
    instances: Optional[Callable[[Goal], Iterable[tuple[str, Optional[int]]]]] = None,
    apply: Optional[Callable[[Goal, str, Optional[int]], tuple[Goal, ...]]] = None,
) -> HarnessReport:
    """Every operator application must be an instance of the rule table."""
    from . import reduction

    instances = instances or (lambda g: reduction.goal_instances(g))
    apply = apply or reduction.apply_operator
    report = HarnessReport("faithfulness")
    for g in sample_goals:
        table = {premisses for _, premisses in forward_rule_instances(g)}
        for schema, principal in instances(g):
            report.checked += 1
            premisses = tuple(apply(g, schema, principal))
            if premisses not in table:
                report.failures.append(
                    {
                        "sequent": render_sequent(g),
                        "operator": schema if principal is None else f"{schema}@{principal}",
                        "premisses": [render_sequent(p) for p in premisses],
                    }
                )
    return report


def check_adequacy(
    sample_goals: Sequence[Goal],
    rules: Optional[Callable[[Goal], list[tuple[str, tuple[Goal, ...]]]]] = None,
) -> HarnessReport:
    """Every rule instance concluding a sampled goal must be produced by
    some operator application."""
    from . import reduction

    rules = rules or forward_rule_instances
    report = HarnessReport("adequacy")
    for g in sample_goals:
        produced = {
            tuple(reduction.apply_operator(g, schema, principal))
            for schema, principal in reduction.goal_instances(g)
        }
        for name, premisses in rules(g):
            report.checked += 1
            if premisses not in produced:
                report.failures.append(
                    {
                        "sequent": render_sequent(g),
                        "rule": name,
                        "premisses": [render_sequent(p) for p in premisses],
                    }
                )
    return report
