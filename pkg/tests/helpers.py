"""Seeded generators shared across the test files."""

import random

from reductive.lang import And, Atom, Bot, Imp, Or, Sequent, Star, Top
from reductive.tactics import Choice, Prim, Seq as TSeq, Star as TStar

IPL_ATOMS = ("p", "q", "r")


def random_formula(rng: random.Random, size: int, atoms=IPL_ATOMS):
    """An IPL formula with at most `size` connective-or-leaf nodes."""
    if size < 3 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.8:
            return Atom(rng.choice(atoms))
        return Top() if roll < 0.9 else Bot()
    left_size = rng.randrange(1, size - 1)
    left = random_formula(rng, left_size, atoms)
    right = random_formula(rng, size - 1 - left_size, atoms)
    return rng.choice((And, Or, Imp))(left, right)


def random_sequent(rng: random.Random, max_size=6, atoms=IPL_ATOMS, max_context=2) -> Sequent:
    ctx = tuple(
        random_formula(rng, rng.randrange(1, max_size + 1), atoms)
        for _ in range(rng.randrange(0, max_context + 1))
    )
    return Sequent(ctx, random_formula(rng, rng.randrange(1, max_size + 1), atoms))


def random_mul_formula(rng: random.Random, size: int, atoms=("p", "q")):
    if size < 3 or rng.random() < 0.3:
        return Atom(rng.choice(atoms))
    left_size = rng.randrange(1, size - 1)
    return Star(
        random_mul_formula(rng, left_size, atoms),
        random_mul_formula(rng, size - 1 - left_size, atoms),
    )


def random_mul_sequent(rng: random.Random, max_size=5, max_context=4) -> Sequent:
    ctx = tuple(
        random_mul_formula(rng, rng.randrange(1, max_size + 1))
        for _ in range(rng.randrange(0, max_context + 1))
    )
    return Sequent(ctx, random_mul_formula(rng, rng.randrange(1, max_size + 1)))


def random_state(rng: random.Random, goals, max_goals=3):
    return tuple(rng.choice(goals) for _ in range(rng.randrange(0, max_goals + 1)))


PRIM_NAMES = ("Ax", "BotL", "TopR", "AndR", "AndL", "OrR1", "OrR2", "OrL", "ImpR", "ImpL")


def random_tactic(rng: random.Random, depth=2, allow_star=True):
    """`allow_star=False` keeps the tactic star-free, which the unrolling
    law needs: the budget knob applies to every star at once, so a star
    inside the body being unrolled would see a different budget on the two
    sides of the law."""
    if depth == 0 or rng.random() < 0.4:
        return Prim(rng.choice(PRIM_NAMES))
    roll = rng.random()
    if roll < 0.4:
        return TSeq(
            random_tactic(rng, depth - 1, allow_star),
            random_tactic(rng, depth - 1, allow_star),
        )
    if roll < 0.8 or not allow_star:
        return Choice(
            random_tactic(rng, depth - 1, allow_star),
            random_tactic(rng, depth - 1, allow_star),
        )
    return TStar(random_tactic(rng, depth - 1, allow_star))
