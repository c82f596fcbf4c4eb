"""Shared generators and helpers for the test suite."""

from __future__ import annotations

import itertools
import random

import pytest

from supercut.matrices import Matrix, eval_formula
from supercut.syntax import And, Atom, BOT, Formula, Neg, Or, Sequent, TOP


def random_formula(rng: random.Random, atoms: list[str], depth: int, constants: bool = True) -> Formula:
    leaves = [Atom(a) for a in atoms]
    if constants:
        leaves += [TOP, BOT]
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(leaves)
    kind = rng.choice(["neg", "and", "or"])
    if kind == "neg":
        return Neg(random_formula(rng, atoms, depth - 1, constants))
    left = random_formula(rng, atoms, depth - 1, constants)
    right = random_formula(rng, atoms, depth - 1, constants)
    return And(left, right) if kind == "and" else Or(left, right)


def random_sequent(rng: random.Random, atoms: list[str], depth: int, max_side: int = 2) -> Sequent:
    def side():
        return [random_formula(rng, atoms, depth) for _ in range(rng.randint(0, max_side))]

    return Sequent(side(), side())


def semantic_classes(atoms: list[str], depth: int, matrix: Matrix) -> list[Formula]:
    """One representative per truth table over the matrix, for formulas over
    the given atoms up to the given connective depth.

    Combining representatives is exact because evaluation is compositional.
    """
    valuations = [dict(zip(atoms, v)) for v in itertools.product(matrix.carrier, repeat=len(atoms))]

    def table(f: Formula):
        return tuple(eval_formula(matrix, v, f) for v in valuations)

    reps: dict[tuple, Formula] = {}
    for f in [Atom(a) for a in atoms] + [TOP, BOT]:
        reps.setdefault(table(f), f)
    for _ in range(depth):
        prev = list(reps.values())
        for a in prev:
            reps.setdefault(table(Neg(a)), Neg(a))
        for a in prev:
            for b in prev:
                for ctor in (And, Or):
                    f = ctor(a, b)
                    reps.setdefault(table(f), f)
    return list(reps.values())


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20250808)
