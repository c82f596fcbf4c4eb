"""Finite logical matrices and brute-force consequence checking.

This module is the independent semantic oracle: every syntactic verdict in
the package can be cross-checked against exhaustive valuation enumeration
over these matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .syntax import (
    And,
    Atom,
    Bot,
    Formula,
    Neg,
    Or,
    Sequent,
    SupercutError,
    Top,
    atoms_of,
    tau,
)


class MatrixError(SupercutError):
    pass


@dataclass(frozen=True)
class Matrix:
    """A finite algebra with a designated subset.

    Operation tables are total maps over the carrier; ``check_laws`` verifies
    the lattice/De Morgan equations by enumeration.
    """

    name: str
    carrier: tuple[str, ...]
    meet: tuple[tuple[str, str, str], ...]
    join: tuple[tuple[str, str, str], ...]
    neg: tuple[tuple[str, str], ...]
    top: str
    bot: str
    designated: frozenset[str]

    def meet_of(self, a: str, b: str) -> str:
        return _binop_table(self.meet)[(a, b)]

    def join_of(self, a: str, b: str) -> str:
        return _binop_table(self.join)[(a, b)]

    def neg_of(self, a: str) -> str:
        return _unop_table(self.neg)[a]

    def check_laws(self) -> bool:
        """Lattice laws, De Morgan/involution of neg, and extrema, exhaustively."""
        m, j, n = self.meet_of, self.join_of, self.neg_of
        for x in self.carrier:
            if m(x, x) != x or j(x, x) != x:
                return False
            if n(n(x)) != x:
                return False
            if m(x, self.bot) != self.bot or j(x, self.top) != self.top:
                return False
            if m(x, self.top) != x or j(x, self.bot) != x:
                return False
            for y in self.carrier:
                if m(x, y) != m(y, x) or j(x, y) != j(y, x):
                    return False
                if m(x, j(x, y)) != x or j(x, m(x, y)) != x:
                    return False
                if n(m(x, y)) != j(n(x), n(y)):
                    return False
                for z in self.carrier:
                    if m(m(x, y), z) != m(x, m(y, z)):
                        return False
                    if j(j(x, y), z) != j(x, j(y, z)):
                        return False
                    if m(x, j(y, z)) != j(m(x, y), m(x, z)):
                        return False
        return True

    def dump(self) -> str:
        """One line per table row, for docs and golden tests."""
        lines = [f"matrix {self.name}: carrier {{{', '.join(self.carrier)}}}"]
        lines.append(f"designated {{{', '.join(sorted(self.designated))}}}")
        lines.append(f"top {self.top}  bot {self.bot}")
        for a in self.carrier:
            lines.append(f"neg {a} = {self.neg_of(a)}")
        for a in self.carrier:
            for b in self.carrier:
                lines.append(f"meet {a} {b} = {self.meet_of(a, b)}")
        for a in self.carrier:
            for b in self.carrier:
                lines.append(f"join {a} {b} = {self.join_of(a, b)}")
        return "\n".join(lines)


@lru_cache(maxsize=None)
def _binop_table(rows: tuple[tuple[str, str, str], ...]) -> dict[tuple[str, str], str]:
    return {(a, b): c for a, b, c in rows}


@lru_cache(maxsize=None)
def _unop_table(rows: tuple[tuple[str, str], ...]) -> dict[str, str]:
    return {a: b for a, b in rows}


def _lattice_matrix(
    name: str,
    order: dict[str, set[str]],
    neg: dict[str, str],
    top: str,
    bot: str,
    designated: Iterable[str],
) -> Matrix:
    """Build a matrix from a partial order given as 'x <= elements above x'."""
    carrier = tuple(sorted(order))

    def leq(a: str, b: str) -> bool:
        return b in order[a]

    def meet(a: str, b: str) -> str:
        lows = [c for c in carrier if leq(c, a) and leq(c, b)]
        tops = [c for c in lows if all(leq(d, c) for d in lows)]
        assert len(tops) == 1, (name, a, b, lows)
        return tops[0]

    def join(a: str, b: str) -> str:
        ups = [c for c in carrier if leq(a, c) and leq(b, c)]
        bots = [c for c in ups if all(leq(c, d) for d in ups)]
        assert len(bots) == 1, (name, a, b, ups)
        return bots[0]

    return Matrix(
        name=name,
        carrier=carrier,
        meet=tuple((a, b, meet(a, b)) for a in carrier for b in carrier),
        join=tuple((a, b, join(a, b)) for a in carrier for b in carrier),
        neg=tuple((a, neg[a]) for a in carrier),
        top=top,
        bot=bot,
        designated=frozenset(designated),
    )


# The four-element De Morgan diamond: f <= n <= t, f <= b <= t, n and b
# incomparable; negation swaps t/f and fixes n and b.
_B4_ORDER = {
    "f": {"f", "n", "b", "t"},
    "n": {"n", "t"},
    "b": {"b", "t"},
    "t": {"t"},
}
_B4_NEG = {"f": "t", "t": "f", "n": "n", "b": "b"}

B4 = _lattice_matrix("B4", _B4_ORDER, _B4_NEG, "t", "f", ("b", "t"))
ETL4 = _lattice_matrix("ETL4", _B4_ORDER, _B4_NEG, "t", "f", ("t",))
K3 = _lattice_matrix(
    "K3",
    {"f": {"f", "n", "t"}, "n": {"n", "t"}, "t": {"t"}},
    {"f": "t", "t": "f", "n": "n"},
    "t",
    "f",
    ("t",),
)
LP3 = _lattice_matrix(
    "LP3",
    {"f": {"f", "b", "t"}, "b": {"b", "t"}, "t": {"t"}},
    {"f": "t", "t": "f", "b": "b"},
    "t",
    "f",
    ("b", "t"),
)
BOOL2 = _lattice_matrix(
    "BOOL2",
    {"f": {"f", "t"}, "t": {"t"}},
    {"f": "t", "t": "f"},
    "t",
    "f",
    ("t",),
)


def product_matrix(a: Matrix, b: Matrix) -> Matrix:
    """Componentwise product; designated pairs are designated x designated."""

    def pid(x: str, y: str) -> str:
        return f"({x},{y})"

    carrier = [(x, y) for x in a.carrier for y in b.carrier]
    return Matrix(
        name=f"{a.name}x{b.name}",
        carrier=tuple(pid(x, y) for x, y in carrier),
        meet=tuple(
            (pid(x1, y1), pid(x2, y2), pid(a.meet_of(x1, x2), b.meet_of(y1, y2)))
            for x1, y1 in carrier
            for x2, y2 in carrier
        ),
        join=tuple(
            (pid(x1, y1), pid(x2, y2), pid(a.join_of(x1, x2), b.join_of(y1, y2)))
            for x1, y1 in carrier
            for x2, y2 in carrier
        ),
        neg=tuple((pid(x, y), pid(a.neg_of(x), b.neg_of(y))) for x, y in carrier),
        top=pid(a.top, b.top),
        bot=pid(a.bot, b.bot),
        designated=frozenset(
            pid(x, y) for x in a.designated for y in b.designated
        ),
    )


# ---------------------------------------------------------------------------
# Logic specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogicSpec:
    """A single matrix or a nonempty intersection of logic specs."""

    name: str
    matrices: tuple[Matrix, ...]

    def __post_init__(self):
        if not self.matrices:
            raise MatrixError("intersection must be nonempty")


def single(m: Matrix, name: str | None = None) -> LogicSpec:
    return LogicSpec(name or m.name.lower(), (m,))


def intersection(name: str, specs: Iterable[LogicSpec]) -> LogicSpec:
    mats: list[Matrix] = []
    for sp in specs:
        mats.extend(sp.matrices)
    return LogicSpec(name, tuple(mats))


_BUILTINS: dict[str, LogicSpec] = {}


def builtin(name: str) -> LogicSpec:
    """Look up a builtin logic: b, k, lp, etl, ecq, cl, kleq."""
    key = name.lower()
    if not _BUILTINS:
        _BUILTINS.update(
            {
                "b": single(B4, "b"),
                "k": single(K3, "k"),
                "lp": single(LP3, "lp"),
                "etl": single(ETL4, "etl"),
                "ecq": single(product_matrix(ETL4, B4), "ecq"),
                "cl": single(BOOL2, "cl"),
            }
        )
        _BUILTINS["kleq"] = intersection("kleq", (_BUILTINS["k"], _BUILTINS["lp"]))
    if key not in _BUILTINS:
        raise MatrixError(f"unknown logic: {name}")
    return _BUILTINS[key]


LOGIC_NAMES = ("b", "k", "lp", "etl", "ecq", "cl", "kleq")


# ---------------------------------------------------------------------------
# Evaluation and consequence
# ---------------------------------------------------------------------------


def eval_formula(m: Matrix, valuation: dict[str, str], f: Formula) -> str:
    """Homomorphic evaluation; raises on missing atom bindings."""
    if isinstance(f, Atom):
        try:
            return valuation[f.name]
        except KeyError:
            raise MatrixError(f"valuation missing atom {f.name!r}") from None
    if isinstance(f, Top):
        return m.top
    if isinstance(f, Bot):
        return m.bot
    if isinstance(f, Neg):
        return m.neg_of(eval_formula(m, valuation, f.arg))
    if isinstance(f, And):
        return m.meet_of(eval_formula(m, valuation, f.left), eval_formula(m, valuation, f.right))
    if isinstance(f, Or):
        return m.join_of(eval_formula(m, valuation, f.left), eval_formula(m, valuation, f.right))
    raise TypeError(f"not a formula: {f!r}")


@lru_cache(maxsize=200000)
def _designation_mask(m: Matrix, atom_tuple: tuple[str, ...], f: Formula) -> int:
    """Bitmask over the enumerated valuations where ``f`` is designated.

    Valuation i assigns atom_tuple[j] the carrier element with index
    ``(i // len(carrier)**j) % len(carrier)``.
    """
    n = len(m.carrier)
    count = n ** len(atom_tuple)
    mask = 0
    vals: dict[str, str] = {}
    for i in range(count):
        k = i
        for a in atom_tuple:
            vals[a] = m.carrier[k % n]
            k //= n
        if eval_formula(m, vals, f) in m.designated:
            mask |= 1 << i
    return mask


def _holds_single(m: Matrix, premises: tuple[Formula, ...], conclusion: Optional[Formula]) -> bool:
    names: set[str] = set()
    for p in premises:
        names |= atoms_of(p)
    if conclusion is not None:
        names |= atoms_of(conclusion)
    atom_tuple = tuple(sorted(names))
    n = len(m.carrier)
    full = (1 << (n ** len(atom_tuple))) - 1
    prem_mask = full
    for p in premises:
        prem_mask &= _designation_mask(m, atom_tuple, p)
    if conclusion is None:
        # Antitheorem check: no valuation designates all premises.
        return prem_mask == 0
    return prem_mask & ~_designation_mask(m, atom_tuple, conclusion) == 0


def holds(
    spec: LogicSpec,
    premises: Iterable[Formula],
    conclusion: Optional[Formula] = None,
) -> bool:
    """Matrix consequence by exhaustive valuation enumeration.

    A ``None`` conclusion asks whether the premises form an antitheorem.
    For intersections the verdict is the conjunction over all matrices.
    """
    prem = tuple(premises)
    return all(_holds_single(m, prem, conclusion) for m in spec.matrices)


def holds_sequent(spec: LogicSpec, premises: Iterable[Sequent], conclusion: Sequent) -> bool:
    """Sequent-level consequence via the tau transformer."""
    return holds(spec, (tau(s) for s in premises), tau(conclusion))


# ---------------------------------------------------------------------------
# Information order
# ---------------------------------------------------------------------------

_INFO_ORDERS: dict[str, tuple[tuple[str, str], ...]] = {
    # n is least informative, b most; f and t are incomparable middles.
    "B4": (
        ("n", "n"), ("f", "f"), ("t", "t"), ("b", "b"),
        ("n", "f"), ("n", "t"), ("n", "b"), ("f", "b"), ("t", "b"),
    ),
    "K3": (("n", "n"), ("f", "f"), ("t", "t"), ("n", "f"), ("n", "t")),
    "LP3": (("f", "f"), ("t", "t"), ("b", "b"), ("f", "b"), ("t", "b")),
}


def information_order(m: Matrix) -> frozenset[tuple[str, str]]:
    """The information order as a set of (lower, higher) pairs."""
    if m.name not in _INFO_ORDERS:
        raise MatrixError(f"no information order defined for {m.name}")
    return frozenset(_INFO_ORDERS[m.name])


def check_info_monotone(m: Matrix) -> bool:
    """All operations monotone with respect to the information order."""
    order = information_order(m)

    def leq(a: str, b: str) -> bool:
        return (a, b) in order

    for x1, y1 in itertools.product(m.carrier, repeat=2):
        if not leq(x1, y1):
            continue
        if not leq(m.neg_of(x1), m.neg_of(y1)):
            return False
        for x2, y2 in itertools.product(m.carrier, repeat=2):
            if not leq(x2, y2):
                continue
            if not leq(m.meet_of(x1, x2), m.meet_of(y1, y2)):
                return False
            if not leq(m.join_of(x1, x2), m.join_of(y1, y2)):
                return False
    return True
