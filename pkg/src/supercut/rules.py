"""Logical rule matching, structural rule schemas, At-sets and expansions."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

from .syntax import (
    And,
    Atom,
    BOT,
    Bot,
    Formula,
    Neg,
    Or,
    ParseError,
    Sequent,
    Substitution,
    SupercutError,
    TOP,
    Top,
    apply_subst,
    formula_key,
    sequent_key,
)

# ---------------------------------------------------------------------------
# Logical rules
# ---------------------------------------------------------------------------

INTRO_RULES = frozenset(
    {
        "and-left-intro",
        "and-right-intro",
        "or-left-intro",
        "or-right-intro",
        "neg-left-intro",
        "neg-right-intro",
        "top-left-intro",
        "bot-right-intro",
    }
)
ELIM_RULES = frozenset(
    {
        "and-left-elim",
        "and-right-elim",
        "or-left-elim",
        "or-right-elim",
        "neg-left-elim",
        "neg-right-elim",
        "top-left-elim",
        "bot-right-elim",
    }
)
AXIOM_RULES = frozenset({"top-right", "bot-left"})
LOGICAL_RULES = INTRO_RULES | ELIM_RULES

INVERSE = {
    "and-left-intro": "and-left-elim",
    "and-right-intro": "and-right-elim",
    "or-left-intro": "or-left-elim",
    "or-right-intro": "or-right-elim",
    "neg-left-intro": "neg-left-elim",
    "neg-right-intro": "neg-right-elim",
    "top-left-intro": "top-left-elim",
    "bot-right-intro": "bot-right-elim",
}
INVERSE.update({v: k for k, v in list(INVERSE.items())})

LOGICAL_ARITY = {
    "and-left-intro": 1,
    "and-left-elim": 1,
    "and-right-intro": 2,
    "and-right-elim": 1,
    "or-left-intro": 2,
    "or-left-elim": 1,
    "or-right-intro": 1,
    "or-right-elim": 1,
    "neg-left-intro": 1,
    "neg-left-elim": 1,
    "neg-right-intro": 1,
    "neg-right-elim": 1,
    "top-left-intro": 1,
    "top-left-elim": 1,
    "bot-right-intro": 1,
    "bot-right-elim": 1,
}


@dataclass(frozen=True)
class LogicalMatch:
    rule: str
    principal: Formula


def match_logical(rule: str, premises: Sequence[Sequent], conclusion: Sequent) -> Optional[LogicalMatch]:
    """Re-match a logical inference step; None when it is not an instance."""
    if rule not in LOGICAL_ARITY or len(premises) != LOGICAL_ARITY[rule]:
        return None
    for cand in _principal_candidates(rule, premises, conclusion):
        if _logical_instance(rule, premises, conclusion, cand):
            return LogicalMatch(rule, cand)
    return None


def _principal_candidates(rule: str, premises: Sequence[Sequent], conclusion: Sequent):
    """Occurrences that could be principal, drawn from conclusion (intro) or premise (elim)."""
    if rule in INTRO_RULES:
        host = conclusion
    else:
        host = premises[0]
    side = "left" if "-left-" in rule else "right"
    wanted: type | None = {
        "and": And,
        "or": Or,
        "neg": Neg,
        "top": Top,
        "bot": Bot,
    }[rule.split("-")[0]]
    seen = set()
    for f in getattr(host, side):
        if isinstance(f, wanted) and f not in seen:
            seen.add(f)
            yield f


def _logical_instance(rule: str, premises: Sequence[Sequent], conclusion: Sequent, f: Formula) -> bool:
    p = list(premises)
    c = conclusion
    if rule == "and-left-intro":
        base = c.remove_one(f, "left")
        return p[0] == base.add(left=[f.left, f.right])
    if rule == "and-left-elim":
        base = p[0].remove_one(f, "left")
        return c == base.add(left=[f.left, f.right])
    if rule == "and-right-intro":
        base = c.remove_one(f, "right")
        w1, w2 = base.add(right=[f.left]), base.add(right=[f.right])
        return (p[0], p[1]) in ((w1, w2), (w2, w1))
    if rule == "and-right-elim":
        base = p[0].remove_one(f, "right")
        return c in (base.add(right=[f.left]), base.add(right=[f.right]))
    if rule == "or-left-intro":
        base = c.remove_one(f, "left")
        w1, w2 = base.add(left=[f.left]), base.add(left=[f.right])
        return (p[0], p[1]) in ((w1, w2), (w2, w1))
    if rule == "or-left-elim":
        base = p[0].remove_one(f, "left")
        return c in (base.add(left=[f.left]), base.add(left=[f.right]))
    if rule == "or-right-intro":
        base = c.remove_one(f, "right")
        return p[0] == base.add(right=[f.left, f.right])
    if rule == "or-right-elim":
        base = p[0].remove_one(f, "right")
        return c == base.add(right=[f.left, f.right])
    if rule == "neg-left-intro":
        base = c.remove_one(f, "left")
        return p[0] == base.add(right=[f.arg])
    if rule == "neg-left-elim":
        base = p[0].remove_one(f, "left")
        return c == base.add(right=[f.arg])
    if rule == "neg-right-intro":
        base = c.remove_one(f, "right")
        return p[0] == base.add(left=[f.arg])
    if rule == "neg-right-elim":
        base = p[0].remove_one(f, "right")
        return c == base.add(left=[f.arg])
    if rule == "top-left-intro":
        return p[0] == c.remove_one(TOP, "left")
    if rule == "top-left-elim":
        return c == p[0].remove_one(TOP, "left")
    if rule == "bot-right-intro":
        return p[0] == c.remove_one(BOT, "right")
    if rule == "bot-right-elim":
        return c == p[0].remove_one(BOT, "right")
    raise ValueError(f"unknown logical rule {rule}")


# ---------------------------------------------------------------------------
# Structural rule schemas
# ---------------------------------------------------------------------------

_SLOT_RE = re.compile(r"[A-Z][A-Za-z0-9_']*")
_SATOM_RE = re.compile(r"[a-z][A-Za-z0-9_']*")


@dataclass(frozen=True)
class SequentSchema:
    """One schematic sequent: schema-atom and context-slot names per side.

    Schema atoms instantiate to single formulas (atoms in atomic mode);
    slots instantiate to finite multisets. Slots are distinct per side.
    """

    atoms_left: tuple[str, ...]
    slots_left: tuple[str, ...]
    atoms_right: tuple[str, ...]
    slots_right: tuple[str, ...]

    def __init__(self, atoms_left=(), slots_left=(), atoms_right=(), slots_right=()):
        object.__setattr__(self, "atoms_left", tuple(sorted(atoms_left)))
        object.__setattr__(self, "slots_left", tuple(sorted(set(slots_left))))
        object.__setattr__(self, "atoms_right", tuple(sorted(atoms_right)))
        object.__setattr__(self, "slots_right", tuple(sorted(set(slots_right))))

    def atom_names(self) -> frozenset[str]:
        return frozenset(self.atoms_left) | frozenset(self.atoms_right)

    def slot_names(self) -> frozenset[str]:
        return frozenset(self.slots_left) | frozenset(self.slots_right)

    def render(self) -> str:
        lhs = ", ".join(list(self.atoms_left) + list(self.slots_left))
        rhs = ", ".join(list(self.slots_right) + list(self.atoms_right))
        if lhs and rhs:
            return f"{lhs} |- {rhs}"
        if lhs:
            return f"{lhs} |-"
        if rhs:
            return f"|- {rhs}"
        return "|-"


@dataclass(frozen=True)
class StructuralRule:
    name: str
    premises: tuple[SequentSchema, ...]
    conclusion: SequentSchema

    def schema_atoms(self) -> tuple[str, ...]:
        names: set[str] = set(self.conclusion.atom_names())
        for p in self.premises:
            names |= p.atom_names()
        return tuple(sorted(names))

    def slot_names(self) -> tuple[str, ...]:
        names: set[str] = set(self.conclusion.slot_names())
        for p in self.premises:
            names |= p.slot_names()
        return tuple(sorted(names))

    def render(self) -> str:
        body = " ; ".join(p.render() for p in self.premises)
        return f"{body} => {self.conclusion.render()}" if body else f"=> {self.conclusion.render()}"

    def schema_key(self) -> tuple:
        """Identity of the rule up to its name."""
        return (self.premises, self.conclusion)


def parse_structural_rule(text: str, name: str | None = None) -> StructuralRule:
    """Parse 'G |- D, x ; x, G' |- D' => G, G' |- D, D''."""
    if "=>" not in text:
        raise ParseError("structural rule must contain '=>'", 0, "'=>'")
    prem_text, concl_text = text.split("=>", 1)
    prem_text = prem_text.strip()
    premises = tuple(
        _parse_schema(chunk) for chunk in prem_text.split(";") if chunk.strip()
    )
    conclusion = _parse_schema(concl_text)
    rule = StructuralRule(name or "", premises, conclusion)
    if name is None:
        rule = StructuralRule(rule.render(), premises, conclusion)
    return rule


def _parse_schema(text: str) -> SequentSchema:
    parts = text.split("|-")
    if len(parts) != 2:
        raise ParseError("schema must contain exactly one '|-'", 0, "'|-'")

    def split(side: str) -> tuple[list[str], list[str]]:
        atoms: list[str] = []
        slots: list[str] = []
        for chunk in side.split(","):
            tok = chunk.strip()
            if not tok:
                continue
            if _SLOT_RE.fullmatch(tok):
                slots.append(tok)
            elif _SATOM_RE.fullmatch(tok):
                atoms.append(tok)
            else:
                raise ParseError(f"bad schema token {tok!r}", 0, "slot or schema atom")
        return atoms, slots

    al, sl = split(parts[0])
    ar, sr = split(parts[1])
    return SequentSchema(al, sl, ar, sr)


# Common structural rules, members of every calculus.
WEAKENING_LEFT = parse_structural_rule("G |- D => x, G |- D", "weakening-left")
WEAKENING_RIGHT = parse_structural_rule("G |- D => G |- D, x", "weakening-right")
CONTRACTION_LEFT = parse_structural_rule("x, x, G |- D => x, G |- D", "contraction-left")
CONTRACTION_RIGHT = parse_structural_rule("G |- D, x, x => G |- D, x", "contraction-right")
COMMON_RULES = (WEAKENING_LEFT, WEAKENING_RIGHT, CONTRACTION_LEFT, CONTRACTION_RIGHT)

IDENTITY = parse_structural_rule("=> x |- x", "identity")
CUT = parse_structural_rule("G |- D, x ; x, G' |- D' => G, G' |- D, D'", "cut")
LIMITED_CUT_LEFT = parse_structural_rule("|- x ; x, G |- D => G |- D", "limited-cut-left")
LIMITED_CUT_RIGHT = parse_structural_rule("G |- D, x ; x |- => G |- D", "limited-cut-right")
EXPLOSIVE_CUT = parse_structural_rule("|- x ; x |- => |-", "explosive-cut")

WEAKENING_NAMES = frozenset({"weakening-left", "weakening-right"})
CONTRACTION_NAMES = frozenset({"contraction-left", "contraction-right"})
COMMON_NAMES = WEAKENING_NAMES | CONTRACTION_NAMES


@dataclass(frozen=True)
class Calculus:
    """A super-Belnap calculus: the fixed logical rules plus specific structural rules.

    Weakening and Contraction are implicit members of every calculus.
    """

    name: str
    specific: tuple[StructuralRule, ...]

    def rule_map(self) -> dict[str, StructuralRule]:
        table = {r.name: r for r in COMMON_RULES}
        table.update({r.name: r for r in self.specific})
        return table


_CALCULI = {
    "gb": (),
    "glp": (IDENTITY,),
    "gk": (CUT,),
    "getl": (LIMITED_CUT_LEFT, LIMITED_CUT_RIGHT),
    "gecq": (EXPLOSIVE_CUT,),
    "gcl": (IDENTITY, CUT),
}

CALCULUS_NAMES = tuple(_CALCULI)


def builtin_calculus(name: str) -> Calculus:
    key = name.lower()
    if key not in _CALCULI:
        raise SupercutError(f"unknown calculus: {name}")
    return Calculus(key, _CALCULI[key])


# ---------------------------------------------------------------------------
# Structural matching
# ---------------------------------------------------------------------------


@dataclass
class StructuralMatch:
    rule: str
    atom_assignment: dict[str, Formula]
    slot_assignment: dict[str, tuple[Formula, ...]]


def match_structural(
    rule: StructuralRule,
    premises: Sequence[Sequent],
    conclusion: Sequent,
    atomic_only: bool = False,
) -> Optional[StructuralMatch]:
    """Find schema-atom and slot instantiations making the step an instance.

    Distinct schema atoms may collide on the same formula. In atomic mode
    schema atoms take atoms and slots take atom multisets only.
    """
    if len(premises) != len(rule.premises):
        return None
    schemas = list(rule.premises) + [rule.conclusion]
    givens = list(premises) + [conclusion]
    eqs: list[tuple[tuple[str, ...], tuple[str, ...], tuple[Formula, ...]]] = []
    for schema, given in zip(schemas, givens):
        eqs.append((schema.atoms_left, schema.slots_left, given.left))
        eqs.append((schema.atoms_right, schema.slots_right, given.right))

    atom_asn: dict[str, Formula] = {}
    slot_asn: dict[str, tuple[Formula, ...]] = {}

    def solve(i: int) -> bool:
        if i == len(eqs):
            return True
        atoms, slots, given = eqs[i]
        return _solve_side(list(atoms), slots, list(given), atom_asn, slot_asn, atomic_only, lambda: solve(i + 1))

    if solve(0):
        return StructuralMatch(rule.name, dict(atom_asn), dict(slot_asn))
    return None


def _solve_side(
    atoms: list[str],
    slots: tuple[str, ...],
    given: list[Formula],
    atom_asn: dict[str, Formula],
    slot_asn: dict[str, tuple[Formula, ...]],
    atomic_only: bool,
    k: Callable[[], bool],
) -> bool:
    if not atoms:
        remaining = sorted(given, key=formula_key)
        if atomic_only and any(not isinstance(f, Atom) for f in remaining):
            return False
        fixed = [s for s in slots if s in slot_asn]
        free = [s for s in slots if s not in slot_asn]
        pool = list(remaining)
        for s in fixed:
            for f in slot_asn[s]:
                if f in pool:
                    pool.remove(f)
                else:
                    return False
        if not free:
            return not pool and k()
        if len(free) == 1:
            slot_asn[free[0]] = tuple(sorted(pool, key=formula_key))
            if k():
                return True
            del slot_asn[free[0]]
            return False
        # Several open slots on one side: enumerate assignments per element.
        for choice in itertools.product(range(len(free)), repeat=len(pool)):
            parts: list[list[Formula]] = [[] for _ in free]
            for f, c in zip(pool, choice):
                parts[c].append(f)
            for s, part in zip(free, parts):
                slot_asn[s] = tuple(sorted(part, key=formula_key))
            if k():
                return True
            for s in free:
                del slot_asn[s]
        return False

    name = atoms[0]
    rest = atoms[1:]
    if name in atom_asn:
        f = atom_asn[name]
        if f not in given:
            return False
        new_given = list(given)
        new_given.remove(f)
        return _solve_side(rest, slots, new_given, atom_asn, slot_asn, atomic_only, k)
    candidates = []
    seen = set()
    for f in sorted(given, key=formula_key):
        if f in seen:
            continue
        seen.add(f)
        if atomic_only and not isinstance(f, Atom):
            continue
        candidates.append(f)
    for f in candidates:
        atom_asn[name] = f
        new_given = list(given)
        new_given.remove(f)
        if _solve_side(rest, slots, new_given, atom_asn, slot_asn, atomic_only, k):
            return True
        del atom_asn[name]
    return False


# ---------------------------------------------------------------------------
# At-sets
# ---------------------------------------------------------------------------


def _decomposition_candidates(s: Sequent) -> list[tuple[str, Formula]]:
    out = [("left", f) for f in s.left if not isinstance(f, Atom)]
    out += [("right", f) for f in s.right if not isinstance(f, Atom)]
    return out


def at_set(s: Sequent, chooser: Callable[[list[tuple[str, Formula]]], int] | None = None) -> frozenset[Sequent]:
    """All atomic sequents elimination-derivable from ``s``.

    A top on the right or a bottom on the left makes the result empty; the
    recursion is confluent, so the optional ``chooser`` (used by tests to
    randomize decomposition order) never changes the outcome.
    """
    if chooser is None:
        return _at_set_default(s)
    return _at_set_walk(s, chooser)


@lru_cache(maxsize=200000)
def _at_set_default(s: Sequent) -> frozenset[Sequent]:
    return _at_set_walk(s, lambda cands: 0)


def _at_set_walk(s: Sequent, chooser) -> frozenset[Sequent]:
    if any(isinstance(f, Top) for f in s.right) or any(isinstance(f, Bot) for f in s.left):
        return frozenset()
    cands = _decomposition_candidates(s)
    if not cands:
        return frozenset((s,))
    side, f = cands[chooser(cands)]
    rest = s.remove_one(f, side)
    rec = lambda t: _at_set_walk(t, chooser)
    if side == "left":
        if isinstance(f, And):
            return rec(rest.add(left=[f.left, f.right]))
        if isinstance(f, Or):
            return rec(rest.add(left=[f.left])) | rec(rest.add(left=[f.right]))
        if isinstance(f, Neg):
            return rec(rest.add(right=[f.arg]))
        if isinstance(f, Top):
            return rec(rest)
        raise AssertionError(f)
    if isinstance(f, And):
        return rec(rest.add(right=[f.left])) | rec(rest.add(right=[f.right]))
    if isinstance(f, Or):
        return rec(rest.add(right=[f.left, f.right]))
    if isinstance(f, Neg):
        return rec(rest.add(left=[f.arg]))
    if isinstance(f, Bot):
        return rec(rest)
    raise AssertionError(f)


# ---------------------------------------------------------------------------
# Rule classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RuleClassification:
    cut_formulas: frozenset[str]
    side_formulas: frozenset[str]
    is_generalized_cut: bool
    introduces_new_variables: bool


def classify(rule: StructuralRule) -> RuleClassification:
    """Cut/side formula analysis; context slots always count as side material."""
    names = rule.schema_atoms()
    in_concl = rule.conclusion.atom_names()
    in_prem: set[str] = set()
    on_left: set[str] = set()
    on_right: set[str] = set()
    for schema in list(rule.premises) + [rule.conclusion]:
        on_left |= set(schema.atoms_left)
        on_right |= set(schema.atoms_right)
    for schema in rule.premises:
        in_prem |= schema.atom_names()
    cut = frozenset(n for n in names if n in in_prem and n not in in_concl)
    side = frozenset(n for n in names if not (n in on_left and n in on_right))
    generalized = all(n in cut or n in side for n in names)
    new_vars = any(n not in in_prem for n in in_concl)
    return RuleClassification(cut, side, generalized, new_vars)


# ---------------------------------------------------------------------------
# Sigma expansion
# ---------------------------------------------------------------------------


def _schema_formula_sequent(schema: SequentSchema) -> Sequent:
    return Sequent(
        (Atom(a) for a in schema.atoms_left),
        (Atom(a) for a in schema.atoms_right),
    )


def _sequent_to_schema(s: Sequent, slots_left: tuple[str, ...], slots_right: tuple[str, ...]) -> SequentSchema:
    assert s.is_atomic(), s
    return SequentSchema(
        (f.name for f in s.left if isinstance(f, Atom)),
        slots_left,
        (f.name for f in s.right if isinstance(f, Atom)),
        slots_right,
    )


def sigma_expand_tagged(
    rule: StructuralRule,
    sigma: Substitution,
    ground: dict[str, str] | None = None,
) -> list[tuple[tuple[tuple[int, SequentSchema], ...], SequentSchema]]:
    """Sigma expansion keeping, per expanded premise, the source premise index."""
    g = ground or {}

    def subst_seq(schema: SequentSchema) -> Sequent:
        base = _schema_formula_sequent(schema)
        renamed = apply_subst(Substitution({a: Atom(g[a]) for a in g}), base)
        return apply_subst(sigma, renamed)

    tagged_premises: list[tuple[int, SequentSchema]] = []
    seen: set[SequentSchema] = set()
    for i, p in enumerate(rule.premises):
        for member in sorted(at_set(subst_seq(p)), key=sequent_key):
            schema = _sequent_to_schema(member, p.slots_left, p.slots_right)
            if schema not in seen:
                seen.add(schema)
                tagged_premises.append((i, schema))
    out = []
    for member in sorted(at_set(subst_seq(rule.conclusion)), key=sequent_key):
        concl = _sequent_to_schema(member, rule.conclusion.slots_left, rule.conclusion.slots_right)
        out.append((tuple(tagged_premises), concl))
    return out


def sigma_expand(
    rule: StructuralRule,
    sigma: Substitution,
    ground: dict[str, str] | None = None,
) -> frozenset[StructuralRule]:
    """All sigma-expansions of a structural rule; slots pass through unchanged."""
    out = []
    for tagged, concl in sigma_expand_tagged(rule, sigma, ground):
        premises = tuple(schema for _, schema in tagged)
        r = StructuralRule("", premises, concl)
        out.append(StructuralRule(r.render(), premises, concl))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Balanced non-conflicting expansions
# ---------------------------------------------------------------------------


def _linear_shapes(depth: int) -> list:
    """Formula shapes of connective-depth <= depth; leaves are placeholders.

    A shape is a nested tuple: "x" (leaf), ("~", s), ("&", s, t), ("|", s, t).
    """
    levels: list[list] = [["x"]]
    for d in range(1, depth + 1):
        prev = [s for lvl in levels for s in lvl]
        new = [("~", s) for s in levels[-1]]
        for a in prev:
            for b in prev:
                if _shape_depth(a) == d - 1 or _shape_depth(b) == d - 1:
                    new.append(("&", a, b))
                    new.append(("|", a, b))
        levels.append(new)
    return [s for lvl in levels for s in lvl]


def _shape_depth(shape) -> int:
    if shape == "x":
        return 0
    if shape[0] == "~":
        return 1 + _shape_depth(shape[1])
    return 1 + max(_shape_depth(shape[1]), _shape_depth(shape[2]))


def _shape_to_formula(shape, fresh_iter) -> Formula:
    if shape == "x":
        return Atom(next(fresh_iter))
    if shape[0] == "~":
        return Neg(_shape_to_formula(shape[1], fresh_iter))
    left = _shape_to_formula(shape[1], fresh_iter)
    right = _shape_to_formula(shape[2], fresh_iter)
    return And(left, right) if shape[0] == "&" else Or(left, right)


def canonical_rule(rule: StructuralRule) -> StructuralRule:
    """Rename schema atoms to x0, x1, ... minimizing the serialization."""
    names = rule.schema_atoms()
    best = None
    for perm in itertools.permutations(range(len(names))):
        table = {n: f"x{i}" for n, i in zip(names, perm)}
        r = _rename_rule(rule, table)
        key = r.render()
        if best is None or key < best[0]:
            best = (key, r)
    if best is None:
        return StructuralRule(rule.render(), rule.premises, rule.conclusion)
    return StructuralRule(best[0], best[1].premises, best[1].conclusion)


def _rename_rule(rule: StructuralRule, table: dict[str, str]) -> StructuralRule:
    def ren(schema: SequentSchema) -> SequentSchema:
        return SequentSchema(
            (table.get(a, a) for a in schema.atoms_left),
            schema.slots_left,
            (table.get(a, a) for a in schema.atoms_right),
            schema.slots_right,
        )

    premises = tuple(ren(p) for p in rule.premises)
    concl = ren(rule.conclusion)
    return StructuralRule(rule.name, premises, concl)


def _set_partitions(items: list[str], max_blocks: int):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, max_blocks):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        if len(part) < max_blocks:
            yield part + [[first]]


@lru_cache(maxsize=None)
def _balanced_expansions_cached(rule: StructuralRule, max_blocks: int, depth_bound: int) -> frozenset[StructuralRule]:
    shapes = _linear_shapes(depth_bound)
    schema_atoms = rule.schema_atoms()
    expanded: set[StructuralRule] = set()
    for combo in itertools.product(shapes, repeat=len(schema_atoms)):
        fresh = (f"_e{i}" for i in itertools.count())
        mapping = {a: _shape_to_formula(shape, fresh) for a, shape in zip(schema_atoms, combo)}
        sigma = Substitution(mapping)
        for r in sigma_expand(rule, sigma):
            expanded.add(canonical_rule(r))
    out: set[StructuralRule] = set()
    for r in expanded:
        names = list(r.schema_atoms())
        for part in _set_partitions(names, max_blocks or 1):
            table = {n: block[0] for block in part for n in block}
            out.add(canonical_rule(_rename_rule(r, table)))
    return frozenset(out)


def balanced_expansions(rule: StructuralRule, atom_universe: Iterable[str], depth_bound: int) -> frozenset[StructuralRule]:
    """Balanced non-conflicting sigma-expansions up to a depth bound.

    Images are linear balanced formulas over fresh atoms; renaming the fresh
    atoms into the universe (collisions included) is realized as schema-atom
    merging, and results are deduplicated up to renaming.
    """
    universe = tuple(sorted(set(atom_universe)))
    return _balanced_expansions_cached(rule, max(1, len(universe)), depth_bound)


@lru_cache(maxsize=None)
def expansion_pool(rule: StructuralRule, depth_bound: int) -> frozenset[StructuralRule]:
    """Expansion rules for saturation: collision merging is left to the
    atom-assignment enumeration, so partitions are skipped."""
    shapes = _linear_shapes(depth_bound)
    schema_atoms = rule.schema_atoms()
    out: set[StructuralRule] = set()
    for combo in itertools.product(shapes, repeat=len(schema_atoms)):
        fresh = (f"_e{i}" for i in itertools.count())
        mapping = {a: _shape_to_formula(shape, fresh) for a, shape in zip(schema_atoms, combo)}
        for r in sigma_expand(rule, Substitution(mapping)):
            out.add(canonical_rule(r))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Hilbert-to-structural conversion
# ---------------------------------------------------------------------------


def hilbert_to_structural(
    premises: Iterable[Formula], conclusion: Optional[Formula]
) -> frozenset[StructuralRule]:
    """Turn a Hilbert rule into equivalent structural rules via At-sets."""
    from .syntax import rho

    prem_members: list[SequentSchema] = []
    seen: set[SequentSchema] = set()
    for g in premises:
        for member in sorted(at_set(rho(g)), key=sequent_key):
            schema = _sequent_to_schema(member, (), ())
            if schema not in seen:
                seen.add(schema)
                prem_members.append(schema)
    targets = at_set(rho(conclusion)) if conclusion is not None else frozenset((Sequent(),))
    out = []
    for member in sorted(targets, key=sequent_key):
        concl = _sequent_to_schema(member, (), ())
        r = StructuralRule("", tuple(prem_members), concl)
        out.append(StructuralRule(r.render(), r.premises, r.conclusion))
    return frozenset(out)
