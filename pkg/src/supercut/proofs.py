"""Proof trees, the proof checker, shape predicates and tree builders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import rules as R
from .syntax import (
    And,
    Bot,
    Formula,
    Neg,
    Or,
    Sequent,
    SupercutError,
    TOP,
    Top,
    formula_key,
    parse_sequent,
    subformulas,
)

Path = tuple[int, ...]


@dataclass(frozen=True)
class Proof:
    """A finite labeled proof tree.

    ``rule`` is one of: "premise", the axioms "top-right"/"bot-left", a
    logical rule id, or a structural rule name. Instantiations are not
    stored; the checker re-infers them.
    """

    conclusion: Sequent
    rule: str
    children: tuple["Proof", ...] = ()
    premise_index: Optional[int] = None

    def node_at(self, path: Path) -> "Proof":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def replace_at(self, path: Path, sub: "Proof") -> "Proof":
        if not path:
            return sub
        i = path[0]
        kids = list(self.children)
        kids[i] = kids[i].replace_at(path[1:], sub)
        return Proof(self.conclusion, self.rule, tuple(kids), self.premise_index)

    def walk(self, path: Path = ()) -> Iterable[tuple[Path, "Proof"]]:
        yield path, self
        for i, c in enumerate(self.children):
            yield from c.walk(path + (i,))

    def premise_leaves(self) -> frozenset[Sequent]:
        return frozenset(n.conclusion for _, n in self.walk() if n.rule == "premise")

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def is_logical(rule: str) -> bool:
    return rule in R.LOGICAL_RULES


def is_intro(rule: str) -> bool:
    return rule in R.INTRO_RULES


def is_elim(rule: str) -> bool:
    return rule in R.ELIM_RULES


def is_axiom(rule: str) -> bool:
    return rule in R.AXIOM_RULES


def is_structural(rule: str) -> bool:
    return not (is_logical(rule) or is_axiom(rule) or rule == "premise")


def premise(s: Sequent, index: Optional[int] = None) -> Proof:
    return Proof(s, "premise", (), index)


def axiom_top(s: Sequent) -> Proof:
    assert any(isinstance(f, Top) for f in s.right), s
    return Proof(s, "top-right")


def axiom_bot(s: Sequent) -> Proof:
    assert any(isinstance(f, Bot) for f in s.left), s
    return Proof(s, "bot-left")


def logical(rule: str, children: Sequence[Proof], conclusion: Sequent) -> Proof:
    m = R.match_logical(rule, [c.conclusion for c in children], conclusion)
    assert m is not None, (rule, [str(c.conclusion) for c in children], str(conclusion))
    return Proof(conclusion, rule, tuple(children))


def structural(rule_name: str, children: Sequence[Proof], conclusion: Sequent) -> Proof:
    return Proof(conclusion, rule_name, tuple(children))


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: Optional[Path] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


OK = CheckResult(True)


def check(p: Proof, calc: R.Calculus, declared_premises: Sequence[Sequent] = ()) -> CheckResult:
    """Re-match every node against the calculus; first failure wins,
    reported in leftmost-innermost order."""
    declared = list(declared_premises)
    table = calc.rule_map()

    def visit(node: Proof, path: Path) -> CheckResult:
        for i, c in enumerate(node.children):
            res = visit(c, path + (i,))
            if not res.ok:
                return res
        rule = node.rule
        if rule == "premise":
            if node.children:
                return CheckResult(False, path, "premise node with children")
            if node.premise_index is not None:
                if not (0 <= node.premise_index < len(declared)):
                    return CheckResult(False, path, "premise index out of range")
                if declared[node.premise_index] != node.conclusion:
                    return CheckResult(False, path, "premise does not match declared sequent")
            elif node.conclusion not in declared:
                return CheckResult(False, path, "sequent is not a declared premise")
            return OK
        if rule == "top-right":
            if node.children:
                return CheckResult(False, path, "axiom with children")
            if not any(isinstance(f, Top) for f in node.conclusion.right):
                return CheckResult(False, path, "no top on the right")
            return OK
        if rule == "bot-left":
            if node.children:
                return CheckResult(False, path, "axiom with children")
            if not any(isinstance(f, Bot) for f in node.conclusion.left):
                return CheckResult(False, path, "no bottom on the left")
            return OK
        prems = [c.conclusion for c in node.children]
        if is_logical(rule):
            if len(prems) != R.LOGICAL_ARITY[rule]:
                return CheckResult(False, path, f"arity: {rule} expects {R.LOGICAL_ARITY[rule]} premises")
            if R.match_logical(rule, prems, node.conclusion) is None:
                return CheckResult(False, path, f"not an instance of {rule}")
            return OK
        if rule not in table:
            return CheckResult(False, path, f"rule not in calculus: {rule}")
        schema = table[rule]
        if len(prems) != len(schema.premises):
            return CheckResult(False, path, f"arity: {rule} expects {len(schema.premises)} premises")
        if R.match_structural(schema, prems, node.conclusion, atomic_only=False) is None:
            return CheckResult(False, path, f"not an instance of {rule}")
        return OK

    return visit(p, ())


# ---------------------------------------------------------------------------
# Shape predicates
# ---------------------------------------------------------------------------


def is_structurally_atomic(p: Proof) -> bool:
    """Premises and conclusions of all structural nodes are atomic sequents."""
    for _, node in p.walk():
        if is_structural(node.rule) and node.rule != "premise":
            if not node.conclusion.is_atomic():
                return False
            if any(not c.conclusion.is_atomic() for c in node.children):
                return False
    return True


def is_analytic_synthetic(p: Proof) -> bool:
    """On every branch all eliminations precede (sit above) all introductions."""

    def visit(node: Proof, intro_forbidden: bool) -> bool:
        if is_intro(node.rule) and intro_forbidden:
            return False
        forbid = intro_forbidden or is_elim(node.rule)
        return all(visit(c, forbid) for c in node.children)

    return visit(p, False)


def no_elim_after_intro(p: Proof) -> bool:
    """Local variant: no elimination immediately follows an introduction."""
    for _, node in p.walk():
        if is_elim(node.rule) and any(is_intro(c.rule) for c in node.children):
            return False
    return True


def has_subformula_property(p: Proof, declared_premises: Iterable[Sequent] = ()) -> bool:
    universe: set[Formula] = set()
    for s in list(declared_premises) + [p.conclusion]:
        for f in s.left + s.right:
            universe |= subformulas(f)
    for _, node in p.walk():
        for f in node.conclusion.left + node.conclusion.right:
            if f not in universe:
                return False
    return True


def phase_split(p: Proof) -> tuple[frozenset[Path], frozenset[Path], frozenset[Path]]:
    """Partition rule nodes into elimination, structural and introduction zones.

    Requires a structurally atomic analytic-synthetic proof; the tripartite
    branch shape is asserted.
    """
    if not (is_structurally_atomic(p) and is_analytic_synthetic(p)):
        raise SupercutError("phase_split requires a structurally atomic analytic-synthetic proof")
    elim, struct, intro = set(), set(), set()
    for path, node in p.walk():
        if is_elim(node.rule):
            elim.add(path)
        elif is_intro(node.rule):
            intro.add(path)
        elif is_structural(node.rule) and node.rule != "premise":
            struct.add(path)

    def zone(path: Path) -> int:
        if path in elim:
            return 0
        if path in struct:
            return 1
        if path in intro:
            return 2
        return -1

    # walk from root upward: zones must not increase toward the leaves
    def scan_down(node: Proof, path: Path, min_above: int) -> None:
        z = zone(path)
        if z >= 0:
            assert z <= min_above, "branch violates elim/structural/intro ordering"
            min_above = z
        for i, c in enumerate(node.children):
            scan_down(c, path + (i,), min_above)

    scan_down(p, (), 2)
    return frozenset(elim), frozenset(struct), frozenset(intro)


# ---------------------------------------------------------------------------
# Tree builders
# ---------------------------------------------------------------------------


def weaken_to(p: Proof, target: Sequent) -> Proof:
    """Chain of weakenings from p.conclusion up to the target multiset."""
    cur = p
    left_missing = _multiset_diff(target.left, cur.conclusion.left)
    right_missing = _multiset_diff(target.right, cur.conclusion.right)
    assert _multiset_diff(cur.conclusion.left, target.left) == []
    assert _multiset_diff(cur.conclusion.right, target.right) == []
    for f in left_missing:
        cur = structural("weakening-left", [cur], cur.conclusion.add(left=[f]))
    for f in right_missing:
        cur = structural("weakening-right", [cur], cur.conclusion.add(right=[f]))
    return cur


def contract_to(p: Proof, target: Sequent) -> Proof:
    """Chain of contractions from p.conclusion down to the target multiset."""
    cur = p
    for f in _multiset_diff(cur.conclusion.left, target.left):
        cur = structural("contraction-left", [cur], cur.conclusion.remove_one(f, "left"))
    for f in _multiset_diff(cur.conclusion.right, target.right):
        cur = structural("contraction-right", [cur], cur.conclusion.remove_one(f, "right"))
    assert cur.conclusion == target, (cur.conclusion.render(), target.render())
    return cur


def _multiset_diff(a: Sequence[Formula], b: Sequence[Formula]) -> list[Formula]:
    out = list(a)
    for f in b:
        if f in out:
            out.remove(f)
    return sorted(out, key=formula_key)


def elim_targets(base: Proof) -> dict[Sequent, Proof]:
    """Elimination chains from a proof to every member of its At-set.

    Mirrors the At-set recursion; keys are exactly at_set(base.conclusion).
    """
    s = base.conclusion
    if any(isinstance(f, Top) for f in s.right) or any(isinstance(f, Bot) for f in s.left):
        return {}
    cands = R._decomposition_candidates(s)
    if not cands:
        return {s: base}
    side, f = cands[0]
    rest = s.remove_one(f, side)
    if side == "left":
        if isinstance(f, And):
            nxt = logical("and-left-elim", [base], rest.add(left=[f.left, f.right]))
            return elim_targets(nxt)
        if isinstance(f, Or):
            l = elim_targets(logical("or-left-elim", [base], rest.add(left=[f.left])))
            r = elim_targets(logical("or-left-elim", [base], rest.add(left=[f.right])))
            return {**r, **l}
        if isinstance(f, Neg):
            return elim_targets(logical("neg-left-elim", [base], rest.add(right=[f.arg])))
        if isinstance(f, Top):
            return elim_targets(logical("top-left-elim", [base], rest))
        raise AssertionError(f)
    if isinstance(f, And):
        l = elim_targets(logical("and-right-elim", [base], rest.add(right=[f.left])))
        r = elim_targets(logical("and-right-elim", [base], rest.add(right=[f.right])))
        return {**r, **l}
    if isinstance(f, Or):
        return elim_targets(logical("or-right-elim", [base], rest.add(right=[f.left, f.right])))
    if isinstance(f, Neg):
        return elim_targets(logical("neg-right-elim", [base], rest.add(left=[f.arg])))
    if isinstance(f, Bot):
        return elim_targets(logical("bot-right-elim", [base], rest))
    raise AssertionError(f)


class LeafUnavailable(SupercutError):
    pass


def build_intro(goal: Sequent, supply: Callable[[Sequent], Proof]) -> Proof:
    """Introduction tree for the goal; atomic branch leaves come from supply.

    Branches reaching a top on the right or a bottom on the left close with
    the corresponding axiom.
    """
    if any(isinstance(f, Top) for f in goal.right):
        return axiom_top(goal)
    if any(isinstance(f, Bot) for f in goal.left):
        return axiom_bot(goal)
    cands = R._decomposition_candidates(goal)
    if not cands:
        return supply(goal)
    side, f = cands[0]
    rest = goal.remove_one(f, side)
    if side == "left":
        if isinstance(f, And):
            sub = build_intro(rest.add(left=[f.left, f.right]), supply)
            return logical("and-left-intro", [sub], goal)
        if isinstance(f, Or):
            sub1 = build_intro(rest.add(left=[f.left]), supply)
            sub2 = build_intro(rest.add(left=[f.right]), supply)
            return logical("or-left-intro", [sub1, sub2], goal)
        if isinstance(f, Neg):
            sub = build_intro(rest.add(right=[f.arg]), supply)
            return logical("neg-left-intro", [sub], goal)
        if isinstance(f, Top):
            sub = build_intro(rest, supply)
            return logical("top-left-intro", [sub], goal)
        raise AssertionError(f)
    if isinstance(f, And):
        sub1 = build_intro(rest.add(right=[f.left]), supply)
        sub2 = build_intro(rest.add(right=[f.right]), supply)
        return logical("and-right-intro", [sub1, sub2], goal)
    if isinstance(f, Or):
        sub = build_intro(rest.add(right=[f.left, f.right]), supply)
        return logical("or-right-intro", [sub], goal)
    if isinstance(f, Neg):
        sub = build_intro(rest.add(left=[f.arg]), supply)
        return logical("neg-right-intro", [sub], goal)
    if isinstance(f, Bot):
        sub = build_intro(rest, supply)
        return logical("bot-right-intro", [sub], goal)
    raise AssertionError(f)


def intro_derive(c: Sequent, available: Iterable[Sequent]) -> Optional[Proof]:
    """Introduction-only derivation of c whose leaves lie in ``available``
    (or close by constant axioms); None when some leaf is unavailable."""
    have = set(available)
    assert all(s.is_atomic() for s in have), "available sequents must be atomic"

    def supply(leaf: Sequent) -> Proof:
        if leaf in have:
            return premise(leaf)
        raise LeafUnavailable(leaf.render())

    try:
        return build_intro(c, supply)
    except LeafUnavailable:
        return None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def proof_to_dict(p: Proof) -> dict:
    out: dict = {"sequent": p.conclusion.render(), "rule": p.rule}
    if p.children:
        out["children"] = [proof_to_dict(c) for c in p.children]
    if p.premise_index is not None:
        out["premise_index"] = p.premise_index
    return out


def proof_from_dict(d: dict) -> Proof:
    children = tuple(proof_from_dict(c) for c in d.get("children", ()))
    return Proof(
        parse_sequent(d["sequent"]),
        d["rule"],
        children,
        d.get("premise_index"),
    )


def proof_to_dot(p: Proof) -> str:
    lines = ["digraph proof {", "  node [shape=box, fontname=monospace];"]
    counter = [0]

    def visit(node: Proof) -> int:
        nid = counter[0]
        counter[0] += 1
        label = node.conclusion.render().replace('"', '\\"')
        if not node.children:
            label += f"\\n[{node.rule}]"
        lines.append(f'  n{nid} [label="{label}"];')
        for c in node.children:
            cid = visit(c)
            rl = node.rule.replace('"', '\\"')
            lines.append(f'  n{cid} -> n{nid} [label="{rl}"];')
        return nid

    visit(p)
    lines.append("}")
    return "\n".join(lines)
