"""Proof rewriting: structural expansion, analytic-synthetic reordering,
subformula enforcement, cut elimination and refutation reshaping."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import proofs as P
from . import rules as R
from .proofs import Proof
from .syntax import (
    And,
    Atom,
    BOT,
    Bot,
    Formula,
    Neg,
    Or,
    Sequent,
    Substitution,
    SupercutError,
    TOP,
    Top,
    apply_subst,
    atoms_of,
    sequent_key,
)


class RewriteError(SupercutError):
    pass


class InexpandableNode(RewriteError):
    pass


class RefutationShapeError(RewriteError):
    pass


@dataclass
class RewriteTrace:
    """Replayable record of rewrite events: (pass, site, rule applied)."""

    entries: list[tuple[str, str, str]] = field(default_factory=list)

    def record(self, pass_name: str, site: str, rule: str) -> None:
        self.entries.append((pass_name, site, rule))


# ---------------------------------------------------------------------------
# Expansion-aware constructors (recurse on the principal formula)
# ---------------------------------------------------------------------------


def weaken_left_by(p: Proof, f: Formula) -> Proof:
    goal = p.conclusion.add(left=[f])
    if isinstance(f, Atom):
        return P.structural("weakening-left", [p], goal)
    if isinstance(f, Top):
        return P.logical("top-left-intro", [p], goal)
    if isinstance(f, Bot):
        return P.axiom_bot(goal)
    if isinstance(f, Neg):
        return P.logical("neg-left-intro", [weaken_right_by(p, f.arg)], goal)
    if isinstance(f, And):
        return P.logical("and-left-intro", [weaken_left_by(weaken_left_by(p, f.left), f.right)], goal)
    if isinstance(f, Or):
        return P.logical("or-left-intro", [weaken_left_by(p, f.left), weaken_left_by(p, f.right)], goal)
    raise TypeError(f)


def weaken_right_by(p: Proof, f: Formula) -> Proof:
    goal = p.conclusion.add(right=[f])
    if isinstance(f, Atom):
        return P.structural("weakening-right", [p], goal)
    if isinstance(f, Top):
        return P.axiom_top(goal)
    if isinstance(f, Bot):
        return P.logical("bot-right-intro", [p], goal)
    if isinstance(f, Neg):
        return P.logical("neg-right-intro", [weaken_left_by(p, f.arg)], goal)
    if isinstance(f, And):
        return P.logical(
            "and-right-intro", [weaken_right_by(p, f.left), weaken_right_by(p, f.right)], goal
        )
    if isinstance(f, Or):
        return P.logical(
            "or-right-intro", [weaken_right_by(weaken_right_by(p, f.left), f.right)], goal
        )
    raise TypeError(f)


def contract_left_by(p: Proof, f: Formula) -> Proof:
    """From a proof of f, f, G |- D produce f, G |- D, atomizing f."""
    goal = p.conclusion.remove_one(f, "left")
    if isinstance(f, Atom):
        return P.structural("contraction-left", [p], goal)
    if isinstance(f, Top):
        return P.logical("top-left-elim", [p], goal)
    if isinstance(f, Bot):
        return P.axiom_bot(goal)
    if isinstance(f, Neg):
        e1 = P.logical("neg-left-elim", [p], p.conclusion.remove_one(f, "left").add(right=[f.arg]))
        e2 = P.logical("neg-left-elim", [e1], e1.conclusion.remove_one(f, "left").add(right=[f.arg]))
        c = contract_right_by(e2, f.arg)
        return P.logical("neg-left-intro", [c], goal)
    if isinstance(f, And):
        e1 = P.logical(
            "and-left-elim", [p], p.conclusion.remove_one(f, "left").add(left=[f.left, f.right])
        )
        e2 = P.logical(
            "and-left-elim", [e1], e1.conclusion.remove_one(f, "left").add(left=[f.left, f.right])
        )
        step = contract_left_by(contract_left_by(e2, f.left), f.right)
        return P.logical("and-left-intro", [step], goal)
    if isinstance(f, Or):
        def branch(comp: Formula) -> Proof:
            e1 = P.logical("or-left-elim", [p], p.conclusion.remove_one(f, "left").add(left=[comp]))
            e2 = P.logical("or-left-elim", [e1], e1.conclusion.remove_one(f, "left").add(left=[comp]))
            return contract_left_by(e2, comp)

        return P.logical("or-left-intro", [branch(f.left), branch(f.right)], goal)
    raise TypeError(f)


def contract_right_by(p: Proof, f: Formula) -> Proof:
    goal = p.conclusion.remove_one(f, "right")
    if isinstance(f, Atom):
        return P.structural("contraction-right", [p], goal)
    if isinstance(f, Top):
        return P.axiom_top(goal)
    if isinstance(f, Bot):
        return P.logical("bot-right-elim", [p], goal)
    if isinstance(f, Neg):
        e1 = P.logical("neg-right-elim", [p], p.conclusion.remove_one(f, "right").add(left=[f.arg]))
        e2 = P.logical("neg-right-elim", [e1], e1.conclusion.remove_one(f, "right").add(left=[f.arg]))
        c = contract_left_by(e2, f.arg)
        return P.logical("neg-right-intro", [c], goal)
    if isinstance(f, Or):
        e1 = P.logical(
            "or-right-elim", [p], p.conclusion.remove_one(f, "right").add(right=[f.left, f.right])
        )
        e2 = P.logical(
            "or-right-elim", [e1], e1.conclusion.remove_one(f, "right").add(right=[f.left, f.right])
        )
        step = contract_right_by(contract_right_by(e2, f.left), f.right)
        return P.logical("or-right-intro", [step], goal)
    if isinstance(f, And):
        def branch(comp: Formula) -> Proof:
            e1 = P.logical("and-right-elim", [p], p.conclusion.remove_one(f, "right").add(right=[comp]))
            e2 = P.logical("and-right-elim", [e1], e1.conclusion.remove_one(f, "right").add(right=[comp]))
            return contract_right_by(e2, comp)

        return P.logical("and-right-intro", [branch(f.left), branch(f.right)], goal)
    raise TypeError(f)


def identity_proof(f: Formula) -> Proof:
    if isinstance(f, Atom):
        return P.structural("identity", [], Sequent([f], [f]))
    if isinstance(f, Top):
        ax = P.axiom_top(Sequent((), (TOP,)))
        return P.logical("top-left-intro", [ax], Sequent((TOP,), (TOP,)))
    if isinstance(f, Bot):
        ax = P.axiom_bot(Sequent((BOT,), ()))
        return P.logical("bot-right-intro", [ax], Sequent((BOT,), (BOT,)))
    if isinstance(f, Neg):
        base = identity_proof(f.arg)
        step = P.logical("neg-right-intro", [base], Sequent((), (f.arg, f)))
        return P.logical("neg-left-intro", [step], Sequent((f,), (f,)))
    if isinstance(f, And):
        a = weaken_left_by(identity_proof(f.left), f.right)
        b = weaken_left_by(identity_proof(f.right), f.left)
        step = P.logical("and-right-intro", [a, b], Sequent((f.left, f.right), (f,)))
        return P.logical("and-left-intro", [step], Sequent((f,), (f,)))
    if isinstance(f, Or):
        a = P.logical(
            "or-right-intro",
            [weaken_right_by(identity_proof(f.left), f.right)],
            Sequent((f.left,), (f,)),
        )
        b = P.logical(
            "or-right-intro",
            [weaken_right_by(identity_proof(f.right), f.left)],
            Sequent((f.right,), (f,)),
        )
        return P.logical("or-left-intro", [a, b], Sequent((f,), (f,)))
    raise TypeError(f)


def _contract_multiset(p: Proof, target: Sequent) -> Proof:
    """Expansion-aware contraction of arbitrary formulas down to target."""
    cur = p
    while True:
        extra_left = P._multiset_diff(cur.conclusion.left, target.left)
        extra_right = P._multiset_diff(cur.conclusion.right, target.right)
        if not extra_left and not extra_right:
            break
        if extra_left:
            cur = contract_left_by(cur, extra_left[0])
        else:
            cur = contract_right_by(cur, extra_right[0])
    assert cur.conclusion == target
    return cur


def cut_on(p1: Proof, p2: Proof, f: Formula) -> Proof:
    """Cut p1: G |- D, f against p2: f, G' |- D', atomizing the cut formula."""
    left = p1.conclusion.remove_one(f, "right")
    right = p2.conclusion.remove_one(f, "left")
    goal = Sequent(left.left + right.left, left.right + right.right)
    if isinstance(f, Atom):
        return P.structural("cut", [p1, p2], goal)
    if isinstance(f, Top):
        q = P.logical("top-left-elim", [p2], right)
        return _weaken_multiset(q, goal)
    if isinstance(f, Bot):
        q = P.logical("bot-right-elim", [p1], left)
        return _weaken_multiset(q, goal)
    if isinstance(f, Neg):
        a = P.logical("neg-right-elim", [p1], left.add(left=[f.arg]))
        b = P.logical("neg-left-elim", [p2], right.add(right=[f.arg]))
        return cut_on(b, a, f.arg)
    if isinstance(f, And):
        a1 = P.logical("and-right-elim", [p1], left.add(right=[f.left]))
        a2 = P.logical("and-right-elim", [p1], left.add(right=[f.right]))
        b = P.logical("and-left-elim", [p2], right.add(left=[f.left, f.right]))
        c1 = cut_on(a1, b, f.left)
        c2 = cut_on(a2, c1, f.right)
        return _contract_multiset(c2, goal)
    if isinstance(f, Or):
        a = P.logical("or-right-elim", [p1], left.add(right=[f.left, f.right]))
        b1 = P.logical("or-left-elim", [p2], right.add(left=[f.left]))
        b2 = P.logical("or-left-elim", [p2], right.add(left=[f.right]))
        c1 = cut_on(a, b1, f.left)
        c2 = cut_on(c1, b2, f.right)
        return _contract_multiset(c2, goal)
    raise TypeError(f)


def _weaken_multiset(p: Proof, target: Sequent) -> Proof:
    cur = p
    for f in P._multiset_diff(target.left, cur.conclusion.left):
        cur = weaken_left_by(cur, f)
    for f in P._multiset_diff(target.right, cur.conclusion.right):
        cur = weaken_right_by(cur, f)
    assert cur.conclusion == target, (cur.conclusion.render(), target.render())
    return cur


# ---------------------------------------------------------------------------
# expand_structural
# ---------------------------------------------------------------------------


def _node_is_atomic(node: Proof) -> bool:
    return node.conclusion.is_atomic() and all(c.conclusion.is_atomic() for c in node.children)


def expand_structural(p: Proof, calc: R.Calculus, trace: Optional[RewriteTrace] = None) -> Proof:
    """Replace every non-atomic structural step by logical rules plus atomic
    instances available in the calculus."""
    step1 = _expand_principals(p, calc, trace)
    return _atomize_contexts(step1, calc, trace)


def _expand_principals(node: Proof, calc: R.Calculus, trace: Optional[RewriteTrace]) -> Proof:
    kids = tuple(_expand_principals(c, calc, trace) for c in node.children)
    cur = Proof(node.conclusion, node.rule, kids, node.premise_index)
    if not P.is_structural(cur.rule) or cur.rule == "premise":
        return cur
    table = calc.rule_map()
    if cur.rule not in table:
        raise InexpandableNode(f"structural rule {cur.rule} not in calculus {calc.name}")
    schema = table[cur.rule]
    m = R.match_structural(schema, [c.conclusion for c in cur.children], cur.conclusion)
    if m is None:
        raise InexpandableNode(f"node is not an instance of {cur.rule}")
    values = m.atom_assignment
    if all(isinstance(v, Atom) for v in values.values()):
        return cur
    if trace is not None:
        trace.record("expand-principal", cur.conclusion.render(), cur.rule)
    if cur.rule == "identity":
        (f,) = values.values()
        return identity_proof(f)
    if cur.rule in ("weakening-left", "weakening-right"):
        (f,) = values.values()
        fn = weaken_left_by if cur.rule == "weakening-left" else weaken_right_by
        return fn(cur.children[0], f)
    if cur.rule in ("contraction-left", "contraction-right"):
        (f,) = values.values()
        fn = contract_left_by if cur.rule == "contraction-left" else contract_right_by
        return fn(cur.children[0], f)
    if cur.rule == "cut":
        f = values["x"]
        return cut_on(cur.children[0], cur.children[1], f)
    # bounded calculi: the step must correspond to expansion rules present
    # in the calculus; _sandwich performs the replacement
    return _sandwich(cur, calc, m)


def _atomize_contexts(node: Proof, calc: R.Calculus, trace: Optional[RewriteTrace]) -> Proof:
    kids = tuple(_atomize_contexts(c, calc, trace) for c in node.children)
    cur = Proof(node.conclusion, node.rule, kids, node.premise_index)
    if not P.is_structural(cur.rule) or cur.rule == "premise" or _node_is_atomic(cur):
        return cur
    if trace is not None:
        trace.record("atomize-context", cur.conclusion.render(), cur.rule)
    return _sandwich(cur, calc, None)


def _slot_side(rule: R.StructuralRule, slot: str) -> str:
    for schema in list(rule.premises) + [rule.conclusion]:
        if slot in schema.slots_left:
            return "left"
        if slot in schema.slots_right:
            return "right"
    raise AssertionError(slot)


def _sandwich(node: Proof, calc: R.Calculus, m: Optional[R.StructuralMatch]) -> Proof:
    """Replace a structural step by eliminations, atomic instances of its
    expansion rules, and introductions."""
    table = calc.rule_map()
    rule = table[node.rule]
    if m is None:
        m = R.match_structural(rule, [c.conclusion for c in node.children], node.conclusion)
        assert m is not None, node.rule
    sigma = Substitution(m.atom_assignment)
    by_key = {R.canonical_rule(r).schema_key(): r.name for r in table.values()}

    slot_branches: dict[str, list[Sequent]] = {}
    for slot in rule.slot_names():
        content = m.slot_assignment.get(slot, ())
        if _slot_side(rule, slot) == "left":
            branches = R.at_set(Sequent(content, ()))
        else:
            branches = R.at_set(Sequent((), content))
        slot_branches[slot] = sorted(branches, key=sequent_key)

    elim_chains = [P.elim_targets(c) for c in node.children]
    supply: dict[Sequent, Proof] = {}
    slots_sorted = sorted(rule.slot_names())

    def instantiate(schema: R.SequentSchema, bc: dict[str, Sequent]) -> Sequent:
        # expanded schemas use the sigma-image atoms as their schema atoms
        left = [Atom(a) for a in schema.atoms_left]
        right = [Atom(a) for a in schema.atoms_right]
        for s in schema.slots_left + schema.slots_right:
            left.extend(bc[s].left)
            right.extend(bc[s].right)
        return Sequent(left, right)

    for tagged, concl_schema in R.sigma_expand_tagged(rule, sigma):
        prem_schemas = tuple(schema for _, schema in tagged)
        e_rule = R.StructuralRule("", prem_schemas, concl_schema)
        key = R.canonical_rule(e_rule).schema_key()
        if key not in by_key:
            raise InexpandableNode(
                f"no expansion of {node.rule} in calculus {calc.name} covers this instance"
            )
        e_name = by_key[key]
        for combo in itertools.product(*(slot_branches[s] for s in slots_sorted)):
            bc = dict(zip(slots_sorted, combo))
            member = instantiate(concl_schema, bc)
            if member in supply:
                continue
            children = []
            for j, schema in tagged:
                mj = instantiate(schema, bc)
                children.append(elim_chains[j][mj])
            supply[member] = P.structural(e_name, children, member)

    return P.build_intro(node.conclusion, lambda leaf: supply[leaf])


# ---------------------------------------------------------------------------
# Analytic-synthetic reordering
# ---------------------------------------------------------------------------


def make_analytic_synthetic(p: Proof, trace: Optional[RewriteTrace] = None) -> Proof:
    """Reorder a structurally atomic proof so eliminations precede introductions."""
    if not P.is_structurally_atomic(p):
        raise RewriteError("make_analytic_synthetic requires a structurally atomic proof")
    out = _reorder(p, trace)
    assert P.is_analytic_synthetic(out)
    return out


def _reorder(node: Proof, trace: Optional[RewriteTrace]) -> Proof:
    kids = tuple(_reorder(c, trace) for c in node.children)
    return _fix_root(Proof(node.conclusion, node.rule, kids, node.premise_index), trace)


def _fix_root(node: Proof, trace: Optional[RewriteTrace]) -> Proof:
    if not P.is_elim(node.rule):
        return node
    child = node.children[0]
    if not P.is_intro(child.rule):
        return node
    if trace is not None:
        trace.record("reorder", node.conclusion.render(), node.rule)
    if R.INVERSE.get(child.rule) == node.rule:
        for g in child.children:
            if g.conclusion == node.conclusion:
                return g
    m = R.match_logical(node.rule, [child.conclusion], node.conclusion)
    assert m is not None
    new_kids = [
        _fix_root(_apply_elim(node.rule, m.principal, child.conclusion, node.conclusion, g), trace)
        for g in child.children
    ]
    return P.logical(child.rule, new_kids, node.conclusion)


def _apply_elim(rule: str, f: Formula, orig_premise: Sequent, orig_concl: Sequent, g: Proof) -> Proof:
    s = g.conclusion
    if rule == "and-left-elim":
        return P.logical(rule, [g], s.remove_one(f, "left").add(left=[f.left, f.right]))
    if rule == "or-right-elim":
        return P.logical(rule, [g], s.remove_one(f, "right").add(right=[f.left, f.right]))
    if rule == "neg-left-elim":
        return P.logical(rule, [g], s.remove_one(f, "left").add(right=[f.arg]))
    if rule == "neg-right-elim":
        return P.logical(rule, [g], s.remove_one(f, "right").add(left=[f.arg]))
    if rule == "top-left-elim":
        return P.logical(rule, [g], s.remove_one(TOP, "left"))
    if rule == "bot-right-elim":
        return P.logical(rule, [g], s.remove_one(BOT, "right"))
    if rule == "and-right-elim":
        base = orig_premise.remove_one(f, "right")
        comp = f.left if orig_concl == base.add(right=[f.left]) else f.right
        return P.logical(rule, [g], s.remove_one(f, "right").add(right=[comp]))
    if rule == "or-left-elim":
        base = orig_premise.remove_one(f, "left")
        comp = f.left if orig_concl == base.add(left=[f.left]) else f.right
        return P.logical(rule, [g], s.remove_one(f, "left").add(left=[comp]))
    raise AssertionError(rule)


# ---------------------------------------------------------------------------
# Subformula enforcement
# ---------------------------------------------------------------------------


def enforce_subformula(
    p: Proof, premises: Sequence[Sequent], conclusion: Sequent, trace: Optional[RewriteTrace] = None
) -> Proof:
    """Rename atoms foreign to premises and conclusion to a resident atom;
    rebuild constant-only proofs outright."""
    resident: set[str] = set(atoms_of(conclusion))
    for s in premises:
        resident |= atoms_of(s)
    used: set[str] = set()
    for _, node in p.walk():
        used |= atoms_of(node.conclusion)
    foreign = used - resident
    if not foreign:
        return p
    if trace is not None:
        trace.record("enforce-subformula", p.conclusion.render(), ",".join(sorted(foreign)))
    if resident:
        q = Atom(sorted(resident)[0])
        ren = Substitution({a: q for a in sorted(foreign)})

        def rename(node: Proof) -> Proof:
            return Proof(
                apply_subst(ren, node.conclusion),
                node.rule,
                tuple(rename(c) for c in node.children),
                node.premise_index,
            )

        return rename(p)
    # constant-only corner: rebuild from scratch
    leaves = R.at_set(conclusion)
    if not leaves:
        return P.build_intro(conclusion, _no_supply)
    assert leaves == frozenset((Sequent(),)), leaves
    for i, s in enumerate(premises):
        if Sequent() in R.at_set(s):
            chain = P.elim_targets(P.premise(s, i))[Sequent()]
            return P.build_intro(conclusion, lambda leaf: P.weaken_to(chain, leaf))
    raise RewriteError("conclusion requires the empty sequent but no premise yields it")


def _no_supply(leaf: Sequent) -> Proof:
    raise RewriteError(f"unexpected atomic goal {leaf.render()} in constant-only rebuild")


# ---------------------------------------------------------------------------
# normalize
# ---------------------------------------------------------------------------


def normalize(
    p: Proof,
    calc: R.Calculus,
    premises: Sequence[Sequent],
    conclusion: Sequent,
    trace: Optional[RewriteTrace] = None,
) -> Proof:
    """Full pipeline to structurally atomic analytic-synthetic form with the
    subformula property; idempotent on its own output."""
    res = P.check(p, calc, premises)
    if not res.ok:
        raise RewriteError(f"input proof fails checking at {res.path}: {res.reason}")
    if p.conclusion != conclusion:
        raise RewriteError("proof conclusion differs from the stated conclusion")
    out = expand_structural(p, calc, trace)
    out = make_analytic_synthetic(out, trace)
    out = enforce_subformula(out, premises, conclusion, trace)
    assert out.conclusion == conclusion
    return out


def replay_trace(
    p: Proof,
    calc: R.Calculus,
    premises: Sequence[Sequent],
    conclusion: Sequent,
    trace: RewriteTrace,
) -> Proof:
    """Re-run the deterministic pipeline and verify it reproduces the trace."""
    fresh = RewriteTrace()
    out = normalize(p, calc, premises, conclusion, fresh)
    if fresh.entries != trace.entries:
        raise RewriteError("trace does not replay")
    return out


# ---------------------------------------------------------------------------
# Cut elimination (classical corollary)
# ---------------------------------------------------------------------------


def eliminate_cuts(p: Proof) -> Proof:
    """Rebuild a premise-free normalized proof using only Identity, Weakening
    and introduction rules: the classical cut-free shape."""
    if p.premise_leaves():
        raise RewriteError("eliminate_cuts requires a proof from no premises")

    def supply(leaf: Sequent) -> Proof:
        shared = sorted(
            {f.name for f in leaf.left if isinstance(f, Atom)}
            & {f.name for f in leaf.right if isinstance(f, Atom)}
        )
        if not shared:
            raise RewriteError(f"atomic goal {leaf.render()} is not classically valid")
        a = Atom(shared[0])
        ident = P.structural("identity", [], Sequent([a], [a]))
        return P.weaken_to(ident, leaf)

    return P.build_intro(p.conclusion, supply)


# ---------------------------------------------------------------------------
# Refutation reshaping
# ---------------------------------------------------------------------------

_REFUTATION_RULES = frozenset({"identity", "cut"}) | R.COMMON_NAMES


def simplify_refutation(p: Proof) -> Proof:
    """Reshape an atomic Identity/Cut/Weakening/Contraction refutation into
    contractions followed by cuts, per branch."""
    if not p.conclusion.is_empty():
        raise RewriteError("simplify_refutation expects a proof of the empty sequent")
    if not P.is_structurally_atomic(p):
        raise RewriteError("simplify_refutation expects a structurally atomic proof")
    for _, node in p.walk():
        if node.rule != "premise" and node.rule not in _REFUTATION_RULES:
            raise RewriteError(f"unexpected rule in refutation: {node.rule}")
        if node.rule == "premise" and not node.conclusion.is_atomic():
            raise RewriteError("refutation premises must be atomic")
    p = _remove_weakenings(p)
    p = _drop_identity_cuts(p)
    p = _raise_contractions(p)
    _assert_contraction_then_cut(p)
    return p


def _find_nodes(p: Proof, pred) -> list[P.Path]:
    return [path for path, node in p.walk() if pred(node)]


def _cut_atom(node: Proof) -> tuple[Atom, Proof, Proof]:
    m = R.match_structural(R.CUT, [c.conclusion for c in node.children], node.conclusion)
    assert m is not None
    return m.atom_assignment["x"], node.children[0], node.children[1]


def _weakened_formula(node: Proof) -> tuple[Formula, str]:
    child = node.children[0]
    side = "left" if node.rule == "weakening-left" else "right"
    diff = P._multiset_diff(getattr(node.conclusion, side), getattr(child.conclusion, side))
    return diff[0], side


def _remove_weakenings(p: Proof) -> Proof:
    while True:
        paths = _find_nodes(p, lambda n: n.rule in R.WEAKENING_NAMES)
        if not paths:
            return p
        path = min(paths, key=len)
        assert path, "weakening cannot conclude the empty sequent"
        wnode = p.node_at(path)
        parent_path, idx = path[:-1], path[-1]
        parent = p.node_at(parent_path)
        w, wside = _weakened_formula(wnode)
        inner = wnode.children[0]
        if parent.rule == "cut":
            x, c1, c2 = _cut_atom(parent)
            consuming = (idx == 0 and wside == "right") or (idx == 1 and wside == "left")
            if w == x and consuming:
                repl = P.weaken_to(inner, parent.conclusion)
            else:
                others = list(parent.children)
                others[idx] = inner
                small = parent.conclusion.remove_one(w, wside)
                cut2 = P.structural("cut", others, small)
                repl = P.structural(f"weakening-{wside}", [cut2], parent.conclusion)
            p = p.replace_at(parent_path, repl)
            continue
        if parent.rule in R.CONTRACTION_NAMES:
            cside = "left" if parent.rule == "contraction-left" else "right"
            y = P._multiset_diff(getattr(wnode.conclusion, cside), getattr(parent.conclusion, cside))[0]
            if w == y and wside == cside:
                repl = inner
            else:
                small = Sequent(
                    *(
                        (inner.conclusion.left, inner.conclusion.right.remove if False else inner.conclusion.right)
                    )
                )
                contracted = parent.conclusion.remove_one(w, wside)
                c2 = P.structural(parent.rule, [inner], contracted)
                repl = P.structural(f"weakening-{wside}", [c2], parent.conclusion)
            p = p.replace_at(parent_path, repl)
            continue
        raise RewriteError(f"weakening feeds unexpected rule {parent.rule}")


def _drop_identity_cuts(p: Proof) -> Proof:
    while True:
        paths = _find_nodes(
            p, lambda n: n.rule == "cut" and any(c.rule == "identity" for c in n.children)
        )
        if not paths:
            for _, node in p.walk():
                if node.rule == "identity":
                    raise RewriteError("identity node not consumed by a cut")
            return p
        path = paths[0]
        node = p.node_at(path)
        other = node.children[1] if node.children[0].rule == "identity" else node.children[0]
        assert other.conclusion == node.conclusion, "identity-fed cut must be redundant"
        p = p.replace_at(path, other)


def _raise_contractions(p: Proof) -> Proof:
    while True:
        paths = _find_nodes(
            p,
            lambda n: n.rule in R.CONTRACTION_NAMES and n.children[0].rule == "cut",
        )
        if not paths:
            return p
        path = paths[0]
        node = p.node_at(path)
        cutnode = node.children[0]
        x, c1, c2 = _cut_atom(cutnode)
        cside = "left" if node.rule == "contraction-left" else "right"
        y = P._multiset_diff(getattr(cutnode.conclusion, cside), getattr(node.conclusion, cside))[0]
        # contracting inside a premise is possible whenever it holds the pair;
        # the cut consumes at most one occurrence, which a pair survives
        count1 = getattr(c1.conclusion, cside).count(y)
        count2 = getattr(c2.conclusion, cside).count(y)
        if count1 >= 2:
            c1b = P.structural(node.rule, [c1], c1.conclusion.remove_one(y, cside))
            repl = P.structural("cut", [c1b, c2], node.conclusion)
        elif count2 >= 2:
            c2b = P.structural(node.rule, [c2], c2.conclusion.remove_one(y, cside))
            repl = P.structural("cut", [c1, c2b], node.conclusion)
        else:
            raise RefutationShapeError(
                "contraction merges occurrences from both cut premises; "
                "no contraction-then-cut reshaping exists for this proof"
            )
        p = p.replace_at(path, repl)


def _assert_contraction_then_cut(p: Proof) -> None:
    # branch order leaf-to-root must be contractions first, cuts second
    def visit(node: Proof, under_contraction: bool) -> None:
        if node.rule == "cut" and under_contraction:
            raise RefutationShapeError("cut above a contraction survived reshaping")
        under = under_contraction or node.rule in R.CONTRACTION_NAMES
        for c in node.children:
            visit(c, under)

    visit(p, False)


# ---------------------------------------------------------------------------
# Identity/Cut separation
# ---------------------------------------------------------------------------


def separate_identity_cut(p: Proof) -> Proof:
    """Rewrite a normalized GCL proof so no branch contains both Identity and Cut."""
    if not (P.is_structurally_atomic(p) and P.is_analytic_synthetic(p)):
        raise RewriteError("separate_identity_cut requires a normalized proof")
    while True:
        target = _find_identity_cut(p)
        if target is None:
            _assert_separated(p)
            return p
        path, idx, ident_atom = target
        node = p.node_at(path)
        x, c1, c2 = _cut_atom(node)
        chain = node.children[idx]
        other = node.children[1 - idx]
        if x == ident_atom:
            repl = P.weaken_to(other, node.conclusion)
        else:
            ident = P.structural("identity", [], Sequent([ident_atom], [ident_atom]))
            repl = P.weaken_to(ident, node.conclusion)
        p = p.replace_at(path, repl)


def _identity_chain_atom(node: Proof) -> Optional[Atom]:
    """The identity atom when the subtree is Identity under weakenings and
    contractions only."""
    while node.rule in R.COMMON_NAMES:
        node = node.children[0]
    if node.rule == "identity":
        return node.conclusion.left[0]  # type: ignore[return-value]
    return None


def _find_identity_cut(p: Proof) -> Optional[tuple[P.Path, int, Atom]]:
    for path, node in p.walk():
        if node.rule != "cut":
            continue
        for idx, child in enumerate(node.children):
            atom = _identity_chain_atom(child)
            if atom is not None:
                return path, idx, atom
    return None


def _assert_separated(p: Proof) -> None:
    def visit(node: Proof, cut_below: bool) -> None:
        if node.rule == "identity" and cut_below:
            raise RewriteError("identity above a cut survived separation")
        for c in node.children:
            visit(c, cut_below or node.rule == "cut")

    visit(p, False)
