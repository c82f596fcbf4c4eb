"""Interpolant extraction from normalized proofs, Milne's split, and the
oracle-backed verifier for interpolation claims."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from . import engine as E
from . import matrices as M
from . import proofs as P
from . import rewrite as RW
from . import rules as R
from .proofs import Proof
from .syntax import (
    Atom,
    BOT,
    Formula,
    Neg,
    Sequent,
    SupercutError,
    atoms_of,
    rho,
    sequent_key,
    set_to_formula,
)


class InterpolationError(SupercutError):
    pass


class EntailmentError(InterpolationError):
    pass


@dataclass(frozen=True)
class InterpolationResult:
    interpolant_sequents: tuple[Sequent, ...]
    interpolant_formula: Formula
    left_logic: str
    right_logic: str
    left_certificates: tuple  # one Proof per interpolant sequent, or ("oracle",)
    right_certificate: object  # Proof or "oracle"
    verified: bool


CALC_TO_LOGIC = {"gb": "b", "glp": "lp", "gk": "k", "getl": "etl", "gecq": "ecq", "gcl": "cl"}


def _base_name(calc: R.Calculus) -> str:
    return calc.name.split("+")[0]


# ---------------------------------------------------------------------------
# Critical nodes and the separating set
# ---------------------------------------------------------------------------


def _node_paths(
    p: Proof, forbid_identity: bool = False
) -> list[P.Path]:
    """Paths whose subtree has no introductions (nor Identity, for the Milne
    variant), whose path to the root is introductions only, and whose subtree
    reaches at least one premise leaf."""
    info: dict[P.Path, tuple[bool, bool]] = {}

    def scan(node: Proof, path: P.Path) -> tuple[bool, bool]:
        clean = not P.is_intro(node.rule)
        if forbid_identity and node.rule == "identity":
            clean = False
        has_premise = node.rule == "premise"
        for i, c in enumerate(node.children):
            sub_clean, sub_prem = scan(c, path + (i,))
            clean = clean and sub_clean
            has_premise = has_premise or sub_prem
        info[path] = (clean, has_premise)
        return info[path]

    scan(p, ())
    out: list[P.Path] = []

    def collect(node: Proof, path: P.Path, below_intro: bool) -> None:
        clean, has_premise = info[path]
        if below_intro and clean and has_premise:
            out.append(path)
        for i, c in enumerate(node.children):
            collect(c, path + (i,), below_intro and P.is_intro(node.rule))

    collect(p, (), True)
    return out


def critical_nodes(p: Proof) -> frozenset[Sequent]:
    """Sequents at nodes with only eliminations/structural steps above and
    only introductions below; requires a normalized proof."""
    if not (P.is_structurally_atomic(p) and P.is_analytic_synthetic(p)):
        raise InterpolationError("critical_nodes requires a normalized proof")
    return frozenset(p.node_at(path).conclusion for path in _node_paths(p))


# ---------------------------------------------------------------------------
# Foreign-atom pruning
# ---------------------------------------------------------------------------


def _delete_occurrence(node: Proof, side: str, atom: str) -> Proof:
    """Remove one occurrence of the atom from the node's conclusion together
    with its ancestor occurrences; weakenings bottom the recursion out."""
    target = Atom(atom)
    rule = node.rule
    assert target in getattr(node.conclusion, side), (node.conclusion.render(), side, atom)
    reduced = node.conclusion.remove_one(target, side)

    if rule in R.WEAKENING_NAMES:
        w, wside = RW._weakened_formula(node)
        if w == target and wside == side:
            return node.children[0]
        return Proof(reduced, rule, (_delete_occurrence(node.children[0], side, atom),))
    if rule in R.CONTRACTION_NAMES:
        cside = "left" if rule == "contraction-left" else "right"
        y = P._multiset_diff(getattr(node.children[0].conclusion, cside), getattr(node.conclusion, cside))[0]
        if y == target and cside == side:
            inner = _delete_occurrence(node.children[0], side, atom)
            return _delete_occurrence(inner, side, atom)
        return Proof(reduced, rule, (_delete_occurrence(node.children[0], side, atom),))
    if rule in R.AXIOM_RULES:
        return Proof(reduced, rule)
    if rule == "premise" or rule == "identity":
        raise InterpolationError(f"cannot prune {atom} through a {rule} node")
    if P.is_logical(rule):
        kids = tuple(_delete_occurrence(c, side, atom) for c in node.children)
        return Proof(reduced, rule, kids)
    # specific structural rule: the occurrence lives in a context slot
    return _delete_from_slot(node, side, atom)


def _delete_from_slot(node: Proof, side: str, atom: str) -> Proof:
    target = Atom(atom)
    # the rule schema is needed to locate the slot; all builtin-relevant
    # rules are resolvable from their serialized name
    schema = _schema_by_name(node.rule)
    m = R.match_structural(schema, [c.conclusion for c in node.children], node.conclusion)
    assert m is not None, node.rule
    slots = schema.conclusion.slots_left if side == "left" else schema.conclusion.slots_right
    slot = next((s for s in slots if target in m.slot_assignment.get(s, ())), None)
    if slot is None:
        raise InterpolationError(
            f"atom {atom} instantiates a schema position of {node.rule}; cannot prune"
        )
    kids = []
    for child_schema, child in zip(schema.premises, node.children):
        if slot in child_schema.slots_left or slot in child_schema.slots_right:
            kids.append(_delete_occurrence(child, side, atom))
        else:
            kids.append(child)
    return Proof(node.conclusion.remove_one(target, side), node.rule, tuple(kids))


_SCHEMA_CACHE: dict[str, R.StructuralRule] = {}


def _schema_by_name(name: str) -> R.StructuralRule:
    if not _SCHEMA_CACHE:
        for r in (R.IDENTITY, R.CUT, R.LIMITED_CUT_LEFT, R.LIMITED_CUT_RIGHT, R.EXPLOSIVE_CUT) + R.COMMON_RULES:
            _SCHEMA_CACHE[r.name] = r
    if name in _SCHEMA_CACHE:
        return _SCHEMA_CACHE[name]
    # expansion rules carry their schema in the name
    rule = R.parse_structural_rule(name)
    return R.StructuralRule(name, rule.premises, rule.conclusion)


def _prune_subproof(sub: Proof, keep_atoms: frozenset[str]) -> Proof:
    out = sub
    while True:
        foreign = sorted(atoms_of(out.conclusion) - keep_atoms)
        if not foreign:
            return out
        a = foreign[0]
        side = "left" if Atom(a) in out.conclusion.left else "right"
        out = _delete_occurrence(out, side, a)


def prune_foreign_atoms(p: Proof, premise_atoms: Iterable[str], calc: R.Calculus) -> Proof:
    """Delete ancestor trees of critical-node atoms outside the premises,
    restoring contexts with weakenings below each pruned node."""
    bad = [r.name for r in calc.specific if not R.classify(r).is_generalized_cut]
    if bad:
        raise InterpolationError(f"calculus contains non-generalized-cut rules: {', '.join(bad)}")
    keep = frozenset(premise_atoms)
    out = p
    for path in _node_paths(p):
        sub = p.node_at(path)
        pruned = _prune_subproof(sub, keep)
        out = out.replace_at(path, P.weaken_to(pruned, sub.conclusion))
    return out


# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------


def _interpolate_from_proof(
    proof: Proof,
    premises: Sequence[Sequent],
    eff_calc: R.Calculus,
    forbid_identity: bool = False,
) -> tuple[list[Sequent], list[Proof], Proof]:
    """Shared core: prune critical (or separating) nodes, return the pruned
    sequents, their subproofs, and the proof of the conclusion from them."""
    keep = frozenset().union(*(atoms_of(s) for s in premises)) if premises else frozenset()
    paths = _node_paths(proof, forbid_identity=forbid_identity)
    interp: list[Sequent] = []
    subs: list[Proof] = []
    rest = proof
    for path in paths:
        sub = proof.node_at(path)
        pruned = _prune_subproof(sub, keep)
        interp.append(pruned.conclusion)
        subs.append(pruned)
        leaf = P.premise(pruned.conclusion)
        rest = rest.replace_at(path, P.weaken_to(leaf, sub.conclusion))
    return interp, subs, rest


def interpolate_sequents(
    premises: Iterable[Sequent],
    conclusion: Sequent,
    calc: Union[str, R.Calculus],
    depth_bound: int = 2,
) -> InterpolationResult:
    """Interpolate S |- c through the critical nodes of a normalized proof.

    The calculus' specific rules must all be generalized cut rules; the
    result carries checkable proof certificates for both directions.
    """
    if isinstance(calc, str):
        calc = R.builtin_calculus(calc)
    prems = list(premises)
    res = E.derives(prems, conclusion, calc, depth_bound=depth_bound)
    if not res.verdict:
        raise EntailmentError("the premises do not derive the conclusion in this calculus")
    eff = res.calculus
    bad = [r.name for r in eff.specific if not R.classify(r).is_generalized_cut]
    if bad:
        raise InterpolationError(f"calculus contains non-generalized-cut rules: {', '.join(bad)}")
    proof = res.proof
    assert proof is not None
    if proof.rule == "premise":
        # the conclusion is itself a premise; it is its own interpolant
        interp = [conclusion]
        subs = [proof]
        rest = P.premise(conclusion)
    else:
        interp, subs, rest = _interpolate_from_proof(proof, prems, eff)
    ordered = sorted(set(interp), key=sequent_key)
    formula = set_to_formula(ordered)
    left_logic = CALC_TO_LOGIC[_base_name(eff)]
    var_ok = all(
        atoms_of(s) <= (frozenset().union(*(atoms_of(q) for q in prems)) if prems else frozenset())
        and atoms_of(s) <= atoms_of(conclusion)
        for s in ordered
    )
    oracle_left = all(M.holds_sequent(M.builtin(left_logic), prems, s) for s in ordered)
    oracle_right = M.holds_sequent(M.builtin("b"), ordered, conclusion)
    return InterpolationResult(
        tuple(ordered),
        formula,
        left_logic,
        "b",
        tuple(subs),
        rest,
        var_ok and oracle_left and oracle_right,
    )


def milne_interpolate(phi: Formula, psi: Formula) -> InterpolationResult:
    """Classical-logic interpolation split into a Kleene-valid left half and
    a Logic-of-Paradox-valid right half via the separating set."""
    if not M.holds(M.builtin("cl"), [phi], psi):
        raise EntailmentError("phi does not entail psi classically")
    res = E.derives([rho(phi)], rho(psi), R.builtin_calculus("gcl"))
    assert res.verdict and res.proof is not None
    proof = RW.separate_identity_cut(res.proof)
    interp, subs, rest = _interpolate_from_proof(proof, [rho(phi)], res.calculus, forbid_identity=True)
    ordered = sorted(set(interp), key=sequent_key)
    chi = set_to_formula(ordered)
    var_ok = atoms_of(chi) <= (atoms_of(phi) & atoms_of(psi))
    ok = var_ok and M.holds(M.builtin("k"), [phi], chi) and M.holds(M.builtin("lp"), [chi], psi)
    return InterpolationResult(tuple(ordered), chi, "k", "lp", tuple(subs), rest, ok)


def interpolate_formulas(phi: Formula, psi: Formula, logic_name: str) -> InterpolationResult:
    """Dispatch interpolation per logic: proof-theoretic for b/k/etl, dual
    route for lp, bottom-interpolant for explosive ecq, Milne split for cl."""
    name = logic_name.lower()
    if name in ("b", "k", "etl"):
        spec = M.builtin(name)
        if not M.holds(spec, [phi], psi):
            raise EntailmentError(f"phi does not entail psi in {name}")
        calc = {"b": "gb", "k": "gk", "etl": "getl"}[name]
        return interpolate_sequents([rho(phi)], rho(psi), calc)
    if name == "lp":
        if not M.holds(M.builtin("lp"), [phi], psi):
            raise EntailmentError("phi does not entail psi in lp")
        dual = interpolate_sequents([rho(Neg(psi))], rho(Neg(phi)), "gk")
        chi = Neg(dual.interpolant_formula)
        ok = (
            atoms_of(chi) <= (atoms_of(phi) & atoms_of(psi))
            and M.holds(M.builtin("b"), [phi], chi)
            and M.holds(M.builtin("lp"), [chi], psi)
        )
        return InterpolationResult((rho(chi),), chi, "b", "lp", ("oracle",), "oracle", ok)
    if name == "ecq":
        if M.holds(M.builtin("ecq"), [phi], None):
            chi = BOT
            ok = M.holds(M.builtin("ecq"), [phi], chi) and M.holds(M.builtin("b"), [chi], psi)
            return InterpolationResult((rho(chi),), chi, "ecq", "b", ("oracle",), "oracle", ok)
        if not M.holds(M.builtin("ecq"), [phi], psi):
            raise EntailmentError("phi does not entail psi in ecq")
        base = interpolate_sequents([rho(phi)], rho(psi), "gb")
        return InterpolationResult(
            base.interpolant_sequents,
            base.interpolant_formula,
            "ecq",
            "b",
            base.left_certificates,
            base.right_certificate,
            base.verified,
        )
    if name == "cl":
        return milne_interpolate(phi, psi)
    raise InterpolationError(f"interpolation is not supported for logic {logic_name}")


def verify_interpolant(
    phi: Formula,
    chi: Formula,
    psi: Formula,
    left: Union[str, M.LogicSpec],
    right: Union[str, M.LogicSpec],
) -> bool:
    """Variable condition plus both oracle entailments."""
    l = M.builtin(left) if isinstance(left, str) else left
    r = M.builtin(right) if isinstance(right, str) else right
    if not atoms_of(chi) <= (atoms_of(phi) & atoms_of(psi)):
        return False
    return M.holds(l, [phi], chi) and M.holds(r, [chi], psi)
