"""Proof rewriting passes: expansion, reordering, subformula enforcement,
cut elimination, refutation reshaping, identity/cut separation."""

import pytest

from supercut.engine import derives
from supercut.proofs import (
    Proof,
    check,
    has_subformula_property,
    is_analytic_synthetic,
    is_elim,
    is_intro,
    is_structurally_atomic,
    logical,
    premise,
    structural,
)
from supercut.rewrite import (
    RefutationShapeError,
    RewriteError,
    RewriteTrace,
    cut_on,
    eliminate_cuts,
    enforce_subformula,
    expand_structural,
    identity_proof,
    make_analytic_synthetic,
    normalize,
    replay_trace,
    separate_identity_cut,
    simplify_refutation,
    weaken_left_by,
)
from supercut.rules import builtin_calculus
from supercut.syntax import Sequent, parse_formula as pf, parse_sequent as ps

from conftest import random_sequent

GB = builtin_calculus("gb")
GK = builtin_calculus("gk")
GCL = builtin_calculus("gcl")


class TestExpandStructural:
    def test_cut_on_conjunction(self):
        p1 = premise(ps("|- p & q"), 0)
        p2 = premise(ps("p & q |- r"), 1)
        node = structural("cut", [p1, p2], ps("|- r"))
        prems = [ps("|- p & q"), ps("p & q |- r")]
        out = expand_structural(node, GK)
        assert check(out, GK, prems).ok
        assert is_structurally_atomic(out)
        cut_forms = {
            n.conclusion
            for _, n in out.walk()
            if n.rule == "cut"
        }
        assert out.conclusion == node.conclusion
        # only atomic cuts remain
        for _, n in out.walk():
            if n.rule == "cut":
                assert n.conclusion.is_atomic()

    def test_weakening_by_conjunction(self):
        base = premise(ps("|- r"), 0)
        node = structural("weakening-left", [base], ps("p & q |- r"))
        out = expand_structural(node, GB)
        assert check(out, GB, [ps("|- r")]).ok
        assert is_structurally_atomic(out)
        assert out.rule == "and-left-intro"
        assert not any(is_elim(n.rule) for _, n in out.walk())

    def test_already_atomic_is_fixpoint(self):
        node = structural("cut", [premise(ps("|- p"), 0), premise(ps("p |- q"), 1)], ps("|- q"))
        assert expand_structural(node, GK) == node

    def test_identity_on_compound(self):
        node = structural("identity", [], ps("p & ~q |- p & ~q"))
        out = expand_structural(node, GCL)
        assert check(out, GCL, []).ok and is_structurally_atomic(out)
        assert out.conclusion == node.conclusion

    def test_helpers_produce_checked_proofs(self):
        f = pf("(p | ~q) & r")
        idp = identity_proof(f)
        assert check(idp, GCL, []).ok and idp.conclusion == Sequent([f], [f])
        w = weaken_left_by(premise(ps("|- s"), 0), f)
        assert check(w, GCL, [ps("|- s")]).ok
        c = cut_on(premise(ps("|- s," + " (p | ~q) & r"), 0), premise(ps("(p | ~q) & r |- t"), 1), f)
        assert check(c, GCL, [ps("|- s, (p | ~q) & r"), ps("(p | ~q) & r |- t")]).ok


class TestMakeAnalyticSynthetic:
    def test_principal_cancellation(self):
        i = logical("and-right-intro", [premise(ps("|- p"), 0), premise(ps("|- q"), 1)], ps("|- p & q"))
        e = logical("and-right-elim", [i], ps("|- p"))
        out = make_analytic_synthetic(e)
        assert out == premise(ps("|- p"), 0)

    def test_left_intro_cancellation(self):
        i = logical("and-left-intro", [premise(ps("p, q |- r"), 0)], ps("p & q |- r"))
        e = logical("and-left-elim", [i], ps("p, q |- r"))
        out = make_analytic_synthetic(e)
        assert out == premise(ps("p, q |- r"), 0)

    def test_side_permutation(self):
        base = premise(ps("p & q |- r, s"), 0)
        i = logical("or-right-intro", [base], ps("p & q |- r | s"))
        e = logical("and-left-elim", [i], ps("p, q |- r | s"))
        out = make_analytic_synthetic(e)
        assert is_analytic_synthetic(out)
        assert out.conclusion == e.conclusion
        assert check(out, GB, [ps("p & q |- r, s")]).ok

    def test_already_ordered_unchanged(self):
        e = logical("and-right-elim", [premise(ps("|- p & q"), 0)], ps("|- p"))
        i = logical("or-right-intro", [structural("weakening-right", [e], ps("|- p, r"))], ps("|- p | r"))
        assert make_analytic_synthetic(i) == i


class TestEnforceSubformula:
    def test_foreign_atom_renamed(self):
        prems = [ps("p |- p")]
        w1 = structural("weakening-right", [premise(prems[0], 0)], ps("p |- p, r"))
        w2 = structural("weakening-left", [premise(prems[0], 0)], ps("r, p |- p"))
        cut = structural("cut", [w1, w2], ps("p, p |- p, p"))
        c1 = structural("contraction-left", [cut], ps("p |- p, p"))
        c2 = structural("contraction-right", [c1], ps("p |- p"))
        assert not has_subformula_property(c2, prems)
        out = enforce_subformula(c2, prems, ps("p |- p"))
        assert has_subformula_property(out, prems)
        assert check(out, GK, prems).ok
        assert out.conclusion == ps("p |- p")

    def test_noop_when_clean(self):
        node = premise(ps("p |- p"), 0)
        assert enforce_subformula(node, [ps("p |- p")], ps("p |- p")) is node

    def test_constant_only_rebuild(self):
        res = derives([], ps("|- T | F"), GB)
        out = enforce_subformula(res.proof, [], ps("|- T | F"))
        assert check(out, GB, []).ok and out.conclusion == ps("|- T | F")


class TestNormalize:
    def test_engine_output_is_fixpoint(self, rng):
        for _ in range(15):
            prems = [random_sequent(rng, ["p", "q"], 2)]
            goal = random_sequent(rng, ["p", "q"], 2)
            res = derives(prems, goal, GK)
            if res.proof is None or res.proof.rule == "premise":
                continue
            n = normalize(res.proof, GK, prems, goal)
            assert n == res.proof

    def test_trace_replays(self):
        p1 = premise(ps("|- p & q"), 0)
        p2 = premise(ps("p & q |- r"), 1)
        node = structural("cut", [p1, p2], ps("|- r"))
        prems = [ps("|- p & q"), ps("p & q |- r")]
        trace = RewriteTrace()
        out = normalize(node, GK, prems, ps("|- r"), trace)
        assert trace.entries
        assert replay_trace(node, GK, prems, ps("|- r"), trace) == out

    def test_rejects_bad_input(self):
        node = structural("identity", [], ps("p |- p"))
        with pytest.raises(RewriteError):
            normalize(node, GB, [], ps("p |- p"))


class TestEliminateCuts:
    def test_lem_proof(self):
        res = derives([], ps("|- p | ~p"), GCL)
        n = normalize(res.proof, GCL, [], ps("|- p | ~p"))
        out = eliminate_cuts(n)
        rules = {x.rule for _, x in out.walk()}
        assert "cut" not in rules
        assert not any(is_elim(r) for r in rules)
        assert check(out, GCL, []).ok

    def test_commutativity_taut(self):
        goal = ps("|- ~(p & q) | (q & p)")
        res = derives([], goal, GCL)
        out = eliminate_cuts(normalize(res.proof, GCL, [], goal))
        assert check(out, GCL, []).ok
        assert all(x.rule != "cut" and not is_elim(x.rule) for _, x in out.walk())

    def test_requires_empty_premises(self):
        res = derives([ps("|- p")], ps("|- p | q"), GCL)
        with pytest.raises(RewriteError):
            eliminate_cuts(res.proof)


class TestSimplifyRefutation:
    def test_gratuitous_weakening_removed(self):
        p1 = premise(ps("|- p"), 0)
        w = structural("weakening-right", [p1], ps("|- p, p"))
        cut1 = structural("cut", [w, premise(ps("p |-"), 1)], ps("|- p"))
        cut2 = structural("cut", [cut1, premise(ps("p |-"), 1)], Sequent())
        out = simplify_refutation(cut2)
        assert out == structural("cut", [premise(ps("|- p"), 0), premise(ps("p |-"), 1)], Sequent())

    def test_contraction_then_cut_unchanged(self):
        pa = premise(ps("|- p, p"), 0)
        ca = structural("contraction-right", [pa], ps("|- p"))
        cb = structural("cut", [ca, premise(ps("p |-"), 1)], Sequent())
        assert simplify_refutation(cb) == cb

    def test_contraction_permutes_above_cut(self):
        pa = premise(ps("|- p, q, q"), 0)
        pb = premise(ps("p |-"), 1)
        cut = structural("cut", [pa, pb], ps("|- q, q"))
        c = structural("contraction-right", [cut], ps("|- q"))
        qb = premise(ps("q |-"), 2)
        final = structural("cut", [c, qb], Sequent())
        prems = [ps("|- p, q, q"), ps("p |-"), ps("q |-")]
        assert check(final, GCL, prems).ok
        out = simplify_refutation(final)
        assert check(out, GCL, prems).ok and out.conclusion == Sequent()
        # contraction now sits directly on the premise side
        for path, node in out.walk():
            if node.rule == "contraction-right":
                assert node.children[0].rule == "premise"

    def test_contraction_on_the_cut_atom_permutes(self):
        # contracted atom equals the cut atom; the pair lives in one premise
        pa = premise(ps("|- p, p"), 0)
        pb = premise(ps("p |- p"), 1)
        cut = structural("cut", [pa, pb], ps("|- p, p"))
        c = structural("contraction-right", [cut], ps("|- p"))
        final = structural("cut", [c, premise(ps("p |-"), 2)], Sequent())
        prems = [ps("|- p, p"), ps("p |- p"), ps("p |-")]
        assert check(final, GCL, prems).ok
        out = simplify_refutation(final)
        assert check(out, GCL, prems).ok and out.conclusion == Sequent()

    def test_merge_contraction_raises(self):
        # contraction of occurrences coming from both cut premises cannot be
        # permuted upward; the reshaping reports it honestly
        pa = premise(ps("q |- p"), 0)
        pb = premise(ps("p, q |-"), 1)
        cut = structural("cut", [pa, pb], ps("q, q |-"))
        c = structural("contraction-left", [cut], ps("q |-"))
        final = structural("cut", [premise(ps("|- q"), 2), c], Sequent())
        with pytest.raises(RefutationShapeError):
            simplify_refutation(final)

    def test_identity_fed_cut_dropped(self):
        ident = structural("identity", [], ps("p |- p"))
        other = premise(ps("p, p |-"), 0)
        cut1 = structural("cut", [ident, other], ps("p, p |-"))
        chain = structural("cut", [premise(ps("|- p"), 1), cut1], ps("p |-"))
        final = structural("cut", [premise(ps("|- p"), 1), chain], Sequent())
        out = simplify_refutation(final)
        assert all(n.rule != "identity" for _, n in out.walk())


class TestSeparateIdentityCut:
    def test_weakened_identity_cut_on_other_atom(self):
        ident = structural("identity", [], ps("p |- p"))
        w = structural("weakening-right", [ident], ps("p |- p, q"))
        other = premise(ps("q, p |- p"), 0)
        cq = structural("cut", [w, other], ps("p, p |- p, p"))
        out = separate_identity_cut(cq)
        assert check(out, GCL, [ps("q, p |- p")]).ok
        assert out.conclusion == cq.conclusion
        for _, node in out.walk():
            assert node.rule != "cut"

    def test_cut_free_unchanged(self):
        node = structural("identity", [], ps("p |- p"))
        assert separate_identity_cut(node) == node

    def test_identity_free_unchanged(self):
        node = structural("cut", [premise(ps("|- p"), 0), premise(ps("p |- q"), 1)], ps("|- q"))
        assert separate_identity_cut(node) == node

    def test_no_branch_with_both(self, rng):
        for _ in range(20):
            prems = [random_sequent(rng, ["p", "q"], 2)]
            goal = random_sequent(rng, ["p", "q"], 2)
            res = derives(prems, goal, GCL)
            if res.proof is None or res.proof.rule == "premise":
                continue
            out = separate_identity_cut(res.proof)
            assert check(out, GCL, prems).ok

            def branch_rules(node, acc):
                acc = acc | {node.rule}
                if not node.children:
                    yield acc
                for c in node.children:
                    yield from branch_rules(c, acc)

            for rules in branch_rules(out, frozenset()):
                assert not ({"identity", "cut"} <= rules)
