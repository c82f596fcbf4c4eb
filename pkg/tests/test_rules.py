"""Rule matching, At-sets, rule classification and expansions."""

import random

import pytest

from supercut.matrices import builtin, holds_sequent
from supercut.rules import (
    CUT,
    EXPLOSIVE_CUT,
    IDENTITY,
    LIMITED_CUT_LEFT,
    WEAKENING_LEFT,
    at_set,
    balanced_expansions,
    builtin_calculus,
    canonical_rule,
    classify,
    hilbert_to_structural,
    match_logical,
    match_structural,
    parse_structural_rule,
    sigma_expand,
)
from supercut.syntax import (
    And,
    Atom,
    Neg,
    Or,
    Sequent,
    Substitution,
    SupercutError,
    parse_formula as pf,
    parse_sequent as ps,
)

from conftest import random_sequent

B = builtin("b")


class TestCalculi:
    def test_builtins(self):
        assert builtin_calculus("gb").specific == ()
        assert [r.name for r in builtin_calculus("glp").specific] == ["identity"]
        assert [r.name for r in builtin_calculus("gk").specific] == ["cut"]
        assert [r.name for r in builtin_calculus("getl").specific] == [
            "limited-cut-left",
            "limited-cut-right",
        ]
        assert [r.name for r in builtin_calculus("gecq").specific] == ["explosive-cut"]
        assert {r.name for r in builtin_calculus("gcl").specific} == {"identity", "cut"}
        with pytest.raises(SupercutError):
            builtin_calculus("gnope")

    def test_common_rules_always_available(self):
        table = builtin_calculus("gb").rule_map()
        assert {"weakening-left", "weakening-right", "contraction-left", "contraction-right"} <= set(table)

    def test_rule_text_roundtrip(self):
        for rule in (CUT, IDENTITY, LIMITED_CUT_LEFT, EXPLOSIVE_CUT, WEAKENING_LEFT):
            back = parse_structural_rule(rule.render(), rule.name)
            assert back.premises == rule.premises and back.conclusion == rule.conclusion
        assert CUT.render() == "G |- D, x ; x, G' |- D' => G, G' |- D, D'"


class TestMatchLogical:
    def test_and_right_intro(self):
        m = match_logical(
            "and-right-intro",
            [ps("g |- d, p"), ps("g |- d, q")],
            ps("g |- d, p & q"),
        )
        assert m is not None and m.principal == And(Atom("p"), Atom("q"))

    def test_neg_right_intro(self):
        assert match_logical("neg-right-intro", [ps("p, g |- d")], ps("g |- d, ~p")) is not None

    def test_wrong_connective(self):
        assert (
            match_logical(
                "and-right-intro",
                [ps("g |- d, p"), ps("g |- d, q")],
                ps("g |- d, p | q"),
            )
            is None
        )

    def test_arity(self):
        assert match_logical("and-right-intro", [ps("g |- d, p")], ps("g |- d, p & q")) is None

    def test_elims(self):
        assert match_logical("and-right-elim", [ps("|- p & q")], ps("|- p")) is not None
        assert match_logical("and-right-elim", [ps("|- p & q")], ps("|- q")) is not None
        assert match_logical("and-left-elim", [ps("p & q |- r")], ps("p, q |- r")) is not None
        assert match_logical("top-left-elim", [ps("T, p |- q")], ps("p |- q")) is not None
        assert match_logical("bot-right-elim", [ps("p |- q, F")], ps("p |- q")) is not None


class TestMatchStructural:
    def test_cut_instance(self):
        m = match_structural(CUT, [ps("|- p"), ps("p |- q")], ps("|- q"))
        assert m is not None and m.atom_assignment["x"] == Atom("p")

    def test_identity_general_vs_atomic(self):
        concl = ps("p & q |- p & q")
        assert match_structural(IDENTITY, [], concl) is not None
        assert match_structural(IDENTITY, [], concl, atomic_only=True) is None
        assert match_structural(IDENTITY, [], ps("p |- p"), atomic_only=True) is not None

    def test_contraction_needs_duplicate(self):
        rule = parse_structural_rule("x, x, G |- D => x, G |- D", "contraction-left")
        assert match_structural(rule, [ps("p, p |- q")], ps("p |- q")) is not None
        assert match_structural(rule, [ps("p, r |- q")], ps("p |- q")) is None

    def test_collisions_allowed(self):
        # distinct schema atoms may take the same formula
        rule = parse_structural_rule("|- x ; y |- => x, G |- D, y")
        assert match_structural(rule, [ps("|- p"), ps("p |-")], ps("p |- p")) is not None

    def test_two_slots_one_side(self):
        m = match_structural(CUT, [ps("a |- b, p"), ps("p, c |- d")], ps("a, c |- b, d"))
        assert m is not None
        assert m.slot_assignment["G"] == (Atom("a"),)
        assert m.slot_assignment["G'"] == (Atom("c"),)


class TestAtSet:
    def test_examples(self):
        assert at_set(ps("|- p & q")) == {ps("|- p"), ps("|- q")}
        assert at_set(ps("p |- q")) == {ps("p |- q")}
        assert at_set(ps("~p |- q")) == {ps("|- q, p")}
        assert at_set(ps("g |- d, T")) == frozenset()
        assert at_set(ps("T |-")) == {Sequent()}
        assert at_set(ps("F, g |- d")) == frozenset()
        assert at_set(ps("|- p | p")) == {Sequent((), (Atom("p"), Atom("p")))}

    def test_confluence_random_orders(self, rng):
        for _ in range(60):
            s = random_sequent(rng, ["p", "q", "r"], 3)
            base = at_set(s)
            for _ in range(5):
                seed = rng.randint(0, 10**9)
                chooser = lambda cands, r=random.Random(seed): r.randrange(len(cands))
                assert at_set(s, chooser) == base

    def test_semantic_faithfulness(self, rng):
        for _ in range(80):
            s = random_sequent(rng, ["p", "q", "r"], 3)
            members = at_set(s)
            for a in members:
                assert holds_sequent(B, [s], a)
            assert holds_sequent(B, members, s)


class TestClassification:
    def test_generalized_cuts(self):
        assert classify(LIMITED_CUT_LEFT).is_generalized_cut
        assert classify(EXPLOSIVE_CUT).is_generalized_cut
        cut = classify(CUT)
        assert cut.is_generalized_cut and not cut.introduces_new_variables
        assert cut.cut_formulas == {"x"}

    def test_identity_not_generalized(self):
        ident = classify(IDENTITY)
        assert not ident.is_generalized_cut
        assert ident.introduces_new_variables

    def test_kleq_rule_not_generalized(self):
        rule = parse_structural_rule("G |- D, x ; x, G |- D => y, G |- D, y")
        assert not classify(rule).is_generalized_cut


class TestSigmaExpand:
    def test_limited_cut_conjunction_image(self):
        ground = parse_structural_rule("|- p ; p, r |- s => r |- s")
        sigma = Substitution({"p": pf("p & q")})
        out = sigma_expand(ground, sigma)
        assert len(out) == 1
        rule = next(iter(out))
        assert rule.render() == "|- p ; |- q ; p, q, r |- s => r |- s"

    def test_identity_sigma(self):
        out = sigma_expand(EXPLOSIVE_CUT, Substitution({}))
        assert len(out) == 1
        assert next(iter(out)).schema_key() == EXPLOSIVE_CUT.schema_key()

    def test_explosive_cut_or(self):
        out = sigma_expand(EXPLOSIVE_CUT, Substitution({"x": pf("p | q")}))
        assert len(out) == 1
        rule = next(iter(out))
        assert rule.render() == "|- p, q ; p |- ; q |- => |-"

    def test_with_ground(self):
        out = sigma_expand(
            LIMITED_CUT_LEFT, Substitution({"p": pf("p & q")}), ground={"x": "p"}
        )
        (rule,) = out
        assert rule.render() == "|- p ; |- q ; p, q, G |- D => G |- D"


class TestBalancedExpansions:
    def test_depth_zero_is_the_rule_itself(self):
        out = balanced_expansions(LIMITED_CUT_LEFT, ["p", "q"], 0)
        assert out == {canonical_rule(LIMITED_CUT_LEFT)}

    def test_depth_one_contains_golden_expansions(self):
        out = balanced_expansions(LIMITED_CUT_LEFT, ["p", "q", "r", "s"], 1)
        wanted = canonical_rule(parse_structural_rule("|- x0 ; |- x1 ; x0, x1, G |- D => G |- D"))
        assert wanted.schema_key() in {r.schema_key() for r in out}
        out2 = balanced_expansions(EXPLOSIVE_CUT, ["p", "q"], 1)
        wanted2 = canonical_rule(parse_structural_rule("|- x0, x1 ; x0 |- ; x1 |- => |-"))
        assert wanted2.schema_key() in {r.schema_key() for r in out2}

    def test_expansions_remain_generalized_cuts(self):
        for base in (LIMITED_CUT_LEFT, EXPLOSIVE_CUT, CUT):
            assert classify(base).is_generalized_cut
            for r in balanced_expansions(base, ["p", "q"], 1):
                assert classify(r).is_generalized_cut, r.render()

    def test_expansions_semantically_valid(self, rng):
        # every expansion of a rule valid in its logic stays valid there
        pairs = [(LIMITED_CUT_LEFT, "etl"), (EXPLOSIVE_CUT, "ecq"), (CUT, "k")]
        for base, logic in pairs:
            spec = builtin(logic)
            for rule in sorted(balanced_expansions(base, ["p", "q"], 1), key=lambda r: r.name):
                subst = {a: Atom(rng.choice(["p", "q"])) for a in rule.schema_atoms()}
                ctx_l = [Atom(rng.choice(["p", "q"]))] if rng.random() < 0.5 else []
                ctx_r = [Atom(rng.choice(["p", "q"]))] if rng.random() < 0.5 else []

                def inst(schema):
                    left = [subst[a] for a in schema.atoms_left]
                    right = [subst[a] for a in schema.atoms_right]
                    if schema.slots_left:
                        left += ctx_l
                    if schema.slots_right:
                        right += ctx_r
                    return Sequent(left, right)

                prems = [inst(s) for s in rule.premises]
                assert holds_sequent(spec, prems, inst(rule.conclusion)), rule.render()


class TestHilbertToStructural:
    def test_lp_ecq_rule(self):
        out = hilbert_to_structural([pf("p & ~p")], pf("q | ~q"))
        assert {r.render() for r in out} == {"p |- ; |- p => q |- q"}

    def test_kleq_rule_grounded(self):
        out = hilbert_to_structural([pf("(p & ~p) | r")], pf("(q | ~q) | r"))
        assert {r.render() for r in out} == {"p |- r ; |- p, r => q |- q, r"}

    def test_explosive(self):
        out = hilbert_to_structural([pf("p"), pf("~p")], None)
        assert {r.render() for r in out} == {"|- p ; p |- => |-"}
        # which is exactly the Explosive Cut pattern
        (rule,) = out
        assert canonical_rule(rule).schema_key() == canonical_rule(EXPLOSIVE_CUT).schema_key()

    def test_oracle_equivalence(self):
        # the structural rules are equivalent to the Hilbert rule under tau:
        # their premises are interderivable with rho(premise) and the set of
        # their conclusions is interderivable with rho(conclusion)
        from supercut.syntax import rho

        def to_sequent(schema):
            return Sequent(
                (Atom(a) for a in schema.atoms_left), (Atom(a) for a in schema.atoms_right)
            )

        prem, concl = pf("p & ~p"), pf("q | ~q")
        rules = hilbert_to_structural([prem], concl)
        structural_premises = [to_sequent(s) for s in next(iter(rules)).premises]
        targets = [to_sequent(r.conclusion) for r in rules]
        for s in structural_premises:
            assert holds_sequent(B, [rho(prem)], s)
        assert holds_sequent(B, structural_premises, rho(prem))
        for t in targets:
            assert holds_sequent(B, [rho(concl)], t)
        assert holds_sequent(B, targets, rho(concl))
