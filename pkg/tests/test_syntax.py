"""Formula/sequent syntax, polarity, substitutions, and the transformers."""

import pytest
from hypothesis import given, settings, strategies as st

from supercut.matrices import B4, builtin, holds
from supercut.syntax import (
    And,
    Atom,
    BOT,
    FreshNames,
    Neg,
    Or,
    ParseError,
    Sequent,
    Substitution,
    TOP,
    apply_subst,
    atoms_of,
    decompose_substitution,
    is_atomic_subst,
    is_balanced,
    is_balanced_subst,
    is_non_conflicting,
    parse_formula,
    parse_sequent,
    polarity,
    render,
    rho,
    set_to_formula,
    subformulas,
    tau,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


formulas = st.recursive(
    st.sampled_from([p, q, r, Atom("s1"), TOP, BOT]),
    lambda sub: st.one_of(
        sub.map(Neg),
        st.tuples(sub, sub).map(lambda t: And(*t)),
        st.tuples(sub, sub).map(lambda t: Or(*t)),
    ),
    max_leaves=12,
)

sequents = st.tuples(
    st.lists(formulas, max_size=3), st.lists(formulas, max_size=3)
).map(lambda t: Sequent(*t))


class TestParser:
    def test_examples(self):
        assert parse_formula("~p | q") == Or(Neg(p), q)
        assert parse_formula("T") == TOP
        assert parse_formula("(p & ~p) | (q & ~q)") == Or(And(p, Neg(p)), And(q, Neg(q)))

    def test_precedence(self):
        assert parse_formula("~p & q | r") == Or(And(Neg(p), q), r)
        assert parse_formula("p & q & r") == And(And(p, q), r)
        assert parse_formula("p | (q | r)") == Or(p, Or(q, r))

    def test_errors_carry_position(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p & ")
        assert exc.value.position == 4
        with pytest.raises(ParseError):
            parse_formula("p q")
        with pytest.raises(ParseError):
            parse_formula("(p")
        with pytest.raises(ParseError):
            parse_sequent("p |- q |- r")

    @given(formulas)
    def test_roundtrip(self, f):
        assert parse_formula(render(f)) == f

    @given(sequents)
    def test_sequent_roundtrip(self, s):
        assert parse_sequent(s.render()) == s

    def test_sequent_rendering(self):
        assert parse_sequent("|- p").render() == "|- p"
        assert parse_sequent("p |-").render() == "p |-"
        assert parse_sequent("|-").render() == "|-"
        assert Sequent().is_empty()


class TestSequent:
    def test_multiset_equality(self):
        assert parse_sequent("p, q |- r") == parse_sequent("q, p |- r")
        assert parse_sequent("p, p |- r") != parse_sequent("p |- r")

    def test_atomic(self):
        assert parse_sequent("p, q |- r").is_atomic()
        assert not parse_sequent("T |- p").is_atomic()
        assert Sequent().is_atomic()

    def test_support(self):
        assert parse_sequent("p, p |- q").support() == parse_sequent("p |- q")


class TestAtomsAndSubformulas:
    def test_atoms(self):
        assert atoms_of(Or(Neg(p), q)) == {"p", "q"}
        assert atoms_of(TOP) == frozenset()
        assert atoms_of(parse_sequent("p, q |- r")) == {"p", "q", "r"}

    def test_subformulas(self):
        assert subformulas(And(p, q)) == {And(p, q), p, q}
        assert subformulas(Neg(TOP)) == {Neg(TOP), TOP}
        assert subformulas(p) == {p}


class TestPolarity:
    def test_mixed_polarity_example(self):
        rep = polarity(Or(Neg(p), q))
        assert rep.pair("p") == (False, True)
        assert rep.pair("q") == (True, False)

    def test_both_and_double_negation(self):
        assert polarity(And(p, Neg(p))).pair("p") == (True, True)
        assert polarity(Neg(Neg(p))).pair("p") == (True, False)
        assert polarity(TOP).pair("p") == (False, False)

    @given(formulas)
    def test_negation_swaps(self, f):
        rep, neg_rep = polarity(f), polarity(Neg(f))
        for a in atoms_of(f):
            pp, nn = rep.pair(a)
            assert neg_rep.pair(a) == (nn, pp)

    def test_balanced(self):
        assert is_balanced(Or(Neg(p), q))
        assert not is_balanced(And(p, Neg(p)))
        s = Substitution({"p": And(Atom("a"), Atom("b")), "q": Neg(Atom("c"))})
        assert is_non_conflicting(s) and is_balanced_subst(s)
        assert not is_non_conflicting(Substitution({"p": Atom("a"), "q": Atom("a")}))
        assert is_atomic_subst(Substitution({"p": q}))
        assert not is_atomic_subst(Substitution({"p": And(p, q)}))


class TestSubstitution:
    def test_examples(self):
        s = Substitution({"p": And(p, q)})
        assert apply_subst(s, rho(p)) == Sequent((), (And(p, q),))
        assert apply_subst(Substitution({}), Neg(p)) == Neg(p)
        assert apply_subst(Substitution({"p": q}), Neg(p)) == Neg(q)

    @given(sequents)
    def test_commutes_with_tau(self, s):
        # canonical ordering inside tau is not substitution-stable, so the
        # commutation holds up to interderivability over B4
        sub = Substitution({"p": And(q, r), "q": Neg(p)})
        lhs = tau(apply_subst(sub, s))
        rhs = apply_subst(sub, tau(s))
        spec = builtin("b")
        assert holds(spec, [lhs], rhs) and holds(spec, [rhs], lhs)

    def test_commutes_with_tau_structurally_when_order_stable(self):
        s = parse_sequent("p, q |- r")
        sub = Substitution({"r": And(q, r)})
        assert tau(apply_subst(sub, s)) == apply_subst(sub, tau(s))

    @given(st.dictionaries(st.sampled_from(["p", "q", "r"]), formulas, max_size=3))
    def test_decomposition(self, mapping):
        s = Substitution(mapping)
        relevant = {"p", "q", "r"}
        bnc, sa = decompose_substitution(s, relevant, FreshNames())
        assert is_balanced_subst(bnc) and is_non_conflicting(bnc)
        assert is_atomic_subst(sa)
        for a in relevant:
            assert apply_subst(sa, apply_subst(bnc, Atom(a))) == s(a)

    def test_decomposition_example(self):
        s = Substitution({"p": And(Atom("a"), Neg(Atom("a")))})
        bnc, sa = decompose_substitution(s, {"p"}, FreshNames())
        img = bnc("p")
        assert isinstance(img, And) and isinstance(img.right, Neg)
        assert img.left != img.right.arg  # the two polarities got distinct atoms
        assert sa(img.left.name) == Atom("a")
        assert apply_subst(sa, img) == s("p")

    def test_shared_image_atoms_split(self):
        s = Substitution({"p": q, "r": q})
        bnc, sa = decompose_substitution(s, {"p", "r"}, FreshNames())
        assert bnc("p") != bnc("r")
        assert apply_subst(sa, bnc("p")) == q and apply_subst(sa, bnc("r")) == q


class TestTransformers:
    def test_tau(self):
        assert tau(parse_sequent("p, q |- r")) == Or(Neg(And(p, q)), r)
        assert tau(Sequent()) == Or(Neg(TOP), BOT)
        assert tau(rho(p)) == Or(Neg(TOP), p)

    def test_rho(self):
        assert rho(p) == Sequent((), (p,))
        assert rho(TOP) == Sequent((), (TOP,))
        assert rho(And(p, q)) == Sequent((), (And(p, q),))

    def test_set_to_formula(self):
        assert set_to_formula([parse_sequent("p |- q")]) == Or(Neg(p), q)
        assert set_to_formula([]) == TOP
        f = set_to_formula([parse_sequent("|- p"), parse_sequent("p |-")])
        # equivalent over B4 to p & ~p, by the matrix oracle
        target = And(p, Neg(p))
        assert holds(builtin("b"), [f], target) and holds(builtin("b"), [target], f)

    def test_set_to_formula_order_insensitive(self):
        a, b = parse_sequent("|- p"), parse_sequent("p |- q")
        assert set_to_formula([a, b]) == set_to_formula([b, a])
