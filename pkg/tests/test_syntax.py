import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolkit import syntax
from boolkit.errors import ParseError, SignatureError
from boolkit.syntax import (
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    Not,
    Or,
    Signature,
    canon,
    nnf,
    nnf_step,
    parse,
    qe_axiom,
    qe_transform,
    render,
    subsentences,
    substitute,
)

from conftest import random_sentence

SIG = Signature(relations={"R": 2}, base_constants={"c0", "c1", "cw"}, fresh_constants={"e"})


class TestParse:
    def test_empty_conjunction(self):
        assert parse("(and)", SIG) == And(())

    def test_disjunction_of_equalities(self):
        f = parse("(or (= cw c0) (= cw c1))", SIG)
        assert f == Or((Eq("cw", "c0"), Eq("cw", "c1")))

    def test_quantified(self):
        f = parse("(forall (?x) (or (= ?x c0)))", SIG)
        assert f == Forall(("?x",), Or((Eq("?x", "c0"),)))

    def test_relation_arity_checked(self):
        with pytest.raises(ParseError):
            parse("(R c0)", SIG)

    def test_undeclared_symbol(self):
        with pytest.raises(ParseError) as err:
            parse("(= c0 zz)", SIG)
        assert err.value.position > 0

    def test_syntax_error_position(self):
        with pytest.raises(ParseError):
            parse("(and (= c0 c1)", SIG)

    def test_duplicate_quantifier_variable(self):
        with pytest.raises(ParseError):
            parse("(exists (?x ?x) (= ?x c0))", SIG)

    def test_trailing_input(self):
        with pytest.raises(ParseError):
            parse("(and) (and)", SIG)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_render_parse_roundtrip(seed, depth):
    rng = random.Random(seed)
    f = random_sentence(SIG, rng, depth)
    assert parse(render(f), SIG) == f


class TestSubstitute:
    def test_basic(self):
        assert substitute(Eq("?x", "c0"), {"?x": "c1"}) == Eq("c1", "c0")

    def test_bound_occurrence_untouched(self):
        f = Forall(("?x",), Eq("?x", "c0"))
        assert substitute(f, {"?x": "c1"}) == f

    def test_partial_binding(self):
        assert substitute(Atom("R", ("?x", "?y")), {"?x": "c0"}) == Atom("R", ("c0", "?y"))


class TestNnfStep:
    def test_double_negation(self):
        assert nnf_step(Not(Eq("c0", "c1"))) == Eq("c0", "c1")

    def test_conjunction_dualizes(self):
        a, b = Eq("c0", "c1"), Atom("R", ("c0", "c1"))
        assert nnf_step(And((a, b))) == Or((Not(a), Not(b)))

    def test_forall_dualizes(self):
        p = Atom("R", ("?x", "?x"))
        assert nnf_step(Forall(("?x",), p)) == Exists(("?x",), Not(p))

    def test_atomic(self):
        assert nnf_step(Eq("c0", "c1")) == Not(Eq("c0", "c1"))


class TestNnf:
    def test_push_through_conjunction(self):
        f = Not(And((Eq("c0", "c1"), Not(Eq("cw", "cw")))))
        assert nnf(f) == Or((Not(Eq("c0", "c1")), Eq("cw", "cw")))

    def test_already_nnf(self):
        assert nnf(Eq("c0", "c1")) == Eq("c0", "c1")

    def test_quantifier(self):
        f = Not(Exists(("?x",), Atom("R", ("?x", "?x"))))
        assert nnf(f) == Forall(("?x",), Not(Atom("R", ("?x", "?x"))))

    def test_output_negations_atomic(self):
        rng = random.Random(5)
        for _ in range(50):
            f = random_sentence(SIG, rng, 3)
            g = nnf(f)
            for sub in syntax.subformulas(g):
                if isinstance(sub, Not):
                    assert isinstance(sub.body, (Atom, Eq))


class TestSubsentences:
    def test_includes_disjuncts_and_self(self):
        f = Or((Eq("cw", "c0"), Eq("cw", "c1")))
        subs = subsentences(f, SIG)
        assert Eq("cw", "c0") in subs
        assert Eq("cw", "c1") in subs
        assert canon(f) in subs

    def test_no_fresh_constants(self):
        sig = Signature(relations={}, base_constants={"c0"})
        assert subsentences(Eq("c0", "c0"), sig) == frozenset({Eq("c0", "c0")})

    def test_existential_instance_count(self):
        sig = Signature(relations={"R": 1}, base_constants={"a", "b", "c"})
        f = Exists(("?x",), Atom("R", ("?x",)))
        assert len(subsentences(f, sig)) == 4

    def test_closed_under_subsentences(self):
        rng = random.Random(9)
        for _ in range(25):
            f = random_sentence(SIG, rng, 3)
            subs = subsentences(f, SIG)
            for g in subs:
                assert subsentences(g, SIG) <= subs


class TestQe:
    def test_axiom_single_constant(self):
        sig = Signature(relations={}, base_constants={"b"}, fresh_constants={"c0"})
        assert qe_axiom(sig) == Forall(("?x",), Or((Eq("?x", "c0"),)))

    def test_axiom_two_constants(self):
        sig = Signature(relations={}, fresh_constants={"c0", "c1"})
        assert qe_axiom(sig) == Forall(("?x",), Or((Eq("?x", "c0"), Eq("?x", "c1"))))

    def test_axiom_empty_pool_rejected(self):
        sig = Signature(relations={}, base_constants={"b"})
        with pytest.raises(ValueError):
            qe_axiom(sig)

    def test_existential(self):
        sig = Signature(relations={}, base_constants=set(), fresh_constants={"c0", "c1"})
        f = Exists(("?x",), Eq("?x", "c0"))
        assert qe_transform(f, sig) == Or((Eq("c0", "c0"), Eq("c1", "c0")))

    def test_quantifier_free_unchanged(self):
        f = Eq("c0", "c1")
        assert qe_transform(f, SIG) == f

    def test_two_variable_block(self):
        sig = Signature(relations={"R": 2}, fresh_constants={"c0", "c1"})
        f = Forall(("?x", "?y"), Atom("R", ("?x", "?y")))
        out = qe_transform(f, sig)
        assert isinstance(out, And) and len(out.children) == 4

    def test_output_quantifier_free(self):
        rng = random.Random(3)
        for _ in range(30):
            f = random_sentence(SIG, rng, 3)
            assert syntax.is_quantifier_free(qe_transform(f, SIG))


class TestSignature:
    def test_overlap_rejected(self):
        with pytest.raises(SignatureError):
            Signature(relations={}, base_constants={"a"}, fresh_constants={"a"})

    def test_name_clash_rejected(self):
        with pytest.raises(SignatureError):
            Signature(relations={"a": 1}, base_constants={"a"})

    def test_json_roundtrip(self):
        assert Signature.from_json(SIG.to_json()) == SIG
