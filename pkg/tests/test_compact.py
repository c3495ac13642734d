import itertools
import random

import pytest

from boolkit import bvmodel, syntax
from boolkit.compact import (
    Budget,
    CONSISTENT,
    INCONSISTENT,
    UNKNOWN,
    conjunction_closure,
    consistency_oracle,
    faicom_family,
    faicom_signature,
    first_order_compactness_demo,
    is_conservative_strengthening,
    is_finitely_conservative,
    compactness_run,
    lindenbaum_complete,
    replay_certificate,
    star_theory,
)
from boolkit.errors import BoolkitError
from boolkit.syntax import And, Atom, Eq, Exists, Not, Or, Signature, Theory

from conftest import brute_force_satisfiable

SIG = Signature(relations={"R": 1}, base_constants={"a", "b"}, fresh_constants={"e0", "e1"})


class TestOracle:
    def test_reflexive_consistent(self):
        v = consistency_oracle([Eq("a", "a")], SIG)
        assert v.status == CONSISTENT

    def test_witness_satisfies_input(self):
        sents = [Atom("R", ("a",)), Not(Eq("a", "b"))]
        v = consistency_oracle(sents, SIG)
        assert v.status == CONSISTENT
        for f in sents:
            assert bvmodel.holds(v.witness, f)

    def test_faicom_three_inconsistent(self):
        sig = faicom_signature(3)
        v = consistency_oracle(faicom_family(3), sig)
        assert v.status == INCONSISTENT
        assert replay_certificate(v.certificate, faicom_family(3), sig)

    def test_faicom_minus_one_inequality_consistent(self):
        sig = faicom_signature(3)
        fam = list(faicom_family(3))
        rest = fam[1:]  # drop c0 != c3
        v = consistency_oracle(rest, sig)
        assert v.status == CONSISTENT
        assert bvmodel.holds(v.witness, fam[-1])

    def test_agrees_with_brute_force(self):
        rng = random.Random(20)
        sig = Signature(relations={"R": 1}, base_constants={"a", "b", "c"})
        atoms = [Eq("a", "b"), Eq("b", "c"), Atom("R", ("a",)), Atom("R", ("b",))]
        for _ in range(120):
            sentences = []
            for _ in range(rng.randint(1, 4)):
                f = rng.choice(atoms)
                if rng.random() < 0.5:
                    f = Not(f)
                if rng.random() < 0.3:
                    g = rng.choice(atoms)
                    f = Or((f, g)) if rng.random() < 0.5 else And((f, g))
                sentences.append(f)
            expected = brute_force_satisfiable(sentences, sig)
            verdict = consistency_oracle(sentences, sig)
            assert verdict.status == (CONSISTENT if expected else INCONSISTENT), sentences
            if verdict.status == INCONSISTENT:
                assert replay_certificate(verdict.certificate, sentences, sig)

    def test_unknown_on_tiny_budget(self):
        sig = Signature(relations={"R": 2}, base_constants={"a", "b", "c", "d"})
        sentences = [
            Or((Atom("R", (x, y)), Not(Atom("R", (y, x)))))
            for x, y in itertools.product("abcd", repeat=2)
        ]
        v = consistency_oracle(sentences, sig, Budget(oracle_nodes=2))
        assert v.status == UNKNOWN

    def test_quantified_reduces_via_naming(self):
        sig = Signature(relations={"R": 1}, base_constants={"d"}, fresh_constants={"e"})
        # every element named: an R-witness must be nameable
        v = consistency_oracle(
            [Exists(("?x",), Atom("R", ("?x",))), Not(Atom("R", ("e",))), Not(Atom("R", ("d",)))],
            sig,
        )
        assert v.status == INCONSISTENT

    def test_quantified_needs_fresh_pool(self):
        sig = Signature(relations={"R": 1}, base_constants={"d"})
        with pytest.raises(BoolkitError):
            consistency_oracle([Exists(("?x",), Atom("R", ("?x",)))], sig)


class TestConservative:
    def test_identity(self):
        f = Or((Eq("a", "b"), Atom("R", ("a",))))
        report = is_conservative_strengthening(f, f, SIG)
        assert report.conservative

    def test_equivalent_strengthening_checked_exhaustively(self):
        psi0 = Atom("R", ("a",))
        psi1 = And((psi0, Or((psi0,))))
        report = is_conservative_strengthening(psi1, psi0, SIG)
        assert report.conservative
        assert report.checked_subsets > 0

    def test_remark_pair_not_conservative(self):
        sig = faicom_signature(2)
        psi0 = Or((Eq("c2", "c0"), Eq("c2", "c1")))
        psi1 = And((psi0, Not(Eq("c0", "c2"))))
        report = is_conservative_strengthening(psi1, psi0, sig)
        assert report.entailment_ok
        assert not report.conservative
        assert report.violating_subset == frozenset({Eq("c2", "c0")})

    def test_fresh_tautology_conjunct_conservative(self):
        psi0 = Atom("R", ("a",))
        psi1 = And((psi0, Eq("b", "b")))
        report = is_conservative_strengthening(psi1, psi0, SIG)
        assert report.conservative

    def test_non_entailing_rejected(self):
        report = is_conservative_strengthening(Atom("R", ("a",)), Atom("R", ("b",)), SIG)
        assert not report.entailment_ok
        assert not report.conservative

    def test_bounded_run_labelled(self):
        psi0 = Or((Eq("a", "b"), Atom("R", ("a",))))
        psi1 = And((psi0, Or((psi0,))))
        report = is_conservative_strengthening(psi1, psi0, SIG, Budget(max_subset=1))
        assert report.bounded


class TestFiniteConservativity:
    def test_singleton_conjunction(self):
        t = [Atom("R", ("a",)), Not(Eq("a", "b"))]
        family = [And(tuple(t))]
        verdict = is_finitely_conservative(family, SIG)
        assert verdict.ok

    def test_faicom_closure_fails_with_remark_witness(self):
        sig = faicom_signature(2)
        family = conjunction_closure(faicom_family(2))
        verdict = is_finitely_conservative(family, sig)
        assert not verdict.ok
        assert verdict.reason == "conjunction is not conservative over a conjunct"
        disj = syntax.canon(Or((Eq("c2", "c0"), Eq("c2", "c1"))))
        assert verdict.base == disj
        assert syntax.conjunction_key(verdict.member) >= {
            syntax.render(disj)
        }
        assert verdict.report.violating_subset is not None

    def test_closure_violation_detected(self):
        phi, psi = Atom("R", ("a",)), Atom("R", ("b",))
        family = [phi, psi]  # missing the pair conjunction
        verdict = is_finitely_conservative(family, SIG)
        assert not verdict.ok
        assert verdict.reason == "not closed under finite conjunctions"

    def test_passing_family_is_finitely_consistent(self):
        gens = [Atom("R", ("a",)), Not(Eq("a", "b"                                                                 ))]
        family = conjunction_closure(gens)
        verdict = is_finitely_conservative(family, SIG)
        assert verdict.ok
        for size in range(1, len(family) + 1):
            for combo in itertools.combinations(family, size):
                assert consistency_oracle(list(combo), SIG).status == CONSISTENT


class TestCompactnessRun:
    def test_singleton_family(self):
        f = Atom("R", ("a",))
        result = compactness_run([f], SIG)
        assert bvmodel.eval_formula(result.model, f) == result.model.algebra.one

    def test_three_generator_family(self):
        gens = [Atom("R", ("a",)), Not(Eq("a", "b")), Or((Atom("R", ("a",)), Atom("R", ("b",))))]
        family = conjunction_closure(gens)
        result = compactness_run(family, SIG)
        one = result.model.algebra.one
        assert bvmodel.eval_formula(result.model, result.conjunction) == one
        assert all(r.conservative for r in result.reports.values())
        # cross-check against the oracle on the union
        assert consistency_oracle(gens, SIG).status == CONSISTENT

    def test_rejects_non_conservative_family(self):
        sig = faicom_signature(2)
        family = conjunction_closure(faicom_family(2))
        with pytest.raises(BoolkitError):
            compactness_run(family, sig)

    def test_reports_reverify_independently(self):
        gens = [Atom("R", ("a",)), Atom("R", ("b",))]
        family = conjunction_closure(gens)
        result = compactness_run(family, SIG)
        for key, report in result.reports.items():
            member = syntax.parse(key, SIG)
            fresh = is_conservative_strengthening(result.conjunction, member, SIG)
            assert fresh.conservative == report.conservative


class TestStarTheory:
    def test_star_signs_subsentences(self):
        witness = consistency_oracle(
            [Atom("R", ("a",)), Not(Eq("a", "b"))], SIG
        ).witness
        phi = Or((Eq("a", "b"), Atom("R", ("a",))))
        (star,) = star_theory(witness, [phi], SIG)
        key = syntax.conjunction_key(star)
        assert syntax.render(syntax.canon(phi)) in key
        assert syntax.render(syntax.canon(Not(Eq("a", "b")))) in key
        assert syntax.render(Atom("R", ("a",))) in key

    def test_false_generator_rejected(self):
        witness = consistency_oracle([Not(Atom("R", ("a",)))], SIG).witness
        with pytest.raises(BoolkitError):
            star_theory(witness, [Atom("R", ("a",))], SIG)

    def test_closure_is_finitely_conservative(self):
        witness = consistency_oracle(
            [Atom("R", ("a",)), Not(Eq("a", "b"))], SIG
        ).witness
        gens = [Atom("R", ("a",)), Or((Atom("R", ("a",)), Atom("R", ("b",))))]
        stars = star_theory(witness, gens, SIG)
        family = conjunction_closure(stars)
        assert is_finitely_conservative(family, SIG).ok

    def test_star_equivalent_to_generators(self):
        witness = consistency_oracle([Atom("R", ("a",))], SIG).witness
        gens = [Atom("R", ("a",))]
        stars = star_theory(witness, gens, SIG)
        conj = And(tuple(stars))
        # stars entail the generators
        assert consistency_oracle([conj, Not(gens[0])], SIG).status == INCONSISTENT
        # generators plus the witness facts entail every star conjunct
        facts = []
        for c in sorted(SIG.constants):
            for d in sorted(SIG.constants):
                f = Eq(c, d)
                facts.append(f if bvmodel.holds(witness, f) else Not(f))
        for name, arity in SIG.relations.items():
            for combo in itertools.product(sorted(SIG.constants), repeat=arity):
                f = Atom(name, combo)
                facts.append(f if bvmodel.holds(witness, f) else Not(f))
        for conjunct in syntax.conjuncts(stars[0]):
            v = consistency_oracle(facts + list(gens) + [Not(conjunct)], SIG)
            assert v.status == INCONSISTENT, syntax.render(conjunct)


class TestLindenbaum:
    def test_completion_decides_every_atom(self):
        completed = lindenbaum_complete([Not(Eq("a", "b"))], SIG)
        rendered = {syntax.render(f) for f in completed}
        for c, d in itertools.combinations(sorted(SIG.constants), 2):
            assert (
                syntax.render(Eq(c, d)) in rendered
                or syntax.render(syntax.canon(Not(Eq(c, d)))) in rendered
            )

    def test_inconsistent_input_rejected(self):
        with pytest.raises(BoolkitError):
            lindenbaum_complete([Eq("a", "b"), Not(Eq("a", "b"))], SIG)


class TestFirstOrderCompactness:
    def test_distinct_pair(self):
        sig = Signature(relations={}, base_constants={"a", "b", "c"}, fresh_constants={"e"})
        t = Theory([Not(Eq("a", "b"))])
        model = first_order_compactness_demo(t, sig)
        assert model.algebra.atom_count == 1
        assert bvmodel.holds(model, Not(Eq("a", "b")))

    def test_four_pairwise_distinct(self):
        names = ["a", "b", "c", "d"]
        sig = Signature(relations={}, base_constants=set(names), fresh_constants={"e"})
        t = Theory([Not(Eq(x, y)) for x, y in itertools.combinations(names, 2)])
        model = first_order_compactness_demo(t, sig)
        interpretations = {model.consts[n] for n in names}
        assert len(interpretations) == 4

    def test_inconsistent_pair_rejected_with_subset(self):
        sig = Signature(relations={}, base_constants={"a", "b"}, fresh_constants={"e"})
        t = Theory([Eq("a", "b"), Not(Eq("a", "b"))])
        with pytest.raises(BoolkitError, match="inconsistent finite subset"):
            first_order_compactness_demo(t, sig)


class TestFaicom:
    def test_family_shape(self):
        fam = list(faicom_family(2))
        assert Not(Eq("c0", "c2")) in fam
        assert Or((Eq("c2", "c0"), Eq("c2", "c1"))) in fam

    def test_one_is_already_inconsistent(self):
        sig = faicom_signature(1)
        assert consistency_oracle(faicom_family(1), sig).status == INCONSISTENT

    def test_all_single_deletions_consistent(self):
        for n in (2, 3):
            sig = faicom_signature(n)
            fam = list(faicom_family(n))
            assert consistency_oracle(fam, sig).status == INCONSISTENT
            for i in range(len(fam)):
                rest = fam[:i] + fam[i + 1 :]
                assert consistency_oracle(rest, sig).status == CONSISTENT

    def test_rejects_zero(self):
        with pytest.raises(BoolkitError):
            faicom_family(0)
