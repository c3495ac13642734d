import json

import pytest

from boolkit import proofs, syntax
from boolkit.errors import BoolkitError
from boolkit.proofs import ProofTree, Sequent, check_proof, proof_from_json, proof_to_json, soundness_probe
from boolkit.syntax import And, Atom, Eq, Exists, Forall, Not, Or, Signature

SIG = Signature(relations={"P": 1, "R": 2}, base_constants={"c", "d", "e"})

P_c, P_d, P_e = Atom("P", ("c",)), Atom("P", ("d",)), Atom("P", ("e",))


def axiom(left, right):
    return ProofTree(Sequent(left, right), "axiom")


def proof_corpus():
    """Valid proofs covering every rule, including eigenvariable conditions."""
    trees = []

    trees.append(("refl", ProofTree(Sequent([], [Eq("c", "c")]), "eq-axiom-1")))
    trees.append(
        ("symm", ProofTree(Sequent([Eq("c", "d")], [Eq("d", "c")]), "eq-axiom-2"))
    )
    trees.append(
        (
            "trans",
            ProofTree(Sequent([Eq("c", "d"), Eq("d", "e")], [Eq("c", "e")]), "eq-axiom-3"),
        )
    )
    trees.append(
        (
            "subst-eq-unary",
            ProofTree(
                Sequent([Eq("c", "d"), P_d], [P_c]),
                "eq-axiom-4",
                data={"formula": P_d, "pairs": (("c", "d"),)},
            ),
        )
    )
    trees.append(
        (
            "subst-eq-simultaneous",
            ProofTree(
                Sequent(
                    [Eq("c", "d"), Eq("d", "e"), Atom("R", ("d", "e"))],
                    [Atom("R", ("c", "d"))],
                ),
                "eq-axiom-4",
                data={"formula": Atom("R", ("d", "e")), "pairs": (("c", "d"), ("d", "e"))},
            ),
        )
    )
    trees.append(("shared", axiom([P_c, Eq("c", "d")], [P_c, Eq("d", "e")])))

    eq3 = ProofTree(Sequent([Eq("c", "d"), Eq("d", "e")], [Eq("c", "e")]), "eq-axiom-3")
    eq2 = ProofTree(Sequent([Eq("c", "e")], [Eq("e", "c")]), "eq-axiom-2")
    trees.append(
        (
            "cut-trans-symm",
            ProofTree(
                Sequent([Eq("c", "d"), Eq("d", "e")], [Eq("e", "c")]),
                "cut",
                [eq2, eq3],
                data={"formula": Eq("c", "e")},
            ),
        )
    )

    refl = ProofTree(Sequent([], [Eq("c", "c")]), "eq-axiom-1")
    trees.append(
        (
            "weaken-both-sides",
            ProofTree(Sequent([P_c], [Eq("c", "c"), Eq("d", "d")]), "weakening", [refl]),
        )
    )

    conj = And((P_c, Eq("c", "d")))
    trees.append(
        (
            "left-and",
            ProofTree(
                Sequent([conj], [P_c]),
                "left-and",
                [axiom([P_c, Eq("c", "d")], [P_c])],
                data={"formula": conj},
            ),
        )
    )

    pair = And((Eq("c", "c"), Eq("d", "d")))
    refl_d = ProofTree(Sequent([], [Eq("d", "d")]), "eq-axiom-1")
    trees.append(
        (
            "right-and",
            ProofTree(
                Sequent([], [pair]),
                "right-and",
                [refl, refl_d],
                data={"formula": pair},
            ),
        )
    )

    # De Morgan flavor: a negated conjunct entails the disjunction of negations
    negs = Or((Not(P_c), Not(P_d)))
    trees.append(
        (
            "collect-negations",
            ProofTree(
                Sequent([Not(P_c)], [negs]),
                "left-or",
                [
                    ProofTree(
                        Sequent([Not(P_c)], [Not(P_c), Not(P_d)]),
                        "weakening",
                        [axiom([Not(P_c)], [Not(P_c)])],
                    )
                ],
                data={"formula": negs},
            ),
        )
    )
    trees.append(
        (
            "conjoin-negations",
            ProofTree(
                Sequent([And((Not(P_c), Not(P_d)))], [Not(P_d)]),
                "left-and",
                [axiom([Not(P_c), Not(P_d)], [Not(P_d)])],
                data={"formula": And((Not(P_c), Not(P_d)))},
            ),
        )
    )

    disj = Or((P_c, P_d))
    swapped = Or((P_d, P_c))

    def into_disj(start):
        return ProofTree(
            Sequent([start], [swapped]),
            "left-or",
            [
                ProofTree(
                    Sequent([start], [P_d, P_c]),
                    "weakening",
                    [axiom([start], [start])],
                )
            ],
            data={"formula": swapped},
        )

    trees.append(
        (
            "case-split",
            ProofTree(
                Sequent([disj], [swapped]),
                "right-or",
                [into_disj(P_c), into_disj(P_d)],
                data={"formula": disj},
            ),
        )
    )

    fa_x = Forall(("?x",), Atom("P", ("?x",)))
    trees.append(
        (
            "forall-instance",
            ProofTree(
                Sequent([fa_x], [P_c]),
                "left-forall",
                [axiom([P_c], [P_c])],
                data={"formula": fa_x, "terms": ("c",)},
            ),
        )
    )

    fa_y = Forall(("?y",), Atom("P", ("?y",)))
    inst = ProofTree(
        Sequent([fa_x], [Atom("P", ("?y",))]),
        "left-forall",
        [axiom([Atom("P", ("?y",))], [Atom("P", ("?y",))])],
        data={"formula": fa_x, "terms": ("?y",)},
    )
    trees.append(
        (
            "forall-rename",
            ProofTree(Sequent([fa_x], [fa_y]), "right-forall", [inst], data={"formula": fa_y}),
        )
    )

    ex_x = Exists(("?x",), Atom("P", ("?x",)))
    ex_y = Exists(("?y",), Atom("P", ("?y",)))
    intro = ProofTree(
        Sequent([Atom("P", ("?x",))], [ex_y]),
        "right-exists",
        [axiom([Atom("P", ("?x",))], [Atom("P", ("?x",))])],
        data={"formula": ex_y, "terms": ("?x",)},
    )
    trees.append(
        (
            "exists-rename",
            ProofTree(Sequent([ex_x], [ex_y]), "left-exists", [intro], data={"formula": ex_x}),
        )
    )

    trees.append(
        (
            "exists-intro-constant",
            ProofTree(
                Sequent([P_c], [ex_x]),
                "right-exists",
                [axiom([P_c], [P_c])],
                data={"formula": ex_x, "terms": ("c",)},
            ),
        )
    )

    rxy = Atom("R", ("?x", "?y"))
    trees.append(
        (
            "substitution-rule",
            ProofTree(
                Sequent([Atom("R", ("c", "?z"))], [Atom("R", ("c", "?z"))]),
                "substitution",
                [axiom([rxy], [rxy])],
                data={"mapping": {"?x": "c", "?y": "?z"}},
            ),
        )
    )

    mixed_inner = ProofTree(
        Sequent([P_e, Eq("c", "d")], [P_e]),
        "axiom",
    )
    mixed_mid = ProofTree(
        Sequent([fa_x, Eq("c", "d")], [P_e]),
        "left-forall",
        [mixed_inner],
        data={"formula": fa_x, "terms": ("e",)},
    )
    big = And((fa_x, Eq("c", "d")))
    trees.append(
        (
            "conjoined-universal",
            ProofTree(Sequent([big], [P_e]), "left-and", [mixed_mid], data={"formula": big}),
        )
    )

    fa_block = Forall(("?x", "?y"), rxy)
    trees.append(
        (
            "block-instance",
            ProofTree(
                Sequent([fa_block], [Atom("R", ("c", "d"))]),
                "left-forall",
                [axiom([Atom("R", ("c", "d"))], [Atom("R", ("c", "d"))])],
                data={"formula": fa_block, "terms": ("c", "d")},
            ),
        )
    )

    return trees


def mutations(tree: ProofTree):
    """Single-node corruptions guaranteed to change the rule instance."""
    out = []
    if tree.premises:
        out.append(ProofTree(tree.conclusion, "eq-axiom-1", tree.premises, tree.data))
        out.append(ProofTree(tree.conclusion, tree.rule, tree.premises[1:], tree.data))
    else:
        swap = "axiom" if tree.rule != "axiom" else "eq-axiom-1"
        out.append(ProofTree(tree.conclusion, swap, (), tree.data))
        out.append(ProofTree(tree.conclusion, "cut", (), tree.data))
    return out


class TestCorpus:
    @pytest.mark.parametrize("name,tree", proof_corpus())
    def test_checks(self, name, tree):
        verdict = check_proof(tree)
        assert verdict.ok, (name, verdict.reason)

    @pytest.mark.parametrize("name,tree", proof_corpus())
    def test_sound_on_sampled_models(self, name, tree):
        report = soundness_probe(tree, trials=40, seed=17)
        assert report.ok

    def test_corpus_size(self):
        assert len(proof_corpus()) >= 15


class TestMutations:
    def test_all_rejected(self):
        rejected = 0
        for name, tree in proof_corpus():
            for bad in mutations(tree):
                verdict = check_proof(bad)
                assert not verdict.ok, name
                rejected += 1
        assert rejected >= 30

    def test_probe_refuses_invalid_proof(self):
        bad = ProofTree(Sequent([], [Eq("c", "d")]), "eq-axiom-1")
        with pytest.raises(BoolkitError):
            soundness_probe(bad, trials=5, seed=0)


class TestEigenvariable:
    def test_violation_detected(self):
        fa = Forall(("?x",), Atom("P", ("?x",)))
        bad = ProofTree(
            Sequent([Atom("P", ("?x",))], [fa]),
            "right-forall",
            [axiom([Atom("P", ("?x",))], [Atom("P", ("?x",))])],
            data={"formula": fa},
        )
        verdict = check_proof(bad)
        assert not verdict.ok
        assert "eigenvariable" in verdict.reason

    def test_left_exists_violation(self):
        ex = Exists(("?x",), Atom("P", ("?x",)))
        bad = ProofTree(
            Sequent([ex], [Atom("P", ("?x",))]),
            "left-exists",
            [axiom([Atom("P", ("?x",))], [Atom("P", ("?x",))])],
            data={"formula": ex},
        )
        assert not check_proof(bad).ok


class TestPremiseOrder:
    def test_right_and_accepts_any_premise_order(self):
        pair = And((Eq("c", "c"), Eq("d", "d")))
        refl_c = ProofTree(Sequent([], [Eq("c", "c")]), "eq-axiom-1")
        refl_d = ProofTree(Sequent([], [Eq("d", "d")]), "eq-axiom-1")
        for premises in ((refl_c, refl_d), (refl_d, refl_c)):
            tree = ProofTree(
                Sequent([], [pair]), "right-and", premises, data={"formula": pair}
            )
            assert check_proof(tree).ok


class TestInterchange:
    def test_json_roundtrip_all_corpus(self):
        for name, tree in proof_corpus():
            doc = json.loads(json.dumps(proof_to_json(tree)))
            restored = proof_from_json(doc, SIG)
            assert check_proof(restored).ok, name
            assert restored.conclusion == tree.conclusion
