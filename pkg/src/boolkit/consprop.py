"""Consistency properties: clause-by-clause verification, theory saturation,
and the finite-scale model existence construction.

A consistency property is a finite family of finite sentence sets.  Members
are kept as canonical frozensets with reflexive equalities dropped (they are
logically void and only inflate the family).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from . import bvmodel, compact, syntax
from .balg import Poset, ro_completion
from .errors import BoolkitError, ConstructionFailure
from .syntax import And, Atom, Eq, Exists, Forall, Formula, Not, Or, Signature, Theory


def canon_set(sentences: Iterable[Formula]) -> frozenset:
    """Canonical member set: canonical formulas, reflexive equalities dropped."""
    out = set()
    for f in sentences:
        f = syntax.canon(f)
        if isinstance(f, Eq) and f.left == f.right:
            continue
        out.add(f)
    return frozenset(out)


@dataclass(frozen=True)
class ConsistencyProperty:
    sig: Signature
    members: frozenset

    def __init__(self, sig, members):
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "members", frozenset(canon_set(s) for s in members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, s):
        return canon_set(s) in self.members

    def to_json(self) -> dict:
        return {
            "signature": self.sig.to_json(),
            "members": sorted(
                sorted(syntax.render(f) for f in s) for s in self.members
            ),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ConsistencyProperty":
        sig = Signature.from_json(doc["signature"])
        members = [
            [syntax.parse(text, sig) for text in member] for member in doc["members"]
        ]
        return cls(sig, members)


# ---------------------------------------------------------------------------
# clause obligations and verification


def clause_obligations(s: frozenset, sig: Signature):
    """Everything the closure clauses demand of a member set.

    Yields (description, options) pairs: for universal clauses the options
    are a single required sentence; for the choice clauses (big-or witness,
    existential witness, fresh naming) any one option suffices.
    """
    consts = sorted(sig.constants)
    fresh = sorted(sig.fresh_constants)
    for f in sorted(s, key=syntax.render):
        if isinstance(f, Not):
            if not isinstance(f.body, (Atom, Eq)):
                yield (f"negation of {syntax.render(f.body)}", [syntax.nnf_step(f.body)])
        elif isinstance(f, And):
            for child in f.children:
                yield (f"conjunct {syntax.render(child)}", [child])
        elif isinstance(f, Or):
            yield (f"some disjunct of {syntax.render(f)}", list(f.children))
        elif isinstance(f, Forall):
            for combo in itertools.product(consts, repeat=len(f.vars)):
                inst = syntax.substitute(f.body, dict(zip(f.vars, combo)))
                yield (f"instance {syntax.render(inst)}", [inst])
        elif isinstance(f, Exists):
            options = [
                syntax.substitute(f.body, dict(zip(f.vars, combo)))
                for combo in itertools.product(fresh, repeat=len(f.vars))
            ]
            yield (f"witness for {syntax.render(f)}", options)
        if isinstance(f, Eq):
            yield (f"symmetric {syntax.render(f)}", [Eq(f.right, f.left)])
    # substitution of equals and fresh naming
    eqs = [f for f in s if isinstance(f, Eq)]
    for e in eqs:
        for f in sorted(s, key=syntax.render):
            if f is e:
                continue
            if e.right in syntax.constants_of(f):
                yield (
                    f"substitute {e.left} for {e.right} in {syntax.render(f)}",
                    [syntax.replace_constant(f, e.right, e.left)],
                )
    mentioned = set()
    for f in s:
        mentioned |= syntax.constants_of(f)
    for d in consts:
        options = []
        if d in sig.fresh_constants:
            options.append(Eq(d, d))
        preferred = [c for c in fresh if c != d]
        preferred.sort(key=lambda c: (c in mentioned, c))
        options.extend(Eq(c, d) for c in preferred)
        # with an empty fresh pool the clause is unsatisfiable for any d
        yield (f"fresh name for {d}", options)


@dataclass(frozen=True)
class ClauseVerdict:
    ok: bool
    clause: str = ""
    member: Optional[frozenset] = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def verify_consistency_property(prop: ConsistencyProperty) -> ClauseVerdict:
    """Check the contradiction clause and all closure clauses on every member;
    reports the first violation."""
    members = prop.members
    for s in members:
        for f in s:
            if isinstance(f, Not) and f.body in s:
                return ClauseVerdict(False, "Con", s, syntax.render(f.body))
    for s in members:
        for need, options in clause_obligations(s, prop.sig):
            satisfied = False
            for candidate in options:
                ext = canon_set(set(s) | {candidate})
                if ext == s or ext in members:
                    satisfied = True
                    break
            if not satisfied:
                clause = _clause_name(need)
                return ClauseVerdict(False, clause, s, need)
    return ClauseVerdict(True)


def _clause_name(need: str) -> str:
    if need.startswith("negation"):
        return "Ind.1"
    if need.startswith("conjunct"):
        return "Ind.2"
    if need.startswith("instance"):
        return "Ind.3"
    if need.startswith("some disjunct"):
        return "Ind.4"
    if need.startswith("witness"):
        return "Ind.5"
    if need.startswith("symmetric"):
        return "Str.1"
    if need.startswith("substitute"):
        return "Str.2"
    return "Str.3"


# ---------------------------------------------------------------------------
# saturation of a theory into a consistency property


def closure_universe(theory, sig: Signature, bound: int = 64) -> list:
    """The sentence universe the clauses can reach from a theory: its
    subsentences, one-step negation moves, quantifier instances, all
    non-reflexive equalities over the constants, relation atoms over every
    tuple for the relations that occur, and substitution recolorings.
    """
    sentences = list(theory.sentences if isinstance(theory, Theory) else theory)
    consts = sorted(sig.constants)
    fresh = sorted(sig.fresh_constants)
    universe = set()
    queue = []

    def push(f):
        f = syntax.canon(f)
        if isinstance(f, Eq) and f.left == f.right:
            return
        if isinstance(f, Not) and isinstance(f.body, Eq) and f.body.left == f.body.right:
            return
        if f not in universe:
            universe.add(f)
            queue.append(f)
            if len(universe) > bound:
                raise BoolkitError(
                    f"closure universe exceeds the bound of {bound} sentences"
                )

    for phi in sentences:
        for sub in syntax.subsentences(phi, sig):
            push(sub)
    for c, d in itertools.permutations(consts, 2):
        push(Eq(c, d))
        push(Not(Eq(c, d)))
    rels = set()
    for f in list(universe):
        for g in syntax.subformulas(f):
            if isinstance(g, Atom):
                rels.add(g.rel)
    for rel in sorted(rels):
        for combo in itertools.product(consts, repeat=sig.relations[rel]):
            push(Atom(rel, combo))
            push(Not(Atom(rel, combo)))

    while queue:
        f = queue.pop()
        if isinstance(f, Not) and not isinstance(f.body, (Atom, Eq)):
            push(syntax.nnf_step(f.body))
        elif isinstance(f, (And, Or)):
            for child in f.children:
                push(child)
        elif isinstance(f, Forall):
            for combo in itertools.product(consts, repeat=len(f.vars)):
                push(syntax.substitute(f.body, dict(zip(f.vars, combo))))
        elif isinstance(f, Exists):
            for combo in itertools.product(fresh, repeat=len(f.vars)):
                push(syntax.substitute(f.body, dict(zip(f.vars, combo))))
        # recolorings along every equality atom
        occurring = syntax.constants_of(f)
        for c, d in itertools.permutations(consts, 2):
            if d in occurring:
                push(syntax.replace_constant(f, d, c))
    return sorted(universe, key=syntax.render)


def saturate_theory(
    theory,
    sig: Signature,
    bound: int = 64,
    budget: compact.Budget = compact.DEFAULT_BUDGET,
) -> ConsistencyProperty:
    """All finite subsets of the closure universe whose union with the
    theory's quantifier-free form (and its naming axiom) is consistent.

    When the theory itself is inconsistent the result is the empty family.
    """
    base = list(theory.sentences if isinstance(theory, Theory) else theory)

    def consistent(subset) -> bool:
        v = compact.consistency_oracle(list(subset) + base, sig, budget, require_qe=True)
        if v.status == compact.UNKNOWN:
            raise BoolkitError("fragment not decidable at this bound")
        return v.status == compact.CONSISTENT

    members = []
    if consistent(()):
        universe = closure_universe(theory, sig, bound)
        frontier = [((), 0)]
        members.append(frozenset())
        while frontier:
            subset, start = frontier.pop()
            for i in range(start, len(universe)):
                ext = subset + (universe[i],)
                if consistent(ext):
                    members.append(frozenset(ext))
                    frontier.append((ext, i + 1))
    return ConsistencyProperty(sig, members)


# ---------------------------------------------------------------------------
# model existence


def model_from_consprop(
    prop: ConsistencyProperty,
    budget: compact.Budget = compact.DEFAULT_BUDGET,
) -> tuple:
    """Build a model realizing every member of a consistency property.

    The members ordered by reverse inclusion form a poset; its regular-open
    completion is the algebra; the domain is the constant pool; atomic
    values are the regularizations of the sets of members compatible with
    the atom.  The construction is then validated: the congruence conditions
    must hold and every member's cone must sit below the value of each of
    its sentences.  A validation failure raises with the counterexample.
    """
    verdict = verify_consistency_property(prop)
    if not verdict.ok:
        raise BoolkitError(
            f"not a consistency property: clause {verdict.clause} fails ({verdict.detail})"
        )
    if not prop.members:
        raise BoolkitError("empty consistency property has no model")
    sig = prop.sig
    consts = sorted(sig.constants)
    if not consts:
        raise BoolkitError("model construction needs at least one constant")

    members = sorted(prop.members, key=lambda s: (len(s), sorted(map(syntax.render, s))))
    poset = Poset(
        members,
        leq=lambda a, b: b <= a,  # stronger means larger as a set
    )
    ro = ro_completion(poset)
    algebra = ro.algebra

    def value_of(sentence: Formula) -> int:
        compatible = [
            s for s in members if canon_set(set(s) | {sentence}) in prop.members
        ]
        mask = poset.regularize_mask(poset.mask_of(compatible))
        return ro.element_of_mask(mask)

    domain = tuple(consts)
    eq = {}
    for a in consts:
        for b in consts:
            if a == b:
                eq[(a, b)] = algebra.one
            else:
                key = (a, b) if a <= b else (b, a)
                eq[(a, b)] = value_of(Eq(*key))
    rel = {}
    for name, arity in sig.relations.items():
        table = {}
        for combo in itertools.product(consts, repeat=arity):
            table[combo] = value_of(Atom(name, combo))
        rel[name] = table
    consts_map = {c: c for c in consts}

    try:
        model = bvmodel.BValuedModel(algebra, domain, eq, rel, consts_map)
    except BoolkitError as exc:
        raise ConstructionFailure(f"congruence validation failed: {exc}") from exc

    diagnostics = {"members": len(members), "atoms": algebra.atom_count, "checked": 0}
    for s in members:
        cone = ro.cone[s]
        for phi in s:
            value = bvmodel.eval_formula(model, phi, max_steps=budget.eval_steps)
            diagnostics["checked"] += 1
            if not algebra.leq(cone, value):
                raise ConstructionFailure(
                    "cone is not below the value of a member sentence",
                    counterexample={
                        "member": sorted(map(syntax.render, s)),
                        "sentence": syntax.render(phi),
                        "cone": cone,
                        "value": value,
                    },
                )
    return model, diagnostics


def mixing_model_from_consprop(
    prop: ConsistencyProperty,
    budget: compact.Budget = compact.DEFAULT_BUDGET,
) -> tuple:
    """Model existence strengthened by the mixing completion; re-checks that
    every member keeps a nonzero conjunction value."""
    model, diagnostics = model_from_consprop(prop, budget)
    completed = bvmodel.mixing_completion(model)
    for s in prop.members:
        value = bvmodel.eval_formula(
            completed, And(tuple(sorted(s, key=syntax.render))), max_steps=budget.eval_steps
        )
        if value == 0 and s:
            raise ConstructionFailure(
                "member lost its nonzero value under mixing completion",
                counterexample=sorted(map(syntax.render, s)),
            )
    diagnostics = dict(diagnostics)
    diagnostics["mixing_domain"] = len(completed.domain)
    return completed, diagnostics
