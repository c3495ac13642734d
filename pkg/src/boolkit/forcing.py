"""The forcing poset of finite condition sets attached to a sentence: its
construction, dense subsets, generic filters, term models, and the genericity
sentence whose consistency the compactness pipeline certifies.

Conditions are finite sets of proper subsentences of the target sentence and
(negated) atomic sentences, each jointly consistent with the sentence,
ordered by reverse inclusion.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from . import bvmodel, compact, syntax
from .balg import FiniteBooleanAlgebra
from .errors import BoolkitError
from .syntax import And, Atom, Eq, Formula, Not, Or, Signature


def condition_universe(phi: Formula, sig: Signature) -> list:
    """Proper subsentences of the target plus all (negated) atomic sentences
    over the signature, reflexive equalities and their negations excluded."""
    out = set()
    phi = syntax.canon(phi)
    for f in syntax.subsentences(phi, sig):
        if f != phi:
            out.add(f)
    consts = sorted(sig.constants)
    for a, b in itertools.combinations(consts, 2):
        out.add(syntax.canon(Eq(a, b)))
        out.add(syntax.canon(Not(Eq(a, b))))
    for name, arity in sorted(sig.relations.items()):
        for combo in itertools.product(consts, repeat=arity):
            out.add(Atom(name, combo))
            out.add(syntax.canon(Not(Atom(name, combo))))
    return sorted(out, key=syntax.render)


@dataclass(frozen=True)
class SPhiPoset:
    phi: Formula
    sig: Signature
    conditions: frozenset
    excluded_unknown: tuple = ()

    def __contains__(self, s):
        return frozenset(syntax.canon(f) for f in s) in self.conditions

    def extends(self, s, t) -> bool:
        # s <= t: s is the stronger condition
        return t <= s

    def to_json(self) -> dict:
        return {
            "phi": syntax.render(self.phi),
            "signature": self.sig.to_json(),
            "conditions": sorted(
                sorted(syntax.render(f) for f in s) for s in self.conditions
            ),
        }


def build_sphi(
    phi: Formula,
    sig: Signature,
    size_bound: int,
    budget: compact.Budget = compact.DEFAULT_BUDGET,
) -> SPhiPoset:
    """Enumerate the conditions of the forcing poset up to the size bound,
    filtering by joint consistency with the target sentence."""
    phi = syntax.canon(phi)
    base = consistency(phi, sig, budget)
    if base.status != compact.CONSISTENT:
        raise BoolkitError("target sentence must be Boolean consistent")
    universe = condition_universe(phi, sig)
    excluded = []
    conditions = {frozenset()}
    frontier = [((), 0)]
    while frontier:
        subset, start = frontier.pop()
        if len(subset) >= size_bound:
            continue
        for i in range(start, len(universe)):
            ext = subset + (universe[i],)
            v = compact.consistency_oracle(list(ext) + [phi], sig, budget)
            if v.status == compact.UNKNOWN:
                excluded.append(frozenset(ext))
                continue
            if v.status == compact.CONSISTENT:
                conditions.add(frozenset(ext))
                frontier.append((ext, i + 1))
    return SPhiPoset(phi, sig, frozenset(conditions), tuple(excluded))


def consistency(phi: Formula, sig: Signature, budget=compact.DEFAULT_BUDGET):
    return compact.consistency_oracle([phi], sig, budget)


@dataclass(frozen=True)
class DensityVerdict:
    ok: bool
    witness: Optional[frozenset] = None

    def __bool__(self):
        return self.ok


def is_dense(d: Iterable[frozenset], p: SPhiPoset, strict: bool = False) -> DensityVerdict:
    """Dense means: every condition has a superset in the set, which under
    the reverse-inclusion order says every condition has an extension there.
    The strict flag demands a proper superset."""
    dset = [frozenset(syntax.canon(f) for f in s) for s in d]
    for s in dset:
        if s not in p.conditions:
            raise BoolkitError("dense-set entry is not a condition")
    for s in p.conditions:
        if not any((s < t) if strict else (s <= t) for t in dset):
            return DensityVerdict(False, witness=s)
    return DensityVerdict(True)


@dataclass(frozen=True)
class GenericFilter:
    poset: SPhiPoset
    members: frozenset
    met_dense_sets: tuple
    maximal: bool

    def __contains__(self, s):
        return frozenset(syntax.canon(f) for f in s) in self.members

    def sigma(self) -> frozenset:
        """The union of the filter: a finite sentence set."""
        out = set()
        for s in self.members:
            out |= s
        return frozenset(out)


def generic_filter(p: SPhiPoset, dense: Iterable = ()) -> GenericFilter:
    """Build a descending chain entering each supplied dense set in turn,
    upward close it, and extend to a maximal filter by greedy saturation."""
    dense = [tuple(frozenset(syntax.canon(f) for f in s) for s in d) for d in dense]
    for i, d in enumerate(dense):
        if not is_dense(d, p):
            raise BoolkitError(f"supplied set {i} is not dense")
    current = frozenset()
    met = []
    for d in dense:
        candidates = sorted(
            (t for t in d if current <= t),
            key=lambda t: (len(t), sorted(map(syntax.render, t))),
        )
        if not candidates:
            raise BoolkitError("density violated during chain construction")
        current = candidates[0]
        met.append(True)
    # greedy saturation to a maximal condition
    grown = True
    while grown:
        grown = False
        for t in sorted(
            p.conditions, key=lambda t: (len(t), sorted(map(syntax.render, t)))
        ):
            if current < t:
                current = t
                grown = True
                break
    members = frozenset(s for s in p.conditions if s <= current)
    maximal = not any(current < t for t in p.conditions)
    return GenericFilter(p, members, tuple(met), maximal)


def term_model(g: GenericFilter) -> bvmodel.BValuedModel:
    """The Tarski structure read off the filter's union: constants modulo the
    equalities it contains, relations holding exactly on its atoms.

    Requires a maximal filter; well-definedness of the relations over the
    equality classes is validated.
    """
    if not g.maximal:
        raise BoolkitError("term model needs a maximal filter")
    sig = g.poset.sig
    sigma = g.sigma()
    consts = sorted(sig.constants)
    parent = {c: c for c in consts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in sigma:
        if isinstance(f, Eq):
            ra, rb = find(f.left), find(f.right)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    reps = sorted({find(c) for c in consts})
    b = FiniteBooleanAlgebra(1)
    domain = tuple(reps)
    eq = {(x, y): (b.one if x == y else 0) for x in domain for y in domain}
    rel = {}
    for name, arity in sig.relations.items():
        table = {combo: 0 for combo in itertools.product(domain, repeat=arity)}
        rel[name] = table
    for f in sigma:
        if isinstance(f, Atom):
            rel[f.rel][tuple(find(a) for a in f.args)] = b.one
    # well-definedness: no negated atom may collapse onto a positive one
    for f in sigma:
        if isinstance(f, Not) and isinstance(f.body, Atom):
            atom = f.body
            if rel[atom.rel][tuple(find(a) for a in atom.args)] == b.one:
                raise BoolkitError(
                    f"relations ill-defined on classes: {syntax.render(f)}"
                )
        if isinstance(f, Not) and isinstance(f.body, Eq):
            if find(f.body.left) == find(f.body.right):
                raise BoolkitError(
                    f"equality classes contradict {syntax.render(f)}"
                )
    consts_map = {c: find(c) for c in consts}
    return bvmodel.BValuedModel(b, domain, eq, rel, consts_map)


def meets_equivalence(g: GenericFilter, d: Iterable[frozenset]) -> bool:
    """The dense-set membership test: the filter meets the set exactly when
    the term model satisfies the disjunction of its conditions' conjunctions."""
    dset = [frozenset(syntax.canon(f) for f in s) for s in d]
    m = term_model(g)
    sentence = Or(
        tuple(
            And(tuple(sorted(s, key=syntax.render))) for s in sorted(
                dset, key=lambda s: sorted(map(syntax.render, s))
            )
        )
    )
    meets = any(s in g.members for s in dset)
    return meets == bvmodel.holds(m, sentence)


def genericity_sentence(
    phi: Formula,
    dense: Iterable,
    p: SPhiPoset,
) -> Formula:
    """The target sentence conjoined with, for each supplied dense set, the
    disjunction over its conditions of their conjunctions."""
    phi = syntax.canon(phi)
    blocks = []
    for i, d in enumerate(dense):
        dset = [frozenset(syntax.canon(f) for f in s) for s in d]
        if not is_dense(dset, p):
            raise BoolkitError(f"supplied set {i} is not dense")
        blocks.append(
            Or(
                tuple(
                    And(tuple(sorted(s, key=syntax.render)))
                    for s in sorted(dset, key=lambda s: sorted(map(syntax.render, s)))
                )
            )
        )
    if not blocks:
        return phi
    return syntax.canon(And(tuple([phi] + blocks)))


# canonical dense families


def dense_decision_set(p: SPhiPoset, atom: Formula) -> list:
    """Conditions that decide the given atomic sentence."""
    atom = syntax.canon(atom)
    neg = syntax.canon(Not(atom))
    return [s for s in p.conditions if atom in s or neg in s]


def dense_commitment_set(p: SPhiPoset, disjunction: Or) -> list:
    """Conditions committed to one disjunct of the given disjunction."""
    children = {syntax.canon(c) for c in disjunction.children}
    return [s for s in p.conditions if s & children]
