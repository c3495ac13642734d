"""B-valued structures: construction-time congruence validation, the Boolean
evaluation map, filter quotients, mixing/fullness checks, mixing completion,
and a seeded generator of valid random models."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from . import syntax
from .balg import Filter, FiniteBooleanAlgebra, quotient_algebra
from .errors import BoolkitError, ResourceBudgetError
from .syntax import And, Atom, Eq, Exists, Forall, Formula, Not, Or, Signature

DEFAULT_EVAL_CAP = 10**6


@dataclass
class BValuedModel:
    """A finite structure whose equality and relations take values in a
    finite Boolean algebra.

    ``eq`` maps ordered domain pairs to algebra elements, ``rel`` maps each
    relation name to a table over domain tuples, ``consts`` interprets
    constant names.  Treated as immutable after construction.
    """

    algebra: FiniteBooleanAlgebra
    domain: tuple
    eq: dict
    rel: dict
    consts: dict

    def __post_init__(self):
        self.domain = tuple(self.domain)
        if not self.domain:
            raise BoolkitError("domain must be nonempty")
        report = validate_model(self)
        if not report.ok:
            raise BoolkitError(f"invalid B-valued model: {report.violations[0]}")

    def eq_value(self, a, b) -> int:
        return self.eq[(a, b)]

    def rel_value(self, name, args) -> int:
        return self.rel[name][tuple(args)]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()


def validate_model(m: BValuedModel, max_violations: int = 1) -> ValidationReport:
    """Exhaustively check the equality axioms and the relation congruence
    condition; failures report the violating tuple."""
    b = m.algebra
    bad = []
    for a in m.domain:
        for c in m.domain:
            if (a, c) not in m.eq or not b.is_element(m.eq[(a, c)]):
                bad.append(("eq-table", a, c))
                if len(bad) >= max_violations:
                    return ValidationReport(False, tuple(bad))
    for a in m.domain:
        if m.eq[(a, a)] != b.one:
            bad.append(("reflexivity", a))
    for a, c in itertools.product(m.domain, repeat=2):
        if m.eq[(a, c)] != m.eq[(c, a)]:
            bad.append(("symmetry", a, c))
            if len(bad) >= max_violations:
                return ValidationReport(False, tuple(bad))
    for a, c, d in itertools.product(m.domain, repeat=3):
        if not b.leq(b.meet(m.eq[(a, c)], m.eq[(c, d)]), m.eq[(a, d)]):
            bad.append(("transitivity", a, c, d))
            if len(bad) >= max_violations:
                return ValidationReport(False, tuple(bad))
    for name, table in m.rel.items():
        arity = len(next(iter(table))) if table else 0
        for xs in itertools.product(m.domain, repeat=arity):
            if xs not in table or not b.is_element(table[xs]):
                bad.append(("rel-table", name, xs))
                return ValidationReport(False, tuple(bad))
        for xs in itertools.product(m.domain, repeat=arity):
            for ys in itertools.product(m.domain, repeat=arity):
                guard = b.meet_all(m.eq[(x, y)] for x, y in zip(xs, ys))
                if not b.leq(b.meet(guard, table[xs]), table[ys]):
                    bad.append(("congruence", name, xs, ys))
                    if len(bad) >= max_violations:
                        return ValidationReport(False, tuple(bad))
    for name, elem in m.consts.items():
        if elem not in m.domain:
            bad.append(("constant", name, elem))
            if len(bad) >= max_violations:
                return ValidationReport(False, tuple(bad))
    return ValidationReport(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# evaluation


class _Counter:
    __slots__ = ("left",)

    def __init__(self, cap):
        self.left = cap

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise ResourceBudgetError("evaluation step budget exceeded")


def eval_formula(
    m: BValuedModel,
    f: Formula,
    assignment: Optional[Mapping] = None,
    max_steps: int = DEFAULT_EVAL_CAP,
) -> int:
    """Boolean value of a formula: negation is complement, conjunction meet,
    disjunction join, quantifier blocks meet/join over domain tuples; the
    empty conjunction is 1 and the empty disjunction 0.

    Raises on unbound free variables, uninterpreted constants, or when the
    quantifier blow-up exceeds ``max_steps``.
    """
    counter = _Counter(max_steps)
    env = dict(assignment or {})
    return _eval(m, f, env, counter)


def _resolve(m, term, env):
    if syntax.is_var(term):
        if term not in env:
            raise BoolkitError(f"unbound free variable {term}")
        return env[term]
    if term not in m.consts:
        raise BoolkitError(f"uninterpreted constant {term}")
    return m.consts[term]


def _eval(m, f, env, counter) -> int:
    counter.tick()
    b = m.algebra
    if isinstance(f, Eq):
        return m.eq[(_resolve(m, f.left, env), _resolve(m, f.right, env))]
    if isinstance(f, Atom):
        return m.rel[f.rel][tuple(_resolve(m, t, env) for t in f.args)]
    if isinstance(f, Not):
        return b.complement(_eval(m, f.body, env, counter))
    if isinstance(f, And):
        out = b.one
        for c in f.children:
            out &= _eval(m, c, env, counter)
        return out
    if isinstance(f, Or):
        out = b.zero
        for c in f.children:
            out |= _eval(m, c, env, counter)
        return out
    if isinstance(f, (Forall, Exists)):
        is_forall = isinstance(f, Forall)
        out = b.one if is_forall else b.zero
        for combo in itertools.product(m.domain, repeat=len(f.vars)):
            inner = dict(env)
            inner.update(zip(f.vars, combo))
            v = _eval(m, f.body, inner, counter)
            out = out & v if is_forall else out | v
        return out
    raise TypeError(f"not a formula: {f!r}")


def holds(m: BValuedModel, f: Formula, assignment=None) -> bool:
    return eval_formula(m, f, assignment) == m.algebra.one


# ---------------------------------------------------------------------------
# quotients


def quotient_model(m: BValuedModel, f: Filter) -> BValuedModel:
    """Identify elements whose equality value lies in the filter; push all
    values through the quotient-algebra projection.  An ultrafilter yields a
    two-valued (Tarski) model."""
    if f.algebra != m.algebra:
        raise BoolkitError("filter belongs to a different algebra")
    quotient, project = quotient_algebra(m.algebra, f)
    reps = []
    cls = {}
    for x in m.domain:
        for r in reps:
            if m.eq[(x, r)] in f:
                cls[x] = r
                break
        else:
            reps.append(x)
            cls[x] = x
    new_domain = tuple(f"[{r}]" for r in reps)
    label = {r: f"[{r}]" for r in reps}
    eq = {}
    for a in reps:
        for c in reps:
            eq[(label[a], label[c])] = project(m.eq[(a, c)])
    rel = {}
    for name, table in m.rel.items():
        arity = len(next(iter(table))) if table else 0
        new_table = {}
        for xs in itertools.product(reps, repeat=arity):
            new_table[tuple(label[x] for x in xs)] = project(table[xs])
        rel[name] = new_table
    consts = {name: label[cls[elem]] for name, elem in m.consts.items()}
    return BValuedModel(quotient, new_domain, eq, rel, consts)


# ---------------------------------------------------------------------------
# mixing and fullness


@dataclass(frozen=True)
class MixingVerdict:
    ok: bool
    antichain: tuple = ()
    family: tuple = ()

    def __bool__(self):
        return self.ok


def check_mixing(m: BValuedModel, lam: int) -> MixingVerdict:
    """Exhaustive search for an antichain of size <= lam and a family with no
    patching element; passing with lam >= atom_count is the mixing property."""
    b = m.algebra
    for antichain in b.antichains(lam):
        if len(antichain) < 2:
            continue
        for family in itertools.product(m.domain, repeat=len(antichain)):
            if any(
                all(b.leq(a, m.eq[(tau, fam)]) for a, fam in zip(antichain, family))
                for tau in m.domain
            ):
                continue
            return MixingVerdict(False, antichain, family)
    return MixingVerdict(True)


@dataclass(frozen=True)
class FullnessVerdict:
    ok: bool
    formula: Optional[Formula] = None
    parameters: tuple = ()

    def __bool__(self):
        return self.ok


def check_fullness(m: BValuedModel, catalog: Iterable[Formula]) -> FullnessVerdict:
    """For each existential catalog formula and every parameter tuple, search
    for a single witness tuple attaining the value of the existential."""
    for f in catalog:
        if not isinstance(f, Exists):
            raise BoolkitError(f"catalog entries must be existential formulas, got {f!r}")
        params = sorted(syntax.free_vars(f))
        for combo in itertools.product(m.domain, repeat=len(params)):
            env = dict(zip(params, combo))
            target = eval_formula(m, f, env)
            attained = False
            for witness in itertools.product(m.domain, repeat=len(f.vars)):
                inner = dict(env)
                inner.update(zip(f.vars, witness))
                if eval_formula(m, f.body, inner) == target:
                    attained = True
                    break
            if not attained:
                return FullnessVerdict(False, f, combo)
    return FullnessVerdict(True)


def mixing_witness_catalog(max_antichain: int) -> list:
    """The existential formulas used in the fullness-implies-mixing argument:
    for each antichain size k, a witness x equal to one of k candidates while
    the matching selector pins the antichain component."""
    catalog = []
    for k in range(1, max_antichain + 1):
        disjuncts = tuple(
            And((Eq("?x", f"?t{i}"), Eq(f"?s{i}", "?w"))) for i in range(k)
        )
        catalog.append(Exists(("?x",), Or(disjuncts)))
    return catalog


def mixing_completion(m: BValuedModel) -> BValuedModel:
    """Freely add atom-wise patches: the new domain is all maps from atoms to
    the old domain, equality holds on the atoms where the maps agree up to the
    old equality, and relations are lifted atom-by-atom.

    The original domain embeds via constant maps with atomic values
    preserved; the output has the full mixing property.
    """
    b = m.algebra
    atoms = b.atoms()
    maps = [tuple(combo) for combo in itertools.product(m.domain, repeat=len(atoms))]
    if len(maps) * len(maps) > 4 * 10**6:
        raise ResourceBudgetError("mixing completion would exceed the size cap")
    new_domain = tuple(maps)
    eq = {}
    for s in maps:
        for t in maps:
            value = 0
            for i, a in enumerate(atoms):
                if b.leq(a, m.eq[(s[i], t[i])]):
                    value |= a
            eq[(s, t)] = value
    rel = {}
    for name, table in m.rel.items():
        arity = len(next(iter(table))) if table else 0
        new_table = {}
        for ss in itertools.product(maps, repeat=arity):
            value = 0
            for i, a in enumerate(atoms):
                if b.leq(a, table[tuple(s[i] for s in ss)]):
                    value |= a
            new_table[ss] = value
        rel[name] = new_table
    embed = {x: tuple(x for _ in atoms) for x in m.domain}
    consts = {name: embed[elem] for name, elem in m.consts.items()}
    return BValuedModel(b, new_domain, eq, rel, consts)


# ---------------------------------------------------------------------------
# random models and formula catalogs


def random_model(
    sig: Signature,
    rng: random.Random,
    max_atoms: int = 3,
    max_domain: int = 3,
) -> BValuedModel:
    """A pseudo-random valid model: equality is a per-atom partition of the
    domain and relation values are per-atom unions of partition-class tuples,
    which enforces the congruence conditions by construction."""
    k = rng.randint(1, max_atoms)
    n = rng.randint(1, max_domain)
    b = FiniteBooleanAlgebra(k)
    domain = tuple(f"m{i}" for i in range(n))
    partitions = []
    for _ in range(k):
        labels = [rng.randrange(n) for _ in range(n)]
        partitions.append(labels)
    eq = {}
    for i, x in enumerate(domain):
        for j, y in enumerate(domain):
            value = 0
            for bit, labels in enumerate(partitions):
                if labels[i] == labels[j]:
                    value |= 1 << bit
            eq[(x, y)] = value
    rel = {}
    index = {x: i for i, x in enumerate(domain)}
    for name, arity in sig.relations.items():
        table = {}
        per_atom_choice = []
        for labels in partitions:
            classes = sorted(set(labels))
            chosen = {
                combo
                for combo in itertools.product(classes, repeat=arity)
                if rng.random() < 0.5
            }
            per_atom_choice.append(chosen)
        for xs in itertools.product(domain, repeat=arity):
            value = 0
            for bit, labels in enumerate(partitions):
                combo = tuple(labels[index[x]] for x in xs)
                if combo in per_atom_choice[bit]:
                    value |= 1 << bit
            table[xs] = value
        rel[name] = table
    consts = {c: domain[rng.randrange(n)] for c in sorted(sig.constants)}
    return BValuedModel(b, domain, eq, rel, consts)


def random_model_with_qe(
    sig: Signature,
    rng: random.Random,
    max_atoms: int = 3,
) -> BValuedModel:
    """Like random_model, but the fresh constants surject onto the domain, so
    the quantifier-elimination axiom gets value 1."""
    fresh = sorted(sig.fresh_constants)
    if not fresh:
        raise BoolkitError("signature has no fresh constants")
    m = random_model(sig, rng, max_atoms=max_atoms, max_domain=len(fresh))
    consts = dict(m.consts)
    shuffled = list(m.domain)
    rng.shuffle(shuffled)
    for i, c in enumerate(fresh):
        consts[c] = shuffled[i % len(shuffled)]
    return BValuedModel(m.algebra, m.domain, m.eq, m.rel, consts)


def bits_to_string(x: int, atom_count: int) -> str:
    return "".join("1" if x >> i & 1 else "0" for i in range(atom_count))


def bits_from_string(s: str) -> int:
    out = 0
    for i, ch in enumerate(s):
        if ch == "1":
            out |= 1 << i
        elif ch != "0":
            raise BoolkitError(f"malformed bitstring {s!r}")
    return out


def model_to_json(m: BValuedModel) -> dict:
    """Interchange format: atoms listed, tables as bitstring matrices."""
    k = m.algebra.atom_count
    domain = [str(x) for x in m.domain]
    eq = [
        [bits_to_string(m.eq[(a, b)], k) for b in m.domain] for a in m.domain
    ]
    rel = {}
    for name in sorted(m.rel):
        table = m.rel[name]
        arity = len(next(iter(table))) if table else 0
        entries = {}
        for combo in itertools.product(m.domain, repeat=arity):
            entries[" ".join(str(x) for x in combo)] = bits_to_string(table[combo], k)
        rel[name] = entries
    return {
        "algebra": {"atoms": [f"a{i}" for i in range(k)]},
        "domain": domain,
        "eq": eq,
        "rel": rel,
        "consts": {name: str(elem) for name, elem in sorted(m.consts.items())},
    }


def model_from_json(doc: dict) -> BValuedModel:
    k = len(doc["algebra"]["atoms"])
    algebra = FiniteBooleanAlgebra(k)
    domain = tuple(doc["domain"])
    eq = {}
    for i, a in enumerate(domain):
        for j, b in enumerate(domain):
            eq[(a, b)] = bits_from_string(doc["eq"][i][j])
    rel = {}
    for name, entries in doc.get("rel", {}).items():
        table = {}
        for key, bits in entries.items():
            combo = tuple(key.split()) if key else ()
            table[combo] = bits_from_string(bits)
        rel[name] = table
    consts = dict(doc.get("consts", {}))
    return BValuedModel(algebra, domain, eq, rel, consts)


def sentence_catalog(sig: Signature, depth: int = 3, limit: int = 60) -> list:
    """A deterministic catalog of sentences over the signature, grown to the
    requested connective depth.  Used by the fullness checker and the
    quotient agreement tests."""
    consts = sorted(sig.constants)
    atoms = []
    for c in consts[:3]:
        for d in consts[:3]:
            atoms.append(Eq(c, d))
    for name, arity in sorted(sig.relations.items()):
        for combo in itertools.product(consts[:2], repeat=arity):
            atoms.append(Atom(name, combo))
    catalog = list(atoms[:limit])
    layer = list(catalog)
    for _ in range(depth - 1):
        new_layer = []
        for i, f in enumerate(layer):
            new_layer.append(Not(f))
            if i + 1 < len(layer):
                new_layer.append(And((f, layer[i + 1])))
                new_layer.append(Or((f, layer[i + 1])))
        layer = new_layer[: max(4, limit // 4)]
        catalog.extend(layer)
    x = "?x"
    quantified = []
    for c in consts[:2]:
        quantified.append(Exists((x,), Eq(x, c)))
        quantified.append(Forall((x,), Or((Eq(x, c), Not(Eq(x, c))))))
    for name, arity in sorted(sig.relations.items()):
        if arity >= 1:
            args = (x,) + tuple(consts[:1] * (arity - 1))
            quantified.append(Exists((x,), Atom(name, args)))
            quantified.append(Forall((x,), Not(Atom(name, args))))
    catalog.extend(quantified)
    return catalog[:limit]


def existential_catalog(sig: Signature, limit: int = 12) -> list:
    """Existential formulas with parameters, for fullness checks."""
    x, w = "?x", "?w"
    catalog = [Exists((x,), Eq(x, w))]
    for name, arity in sorted(sig.relations.items()):
        if arity >= 1:
            args = (x,) + (w,) * (arity - 1)
            catalog.append(Exists((x,), Atom(name, args)))
            catalog.append(Exists((x,), And((Atom(name, args), Eq(x, w)))))
    catalog.append(Exists((x,), Or((Eq(x, w), Not(Eq(x, w))))))
    catalog.append(Exists((x,), Not(Eq(x, w))))
    return catalog[:limit]
