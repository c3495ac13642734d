"""Shared fixtures, random generators, and independent reference oracles.

The reference implementations here deliberately avoid the package's own code
paths: classical truth is computed by direct recursion, satisfiability by
enumerating partitions and relation assignments, and regularization by the
textbook interior-of-closure construction.
"""
import itertools
import random

import pytest

from boolkit import syntax
from boolkit.syntax import And, Atom, Eq, Exists, Forall, Not, Or, Signature


@pytest.fixture
def sig1():
    return Signature(relations={"R": 1}, base_constants={"c0", "c1"}, fresh_constants={"e0"})


@pytest.fixture
def sig_eq():
    return Signature(relations={}, base_constants=set(), fresh_constants={"c", "d"})


# ---------------------------------------------------------------------------
# random formulas and models


def random_formula(sig, rng, depth, scope=()):
    terms = sorted(sig.constants) + list(scope)

    def atom():
        choices = []
        if len(terms) >= 1:
            choices.append("eq")
        if sig.relations:
            choices.append("rel")
        kind = rng.choice(choices)
        if kind == "eq":
            return Eq(rng.choice(terms), rng.choice(terms))
        name = rng.choice(sorted(sig.relations))
        arity = sig.relations[name]
        return Atom(name, tuple(rng.choice(terms) for _ in range(arity)))

    def go(d, scope):
        terms[:] = sorted(sig.constants) + list(scope)
        if d == 0:
            return atom()
        kind = rng.choice(["not", "and", "or", "forall", "exists", "atom"])
        if kind == "atom":
            return atom()
        if kind == "not":
            return Not(go(d - 1, scope))
        if kind in ("and", "or"):
            n = rng.choice([0, 1, 2, 2])
            children = tuple(go(d - 1, scope) for _ in range(n))
            return And(children) if kind == "and" else Or(children)
        var = f"?v{len(scope)}"
        body = go(d - 1, scope + (var,))
        return (Forall if kind == "forall" else Exists)((var,), body)

    return go(depth, tuple(scope))


def random_sentence(sig, rng, depth):
    f = random_formula(sig, rng, depth)
    fv = sorted(syntax.free_vars(f))
    if fv:
        consts = sorted(sig.constants)
        f = syntax.substitute(f, {v: rng.choice(consts) for v in fv})
    return f


# ---------------------------------------------------------------------------
# independent classical evaluator (two-valued reference)


def classical_eval(m, f, env=None):
    env = env or {}

    def term(t):
        if syntax.is_var(t):
            return env[t]
        return m.consts[t]

    if isinstance(f, Eq):
        return m.eq[(term(f.left), term(f.right))] == m.algebra.one
    if isinstance(f, Atom):
        return m.rel[f.rel][tuple(term(t) for t in f.args)] == m.algebra.one
    if isinstance(f, Not):
        return not classical_eval(m, f.body, env)
    if isinstance(f, And):
        return all(classical_eval(m, c, env) for c in f.children)
    if isinstance(f, Or):
        return any(classical_eval(m, c, env) for c in f.children)
    if isinstance(f, (Forall, Exists)):
        combos = itertools.product(m.domain, repeat=len(f.vars))
        results = (
            classical_eval(m, f.body, {**env, **dict(zip(f.vars, combo))})
            for combo in combos
        )
        return all(results) if isinstance(f, Forall) else any(results)
    raise TypeError(f)


# ---------------------------------------------------------------------------
# independent ground satisfiability by exhaustive enumeration


def _partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def brute_force_satisfiable(sentences, sig):
    """Enumerate all structures generated by the constants and evaluate
    classically.  Ground sentences only."""
    consts = sorted(sig.constants)
    for part in _partitions(consts):
        rep = {}
        for block in part:
            r = min(block)
            for c in block:
                rep[c] = r
        blocks = sorted({rep[c] for c in consts})
        rel_atoms = []
        for name, arity in sorted(sig.relations.items()):
            for combo in itertools.product(blocks, repeat=arity):
                rel_atoms.append((name, combo))
        for bits in range(1 << len(rel_atoms)):
            true_atoms = {rel_atoms[i] for i in range(len(rel_atoms)) if bits >> i & 1}

            def ev(f):
                if isinstance(f, Eq):
                    return rep[f.left] == rep[f.right]
                if isinstance(f, Atom):
                    return (f.rel, tuple(rep[a] for a in f.args)) in true_atoms
                if isinstance(f, Not):
                    return not ev(f.body)
                if isinstance(f, And):
                    return all(ev(c) for c in f.children)
                if isinstance(f, Or):
                    return any(ev(c) for c in f.children)
                raise TypeError(f)

            if all(ev(f) for f in sentences):
                return True
    return False


# ---------------------------------------------------------------------------
# independent regularization oracle


def interior_of_closure(poset, u):
    """Textbook int(cl(u)) in the topology whose opens are the down-closed
    sets of the strength order."""
    elements = set(poset.elements)
    u = set(u)
    closure = {q for q in elements if any(poset.leq(r, q) for r in u)} | u
    down = {
        q: {r for r in elements if poset.leq(r, q)} for q in elements
    }
    return frozenset(q for q in elements if down[q] <= closure)
