"""Relational signatures, formula trees, S-expression parsing, substitution,
negation normal form, subsentence enumeration, and the quantifier-elimination
transform.

Terms are plain strings: a token starting with ``?`` is a variable, anything
else is a constant name.  Conjunctions and disjunctions are n-ary (possibly
empty: the empty conjunction is the true sentence, the empty disjunction the
false one).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import ParseError, SignatureError

VAR_PREFIX = "?"
_RESERVED = {"and", "or", "not", "forall", "exists", "="}


def is_var(term: str) -> bool:
    return term.startswith(VAR_PREFIX)


# ---------------------------------------------------------------------------
# signature


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities, base constants, and a disjoint pool of
    fresh constants used for subsentence substitution and witnessing."""

    relations: Mapping[str, int]
    base_constants: frozenset
    fresh_constants: frozenset

    def __init__(self, relations=None, base_constants=(), fresh_constants=()):
        object.__setattr__(self, "relations", dict(relations or {}))
        object.__setattr__(self, "base_constants", frozenset(base_constants))
        object.__setattr__(self, "fresh_constants", frozenset(fresh_constants))
        self._check()

    def _check(self):
        if self.base_constants & self.fresh_constants:
            raise SignatureError("base and fresh constants must be disjoint")
        names = list(self.relations) + list(self.base_constants | self.fresh_constants)
        if len(names) != len(set(names)):
            raise SignatureError("relation and constant names must be pairwise distinct")
        for name in names:
            if is_var(name) or name in _RESERVED:
                raise SignatureError(f"illegal symbol name {name!r}")
        for rel, arity in self.relations.items():
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"arity of {rel!r} must be a non-negative integer")

    @property
    def constants(self) -> frozenset:
        return self.base_constants | self.fresh_constants

    def to_json(self) -> dict:
        return {
            "relations": dict(sorted(self.relations.items())),
            "base_constants": sorted(self.base_constants),
            "fresh_constants": sorted(self.fresh_constants),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Signature":
        return cls(
            relations=data.get("relations", {}),
            base_constants=data.get("base_constants", ()),
            fresh_constants=data.get("fresh_constants", ()),
        )

    @classmethod
    def loads(cls, text: str) -> "Signature":
        return cls.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# formula trees


class Formula:
    """Base class; concrete nodes are the frozen dataclasses below.

    Instances are immutable; hashes and renderings are cached per instance
    because trees are compared and re-rendered constantly in set-heavy code.
    """

    def __repr__(self):
        return render(self)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(render(self))
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return render(self) == render(other)


@dataclass(frozen=True, repr=False, eq=False)
class Atom(Formula):
    rel: str
    args: tuple

    def __init__(self, rel, args=()):
        object.__setattr__(self, "rel", rel)
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True, repr=False, eq=False)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True, repr=False, eq=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False, eq=False)
class And(Formula):
    children: tuple

    def __init__(self, children=()):
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True, repr=False, eq=False)
class Or(Formula):
    children: tuple

    def __init__(self, children=()):
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True, repr=False, eq=False)
class Forall(Formula):
    vars: tuple
    body: Formula

    def __init__(self, vars, body):
        object.__setattr__(self, "vars", tuple(vars))
        object.__setattr__(self, "body", body)


@dataclass(frozen=True, repr=False, eq=False)
class Exists(Formula):
    vars: tuple
    body: Formula

    def __init__(self, vars, body):
        object.__setattr__(self, "vars", tuple(vars))
        object.__setattr__(self, "body", body)


TRUE = And(())
FALSE = Or(())


@dataclass(frozen=True)
class Theory:
    """A finite sequence of sentences."""

    sentences: tuple

    def __init__(self, sentences=()):
        sentences = tuple(sentences)
        for f in sentences:
            if free_vars(f):
                raise ValueError(f"theory member has free variables: {render(f)}")
        object.__setattr__(self, "sentences", sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)


def subformulas(f: Formula) -> Iterator[Formula]:
    """All nodes of the tree, root first, each occurrence once."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or)):
        for child in f.children:
            yield from subformulas(child)
    elif isinstance(f, (Forall, Exists)):
        yield from subformulas(f.body)


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(t for t in f.args if is_var(t))
    if isinstance(f, Eq):
        return frozenset(t for t in (f.left, f.right) if is_var(t))
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for child in f.children:
            out |= free_vars(child)
        return out
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - frozenset(f.vars)
    raise TypeError(f"not a formula: {f!r}")


def constants_of(f: Formula) -> frozenset:
    """Constant names occurring anywhere in the tree."""
    if isinstance(f, Atom):
        return frozenset(t for t in f.args if not is_var(t))
    if isinstance(f, Eq):
        return frozenset(t for t in (f.left, f.right) if not is_var(t))
    if isinstance(f, Not):
        return constants_of(f.body)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for child in f.children:
            out |= constants_of(child)
        return out
    if isinstance(f, (Forall, Exists)):
        return constants_of(f.body)
    raise TypeError(f"not a formula: {f!r}")


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, (Forall, Exists)) for g in subformulas(f))


def validate(f: Formula, sig: Signature) -> None:
    """Raise if an arity is wrong, a constant is undeclared, or a quantifier
    block repeats a variable."""
    for g in subformulas(f):
        if isinstance(g, Atom):
            if g.rel not in sig.relations:
                raise SignatureError(f"undeclared relation {g.rel!r}")
            if len(g.args) != sig.relations[g.rel]:
                raise SignatureError(
                    f"relation {g.rel!r} expects {sig.relations[g.rel]} arguments, got {len(g.args)}"
                )
            terms = g.args
        elif isinstance(g, Eq):
            terms = (g.left, g.right)
        elif isinstance(g, (Forall, Exists)):
            if len(set(g.vars)) != len(g.vars):
                raise SignatureError(f"duplicate variable in quantifier block {g.vars}")
            if any(not is_var(v) for v in g.vars):
                raise SignatureError(f"quantifier block {g.vars} must bind variables")
            terms = ()
        else:
            terms = ()
        for t in terms:
            if not is_var(t) and t not in sig.constants:
                raise SignatureError(f"undeclared constant {t!r}")


# ---------------------------------------------------------------------------
# printing and parsing


def render(f: Formula) -> str:
    cached = f.__dict__.get("_render") if isinstance(f, Formula) else None
    if cached is not None:
        return cached
    if isinstance(f, Atom):
        out = "(" + " ".join((f.rel,) + f.args) + ")"
    elif isinstance(f, Eq):
        out = f"(= {f.left} {f.right})"
    elif isinstance(f, Not):
        out = f"(not {render(f.body)})"
    elif isinstance(f, And):
        out = "(and" + "".join(" " + render(c) for c in f.children) + ")"
    elif isinstance(f, Or):
        out = "(or" + "".join(" " + render(c) for c in f.children) + ")"
    elif isinstance(f, Forall):
        out = f"(forall ({' '.join(f.vars)}) {render(f.body)})"
    elif isinstance(f, Exists):
        out = f"(exists ({' '.join(f.vars)}) {render(f.body)})"
    else:
        raise TypeError(f"not a formula: {f!r}")
    object.__setattr__(f, "_render", out)
    return out


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append((c, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = sig
        self.text_len = len(text)

    def peek(self):
        if self.pos >= len(self.tokens):
            return None, self.text_len
        return self.tokens[self.pos]

    def next(self):
        tok, at = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", at)
        self.pos += 1
        return tok, at

    def expect(self, want):
        tok, at = self.next()
        if tok != want:
            raise ParseError(f"expected {want!r}, found {tok!r}", at)
        return at

    def term(self):
        tok, at = self.next()
        if tok in "()":
            raise ParseError("expected a term", at)
        if not is_var(tok) and tok not in self.sig.constants:
            raise ParseError(f"undeclared symbol {tok!r}", at)
        return tok

    def formula(self) -> Formula:
        at = self.expect("(")
        head, head_at = self.next()
        if head == "and" or head == "or":
            children = []
            while True:
                tok, _ = self.peek()
                if tok == ")":
                    self.next()
                    break
                children.append(self.formula())
            return And(children) if head == "and" else Or(children)
        if head == "not":
            body = self.formula()
            self.expect(")")
            return Not(body)
        if head in ("forall", "exists"):
            self.expect("(")
            vars = []
            while True:
                tok, tok_at = self.next()
                if tok == ")":
                    break
                if not is_var(tok):
                    raise ParseError(f"quantified name {tok!r} must start with '?'", tok_at)
                if tok in vars:
                    raise ParseError(f"duplicate variable {tok!r} in quantifier block", tok_at)
                vars.append(tok)
            body = self.formula()
            self.expect(")")
            return (Forall if head == "forall" else Exists)(vars, body)
        if head == "=":
            left = self.term()
            right = self.term()
            self.expect(")")
            return Eq(left, right)
        if head in self.sig.relations:
            args = []
            while True:
                tok, _ = self.peek()
                if tok == ")":
                    self.next()
                    break
                args.append(self.term())
            if len(args) != self.sig.relations[head]:
                raise ParseError(
                    f"relation {head!r} expects {self.sig.relations[head]} arguments, got {len(args)}",
                    head_at,
                )
            return Atom(head, args)
        raise ParseError(f"undeclared symbol {head!r}", head_at)


def parse(text: str, sig: Signature) -> Formula:
    """Parse a formula in the S-expression grammar.

    Grammar: ``(and f...)``, ``(or f...)``, ``(not f)``, ``(forall (?v...) f)``,
    ``(exists (?v...) f)``, ``(= t t)``, ``(REL t...)``.  Tokens starting with
    ``?`` are variables; everything else must be declared in the signature.
    """
    p = _Parser(text, sig)
    f = p.formula()
    tok, at = p.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok!r}", at)
    return f


# ---------------------------------------------------------------------------
# substitution


def substitute(f: Formula, binding: Mapping[str, str]) -> Formula:
    """Replace free occurrences of the bound variables by constants.

    Occurrences captured by a quantifier are left untouched; binding a
    variable that never occurs free is a no-op.
    """
    if not binding:
        return f

    def sub_term(t):
        return binding.get(t, t)

    if isinstance(f, Atom):
        return Atom(f.rel, tuple(sub_term(t) for t in f.args))
    if isinstance(f, Eq):
        return Eq(sub_term(f.left), sub_term(f.right))
    if isinstance(f, Not):
        return Not(substitute(f.body, binding))
    if isinstance(f, And):
        return And(tuple(substitute(c, binding) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(substitute(c, binding) for c in f.children))
    if isinstance(f, (Forall, Exists)):
        inner = {v: c for v, c in binding.items() if v not in f.vars}
        if not inner:
            return f
        return type(f)(f.vars, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def replace_constant(f: Formula, old: str, new: str) -> Formula:
    """Replace every occurrence of the constant ``old`` by ``new``."""
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(new if t == old else t for t in f.args))
    if isinstance(f, Eq):
        return Eq(new if f.left == old else f.left, new if f.right == old else f.right)
    if isinstance(f, Not):
        return Not(replace_constant(f.body, old, new))
    if isinstance(f, And):
        return And(tuple(replace_constant(c, old, new) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(replace_constant(c, old, new) for c in f.children))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.vars, replace_constant(f.body, old, new))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# negation normal form


def nnf_step(f: Formula) -> Formula:
    """One step of moving a negation inside: returns a formula equivalent to
    the negation of ``f``.

    Atomic f gives ``(not f)``; ``(not g)`` gives ``g``; conjunctions and
    disjunctions dualize with negated children; quantifiers dualize with a
    negated body.
    """
    if isinstance(f, (Atom, Eq)):
        return Not(f)
    if isinstance(f, Not):
        return f.body
    if isinstance(f, And):
        return Or(tuple(Not(c) for c in f.children))
    if isinstance(f, Or):
        return And(tuple(Not(c) for c in f.children))
    if isinstance(f, Forall):
        return Exists(f.vars, Not(f.body))
    if isinstance(f, Exists):
        return Forall(f.vars, Not(f.body))
    raise TypeError(f"not a formula: {f!r}")


def nnf(f: Formula) -> Formula:
    """Full negation normal form: ``not`` ends up applied only to atoms."""
    if isinstance(f, (Atom, Eq)):
        return f
    if isinstance(f, Not):
        if isinstance(f.body, (Atom, Eq)):
            return f
        return nnf(nnf_step(f.body))
    if isinstance(f, And):
        return And(tuple(nnf(c) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(nnf(c) for c in f.children))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.vars, nnf(f.body))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# canonical forms


def canon(f: Formula) -> Formula:
    """Canonical representative: children of ``and``/``or`` sorted by their
    rendering (duplicates kept, order forgotten)."""
    cached = f.__dict__.get("_canon")
    if cached is not None:
        return cached
    if isinstance(f, (Atom, Eq)):
        out = f
    elif isinstance(f, Not):
        out = Not(canon(f.body))
    elif isinstance(f, (And, Or)):
        kids = sorted((canon(c) for c in f.children), key=render)
        out = type(f)(tuple(kids))
    elif isinstance(f, (Forall, Exists)):
        out = type(f)(f.vars, canon(f.body))
    else:
        raise TypeError(f"not a formula: {f!r}")
    object.__setattr__(out, "_canon", out)
    object.__setattr__(f, "_canon", out)
    return out


def conjuncts(f: Formula) -> frozenset:
    """Flatten nested conjunctions into the set of leaf conjuncts."""
    if isinstance(f, And):
        out = set()
        for c in f.children:
            out |= conjuncts(c)
        return frozenset(out)
    return frozenset({canon(f)})


def conjunction_key(f: Formula) -> frozenset:
    """Identity of a conjunction up to flattening, order, and repetition."""
    return frozenset(render(c) for c in conjuncts(f))


def big_and(formulas) -> Formula:
    fs = sorted({canon(f) for f in formulas}, key=render)
    if len(fs) == 1:
        return fs[0]
    return And(tuple(fs))


# ---------------------------------------------------------------------------
# subsentences


def subsentences(psi: Formula, sig: Signature) -> frozenset:
    """Every sentence obtained from a subformula of ``psi`` by substituting
    constants from the base-plus-fresh pool for its free variables.

    Includes ``psi`` itself; all members are canonical sentences.
    """
    if not is_sentence(psi):
        raise ValueError("subsentences is defined on sentences only")
    pool = sorted(sig.constants)
    out = set()
    for sub in set(subformulas(psi)):
        fv = sorted(free_vars(sub))
        if not fv:
            out.add(canon(sub))
            continue
        if not pool:
            continue
        for combo in itertools.product(pool, repeat=len(fv)):
            out.add(canon(substitute(sub, dict(zip(fv, combo)))))
    return frozenset(out)


# ---------------------------------------------------------------------------
# quantifier elimination relative to the fresh constants


def qe_axiom(sig: Signature) -> Formula:
    """The axiom forcing every element to be named by a fresh constant:
    for all x, x equals one of them."""
    if not sig.fresh_constants:
        raise ValueError("quantifier-elimination axiom needs a nonempty fresh-constant pool")
    x = "?x"
    return Forall((x,), Or(tuple(Eq(x, c) for c in sorted(sig.fresh_constants))))


def qe_transform(psi: Formula, sig: Signature) -> Formula:
    """Replace every quantified subformula by the conjunction (for ``forall``)
    or disjunction (for ``exists``) of its fresh-constant instances, bottom-up
    along the whole tree.  The output is quantifier free."""
    if not is_sentence(psi):
        raise ValueError("qe_transform is defined on sentences only")
    if not sig.fresh_constants and not is_quantifier_free(psi):
        raise ValueError("qe_transform needs a nonempty fresh-constant pool")
    pool = sorted(sig.fresh_constants)

    def go(f: Formula) -> Formula:
        if isinstance(f, (Atom, Eq)):
            return f
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, And):
            return And(tuple(go(c) for c in f.children))
        if isinstance(f, Or):
            return Or(tuple(go(c) for c in f.children))
        if isinstance(f, (Forall, Exists)):
            body = go(f.body)
            instances = tuple(
                substitute(body, dict(zip(f.vars, combo)))
                for combo in itertools.product(pool, repeat=len(f.vars))
            )
            return And(instances) if isinstance(f, Forall) else Or(instances)
        raise TypeError(f"not a formula: {f!r}")

    return go(psi)
