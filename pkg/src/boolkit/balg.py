"""Finite Boolean algebras as atom bitmasks, finite posets, filters, quotient
algebras, and the regular-open completion of a finite poset.

An algebra element is an ``int`` whose bits select atoms.  The poset order
convention follows forcing practice: ``s <= t`` means s is the stronger
condition (s extends t).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import BoolkitError


@dataclass(frozen=True)
class FiniteBooleanAlgebra:
    """The powerset algebra on ``atom_count`` atoms; every finite Boolean
    algebra has this form."""

    atom_count: int

    def __post_init__(self):
        if self.atom_count < 0:
            raise BoolkitError("atom_count must be non-negative")

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return (1 << self.atom_count) - 1

    def meet(self, x: int, y: int) -> int:
        return x & y

    def join(self, x: int, y: int) -> int:
        return x | y

    def complement(self, x: int) -> int:
        return self.one ^ x

    def leq(self, x: int, y: int) -> bool:
        return x & ~y == 0

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.one
        for x in xs:
            out &= x
        return out

    def join_all(self, xs: Iterable[int]) -> int:
        out = 0
        for x in xs:
            out |= x
        return out

    def is_element(self, x) -> bool:
        return isinstance(x, int) and 0 <= x <= self.one

    def is_atom(self, x: int) -> bool:
        return x != 0 and x & (x - 1) == 0

    def atoms(self) -> list:
        return [1 << i for i in range(self.atom_count)]

    def elements(self) -> Iterator[int]:
        # exhaustive; only sensible for small algebras
        if self.atom_count > 20:
            raise BoolkitError("refusing to enumerate more than 2^20 elements")
        return iter(range(self.one + 1))

    def antichains(self, max_size: int) -> Iterator[tuple]:
        """All sets of pairwise-disjoint nonzero elements of size <= max_size,
        as sorted tuples (the empty antichain included)."""
        nonzero = [x for x in self.elements() if x != 0]

        def extend(prefix, start, room):
            yield tuple(prefix)
            if room == 0:
                return
            for i in range(start, len(nonzero)):
                x = nonzero[i]
                if all(x & y == 0 for y in prefix):
                    prefix.append(x)
                    yield from extend(prefix, i + 1, room - 1)
                    prefix.pop()

        yield from extend([], 0, max_size)


TWO = FiniteBooleanAlgebra(1)


@dataclass(frozen=True)
class Filter:
    """A filter on a finite algebra, stored by its principal generator
    (every filter on a finite Boolean algebra is principal)."""

    algebra: FiniteBooleanAlgebra
    generator: int

    def __post_init__(self):
        if not self.algebra.is_element(self.generator):
            raise BoolkitError("generator is not an algebra element")
        if self.generator == 0:
            raise BoolkitError("a filter may not contain 0")

    @classmethod
    def from_members(cls, algebra: FiniteBooleanAlgebra, members: Iterable[int]) -> "Filter":
        ms = frozenset(members)
        if not ms:
            raise BoolkitError("a filter is nonempty")
        if 0 in ms:
            raise BoolkitError("a filter excludes 0")
        g = algebra.meet_all(ms)
        if g == 0:
            raise BoolkitError("member set is not closed under meet without hitting 0")
        expected = frozenset(x for x in algebra.elements() if algebra.leq(g, x))
        if ms != expected:
            raise BoolkitError("member set is not upward closed / meet closed")
        return cls(algebra, g)

    def __contains__(self, x: int) -> bool:
        return self.algebra.leq(self.generator, x)

    def members(self) -> frozenset:
        return frozenset(x for x in self.algebra.elements() if self.generator & ~x == 0)

    @property
    def is_ultra(self) -> bool:
        return self.algebra.is_atom(self.generator)


def ultrafilters(b: FiniteBooleanAlgebra) -> list:
    """One ultrafilter per atom: the principal filter above it."""
    return [Filter(b, a) for a in b.atoms()]


def quotient_algebra(b: FiniteBooleanAlgebra, f: Filter) -> tuple:
    """Quotient by a filter: elements are identified when their symmetric
    difference lies outside the filter's generator.

    Returns the quotient algebra together with the projection map, a
    surjective homomorphism with pi(x) = pi(y) iff (x <-> y) in f.
    """
    if f.algebra != b:
        raise BoolkitError("filter belongs to a different algebra")
    g = f.generator
    positions = [i for i in range(b.atom_count) if g >> i & 1]
    quotient = FiniteBooleanAlgebra(len(positions))

    def project(x: int) -> int:
        out = 0
        for j, i in enumerate(positions):
            if x >> i & 1:
                out |= 1 << j
        return out

    return quotient, project


# ---------------------------------------------------------------------------
# posets and their regular-open completion


class Poset:
    """A finite poset with hashable elements; order axioms are checked on
    construction.  ``leq(s, t)`` reads "s is at least as strong as t"."""

    def __init__(self, elements: Iterable, leq_pairs: Iterable = None, leq: Callable = None):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise BoolkitError("poset elements must be distinct")
        self._index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        if leq is not None:
            rel = {(a, b) for a in self.elements for b in self.elements if leq(a, b)}
        else:
            rel = set(leq_pairs or ())
        # down masks: bit i of down[j] means elements[i] <= elements[j]
        self._down = [0] * n
        for (a, b) in rel:
            if a not in self._index or b not in self._index:
                raise BoolkitError(f"order pair {(a, b)!r} mentions a non-element")
            self._down[self._index[b]] |= 1 << self._index[a]
        for i in range(n):
            self._down[i] |= 1 << i
        self._check_axioms()

    def _check_axioms(self):
        n = len(self.elements)
        for i in range(n):
            mask = self._down[i]
            m = mask
            while m:
                low = m & -m
                j = low.bit_length() - 1
                m ^= low
                if self._down[j] & ~mask:
                    raise BoolkitError("order is not transitive")
                if i != j and self._down[j] >> i & 1:
                    raise BoolkitError("order is not antisymmetric")

    def __len__(self):
        return len(self.elements)

    def leq(self, a, b) -> bool:
        return self._down[self._index[b]] >> self._index[a] & 1 == 1

    def down_mask(self, a) -> int:
        return self._down[self._index[a]]

    def mask_of(self, subset: Iterable) -> int:
        out = 0
        for e in subset:
            out |= 1 << self._index[e]
        return out

    def set_of(self, mask: int) -> frozenset:
        return frozenset(e for i, e in enumerate(self.elements) if mask >> i & 1)

    def regularize_mask(self, u_mask: int) -> int:
        # touched = conditions with an extension inside u
        touched = 0
        for j, dj in enumerate(self._down):
            if dj & u_mask:
                touched |= 1 << j
        out = 0
        for i, di in enumerate(self._down):
            if di & ~touched == 0:
                out |= 1 << i
        return out


def regularize(p: Poset, u: Iterable) -> frozenset:
    """Interior-of-closure in the topology of down-sets: the elements q such
    that below every r <= q some member of u appears.  Idempotent."""
    u = set(u)
    if not u <= set(p.elements):
        raise BoolkitError("u must be a subset of the poset")
    return p.set_of(p.regularize_mask(p.mask_of(u)))


@dataclass(frozen=True)
class ROCompletion:
    """Regular-open completion of a finite poset.

    ``algebra`` is the completion in canonical atom form, ``cone`` maps each
    poset element q to the image of its cone (the regularized down-set of q);
    the map is order preserving with dense image.
    """

    poset: Poset
    algebra: FiniteBooleanAlgebra
    cone: dict
    _atom_masks: tuple

    def element_of(self, regular_open: Iterable) -> int:
        """Algebra element corresponding to a regular open set of conditions."""
        u_mask = self.poset.mask_of(regular_open)
        if self.poset.regularize_mask(u_mask) != u_mask:
            raise BoolkitError("set is not regular open")
        return self.element_of_mask(u_mask)

    def element_of_mask(self, u_mask: int) -> int:
        out = 0
        for j, a in enumerate(self._atom_masks):
            if a & ~u_mask == 0:
                out |= 1 << j
        return out

    def set_of_element(self, x: int) -> frozenset:
        mask = 0
        for j, a in enumerate(self._atom_masks):
            if x >> j & 1:
                mask |= a
        return self.poset.set_of(self.poset.regularize_mask(mask))


def ro_completion(p: Poset) -> ROCompletion:
    """Boolean completion of a finite poset by regular-open down-sets.

    Meet is intersection, join is the regularization of the union, and the
    complement of U consists of the conditions with no extension in U.  The
    algebra of regular opens is finite, hence a powerset algebra on its
    minimal nonzero members; cones are dense, so every atom is a cone.
    """
    if not p.elements:
        raise BoolkitError("ro_completion needs a nonempty poset")
    cone_masks = [p.regularize_mask(p.down_mask(q)) for q in p.elements]
    atom_masks = []
    for m in cone_masks:
        keep = True
        for other in cone_masks:
            if other != m and other & ~m == 0:
                keep = False
                break
        if keep and m not in atom_masks:
            atom_masks.append(m)
    atom_masks.sort()
    algebra = FiniteBooleanAlgebra(len(atom_masks))
    ro = ROCompletion(p, algebra, {}, tuple(atom_masks))
    cone = {q: ro.element_of_mask(cone_masks[i]) for i, q in enumerate(p.elements)}
    return ROCompletion(p, algebra, cone, tuple(atom_masks))
