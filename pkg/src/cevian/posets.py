"""Finite posets: validation, covers, down-sets, the cube P[3], and enumeration
up to isomorphism."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import ValidationError

__all__ = [
    "FinitePoset",
    "cube_poset",
    "format_index",
    "parse_index",
    "enumerate_posets",
    "P3_ELEMENTS",
]


@dataclass(frozen=True)
class FinitePoset:
    """A finite poset given by its elements and the full order relation."""

    elements: tuple
    leq_pairs: frozenset

    def __post_init__(self):
        els = set(self.elements)
        if len(els) != len(self.elements):
            raise ValidationError("duplicate poset element")
        for a, b in self.leq_pairs:
            if a not in els or b not in els:
                raise ValidationError(f"relation mentions unknown element {a!r} or {b!r}")
        for a in self.elements:
            if (a, a) not in self.leq_pairs:
                raise ValidationError(f"order is not reflexive at {a!r}")
        for a, b in self.leq_pairs:
            if a != b and (b, a) in self.leq_pairs:
                raise ValidationError(f"order is not antisymmetric at {a!r}, {b!r}")
        for a, b in self.leq_pairs:
            for c in self.elements:
                if (b, c) in self.leq_pairs and (a, c) not in self.leq_pairs:
                    raise ValidationError(f"order is not transitive at {a!r} <= {b!r} <= {c!r}")

    @classmethod
    def from_relation(cls, elements: Iterable[Hashable], pairs: Iterable[tuple]) -> "FinitePoset":
        """Reflexive-transitive closure of the given pairs."""
        els = tuple(elements)
        rel = {(a, a) for a in els} | set(pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        return cls(els, frozenset(rel))

    @classmethod
    def antichain(cls, elements: Sequence) -> "FinitePoset":
        return cls.from_relation(elements, ())

    @classmethod
    def chain(cls, elements: Sequence) -> "FinitePoset":
        return cls.from_relation(elements, zip(elements, elements[1:]))

    def __len__(self):
        return len(self.elements)

    def leq(self, a, b) -> bool:
        return (a, b) in self.leq_pairs

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq_pairs

    def covers(self) -> list:
        """Pairs (a, b) with b covering a, in element order."""
        out = []
        for a in self.elements:
            for b in self.elements:
                if self.lt(a, b) and not any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                    out.append((a, b))
        return out

    def down(self, a) -> frozenset:
        return frozenset(x for x in self.elements if self.leq(x, a))

    def up(self, a) -> frozenset:
        return frozenset(x for x in self.elements if self.leq(a, x))

    def is_downset(self, s) -> bool:
        return all(self.down(a) <= s for a in s)

    def downsets(self) -> list:
        """All down-sets, as frozensets, ordered by size then by element order."""
        idx = {a: i for i, a in enumerate(self.elements)}
        out = []
        for r in range(len(self.elements) + 1):
            for combo in itertools.combinations(self.elements, r):
                s = frozenset(combo)
                if self.is_downset(s):
                    out.append(s)
        out.sort(key=lambda s: (len(s), sorted(idx[a] for a in s)))
        return out

    def minimal(self, subset) -> list:
        return [a for a in self.elements if a in subset and not any(self.lt(b, a) for b in subset)]

    def upper_bounds(self, subset) -> frozenset:
        return frozenset(x for x in self.elements if all(self.leq(a, x) for a in subset))

    def linear_extension(self) -> list:
        rest = list(self.elements)
        out = []
        while rest:
            a = next(x for x in rest if not any(self.lt(y, x) for y in rest))
            out.append(a)
            rest.remove(a)
        return out

    def is_isotone(self, f, target: "FinitePoset") -> bool:
        return all(target.leq(f[a], f[b]) for a, b in self.leq_pairs)


P3_ELEMENTS = tuple(
    frozenset(c) for r in range(4) for c in itertools.combinations((1, 2, 3), r)
)


def format_index(p) -> str:
    """Text label of a subset of [3]: "0" for the empty set, digits otherwise."""
    if not p:
        return "0"
    return "".join(str(i) for i in sorted(p))


def parse_index(text: str) -> frozenset:
    t = text.strip()
    if t in ("0", "∅", "{}", "empty"):
        return frozenset()
    if not t.isdigit() or len(set(t)) != len(t):
        raise ValidationError(f"not a subset of [3]: {text!r}")
    p = frozenset(int(ch) for ch in t)
    if not p <= {1, 2, 3}:
        raise ValidationError(f"not a subset of [3]: {text!r}")
    return p


def cube_poset() -> FinitePoset:
    """P[3]: the subsets of {1,2,3} ordered by inclusion."""
    pairs = frozenset((p, q) for p in P3_ELEMENTS for q in P3_ELEMENTS if p <= q)
    return FinitePoset(P3_ELEMENTS, pairs)


# ---------------------------------------------------------- enumeration


def _canonical(n: int, below: Sequence[int]) -> tuple:
    """Least relation bitmask over all relabelings; ``below[i]`` is the bitmask of elements < i."""
    best = None
    for perm in itertools.permutations(range(n)):
        code = [0] * n
        for i in range(n):
            m = 0
            b = below[i]
            for j in range(n):
                if b >> j & 1:
                    m |= 1 << perm[j]
            code[perm[i]] = m
        key = tuple(code)
        if best is None or key < best:
            best = key
    return best


def enumerate_posets(n: int) -> list:
    """All posets on n points up to isomorphism, as FinitePoset over 0..n-1.

    Posets are grown one maximal point at a time (every poset has a linear
    extension), then deduplicated by the least relation code over all
    relabelings.  Counts for n = 0..5 are 1, 1, 2, 5, 16, 63.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    layer = {()}
    for k in range(n):
        nxt = set()
        for below in layer:
            # a new top-labelled point may sit above any down-set of the current poset
            for mask in range(1 << k):
                if all((below[j] & ~mask) == 0 for j in range(k) if mask >> j & 1):
                    nxt.add(below + (mask,))
        layer = {_canonical(k + 1, b) for b in nxt}
    out = []
    for below in sorted(layer):
        pairs = [(j, i) for i in range(n) for j in range(n) if below[i] >> j & 1]
        out.append(FinitePoset.from_relation(tuple(range(n)), pairs))
    return out
