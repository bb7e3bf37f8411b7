"""Finite distributive lattices as down-sets of a poset of join-irreducibles.

Elements are bitmasks over the join-irreducibles; join is ``|``, meet is
``&``.  In a finite distributive lattice ``{x : a <= b v x}`` has a least
element, ``min_diff(a, b)``, the down-set generated by ``a`` minus ``b``.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

from .errors import InconsistencyError, ValidationError
from .posets import FinitePoset, enumerate_posets

__all__ = [
    "FinDistLattice",
    "AxiomReport",
    "chain_lattice",
    "boolean_lattice",
    "square_plus_zero",
    "min_diff_bruteforce",
    "completely_normal",
    "completely_normal_bruteforce",
    "min_diff_table",
    "cevian_solve",
    "cevian_axiom_check",
    "all_tables",
    "product",
    "congruence_closure",
    "quotient",
    "ideal",
    "transport_product",
    "transport_quotient",
    "transport_ideal",
    "is_lattice_hom",
    "is_closed_hom",
    "enumerate_lattices",
]


class FinDistLattice:
    def __init__(self, poset: FinitePoset, name: str = ""):
        self.poset = poset
        self.name = name
        self.labels = [str(a) for a in poset.elements]
        n = len(poset)
        idx = {a: i for i, a in enumerate(poset.elements)}
        self.principal = []
        for a in poset.elements:
            m = 0
            for b in poset.down(a):
                m |= 1 << idx[b]
            self.principal.append(m)
        self.n = n
        self.top = (1 << n) - 1
        els = [m for m in range(1 << n) if self._is_down(m)]
        els.sort(key=lambda m: (bin(m).count("1"), m))
        self.elements = els
        self.index = {m: i for i, m in enumerate(els)}

    def _is_down(self, m: int) -> bool:
        return all(self.principal[i] & ~m == 0 for i in range(self.n) if m >> i & 1)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinDistLattice({self.name or 'D'}, {len(self)} elements)"

    zero = 0

    @staticmethod
    def join(a: int, b: int) -> int:
        return a | b

    @staticmethod
    def meet(a: int, b: int) -> int:
        return a & b

    @staticmethod
    def leq(a: int, b: int) -> bool:
        return a & ~b == 0

    def down_closure(self, m: int) -> int:
        out = 0
        for i in range(self.n):
            if m >> i & 1:
                out |= self.principal[i]
        return out

    def min_diff(self, a: int, b: int) -> int:
        return self.down_closure(a & ~b)

    def join_irreducibles(self) -> list:
        return list(self.principal)

    def element_name(self, m: int) -> str:
        if m == 0:
            return "0"
        top = [i for i in range(self.n) if m >> i & 1 and not any(
            j != i and m >> j & 1 and self.principal[j] >> i & 1 for j in range(self.n))]
        return "{" + ",".join(self.labels[i] for i in top) + "}"

    def parse_element(self, text: str) -> int:
        t = text.strip()
        if t == "0":
            return 0
        if t.startswith("{") and t.endswith("}"):
            t = t[1:-1]
        m = 0
        for part in t.split(","):
            part = part.strip()
            if part not in self.labels:
                raise ValidationError(f"unknown join-irreducible {part!r}")
            m |= self.principal[self.labels.index(part)]
        return m

    def covers(self) -> list:
        out = []
        for a in self.elements:
            for b in self.elements:
                if a != b and self.leq(a, b):
                    d = b & ~a
                    if d and d & (d - 1) == 0:
                        out.append((a, b))
        return out

    def ji_poset_of_elements(self) -> FinitePoset:
        """Join-irreducible elements read off the lattice order (Birkhoff round trip)."""
        jis = []
        for e in self.elements:
            lower = [a for a, b in self.covers() if b == e]
            if e and len(lower) == 1:
                jis.append(e)
        pairs = [(a, b) for a in jis for b in jis if self.leq(a, b)]
        return FinitePoset(tuple(jis), frozenset(pairs))

    @classmethod
    def from_lattice(cls, elements: Sequence, leq, name: str = ""):
        """Build from an explicit finite distributive lattice.

        Returns the lattice and the isomorphism (dict element -> bitmask).
        """
        els = list(elements)
        zeros = [e for e in els if all(leq(e, f) for f in els)]
        if len(zeros) != 1:
            raise ValidationError("lattice has no least element")

        def lower_covers(e):
            below = [f for f in els if f != e and leq(f, e)]
            return [f for f in below if not any(g != f and leq(f, g) for g in below)]

        jis = [e for e in els if e not in zeros and len(lower_covers(e)) == 1]
        pairs = [(jis.index(a), jis.index(b)) for a in jis for b in jis if leq(a, b)]
        poset = FinitePoset(tuple(range(len(jis))), frozenset(pairs))
        lat = cls(poset, name)
        iso = {}
        for e in els:
            m = 0
            for k, j in enumerate(jis):
                if leq(j, e):
                    m |= 1 << k
            iso[e] = m
        if sorted(iso.values()) != sorted(lat.elements) or len(set(iso.values())) != len(els):
            raise ValidationError("order is not a finite distributive lattice")
        for e in els:
            for f in els:
                if leq(e, f) != lat.leq(iso[e], iso[f]):
                    raise ValidationError("order is not a finite distributive lattice")
        return lat, iso


def chain_lattice(k: int) -> FinDistLattice:
    """The k-element chain (k >= 1)."""
    return FinDistLattice(FinitePoset.chain([f"c{i}" for i in range(1, k)]), f"chain{k}")


def boolean_lattice(k: int) -> FinDistLattice:
    names = "xyzuvw"[:k] if k <= 6 else [f"e{i}" for i in range(k)]
    return FinDistLattice(FinitePoset.antichain(list(names)), f"2^{k}")


def square_plus_zero() -> FinDistLattice:
    """A 2x2 square with a new bottom added below it."""
    poset = FinitePoset.from_relation(("z", "x", "y"), [("z", "x"), ("z", "y")])
    return FinDistLattice(poset, "square_plus_zero")


# ---------------------------------------------------------- normality


def min_diff_bruteforce(D: FinDistLattice, a: int, b: int) -> int:
    cands = [x for x in D.elements if D.leq(a, b | x)]
    least = [x for x in cands if all(D.leq(x, y) for y in cands)]
    if len(least) != 1:
        raise InconsistencyError("a minus b has no least element", {"a": a, "b": b})
    return least[0]


def completely_normal(D: FinDistLattice):
    """(True, None) or (False, (a, b)) with min_diff(a,b) and min_diff(b,a) meeting above 0."""
    for a in D.elements:
        for b in D.elements:
            if D.min_diff(a, b) & D.min_diff(b, a):
                return False, (a, b)
    return True, None


def completely_normal_bruteforce(D: FinDistLattice):
    for a in D.elements:
        for b in D.elements:
            ok = any(
                D.leq(a, b | u) and D.leq(b, a | v) and u & v == 0
                for u in D.elements
                for v in D.elements
            )
            if not ok:
                return False, (a, b)
    return True, None


# ---------------------------------------------------------- Cevian tables


@dataclass
class AxiomReport:
    ok: bool
    axiom: Optional[str] = None
    args: Optional[tuple] = None


def min_diff_table(D: FinDistLattice) -> dict:
    return {(a, b): D.min_diff(a, b) for a in D.elements for b in D.elements}


def cevian_axiom_check(D: FinDistLattice, T: Dict[tuple, int]) -> AxiomReport:
    """Check Cev1-Cev3 exhaustively, then the derived law (x\\y) ^ (y\\z) <= x\\z.

    The derived law follows from Cev2 and Cev3 alone; if those pass and it
    fails, something is broken and InconsistencyError is raised.
    """
    els = D.elements
    for a in els:
        for b in els:
            if (a, b) not in T or T[(a, b)] not in D.index:
                raise ValidationError("table is not total on the lattice")
    first = None
    for a in els:
        for b in els:
            if not D.leq(a, b | T[(a, b)]):
                first = first or AxiomReport(False, "Cev1", (a, b))
    cev2 = cev3 = True
    for a in els:
        for b in els:
            if T[(a, b)] & T[(b, a)]:
                cev2 = False
                first = first or AxiomReport(False, "Cev2", (a, b))
                break
        if not cev2:
            break
    for a, b, c in itertools.product(els, repeat=3):
        if not D.leq(T[(a, c)], T[(a, b)] | T[(b, c)]):
            cev3 = False
            first = first or AxiomReport(False, "Cev3", (a, b, c))
            break
    if cev2 and cev3:
        for a, b, c in itertools.product(els, repeat=3):
            if not D.leq(T[(a, b)] & T[(b, c)], T[(a, c)]):
                raise InconsistencyError(
                    "table satisfies Cev2 and Cev3 but not (x\\y) ^ (y\\z) <= x\\z",
                    {"lattice": D.name, "triple": (a, b, c)},
                )
    return first or AxiomReport(True)


def cevian_solve(D: FinDistLattice, stats: Optional[dict] = None) -> Optional[dict]:
    """Search for a Cevian table by backtracking; None means none exists.

    Domains are cut to Cev1-admissible values, made arc consistent for Cev2,
    and Cev3 is checked as soon as a triple is fully assigned.  Values are
    tried min_diff first, so on a completely normal lattice the min_diff
    table is found without backtracking.
    """
    els = D.elements
    variables = [(a, b) for a in els for b in els]
    domains = {}
    for a, b in variables:
        md = D.min_diff(a, b)
        dom = [c for c in els if D.leq(a, b | c)]
        dom.sort(key=lambda c: (c != md, D.index[c]))
        domains[(a, b)] = dom
    # arc consistency for Cev2 between (a,b) and (b,a)
    changed = True
    while changed:
        changed = False
        for a, b in variables:
            if a == b:
                keep = [c for c in domains[(a, b)] if c == 0]
            else:
                keep = [c for c in domains[(a, b)] if any(c & d == 0 for d in domains[(b, a)])]
            if len(keep) != len(domains[(a, b)]):
                domains[(a, b)] = keep
                changed = True
            if not keep:
                if stats is not None:
                    stats.update(nodes=0, wipeout=(a, b))
                return None

    assign: dict = {}
    nodes = 0

    def consistent(var) -> bool:
        a, b = var
        c = assign[var]
        rev = assign.get((b, a))
        if rev is not None and c & rev:
            return False
        get = assign.get
        for y in els:
            # var as x\z: c <= (a\y) v (y\b)
            p, q = get((a, y)), get((y, b))
            if p is not None and q is not None and c & ~(p | q):
                return False
            # var as x\y: a\y <= c v (b\y)
            p, q = get((a, y)), get((b, y))
            if p is not None and q is not None and p & ~(c | q):
                return False
            # var as y\z: y\b <= (y\a) v c
            p, q = get((y, b)), get((y, a))
            if p is not None and q is not None and p & ~(q | c):
                return False
        return True

    def search(k: int) -> bool:
        nonlocal nodes
        if k == len(variables):
            return True
        var = variables[k]
        for c in domains[var]:
            nodes += 1
            assign[var] = c
            if consistent(var) and search(k + 1):
                return True
            del assign[var]
        return False

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, len(variables) + 1000))
    try:
        found = search(0)
    finally:
        sys.setrecursionlimit(old)
    if stats is not None:
        stats.update(nodes=nodes)
    return dict(assign) if found else None


def all_tables(D: FinDistLattice):
    """Every total binary operation on D (only sensible for very small D)."""
    pairs = [(a, b) for a in D.elements for b in D.elements]
    for values in itertools.product(D.elements, repeat=len(pairs)):
        yield dict(zip(pairs, values))


# ---------------------------------------------------------- closure constructions


def product(D: FinDistLattice, E: FinDistLattice):
    """D x E, with the pairing map (a, b) -> element of the product."""
    els = [("L", a) for a in D.poset.elements] + [("R", b) for b in E.poset.elements]
    pairs = [(("L", a), ("L", b)) for a, b in D.poset.leq_pairs]
    pairs += [(("R", a), ("R", b)) for a, b in E.poset.leq_pairs]
    P = FinDistLattice(FinitePoset(tuple(els), frozenset(pairs)), f"{D.name}x{E.name}")
    P.labels = [f"L.{a}" for a in D.labels] + [f"R.{b}" for b in E.labels]

    def pair(a: int, b: int) -> int:
        return a | (b << D.n)

    return P, pair


def transport_product(D, E, TD: dict, TE: dict, P, pair) -> dict:
    out = {}
    for a, b in itertools.product(D.elements, E.elements):
        for c, d in itertools.product(D.elements, E.elements):
            out[(pair(a, b), pair(c, d))] = pair(TD[(a, c)], TE[(b, d)])
    return out


def congruence_closure(D: FinDistLattice, pairs: Iterable[tuple]) -> dict:
    """The least lattice congruence identifying the given pairs, as element -> class id."""
    parent = {e: e for e in D.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
            return True
        return False

    for a, b in pairs:
        union(a, b)
    changed = True
    while changed:
        changed = False
        for a in D.elements:
            for b in D.elements:
                if a < b and find(a) == find(b):
                    for c in D.elements:
                        changed |= union(a | c, b | c)
                        changed |= union(a & c, b & c)
    return {e: find(e) for e in D.elements}


def _is_congruence(D: FinDistLattice, cls: dict) -> Optional[tuple]:
    for a in D.elements:
        for b in D.elements:
            if cls[a] == cls[b]:
                for c in D.elements:
                    if cls[a | c] != cls[b | c] or cls[a & c] != cls[b & c]:
                        return (a, b, c)
    return None


def quotient(D: FinDistLattice, classes: Sequence[Iterable[int]]):
    """D modulo the partition ``classes`` (elements not listed are singletons).

    Returns the quotient lattice and the projection (dict element -> element).
    """
    cls = {e: e for e in D.elements}
    seen = set()
    for block in classes:
        block = list(block)
        for e in block:
            if e not in D.index:
                raise ValidationError(f"not a lattice element: {e!r}")
            if e in seen:
                raise ValidationError("classes overlap")
            seen.add(e)
        rep = min(block)
        for e in block:
            cls[e] = rep
    bad = _is_congruence(D, cls)
    if bad is not None:
        a, b, c = bad
        raise ValidationError(
            f"not a congruence: {D.element_name(a)} ~ {D.element_name(b)} but not after "
            f"joining or meeting with {D.element_name(c)}"
        )
    reps = sorted(set(cls.values()), key=lambda e: D.index[e])
    least = {r: min((e for e in D.elements if cls[e] == r), key=lambda e: D.index[e]) for r in reps}

    def leq(r, s):
        return cls[least[r] | least[s]] == s

    Q, iso = FinDistLattice.from_lattice(reps, leq, name=f"{D.name}/~")
    proj = {e: iso[cls[e]] for e in D.elements}
    Q.section = {iso[r]: least[r] for r in reps}
    return Q, proj


def transport_quotient(D, T: dict, Q, proj: dict) -> dict:
    sec = Q.section
    return {(x, y): proj[T[(sec[x], sec[y])]] for x in Q.elements for y in Q.elements}


def ideal(D: FinDistLattice, a: int):
    """The principal ideal of a, with its inclusion into D (dict element -> element)."""
    if a not in D.index:
        raise ValidationError("not a lattice element")
    keep = [i for i in range(D.n) if a >> i & 1]
    sub = FinitePoset(
        tuple(D.poset.elements[i] for i in keep),
        frozenset((x, y) for x, y in D.poset.leq_pairs
                  if D.poset.elements.index(x) in keep and D.poset.elements.index(y) in keep),
    )
    I = FinDistLattice(sub, f"{D.name}|{D.element_name(a)}")

    def incl(m: int) -> int:
        out = 0
        for k, i in enumerate(keep):
            if m >> k & 1:
                out |= 1 << i
        return out

    return I, {m: incl(m) for m in I.elements}


def transport_ideal(D, T: dict, I, incl: dict) -> dict:
    back = {v: k for k, v in incl.items()}
    out = {}
    for x in I.elements:
        for y in I.elements:
            X, Y = incl[x], incl[y]
            out[(x, y)] = back[X & T[(X, Y)]]
    return out


# ---------------------------------------------------------- homomorphisms


def is_lattice_hom(D: FinDistLattice, E: FinDistLattice, f: dict) -> Optional[str]:
    """None when f preserves 0, joins and meets; otherwise a description of the failure."""
    for a in D.elements:
        if a not in f or f[a] not in E.index:
            return f"map is not total on {D.element_name(a)}"
    if f[0] != 0:
        return "0 is not sent to 0"
    for a in D.elements:
        for b in D.elements:
            if f[a | b] != f[a] | f[b]:
                return f"join of {D.element_name(a)}, {D.element_name(b)} not preserved"
            if f[a & b] != f[a] & f[b]:
                return f"meet of {D.element_name(a)}, {D.element_name(b)} not preserved"
    return None


def is_closed_hom(D: FinDistLattice, E: FinDistLattice, f: dict):
    """(True, None) or (False, (a, a', b)) by a direct sweep over all a, a', b.

    Cross-checked against ``f(min_diff(a,a')) <= min_diff(f a, f a')``.
    """
    err = is_lattice_hom(D, E, f)
    if err:
        raise ValidationError(f"not a 0-lattice homomorphism: {err}")
    verdict, witness = True, None
    for a in D.elements:
        for a2 in D.elements:
            for b in E.elements:
                if not E.leq(f[a], f[a2] | b):
                    continue
                if not any(D.leq(a, a2 | x) and E.leq(f[x], b) for x in D.elements):
                    verdict, witness = False, (a, a2, b)
                    break
            if not verdict:
                break
        if not verdict:
            break
    shortcut = all(
        E.leq(f[D.min_diff(a, a2)], E.min_diff(f[a], f[a2])) for a in D.elements for a2 in D.elements
    )
    if shortcut != verdict:
        raise InconsistencyError("closedness sweep disagrees with the min_diff criterion", {"map": f})
    return verdict, witness


def enumerate_lattices(max_ji: int) -> list:
    """All finite distributive lattices with at most ``max_ji`` join-irreducibles, up to isomorphism."""
    out = []
    for n in range(max_ji + 1):
        for k, P in enumerate(enumerate_posets(n)):
            out.append(FinDistLattice(P, f"J{n}.{k}"))
    return out
