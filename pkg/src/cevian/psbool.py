"""P-scaled Boolean algebras at finite scale, F(X), pi_x and condensates A (x) S."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Hashable, Optional, Sequence

from .errors import InconsistencyError, ValidationError
from .finlat import FinDistLattice, is_lattice_hom
from .posets import FinitePoset, cube_poset, format_index

__all__ = [
    "PScaledBA",
    "ScaledMorphism",
    "make_2p",
    "LatticeDiagram",
    "powerset_diagram",
    "restricted_D_diagram",
    "Condensate",
    "tensor",
    "tensor_morphism",
    "NormCovering",
    "nabla",
    "valuations",
    "build_FX",
    "pi_x",
    "check_chain_colimit",
    "two_atom_fixtures",
]


class PScaledBA:
    """The powerset of ``atoms`` with one ideal per poset element, given by its top e_p."""

    def __init__(self, poset: FinitePoset, atoms: Sequence[Hashable], scale: Dict, name: str = ""):
        self.poset = poset
        self.atoms = tuple(atoms)
        self.name = name
        if len(set(self.atoms)) != len(self.atoms):
            raise ValidationError("duplicate atom")
        self.scale = {}
        for p in poset.elements:
            e = frozenset(scale.get(p, ()))
            if not e <= set(self.atoms):
                raise ValidationError(f"scale at {_fmt(p)} mentions unknown atoms")
            self.scale[p] = e
        self._validate()

    def _validate(self):
        if frozenset().union(*self.scale.values()) != frozenset(self.atoms):
            raise ValidationError("the scale ideals do not join to the whole algebra")
        P = self.poset
        for p, q in itertools.product(P.elements, repeat=2):
            upper = frozenset().union(*(self.scale[r] for r in P.elements if P.leq(p, r) and P.leq(q, r)))
            if self.scale[p] & self.scale[q] != upper:
                raise ValidationError(f"scale ideals at {_fmt(p)} and {_fmt(q)} violate the meet condition")

    @classmethod
    def from_tags(cls, poset: FinitePoset, tags: Dict, name: str = "") -> "PScaledBA":
        """The finitely presented object whose atom a has norm the ideal below tags[a]."""
        scale = {p: [a for a, t in tags.items() if poset.leq(p, t)] for p in poset.elements}
        return cls(poset, list(tags), scale, name)

    def norm(self, a) -> frozenset:
        return frozenset(p for p in self.poset.elements if a in self.scale[p])

    def tag(self, a):
        """The largest element of the norm of a, or None."""
        nm = self.norm(a)
        tops = [p for p in nm if all(self.poset.leq(q, p) for q in nm)]
        return tops[0] if tops else None

    def non_presented_atoms(self) -> list:
        return [a for a in self.atoms if self.tag(a) is None]

    @property
    def finitely_presented(self) -> bool:
        return not self.non_presented_atoms()

    def elements(self):
        for r in range(len(self.atoms) + 1):
            for c in itertools.combinations(self.atoms, r):
                yield frozenset(c)

    def ideal(self, p):
        e = sorted(self.scale[p], key=self.atoms.index)
        for r in range(len(e) + 1):
            for c in itertools.combinations(e, r):
                yield frozenset(c)

    def __repr__(self):
        return f"PScaledBA({self.name or 'A'}, {len(self.atoms)} atoms)"


def _fmt(p) -> str:
    if isinstance(p, frozenset) and all(isinstance(i, int) for i in p):
        return format_index(p)
    return str(p)


def make_2p(p, poset: Optional[FinitePoset] = None) -> PScaledBA:
    """2[p]: one atom, living in the q-th ideal exactly when q <= p."""
    P = poset or cube_poset()
    if p not in P.elements:
        raise ValidationError(f"{_fmt(p)} is not in the index poset")
    return PScaledBA(P, ["*"], {q: ["*"] for q in P.elements if P.leq(q, p)}, name=f"2[{_fmt(p)}]")


@dataclass
class ScaledMorphism:
    """A Boolean homomorphism A -> B, stored dually: each atom b of B goes to the atom b^phi of A."""

    source: PScaledBA
    target: PScaledBA
    atom_map: dict

    def __post_init__(self):
        for b in self.target.atoms:
            if self.atom_map.get(b) not in self.source.atoms:
                raise ValidationError(f"atom {b!r} of the target has no preimage atom")
        for p in self.source.poset.elements:
            for b in self.target.atoms:
                if self.atom_map[b] in self.source.scale[p] and b not in self.target.scale[p]:
                    raise ValidationError(f"not scale-respecting at {_fmt(p)}")

    def __call__(self, x: frozenset) -> frozenset:
        return frozenset(b for b in self.target.atoms if self.atom_map[b] in x)

    @classmethod
    def from_images(cls, A: PScaledBA, B: PScaledBA, images: dict) -> "ScaledMorphism":
        """From the images of the atoms of A (they must partition the atoms of B)."""
        amap = {}
        for a, img in images.items():
            for b in img:
                if b in amap:
                    raise ValidationError("atom images overlap: not a Boolean homomorphism")
                amap[b] = a
        if set(amap) != set(B.atoms):
            raise ValidationError("atom images do not cover the target: not a Boolean homomorphism")
        return cls(A, B, amap)

    def compose(self, first: "ScaledMorphism") -> "ScaledMorphism":
        """self . first"""
        return ScaledMorphism(first.source, self.target,
                              {c: first.atom_map[self.atom_map[c]] for c in self.target.atoms})

    def is_surjective(self) -> bool:
        return len(set(self.atom_map.values())) == len(self.atom_map)

    def is_normal(self) -> bool:
        """Surjective and onto every scale ideal, checked by enumerating ideal images."""
        if not self.is_surjective():
            return False
        for p in self.source.poset.elements:
            image = {self(x) for x in self.source.ideal(p)}
            if image != set(self.target.ideal(p)):
                return False
        return True


# ------------------------------------------------------------ lattice diagrams


@dataclass
class LatticeDiagram:
    """A commutative diagram of finite distributive lattices with 0-lattice homomorphisms."""

    poset: FinitePoset
    objects: dict  # p -> FinDistLattice
    maps: dict  # (p, q) -> {element: element}

    def check(self):
        P = self.poset
        for p, q in P.leq_pairs:
            f = self.maps.get((p, q))
            if f is None:
                raise ValidationError(f"missing map {_fmt(p)} -> {_fmt(q)}")
            err = is_lattice_hom(self.objects[p], self.objects[q], f)
            if err:
                raise ValidationError(f"map {_fmt(p)} -> {_fmt(q)}: {err}")
            if p == q and any(f[x] != x for x in f):
                raise ValidationError(f"map {_fmt(p)} -> {_fmt(p)} is not the identity")
        for p, q, r in itertools.product(P.elements, repeat=3):
            if P.leq(p, q) and P.leq(q, r):
                f, g, h = self.maps[(p, q)], self.maps[(q, r)], self.maps[(p, r)]
                if any(g[f[x]] != h[x] for x in f):
                    raise ValidationError(f"diagram does not commute on {_fmt(p)} -> {_fmt(q)} -> {_fmt(r)}")
        return self


def powerset_diagram(poset: Optional[FinitePoset] = None) -> LatticeDiagram:
    """S_p = subsets of p, with inclusions; a fixture over P[3]."""
    P = poset or cube_poset()
    objects, maps = {}, {}
    for p in P.elements:
        objects[p] = FinDistLattice(FinitePoset.antichain(sorted(p)), f"2^{_fmt(p)}")
    for p, q in P.leq_pairs:
        src, tgt = objects[p], objects[q]
        f = {}
        for m in src.elements:
            names = [src.poset.elements[i] for i in range(src.n) if m >> i & 1]
            f[m] = sum(1 << tgt.poset.elements.index(x) for x in names)
        maps[(p, q)] = f
    return LatticeDiagram(P, objects, maps).check()


def restricted_D_diagram() -> LatticeDiagram:
    """The finite sublattices of {0}, 2, O_2, O_3 generated by the coordinate regions."""
    from .cones import region_subset
    from .diagrams import finite_restriction_D

    elements, idx_maps = finite_restriction_D()
    P = cube_poset()
    objects, isos = {}, {}
    for p in P.elements:
        els = list(range(len(elements[p])))
        if len(p) <= 1:
            leq = lambda i, j, e=elements[p]: e[i] <= e[j]  # noqa: E731
        else:
            leq = lambda i, j, e=elements[p]: region_subset(e[i], e[j])[0]  # noqa: E731
        lat, iso = FinDistLattice.from_lattice(els, leq, name=f"D{_fmt(p)}")
        objects[p], isos[p] = lat, iso
    maps = {}
    for (p, q), table in idx_maps.items():
        maps[(p, q)] = {isos[p][i]: isos[q][j] for i, j in table.items()}
    return LatticeDiagram(P, objects, maps).check()


# ------------------------------------------------------------ condensates


class Condensate:
    """prod S_{|a|} over the atoms a of a finitely presented A, as one finite lattice."""

    def __init__(self, A: PScaledBA, S: LatticeDiagram):
        bad = A.non_presented_atoms()
        if bad:
            raise ValidationError(f"not finitely presented; offending atoms: {', '.join(map(str, bad))}")
        self.A, self.S = A, S
        self.factors = [(a, A.tag(a), S.objects[A.tag(a)]) for a in A.atoms]
        els, pairs, self.shift = [], [], []
        off = 0
        for k, (a, tag, L) in enumerate(self.factors):
            self.shift.append(off)
            els += [(k, j) for j in L.poset.elements]
            pairs += [((k, x), (k, y)) for x, y in L.poset.leq_pairs]
            off += L.n
        self.lattice = FinDistLattice(FinitePoset(tuple(els), frozenset(pairs)), f"{A.name}(x)S")

    def embed(self, parts: Sequence[int]) -> int:
        return sum(m << s for m, s in zip(parts, self.shift))

    def split(self, m: int) -> tuple:
        return tuple((m >> s) & ((1 << L.n) - 1) for s, (_, _, L) in zip(self.shift, self.factors))

    def __len__(self):
        return len(self.lattice)


def tensor(A: PScaledBA, S: LatticeDiagram) -> Condensate:
    return Condensate(A, S)


def tensor_morphism(phi: ScaledMorphism, S: LatticeDiagram, src: Optional[Condensate] = None,
                    tgt: Optional[Condensate] = None) -> dict:
    """phi (x) S as an element map: the b-component is sigma_{|b^phi|}^{|b|} of the b^phi-component."""
    src = src or Condensate(phi.source, S)
    tgt = tgt or Condensate(phi.target, S)
    A, B = phi.source, phi.target
    comp = []
    for b in B.atoms:
        a = phi.atom_map[b]
        p, q = A.tag(a), B.tag(b)
        if not S.poset.leq(p, q):
            raise InconsistencyError("tag of b^phi is not below the tag of b", {"b": str(b)})
        comp.append((A.atoms.index(a), S.maps[(p, q)]))
    out = {}
    for m in src.lattice.elements:
        parts = src.split(m)
        out[m] = tgt.embed([sigma[parts[k]] for k, sigma in comp])
    return out


# ------------------------------------------------------------ norm-coverings and F(X)


@dataclass
class NormCovering:
    X: FinitePoset
    boundary: dict  # x -> element of the index poset
    index: FinitePoset

    def __post_init__(self):
        for x in self.X.elements:
            if self.boundary.get(x) not in self.index.elements:
                raise ValidationError(f"boundary of {x!r} is not in the index poset")
        for x, y in self.X.leq_pairs:
            if not self.index.leq(self.boundary[x], self.boundary[y]):
                raise ValidationError(f"boundary map is not isotone at {x!r} <= {y!r}")
        for r in range(3):
            for Z in itertools.combinations(self.X.elements, r):
                ub = self.X.upper_bounds(Z)
                gen = frozenset(y for m in self.X.minimal(ub) for y in self.X.up(m))
                if gen != ub:
                    raise ValidationError(f"upper bounds of {list(Z)} are not finitely generated")


def nabla(X: FinitePoset, Z) -> list:
    """Minimal upper bounds of Z."""
    return X.minimal(X.upper_bounds(Z))


def valuations(X: FinitePoset) -> list:
    """All 0/1 valuations of the generators satisfying the defining relations of F(X), by brute force."""
    out = []
    els = X.elements
    pair_nabla = {(u, v): nabla(X, (u, v)) for u in els for v in els}
    bottom = nabla(X, ())
    for bits in itertools.product((0, 1), repeat=len(els)):
        val = dict(zip(els, bits))
        if any(val[v] > val[u] for u, v in X.leq_pairs):
            continue
        if any(min(val[u], val[v]) != max((val[w] for w in pair_nabla[(u, v)]), default=0)
               for u in els for v in els):
            continue
        if max((val[w] for w in bottom), default=0) != 1:
            continue
        out.append(tuple(val[x] for x in els))
    return out


def build_FX(cov: NormCovering):
    """F(X) realized on its valuations; returns (the scaled algebra, generator map u -> set of atoms)."""
    X = cov.X
    vals = valuations(X)
    atoms = [f"v{k}" for k in range(len(vals))]
    gen = {u: frozenset(atoms[k] for k, v in enumerate(vals) if v[X.elements.index(u)])
           for u in X.elements}
    scale = {}
    for p in cov.index.elements:
        e = frozenset()
        for u in X.elements:
            if cov.index.leq(p, cov.boundary[u]):
                e |= gen[u]
        scale[p] = e
    F = PScaledBA(cov.index, atoms, scale, name="F(X)")
    F.valuations = dict(zip(atoms, vals))
    return F, gen


def pi_x(cov: NormCovering, x, F: Optional[PScaledBA] = None, gen: Optional[dict] = None) -> ScaledMorphism:
    """F(X) -> 2[boundary x], sending u~ to 1 exactly when u <= x."""
    if F is None:
        F, gen = build_FX(cov)
    X = cov.X
    target = make_2p(cov.boundary[x], cov.index)
    want = tuple(1 if X.leq(u, x) else 0 for u in X.elements)
    hits = [a for a, v in F.valuations.items() if v == want]
    if len(hits) != 1:
        raise InconsistencyError("the valuation of a principal ideal is missing from F(X)", {"x": str(x)})
    phi = ScaledMorphism(F, target, {"*": hits[0]})
    for u in X.elements:
        if phi(gen[u]) != (frozenset(["*"]) if X.leq(u, x) else frozenset()):
            raise InconsistencyError("pi_x does not extend the generator assignment", {"u": str(u)})
    return phi


# ------------------------------------------------------------ fixtures and checks


def check_chain_colimit(chain: Sequence[ScaledMorphism], S: LatticeDiagram) -> dict:
    """For A0 -> A1 -> ... -> Ak, compare tensoring the composites with composing the tensors.

    The colimit of a finite chain is its last object with the composite
    cocone, so the tensor of the colimit is A_k (x) S and the colimit of the
    tensors is A_k (x) S with cocone maps the composites of the tensored arrows.
    """
    objs = [chain[0].source] + [m.target for m in chain]
    conds = [Condensate(A, S) for A in objs]
    step = [tensor_morphism(m, S, conds[k], conds[k + 1]) for k, m in enumerate(chain)]
    bad = []
    for i in range(len(objs)):
        comp = {m: m for m in conds[i].lattice.elements}
        direct_phi = None
        for j in range(i, len(chain)):
            comp = {m: step[j][v] for m, v in comp.items()}
            direct_phi = chain[j] if direct_phi is None else chain[j].compose(direct_phi)
        if direct_phi is not None:
            direct = tensor_morphism(direct_phi, S, conds[i], conds[-1])
            if direct != comp:
                bad.append(i)
    return {"ok": not bad, "length": len(chain), "mismatched_from": bad}


def two_atom_fixtures(S: LatticeDiagram) -> dict:
    """Every scale-respecting map from a 2-atom finitely presented object to a 1- or 2-atom one."""
    P = S.poset
    tags = list(P.elements)
    counts = {"morphisms": 0, "normal": 0, "normal_surjective": 0}
    failures = []
    seen_targets = {}
    for p, q in itertools.product(tags, repeat=2):
        A = PScaledBA.from_tags(P, {"x": p, "y": q})
        srcC = Condensate(A, S)
        for nb in (1, 2):
            for btags in itertools.product(tags, repeat=nb):
                key = btags
                if key not in seen_targets:
                    B = PScaledBA.from_tags(P, dict(zip(("u", "v"), btags)))
                    seen_targets[key] = (B, Condensate(B, S))
                B, tgtC = seen_targets[key]
                for pre in itertools.product(A.atoms, repeat=nb):
                    amap = dict(zip(B.atoms, pre))
                    if any(not P.leq(A.tag(amap[b]), B.tag(b)) for b in B.atoms):
                        continue
                    phi = ScaledMorphism(A, B, amap)
                    counts["morphisms"] += 1
                    if not phi.is_normal():
                        continue
                    counts["normal"] += 1
                    f = tensor_morphism(phi, S, srcC, tgtC)
                    if set(f.values()) == set(tgtC.lattice.elements):
                        counts["normal_surjective"] += 1
                    else:
                        failures.append((p, q, btags, pre))
    return {"ok": not failures and counts["normal"] == counts["normal_surjective"], **counts,
            "failures": failures}
