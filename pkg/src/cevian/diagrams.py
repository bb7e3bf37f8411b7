"""Diagrams indexed by the cube P[3] and the Cevian-family obstruction in A_123.

* ``build_diagram_A`` - l-groups presented by generators and relations, with
  generator substitutions as arrows; the homset from 1 to 123 has two maps.
* ``build_diagram_D`` - the lattice diagram {0}, 2, O_2, O_3 with cylinder maps.
* ``eta`` - support maps from A to D; ``verify_eta`` checks naturality on term pools.
* ``lemma43_check`` / ``lemma43_refute_pipeline`` / ``lemma43_scan`` - the
  candidate checker, the endgame that explains every rejection, and the
  desk-scale scan over a term pool.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from .ceva import CevaInput, ceva_check
from .cones import (
    AmbientCone,
    Region,
    cell_witness,
    constraint,
    ratioset_to_region,
    region_difference,
    region_equal,
    region_to_ratioset,
)
from .errors import InconsistencyError, ValidationError
from .lterm import (
    ZERO,
    Add,
    LTerm,
    Meet,
    Join,
    Neg,
    Presentation,
    Scale,
    Var,
    abs_,
    asymp,
    compile_support,
    eval_lterm,
    format_lterm,
    parse_lterm,
    pos,
    propto_bound,
    substitute,
    variables,
)
from .posets import P3_ELEMENTS, FinitePoset, cube_poset, format_index, parse_index
from .ratcore import INF, RatioSet, fmt_ext

__all__ = [
    "PRESENTATIONS",
    "A123",
    "Substitution",
    "LatticeMap",
    "NCDiagram",
    "build_diagram_A",
    "build_diagram_D",
    "eta",
    "check_idc_collapse",
    "verify_diagram_A",
    "verify_diagram_D",
    "verify_eta",
    "term_pool",
    "CevianFamilyCandidate",
    "Lemma43Verdict",
    "lemma43_check",
    "lemma43_refute_pipeline",
    "lemma43_scan",
    "scan_pool",
    "finite_restriction_D",
]


def _p(label: str) -> frozenset:
    return parse_index(label)


A123 = Presentation.parse(["a", "a'", "b", "c"], "0 <= a <= a' <= 2*a; 0 <= b; 0 <= c", name="A123")

PRESENTATIONS: Dict[frozenset, Presentation] = {
    _p("0"): Presentation.parse([], "", name="A0"),
    _p("1"): Presentation.free(["a"], name="A1"),
    _p("2"): Presentation.free(["b"], name="A2"),
    _p("3"): Presentation.free(["c"], name="A3"),
    _p("12"): Presentation.free(["a", "b"], name="A12"),
    _p("13"): Presentation.free(["a'", "c"], name="A13"),
    _p("23"): Presentation.free(["b", "c"], name="A23"),
    _p("123"): A123,
}

# coordinates of O_3 and the quadruple (x1, x1, x2, x3) used by eta_123
_X3 = Presentation.free(["x1", "x2", "x3"], name="X3")
_ETA123_SUBST = {"a": Var("x1"), "a'": Var("x1"), "b": Var("x2"), "c": Var("x3")}
O2 = AmbientCone.trivial(2)
O3 = AmbientCone.trivial(3)


# ---------------------------------------------------------------- diagrams


@dataclass(frozen=True)
class Substitution:
    """An l-homomorphism between presentations, given on generators."""

    source: frozenset
    target: frozenset
    mapping: tuple  # ((generator, LTerm), ...)

    def __call__(self, t: LTerm) -> LTerm:
        return substitute(t, dict(self.mapping))

    def __str__(self):
        if not self.mapping:
            return "zero map"
        return ", ".join(f"{g} -> {format_lterm(t)}" for g, t in self.mapping)


def _compose_subst(v: Substitution, u: Substitution) -> Substitution:
    return Substitution(u.source, v.target, tuple((g, v(t)) for g, t in u.mapping))


@dataclass
class LatticeMap:
    source: frozenset
    target: frozenset
    fn: Callable
    name: str = ""

    def __call__(self, x):
        return self.fn(x)


@dataclass
class NCDiagram:
    """A P-indexed diagram whose homsets may hold several arrows."""

    poset: FinitePoset
    objects: dict
    homs: dict  # (p, q) -> list of arrows
    compose: Callable
    same_arrow: Callable  # (p, q, f, g) -> bool
    name: str = ""

    def homset(self, p, q) -> list:
        return self.homs.get((p, q), [])

    @property
    def is_commutative(self) -> bool:
        return all(len(h) == 1 for h in self.homs.values())

    def check_closure(self) -> List[str]:
        """Problems with the two closure conditions (identities, composites); empty if none."""
        problems = []
        P = self.poset
        for p in P.elements:
            ident = self.identity(p)
            if not any(self.same_arrow(p, p, ident, f) for f in self.homset(p, p)):
                problems.append(f"no identity at {format_index(p)}")
        for p, q in P.leq_pairs:
            if not self.homset(p, q):
                problems.append(f"empty homset {format_index(p)} -> {format_index(q)}")
        for p, q, r in itertools.product(P.elements, repeat=3):
            if P.leq(p, q) and P.leq(q, r):
                for u in self.homset(p, q):
                    for v in self.homset(q, r):
                        w = self.compose(v, u)
                        if not any(self.same_arrow(p, r, w, f) for f in self.homset(p, r)):
                            problems.append(
                                f"composite {format_index(p)} -> {format_index(q)} -> {format_index(r)} "
                                "is not in the homset"
                            )
        return problems

    def identity(self, p):
        return self._identity(p)


# ---- the l-group diagram


def _cover_subst(p: frozenset, q: frozenset) -> Substitution:
    src, tgt = PRESENTATIONS[p], PRESENTATIONS[q]
    if not p:
        return Substitution(p, q, ())
    if p == _p("1") and q == _p("13"):
        return Substitution(p, q, (("a", Var("a'")),))
    for g in src.generators:
        if g not in tgt.generators:
            raise AssertionError(f"generator {g} missing in {tgt.name}")
    return Substitution(p, q, tuple((g, Var(g)) for g in src.generators))


def build_diagram_A() -> NCDiagram:
    P = cube_poset()
    covers = P.covers()
    homs = {}
    for p in P.elements:
        homs[(p, p)] = [Substitution(p, p, tuple((g, Var(g)) for g in PRESENTATIONS[p].generators))]
    # every strict homset is the set of composites along maximal chains of covers
    for p, q in sorted(P.leq_pairs, key=lambda pq: (len(pq[1]) - len(pq[0]), sorted(pq[0]), sorted(pq[1]))):
        if p == q:
            continue
        arrows = []
        for a, b in covers:
            if a == p and P.leq(b, q):
                first = _cover_subst(p, b)
                rests = [None] if b == q else homs[(b, q)]
                for rest in rests:
                    arr = first if rest is None else _compose_subst(rest, first)
                    if arr not in arrows:
                        arrows.append(arr)
        homs[(p, q)] = sorted(arrows, key=str)

    def same(p, q, f, g):
        return f.mapping == g.mapping

    d = NCDiagram(P, dict(PRESENTATIONS), homs, _compose_subst, same, name="A")
    d._identity = lambda p: homs[(p, p)][0]
    return d


# ---- the lattice diagram


def _coord_region(amb: AmbientCone, i: int) -> Region:
    e = [0] * amb.dimension
    e[i - 1] = 1
    return Region.half_space(amb, e)


def _cylinder(X: Region, i: int, j: int) -> Region:
    """delta_ij^123: points of (Q+)^3 whose (x_i, x_j) lies in X."""
    if X.ambient != O2:
        raise ValidationError("cylinder maps take regions of O_2")
    sets = []
    for cell in X.cells:
        cons = []
        for c in cell.constraints:
            f = [0, 0, 0]
            f[i - 1], f[j - 1] = c.form
            cons.append(constraint(f, c.op))
        sets.append(frozenset(cons))
    return Region.from_constraint_sets(O3, sets)


_DELTA_POINT = {
    ("1", "12"): 1, ("1", "13"): 1, ("2", "23"): 1,
    ("2", "12"): 2, ("3", "13"): 2, ("3", "23"): 2,
}


def _delta_fn(p: frozenset, q: frozenset) -> Callable:
    lp, lq = format_index(p), format_index(q)
    if p == q:
        return lambda x: x
    if not p:
        if len(q) == 0:
            return lambda x: 0
        if len(q) == 1:
            return lambda x: 0
        amb = O2 if len(q) == 2 else O3
        return lambda x: Region.zero(amb)
    if len(p) == 1 and len(q) == 2:
        target = _coord_region(O2, _DELTA_POINT[(lp, lq)])
        return lambda x: target if x else Region.zero(O2)
    if len(p) == 1 and len(q) == 3:
        target = _coord_region(O3, next(iter(p)))
        return lambda x: target if x else Region.zero(O3)
    if len(p) == 2 and len(q) == 3:
        i, j = sorted(p)
        return lambda X: _cylinder(X, i, j)
    raise ValidationError(f"no arrow {lp} -> {lq}")


def _d_equal(p: frozenset, x, y) -> bool:
    if len(p) >= 2:
        return region_equal(x, y)
    return x == y


def _o2_family(depth: int = 1) -> list:
    """Regions of O_2 used to compare lattice maps: coordinate and ratio half-planes."""
    fam = [Region.zero(O2), Region.unit(O2), _coord_region(O2, 1), _coord_region(O2, 2)]
    for p, q in itertools.product((1, 2, 3), repeat=2):
        fam.append(Region.half_space(O2, [p, -q]))
        fam.append(Region.half_space(O2, [-p, q]))
    if depth >= 2:
        base = list(fam)
        for X, Y in itertools.combinations(base[4:], 2):
            fam.append(X.meet(Y))
            fam.append(X.join(Y))
    return fam


def d_family(p: frozenset, depth: int = 1) -> list:
    if not p:
        return [0]
    if len(p) == 1:
        return [0, 1]
    if len(p) == 2:
        return _o2_family(depth)
    raise ValidationError("no finite family for O_3")


def build_diagram_D(depth: int = 1) -> NCDiagram:
    P = cube_poset()
    objects = {}
    for p in P.elements:
        objects[p] = {0: "{0}", 1: "2", 2: "O_2", 3: "O_3"}[len(p)]
    homs = {}
    for p, q in P.leq_pairs:
        homs[(p, q)] = [LatticeMap(p, q, _delta_fn(p, q), f"delta_{format_index(p)}^{format_index(q)}")]

    def compose(v, u):
        return LatticeMap(u.source, v.target, lambda x: v(u(x)), f"{v.name}.{u.name}")

    def same(p, q, f, g):
        return all(_d_equal(q, f(x), g(x)) for x in d_family(p, depth)) if len(p) < 3 else True

    d = NCDiagram(P, objects, homs, compose, same, name="D")
    d._identity = lambda p: LatticeMap(p, p, lambda x: x, "id")
    return d


# ---------------------------------------------------------------- eta


def eta(p: frozenset, t: LTerm):
    """The support map A_p -> D_p applied to the principal ideal of t."""
    pres = PRESENTATIONS[p]
    if not p:
        return 0
    if len(p) == 1:
        return 0 if compile_support(t, pres).is_zero else 1
    if len(p) == 2:
        return compile_support(t, pres)
    return compile_support(substitute(t, _ETA123_SUBST), _X3)


def check_idc_collapse() -> dict:
    """Both arrows 1 -> 123 of A have asymptotic images, hence induce the same lattice map."""
    A = build_diagram_A()
    one, top = _p("1"), _p("123")
    maps = A.homset(one, top)
    a = Var("a")
    images = [f(a) for f in maps]
    pairs = []
    ok = len(maps) == 2
    for s, t in itertools.combinations(images, 2):
        eq = asymp(s, t, A123)
        regions = region_equal(compile_support(s, A123), compile_support(t, A123))
        pairs.append({"left": format_lterm(s), "right": format_lterm(t), "asymp": eq, "same_support": regions})
        ok = ok and eq and regions
    zero_ok = all(compile_support(f(ZERO), A123).is_zero for f in maps)
    return {"ok": ok and zero_ok, "maps": [str(f) for f in maps], "pairs": pairs, "zero": zero_ok}


def verify_diagram_A() -> dict:
    A = build_diagram_A()
    problems = A.check_closure()
    sizes = {f"{format_index(p)}->{format_index(q)}": len(h) for (p, q), h in A.homs.items() if p != q}
    multi = [k for k, v in sizes.items() if v > 1]
    collapse = check_idc_collapse()
    ok = not problems and multi == ["1->123"] and not A.is_commutative and collapse["ok"]
    return {
        "ok": ok,
        "closure_problems": problems,
        "commutative": A.is_commutative,
        "multi_arrow_homsets": multi,
        "homset_1_123": [str(f) for f in A.homset(_p("1"), _p("123"))],
        "idc_collapse": collapse,
    }


def verify_diagram_D(depth: int = 1) -> dict:
    """Commutativity of D (every composite equals the direct arrow) and homomorphism checks."""
    D = build_diagram_D(depth)
    P = D.poset
    squares = []
    ok = True
    for p, q, r in itertools.product(P.elements, repeat=3):
        if p != q and q != r and P.leq(p, q) and P.leq(q, r):
            u, v = D.homset(p, q)[0], D.homset(q, r)[0]
            w = D.homset(p, r)[0]
            fam = d_family(p, depth)
            good = all(_d_equal(r, v(u(x)), w(x)) for x in fam)
            squares.append({"path": f"{format_index(p)}<{format_index(q)}<{format_index(r)}", "ok": good,
                            "family_size": len(fam)})
            ok = ok and good
    homs = []
    for (p, q), (f,) in sorted(D.homs.items(), key=lambda kv: (len(kv[0][0]), sorted(kv[0][0]), len(kv[0][1]), sorted(kv[0][1]))):
        if p == q or len(p) != 2:
            continue
        fam = d_family(p, depth)
        good = True
        for X, Y in itertools.combinations(fam, 2):
            if not (region_equal(f(X.meet(Y)), f(X).meet(f(Y))) and region_equal(f(X.join(Y)), f(X).join(f(Y)))):
                good = False
        good = good and f(Region.zero(O2)).is_zero
        homs.append({"arrow": f.name, "ok": good})
        ok = ok and good
    problems = D.check_closure()
    ok = ok and not problems and D.is_commutative
    return {"ok": ok, "commutative": D.is_commutative, "composites": squares, "homomorphisms": homs,
            "closure_problems": problems}


def _sample_points(n: int) -> list:
    ratios = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(2, 5), Fraction(1, 2), Fraction(3, 5),
              Fraction(2, 3), Fraction(3, 4), Fraction(1), Fraction(4, 3), Fraction(3, 2), Fraction(5, 3),
              Fraction(2), Fraction(5, 2), Fraction(3), Fraction(4)]
    if n == 1:
        return [(Fraction(1),)]
    if n == 2:
        return [(Fraction(1), r) for r in ratios] + [(Fraction(0), Fraction(1))]
    raise ValidationError("sample points only for one or two generators")


def _support_signature(t: LTerm, gens: Sequence[str]) -> tuple:
    out = []
    for pt in _sample_points(len(gens)):
        out.append(eval_lterm(t, dict(zip(gens, pt))) != 0)
    return tuple(out)


def term_pool(gens: Sequence[str], depth: int = 3) -> list:
    """Terms over one or two generators, one per support pattern on sample points.

    Depth 0 holds 0 and the generators; each further level applies negation,
    positive part, and sum, meet and join with an atom (a generator or a
    difference p*g - q*h with p, q in {1,2,3}).
    """
    atoms = [Var(g) for g in gens]
    for g, h in itertools.permutations(gens, 2):
        for p, q in itertools.product((1, 2, 3), repeat=2):
            atoms.append(Add(_scaled(p, Var(g)), Neg(_scaled(q, Var(h)))))
    level = [ZERO] + [Var(g) for g in gens]
    seen = {}
    for t in level:
        seen.setdefault(_support_signature(t, gens), t)
    for _ in range(depth):
        new = []
        for t in list(seen.values()):
            new.append(Neg(t))
            new.append(pos(t))
            for u in atoms:
                new.extend((Add(t, u), Meet(t, u), Join(t, u)))
        for t in new:
            seen.setdefault(_support_signature(t, gens), t)
    return list(seen.values())


def _scaled(q: int, t: LTerm) -> LTerm:
    return t if q == 1 else Scale(q, t)


def verify_eta(depth: int = 3) -> dict:
    """Naturality squares eta_q . alpha = delta . eta_p on every cover p < q."""
    A = build_diagram_A()
    D = build_diagram_D()
    P = A.poset
    results = []
    ok = True
    pools = {p: term_pool(PRESENTATIONS[p].generators, depth) for p in P.elements if 0 < len(p) < 3}
    pools[_p("0")] = [ZERO]
    for p, q in P.covers():
        (alpha,) = A.homset(p, q)
        (delta,) = D.homset(p, q)
        fails = []
        for t in pools[p]:
            left = eta(q, alpha(t))
            right = delta(eta(p, t))
            if not _d_equal(q, left, right):
                w = None
                if len(q) >= 2:
                    w = region_difference(left, right) or region_difference(right, left)
                fails.append({"term": format_lterm(t), "witness": w})
        results.append({"square": f"{format_index(p)}<{format_index(q)}", "terms": len(pools[p]),
                        "ok": not fails, "failures": fails})
        ok = ok and not fails
    worked = _worked_squares()
    ok = ok and all(w["ok"] for w in worked)
    iso = _eta_iso_check(pools)
    ok = ok and iso["ok"]
    return {"ok": ok, "depth": depth, "squares": results, "worked": worked, "eta12_injective": iso}


def _worked_squares() -> list:
    out = []
    one, thirteen, top = _p("1"), _p("13"), _p("123")
    A = build_diagram_A()
    D = build_diagram_D()
    (alpha,) = A.homset(one, thirteen)
    (delta,) = D.homset(one, thirteen)
    x1 = _coord_region(O2, 1)
    left = eta(thirteen, alpha(Var("a")))
    right = delta(eta(one, Var("a")))
    out.append({"square": "1<13 on <a>", "value": "[x1 > 0] in O_2",
                "ok": region_equal(left, x1) and region_equal(right, x1)})
    (alpha,) = A.homset(thirteen, top)
    (delta,) = D.homset(thirteen, top)
    t = parse_lterm("pos(a' - 2*c) \\/ (c /\\ a')")
    direct = compile_support(substitute(t, {"a'": Var("x1"), "c": Var("x3")}), _X3)
    left = eta(top, alpha(t))
    right = delta(eta(thirteen, t))
    out.append({"square": f"13<123 on <{format_lterm(t)}>", "value": "[t(x1,x3) != 0] in O_3",
                "ok": region_equal(left, direct) and region_equal(right, direct)})
    return out


def _eta_iso_check(pools) -> dict:
    """On the pool of A_12, equal eta-images coincide with asymptotic equivalence.

    Asymptotic equivalence is tested through the bound search (|s| <= n|t|),
    not through supports, so this is not a tautology.
    """
    pool = pools[_p("12")][:24]
    pres = PRESENTATIONS[_p("12")]
    images = [eta(_p("12"), t) for t in pool]
    bad = []
    for (i, s), (j, t) in itertools.combinations(enumerate(pool), 2):
        same = region_equal(images[i], images[j])
        bounded = propto_bound(s, t, pres, 12) is not None and propto_bound(t, s, pres, 12) is not None
        if same != bounded:
            bad.append((format_lterm(s), format_lterm(t)))
    return {"ok": not bad, "pairs": len(pool) * (len(pool) - 1) // 2, "mismatches": bad}


# ------------------------------------------------------ finite restriction of D


def finite_restriction_D() -> tuple:
    """Finite sublattices of the objects of D generated by the coordinate regions.

    Returns ``(elements, maps)``: ``elements[p]`` lists the generated elements
    (0/1 for the two-element objects, Regions otherwise) and ``maps[(p, q)]``
    sends each element index of p to an element index of q along delta.
    """
    elements = {}
    for p in P3_ELEMENTS:
        k = len(p)
        if k <= 1:
            elements[p] = [0] if k == 0 else [0, 1]
            continue
        amb = O2 if k == 2 else O3
        elems = [Region.zero(amb)]
        frontier = [_coord_region(amb, i) for i in range(1, k + 1)]
        while frontier:
            x = frontier.pop(0)
            if any(region_equal(x, y) for y in elems):
                continue
            elems.append(x)
            for y in list(elems):
                frontier.append(x.meet(y))
                frontier.append(x.join(y))
        elements[p] = elems
    maps = {}
    P = cube_poset()
    for p, q in P.leq_pairs:
        f = _delta_fn(p, q)
        table = {}
        for i, x in enumerate(elements[p]):
            y = f(x)
            hits = [j for j, z in enumerate(elements[q]) if _d_equal(q, y, z)]
            if len(hits) != 1:
                raise InconsistencyError("delta leaves the generated sublattice",
                                         {"arrow": f"{format_index(p)}->{format_index(q)}"})
            table[i] = hits[0]
        maps[(p, q)] = table
    return elements, maps


# ---------------------------------------------------------------- Cevian families in A_123

_PAIR_PRES = {
    (1, 2): _p("12"), (2, 1): _p("12"), (2, 3): _p("23"), (3, 2): _p("23"), (1, 3): _p("13"), (3, 1): _p("13"),
}
_GEN = {1: Var("a"), 2: Var("b"), 3: Var("c")}
_KEYS = ((1, 2), (2, 1), (2, 3), (3, 2), (1, 3), (3, 1))


@dataclass
class CevianFamilyCandidate:
    """Six nonnegative terms c_ij, each over the generators of A_ij."""

    terms: dict

    def __post_init__(self):
        terms = {}
        for k in _KEYS:
            if k not in self.terms:
                raise ValidationError(f"missing term c{k[0]}{k[1]}")
            t = self.terms[k]
            pres = PRESENTATIONS[_PAIR_PRES[k]]
            extra = variables(t) - set(pres.generators)
            if extra:
                raise ValidationError(
                    f"c{k[0]}{k[1]} uses {sorted(extra)[0]!r}, not a generator of {pres.name}"
                )
            if not compile_support(Neg(t), pres, "positive").is_zero:
                raise ValidationError(f"c{k[0]}{k[1]} is not nonnegative in {pres.name}")
            terms[k] = t
        self.terms = terms

    @classmethod
    def parse(cls, mapping: dict) -> "CevianFamilyCandidate":
        terms = {}
        for key, src in mapping.items():
            if len(key) != 3 or key[0] != "c" or not key[1:].isdigit():
                raise ValidationError(f"bad candidate key {key!r}")
            terms[(int(key[1]), int(key[2]))] = parse_lterm(src) if isinstance(src, str) else src
        return cls(terms)

    def __getitem__(self, k):
        return self.terms[k]


@dataclass
class Lemma43Verdict:
    status: str  # "fail" (expected) or "all-pass" (never returned; raises instead)
    condition: str
    witness: Optional[tuple] = None
    values: dict = field(default_factory=dict)
    passed: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {"status": self.status, "condition": self.condition, "passed": list(self.passed)}
        if self.witness is not None:
            out["witness"] = dict(zip(A123.generators, (fmt_ext(v) for v in self.witness)))
            out["values"] = {k: fmt_ext(v) for k, v in self.values.items()}
        return out


def _supp(t: LTerm) -> Region:
    return compile_support(t, A123)


def _conditions(c: Dict[tuple, LTerm]):
    """(name, kind, data) in checking order; kind is 'sub' (A <= B) or 'zero' (A = 0)."""
    for i, j in ((1, 2), (2, 1), (2, 3), (3, 2)):
        yield (f"(ii) a{i} <= a{j} v c{i}{j}", "sub",
               (_GEN[i], Add(abs_(_GEN[j]), abs_(c[(i, j)]))))
    for i, j in ((1, 2), (2, 3)):
        yield (f"(iii) c{i}{j} ^ c{j}{i} = 0", "zero", Meet(abs_(c[(i, j)]), abs_(c[(j, i)])))
    yield ("(iv) c12 ^ c23 <= c13", "sub", (Meet(abs_(c[(1, 2)]), abs_(c[(2, 3)])), c[(1, 3)]))
    yield ("(iv) c13 <= c12 v c23", "sub", (c[(1, 3)], Add(abs_(c[(1, 2)]), abs_(c[(2, 3)]))))


def lemma43_check(cand: CevianFamilyCandidate) -> Lemma43Verdict:
    """Decide (ii), (iii), (iv) in A_123 and return the first failure with a witness."""
    passed = []
    for name, kind, data in _conditions(cand.terms):
        if kind == "sub":
            s, t = data
            w = region_difference(_supp(s), _supp(t))
            shown = {"left": s, "right": t}
        else:
            r = _supp(data)
            w = cell_witness(r.cells[0]) if r.cells else None
            shown = {"meet": data}
        if w is not None:
            point = dict(zip(A123.generators, w))
            values = {k: eval_lterm(v, point, A123) for k, v in shown.items()}
            for k in _KEYS:
                values[f"c{k[0]}{k[1]}"] = eval_lterm(cand[k], point, A123)
            return Lemma43Verdict("fail", name, tuple(w), values, passed)
        passed.append(name)
    raise InconsistencyError(
        "a Cevian family satisfies (ii)-(iv) in A_123",
        {f"c{i}{j}": format_lterm(t) for (i, j), t in cand.terms.items()},
    )


def _u(k: tuple, t: LTerm) -> RatioSet:
    i, j = k
    return region_to_ratioset(eta(_p(f"{min(i, j)}{max(i, j)}"), t))


def _c_region(k: tuple, u: RatioSet) -> Region:
    i, j = k
    return ratioset_to_region(u, min(i, j), max(i, j), 3)


def _eta123(t: LTerm) -> Region:
    return eta(_p("123"), t)


def _pair_part(k: tuple, c_ij: LTerm, c_ji: LTerm) -> dict:
    """(C1) both ways and (C2) for one pair, plus the facts the endgame extracts."""
    i, j = k
    P = {n: _coord_region(O3, n) for n in (1, 2, 3)}
    u_ij, u_ji = _u((i, j), c_ij), _u((j, i), c_ji)
    C_ij, C_ji = _c_region((i, j), u_ij), _c_region((j, i), u_ji)
    for kk, t, C in (((i, j), c_ij, C_ij), ((j, i), c_ji, C_ji)):
        if not region_equal(C, _eta123(t)):
            raise InconsistencyError("cylinder of U differs from the eta_123 image",
                                     {f"c{kk[0]}{kk[1]}": format_lterm(t)})
    c1 = region_difference(P[i], P[j].join(C_ij)) is None and region_difference(P[j], P[i].join(C_ji)) is None
    c2 = C_ij.meet(C_ji).is_zero
    if not (c1 and c2):
        raise InconsistencyError("(ii)/(iii) hold in A_123 but (C1)/(C2) fail in O_3",
                                 {"c_ij": format_lterm(c_ij), "c_ji": format_lterm(c_ji)})
    facts = {
        "zero_in_U": 0 in u_ij,
        "inf_in_reverse": INF in u_ji,
        "disjoint": not u_ij.intersect(u_ji),
        "bounded": not any(iv.hi is INF for iv in u_ij.intervals),
    }
    if not all(facts.values()):
        raise InconsistencyError("derived facts on U fail", {"facts": facts, "U": str(u_ij), "Urev": str(u_ji)})
    return {"U": u_ij, "U_rev": u_ji, "facts": facts}


def _triple_part(c12: LTerm, c23: LTerm, c13: LTerm) -> dict:
    U = {(1, 2): _u((1, 2), c12), (2, 3): _u((2, 3), c23), (1, 3): _u((1, 3), c13)}
    C = {k: _c_region(k, u) for k, u in U.items()}
    left = region_difference(C[(1, 2)].meet(C[(2, 3)]), C[(1, 3)])
    right = None if left is not None else region_difference(C[(1, 3)], C[(1, 2)].join(C[(2, 3)]))
    out = {"U12": str(U[(1, 2)]), "U23": str(U[(2, 3)]), "U13": str(U[(1, 3)])}
    if left is not None or right is not None:
        x = left if left is not None else right
        lifted = (x[0], x[0], x[1], x[2])
        point = dict(zip(A123.generators, lifted))
        vals = {n: eval_lterm(t, point, A123) for n, t in (("c12", c12), ("c23", c23), ("c13", c13))}
        if left is not None:
            good = vals["c12"] != 0 and vals["c23"] != 0 and vals["c13"] == 0
        else:
            good = vals["c13"] != 0 and vals["c12"] == 0 and vals["c23"] == 0
        if not good:
            raise InconsistencyError("lifted (C3) witness does not refute (iv)", {"point": [str(v) for v in lifted]})
        out.update(route="C3-fails", side="left" if left is not None else "right",
                   witness=lifted, values=vals)
        return out
    if not (0 in U[(1, 3)]):
        raise InconsistencyError("(C3) holds but 0 is not in U13", out)
    verdict = ceva_check(CevaInput(U[(1, 2)], U[(2, 3)], U[(1, 3)]))
    if not verdict.hypotheses_hold:
        raise InconsistencyError("(C1)-(C3) hold but the ratio sets fail the Ceva hypotheses", out)
    lam, mu = verdict.conclusion
    a, ap, b, c = Var("a"), Var("a'"), Var("b"), Var("c")
    e12 = pos(Add(Scale(lam, a), Neg(b)))
    e23 = pos(Add(Scale(mu, b), Neg(c)))
    e13 = pos(Add(Scale(lam * mu, ap), Neg(c)))
    checks = {
        "c12 ~ (lam*a - b)+": asymp(c12, e12, PRESENTATIONS[_p("12")]),
        "c23 ~ (mu*b - c)+": asymp(c23, e23, PRESENTATIONS[_p("23")]),
        "c13 ~ (lam*mu*a' - c)+": asymp(c13, e13, PRESENTATIONS[_p("13")]),
    }
    if not all(checks.values()):
        raise InconsistencyError("c_ij not asymptotic to the extracted half-plane terms", {**out, **checks})
    f_point = {"a": Fraction(1), "a'": Fraction(2), "b": lam, "c": lam * mu}
    f_vals = {
        "(lam*a - b)+ ^ (mu*b - c)+": eval_lterm(Meet(e12, e23), f_point, A123),
        "(lam*mu*a' - c)+": eval_lterm(e13, f_point, A123),
        "(lam*a - b)+ v (mu*b - c)+": eval_lterm(Join(e12, e23), f_point, A123),
    }
    own = {n: eval_lterm(t, f_point, A123) for n, t in (("c12", c12), ("c23", c23), ("c13", c13))}
    expected = [Fraction(0), lam * mu, Fraction(0)]
    if list(f_vals.values()) != expected or not (own["c13"] > 0 and own["c12"] == 0 and own["c23"] == 0):
        raise InconsistencyError("evaluation at (1,2,lam,lam*mu) does not exhibit the contradiction",
                                 {**out, "f": {k: str(v) for k, v in f_vals.items()}})
    out.update(route="endgame", lam=lam, mu=mu, asymp=checks, f_point=f_point, f_values=f_vals, own_values=own,
               impossible="(iv) c13 <= c12 v c23")
    return out


def lemma43_refute_pipeline(cand: CevianFamilyCandidate) -> dict:
    """Explain why a candidate passing (ii) and (iii) cannot satisfy (iv).

    Either (C3) already fails in O_3, and the witness lifted along eta_123
    refutes (iv) directly; or (C1)-(C3) hold, the ratio sets form a Ceva
    configuration [0,lam), [0,mu), [0,lam*mu), and evaluating at
    (a, a', b, c) = (1, 2, lam, lam*mu) gives lam*mu on c13 but 0 on c12 v c23.
    """
    verdict = lemma43_check(cand)
    if verdict.condition.startswith(("(ii)", "(iii)")):
        raise ValidationError(f"precondition fails: {verdict.condition}")
    p12 = _pair_part((1, 2), cand[(1, 2)], cand[(2, 1)])
    p23 = _pair_part((2, 3), cand[(2, 3)], cand[(3, 2)])
    tri = _triple_part(cand[(1, 2)], cand[(2, 3)], cand[(1, 3)])
    return {"check": verdict.as_dict(), "pair12": p12["facts"], "pair23": p23["facts"], **_fmt_tri(tri)}


def _fmt_tri(tri: dict) -> dict:
    out = {k: v for k, v in tri.items() if k in ("U12", "U23", "U13", "route", "side", "impossible")}
    if "witness" in tri:
        out["witness"] = [fmt_ext(v) for v in tri["witness"]]
        out["values"] = {k: fmt_ext(v) for k, v in tri["values"].items()}
    if "lam" in tri:
        out["lambda"] = fmt_ext(tri["lam"])
        out["mu"] = fmt_ext(tri["mu"])
        out["asymp"] = tri["asymp"]
        out["f_point"] = [fmt_ext(tri["f_point"][g]) for g in A123.generators]
        out["f_values"] = {k: fmt_ext(v) for k, v in tri["f_values"].items()}
        out["own_values"] = {k: fmt_ext(v) for k, v in tri["own_values"].items()}
    return out


# ---------------------------------------------------------------- the scan


def scan_pool(gens: Sequence[str], depth: int = 1, coeffs=(1, 2, 3)) -> list:
    """Terms (p*g - q*h)+ over ordered generator pairs, closed under one level of meet and join."""
    base = []
    for g, h in itertools.product(gens, repeat=2):
        for p, q in itertools.product(coeffs, repeat=2):
            base.append(pos(Add(_scaled(p, Var(g)), Neg(_scaled(q, Var(h))))))
    pool = list(base)
    if depth >= 1:
        for s, t in itertools.combinations(base, 2):
            pool.append(Meet(s, t))
            pool.append(Join(s, t))
    return pool


def _classes(pool: list, p: frozenset) -> list:
    """Group pool terms by their support in A_p: [(representative, multiplicity, ratio set)]."""
    groups: Dict[RatioSet, list] = {}
    for t in pool:
        u = region_to_ratioset(eta(p, t))
        if u in groups:
            groups[u][1] += 1
        else:
            groups[u] = [t, 1]
    return [(t, m, u) for u, (t, m) in groups.items()]


def lemma43_scan(depth: int = 1, coeffs=(1, 2, 3), progress: Optional[Callable] = None) -> dict:
    """Scan every candidate built from the pool, in factored form.

    Every condition depends on the candidate only through the supports of its
    terms, so terms are grouped by support and counts carry multiplicities.
    (ii) and (iii) factor through the pairs (c12, c21) and (c23, c32); (iv)
    through (c12, c23, c13); c31 enters no condition.
    """
    pools = {k: scan_pool(PRESENTATIONS[_PAIR_PRES[k]].generators, depth, coeffs) for k in _KEYS}
    pool_size = {k: len(v) for k, v in pools.items()}
    cls = {}
    for k in _KEYS[:5]:
        cls[k] = _classes(pools[k], _PAIR_PRES[k])
    if progress:
        progress(f"pool classes: {', '.join(f'c{i}{j}={len(v)}' for (i, j), v in cls.items())}")
    supp = {k: [_supp(t) for t, _, _ in cls[k]] for k in _KEYS[:5]}

    # (ii) per term
    def ii_ok(k, idx):
        i, j = k
        lhs = _supp(_GEN[i])
        rhs = _supp(Add(abs_(_GEN[j]), abs_(cls[k][idx][0])))
        return region_difference(lhs, rhs) is None

    ii = {k: [ii_ok(k, n) for n in range(len(cls[k]))] for k in _KEYS[:4]}
    # (iii) per pair
    pairs = {}
    for k, rk in (((1, 2), (2, 1)), ((2, 3), (3, 2))):
        ok_pairs = []
        for x in range(len(cls[k])):
            if not ii[k][x]:
                continue
            for y in range(len(cls[rk])):
                if ii[rk][y] and _supp(Meet(abs_(cls[k][x][0]), abs_(cls[rk][y][0]))).is_zero:
                    ok_pairs.append((x, y))
        pairs[k] = ok_pairs
    # counts of candidates by first failing condition
    m = {k: [mult for _, mult, _ in cls[k]] for k in _KEYS[:5]}
    total = 1
    for k in _KEYS:
        total *= pool_size[k]
    rest_after = lambda keys: _prod(pool_size[k] for k in _KEYS if k not in keys)  # noqa: E731
    fail = {}
    fail["(ii) a1 <= a2 v c12"] = sum(mm for mm, ok in zip(m[(1, 2)], ii[(1, 2)]) if not ok) * rest_after([(1, 2)])
    n12 = sum(mm for mm, ok in zip(m[(1, 2)], ii[(1, 2)]) if ok)
    fail["(ii) a2 <= a1 v c21"] = n12 * sum(mm for mm, ok in zip(m[(2, 1)], ii[(2, 1)]) if not ok) * rest_after([(1, 2), (2, 1)])
    n21 = sum(mm for mm, ok in zip(m[(2, 1)], ii[(2, 1)]) if ok)
    fail["(ii) a2 <= a3 v c23"] = n12 * n21 * sum(mm for mm, ok in zip(m[(2, 3)], ii[(2, 3)]) if not ok) * rest_after([(1, 2), (2, 1), (2, 3)])
    n23 = sum(mm for mm, ok in zip(m[(2, 3)], ii[(2, 3)]) if ok)
    fail["(ii) a3 <= a2 v c32"] = n12 * n21 * n23 * sum(mm for mm, ok in zip(m[(3, 2)], ii[(3, 2)]) if not ok) * rest_after([(1, 2), (2, 1), (2, 3), (3, 2)])
    n32 = sum(mm for mm, ok in zip(m[(3, 2)], ii[(3, 2)]) if ok)
    p12 = sum(m[(1, 2)][x] * m[(2, 1)][y] for x, y in pairs[(1, 2)])
    p23 = sum(m[(2, 3)][x] * m[(3, 2)][y] for x, y in pairs[(2, 3)])
    rest13 = pool_size[(1, 3)] * pool_size[(3, 1)]
    fail["(iii) c12 ^ c21 = 0"] = (n12 * n21 - p12) * n23 * n32 * rest13
    fail["(iii) c23 ^ c32 = 0"] = p12 * (n23 * n32 - p23) * rest13
    # (iv) and the refutation, per (c12, c23, c13) class triple
    w12 = {}
    for x, y in pairs[(1, 2)]:
        w12[x] = w12.get(x, 0) + m[(2, 1)][y]
    w23 = {}
    for x, y in pairs[(2, 3)]:
        w23[x] = w23.get(x, 0) + m[(3, 2)][y]
    pair_reports = 0
    for k, rk in (((1, 2), (2, 1)), ((2, 3), (3, 2))):
        for x, y in pairs[k]:
            _pair_part(k, cls[k][x][0], cls[rk][y][0])
            pair_reports += 1
    left = right = all_pass = 0
    routes = {"endgame": 0, "C3-fails": 0}
    lambdas = set()
    triples = 0
    for x in sorted(w12):
        for z in sorted(w23):
            meet = supp[(1, 2)][x].meet(supp[(2, 3)][z])
            join = supp[(1, 2)][x].join(supp[(2, 3)][z])
            for q in range(len(cls[(1, 3)])):
                weight = m[(1, 2)][x] * w12[x] * m[(2, 3)][z] * w23[z] * m[(1, 3)][q] * pool_size[(3, 1)]
                triples += 1
                if region_difference(meet, supp[(1, 3)][q]) is not None:
                    left += weight
                elif region_difference(supp[(1, 3)][q], join) is not None:
                    right += weight
                else:
                    all_pass += weight
                    raise InconsistencyError(
                        "a Cevian family satisfies (ii)-(iv) in A_123",
                        {"c12": format_lterm(cls[(1, 2)][x][0]), "c23": format_lterm(cls[(2, 3)][z][0]),
                         "c13": format_lterm(cls[(1, 3)][q][0])},
                    )
                tri = _triple_part(cls[(1, 2)][x][0], cls[(2, 3)][z][0], cls[(1, 3)][q][0])
                routes[tri["route"]] += weight
                if tri["route"] == "endgame":
                    lambdas.add((tri["lam"], tri["mu"]))
    fail["(iv) c12 ^ c23 <= c13"] = left
    fail["(iv) c13 <= c12 v c23"] = right
    if sum(fail.values()) + all_pass != total:
        raise InconsistencyError("scan counts do not add up", {"total": total, "failures": fail})
    return {
        "depth": depth,
        "coefficients": list(coeffs),
        "pool_sizes": {f"c{i}{j}": n for (i, j), n in pool_size.items()},
        "support_classes": {f"c{i}{j}": len(v) for (i, j), v in cls.items()},
        "candidates": total,
        "failures": fail,
        "all_pass": all_pass,
        "passing_ii_iii": p12 * p23 * rest13,
        "refuted_by": routes,
        "class_triples": triples,
        "pair_checks": pair_reports,
        "lambda_mu": sorted((fmt_ext(a), fmt_ext(b)) for a, b in lambdas),
        "note": "negative result over a chosen finite pool: evidence, not a proof",
    }


def _prod(values) -> int:
    out = 1
    for v in values:
        out *= v
    return out
