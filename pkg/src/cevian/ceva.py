"""Ceva configurations in dimension three.

Three ratio sets U12, U23, U13 define cylinders C_ij of (Q+)^3 (points whose
ratio x_i^-1 x_j lies in U_ij).  :func:`ceva_check` decides the three
hypotheses exactly; when they hold, the sets must be [0,x), [0,y), [0,xy) and
this is re-derived from the data every time, never assumed.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .cones import Region, ratioset_to_region, region_difference
from .errors import InconsistencyError, ValidationError
from .ratcore import INF, Interval, RatioSet, as_rat, fmt_ext, ratio

__all__ = [
    "CevaInput",
    "CevaVerdict",
    "ceva_check",
    "ceva_converse_check",
    "ceva_search",
    "search_space",
    "chain_status",
]

_PAIRS = {"U12": (1, 2), "U23": (2, 3), "U13": (1, 3)}
_ZERO_POINTS = {"U12": (1, 0, 0), "U23": (0, 1, 0), "U13": (1, 0, 0)}


@dataclass(frozen=True)
class CevaInput:
    U12: RatioSet
    U23: RatioSet
    U13: RatioSet

    def sets(self) -> dict:
        return {"U12": self.U12, "U23": self.U23, "U13": self.U13}

    def key(self) -> str:
        return f"{self.U12};{self.U23};{self.U13}"

    def contains(self, name: str, point) -> bool:
        """Membership of a point of (Q+)^3 in the cylinder C_ij, straight from the definition."""
        i, j = _PAIRS[name]
        xi, xj = as_rat(point[i - 1]), as_rat(point[j - 1])
        if xi == 0 and xj == 0:
            return False
        return ratio(xi, xj) in self.sets()[name]


@dataclass
class CevaVerdict:
    hyp_0: bool
    hyp_notfull: bool
    hyp_chain: bool
    conclusion: Optional[tuple] = None
    witness: Optional[tuple] = None
    failure: Optional[str] = None
    construction: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return self.hyp_0 and self.hyp_notfull and self.hyp_chain

    def as_dict(self) -> dict:
        out = {
            "hyp_0": self.hyp_0,
            "hyp_notfull": self.hyp_notfull,
            "hyp_chain": self.hyp_chain,
        }
        if self.conclusion is not None:
            x, y = self.conclusion
            out["conclusion"] = {"x": fmt_ext(x), "y": fmt_ext(y), "xy": fmt_ext(x * y)}
        if self.failure is not None:
            out["failure"] = self.failure
        if self.witness is not None:
            out["witness"] = [fmt_ext(v) for v in self.witness]
            out["construction"] = self.construction
        if self.notes:
            out["notes"] = list(self.notes)
        return out


_region_cache: dict = {}


def _cyl(name: str, u: RatioSet) -> Region:
    key = (name, u)
    r = _region_cache.get(key)
    if r is None:
        i, j = _PAIRS[name]
        r = ratioset_to_region(u, i, j, 3)
        if len(_region_cache) > 50_000:
            _region_cache.clear()
        _region_cache[key] = r
    return r


def _primitive_point(pt) -> tuple:
    pt = [as_rat(v) for v in pt]
    den = 1
    for v in pt:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in pt]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(Fraction(v // g) for v in ints) if g else tuple(Fraction(v) for v in ints)


def _homog(a, b, c) -> tuple:
    """A point (1, b, c) with entries possibly INF, as a primitive point of (Q+)^3."""
    if c is INF:
        return (Fraction(0), Fraction(0), Fraction(1))
    if b is INF:
        return (Fraction(0), Fraction(1), Fraction(0))
    return _primitive_point((a, b, c))


def _pick(u: RatioSet):
    """A member of a nonempty set, preferring an interior point of its first interval."""
    iv = u.intervals[0]
    if iv.is_singleton:
        return iv.lo
    if iv.hi is INF:
        return iv.lo + 1 if iv.lo is not INF else INF
    return (iv.lo + iv.hi) / 2


def chain_status(inp: CevaInput, point) -> Optional[str]:
    """Which chain inclusion a point refutes ("left" or "right"), if any."""
    c12, c23, c13 = (inp.contains(n, point) for n in ("U12", "U23", "U13"))
    if c12 and c23 and not c13:
        return "left"
    if c13 and not (c12 or c23):
        return "right"
    return None


def _chain_witnesses(inp: CevaInput):
    """Candidate refutations of the chain hypothesis, one construction per shape defect.

    Requires hypotheses (i) and (ii): then U12 and U23 begin with [0,x), [0,y)
    for finite positive x, y.
    """
    x = inp.U12.intervals[0].hi
    y = inp.U23.intervals[0].hi
    xy = x * y
    # a second interval in U23, then in U12
    if len(inp.U23) > 1:
        nxt = inp.U23.intervals[1]
        v = _pick(RatioSet([Interval(nxt.lo, nxt.hi, False, False)]))
        if v is not INF and v > 0:
            yield "u23-not-initial", _homog(1, xy / v, xy)
        yield "u23-not-initial", _homog(1, x, xy)
    if len(inp.U12) > 1:
        nxt = inp.U12.intervals[1]
        u = _pick(RatioSet([Interval(nxt.lo, nxt.hi, False, False)]))
        yield "u12-not-initial", _homog(1, u, xy)
        yield "u12-not-initial", _homog(1, x, xy)
    missing = RatioSet.initial(xy).intersect(inp.U13.complement())
    if missing:
        t = _pick(missing)
        if t == 0:
            yield "u13-missing-ratio", _homog(1, 0, 0)
        else:
            u = (t / y + x) / 2
            yield "u13-missing-ratio", _homog(1, u, t)
    extra = inp.U13.intersect(RatioSet([Interval(xy, INF, True, True)]))
    if extra:
        yield "u13-extra-ratio", _homog(1, x, _pick(extra))


def ceva_check(inp: CevaInput, lazy: bool = False) -> CevaVerdict:
    """Decide hypotheses (i)-(iii) and, when they hold, verify the conclusion.

    With ``lazy`` the chain hypothesis is not computed once (i) or (ii) fails
    (it is then reported as False); the search harness uses this.
    """
    for name, u in inp.sets().items():
        if not isinstance(u, RatioSet):
            raise ValidationError(f"{name} is not a ratio set")
        if not u.is_admissible:
            raise ValidationError(f"{name} = {u} is not a finite union of admissible intervals")
    notes = []
    hyp_0 = all(0 in u for u in inp.sets().values())
    full = RatioSet([Interval(0, INF, True, False)])
    hyp_notfull = not full.issubset(inp.U12) and not full.issubset(inp.U23)
    witness = failure = construction = None
    if not hyp_0:
        name = next(n for n, u in inp.sets().items() if 0 not in u)
        failure, witness, construction = f"hyp_0:{name}", _ZERO_POINTS[name], "zero-ratio"
    elif not hyp_notfull:
        name = "U12" if full.issubset(inp.U12) else "U23"
        failure = f"hyp_notfull:{name}"
        notes.append(f"{name} contains [0,inf)")
    if lazy and not (hyp_0 and hyp_notfull):
        return CevaVerdict(hyp_0, hyp_notfull, False, None, witness, failure, construction, notes)

    c12, c23, c13 = _cyl("U12", inp.U12), _cyl("U23", inp.U23), _cyl("U13", inp.U13)
    left = region_difference(c12.meet(c23), c13)
    right = None if left is not None else region_difference(c13, c12.join(c23))
    hyp_chain = left is None and right is None

    if not hyp_chain and failure is None:
        failure = "hyp_chain:left" if left is not None else "hyp_chain:right"
        for tag, pt in _chain_witnesses(inp):
            if chain_status(inp, pt) is not None:
                witness, construction = pt, tag
                failure = f"hyp_chain:{chain_status(inp, pt)}"
                break
        else:
            witness, construction = _primitive_point(left if left is not None else right), "lp"
            if chain_status(inp, witness) is None:
                raise InconsistencyError("LP witness does not refute the chain", {"input": inp.key()})

    verdict = CevaVerdict(hyp_0, hyp_notfull, hyp_chain, None, witness, failure, construction, notes)
    if verdict.hypotheses_hold:
        x, y = inp.U12.is_initial(), inp.U23.is_initial()
        if x is None or y is None or inp.U13 != RatioSet.initial(x * y):
            raise InconsistencyError(
                "hypotheses (i)-(iii) hold but the sets are not [0,x), [0,y), [0,xy)",
                {"U12": str(inp.U12), "U23": str(inp.U23), "U13": str(inp.U13)},
            )
        verdict.conclusion = (x, y)
    return verdict


def ceva_converse_check(x, y) -> bool:
    x, y = as_rat(x), as_rat(y)
    if x <= 0 or y <= 0:
        raise ValidationError("x and y must be positive")
    v = ceva_check(CevaInput(RatioSet.initial(x), RatioSet.initial(y), RatioSet.initial(x * y)))
    return v.hypotheses_hold and v.conclusion == (x, y)


def search_space(pool: Sequence) -> list:
    """Admissible sets containing 0 with at most two intervals and endpoints in ``pool``.

    The first interval is [0,x) with x in the pool; the optional second one is
    (a,b) or (a,inf] with x <= a < b, all endpoints from the pool.
    """
    pts = sorted({INF if p is INF else as_rat(p) for p in pool if p is INF or as_rat(p) > 0})
    finite = [p for p in pts if p is not INF]
    out = set()
    for x in pts:
        head = Interval(0, x, True, False)
        out.add(RatioSet([head]))
        if x is INF:
            continue
        for a in finite:
            if a < x:
                continue
            for b in pts:
                if b > a:
                    out.add(RatioSet([head, Interval(a, b, False, False)]))
            out.add(RatioSet([head, Interval(a, INF, False, True)]))
    return sorted(out, key=str)


def _run_chunk(triples):
    counts = {"inputs": 0, "hypotheses_hold": 0, "conclusion_verified": 0,
              "hyp_0": 0, "hyp_notfull": 0, "hyp_chain": 0}
    inconsistencies = []
    for u12, u23, u13 in triples:
        inp = CevaInput(u12, u23, u13)
        counts["inputs"] += 1
        try:
            v = ceva_check(inp, lazy=True)
        except InconsistencyError as exc:
            inconsistencies.append(exc.counterexample)
            continue
        if v.hypotheses_hold:
            counts["hypotheses_hold"] += 1
            counts["conclusion_verified"] += 1
        elif not v.hyp_0:
            counts["hyp_0"] += 1
        elif not v.hyp_notfull:
            counts["hyp_notfull"] += 1
        else:
            counts["hyp_chain"] += 1
    return counts, inconsistencies


def ceva_search(pool: Sequence, budget: Optional[int] = None, threads: int = 1) -> dict:
    """Run :func:`ceva_check` over all triples from :func:`search_space`.

    Triples are taken in lexicographic order of their text form, so a budget
    cuts the same prefix on every run.  Failures are counted by the first
    failing hypothesis.
    """
    sets = search_space(pool)
    total = len(sets) ** 3
    triples = itertools.product(sets, repeat=3)
    partial = budget is not None and budget < total
    if partial:
        triples = itertools.islice(triples, budget)
    triples = list(triples)
    if threads > 1 and len(triples) > 1000:
        size = -(-len(triples) // (threads * 4))
        chunks = [triples[k:k + size] for k in range(0, len(triples), size)]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_run_chunk, chunks))
    else:
        results = [_run_chunk(triples)]
    counts = {"inputs": 0, "hypotheses_hold": 0, "conclusion_verified": 0,
              "hyp_0": 0, "hyp_notfull": 0, "hyp_chain": 0}
    inconsistencies = []
    for c, bad in results:
        for k in counts:
            counts[k] += c[k]
        inconsistencies.extend(bad)
    return {
        "pool": [fmt_ext(p) for p in sorted({INF if p is INF else as_rat(p) for p in pool})],
        "sets_per_slot": len(sets),
        "inputs": counts["inputs"],
        "hypotheses_hold": counts["hypotheses_hold"],
        "conclusion_verified": counts["conclusion_verified"],
        "failures": {k: counts[k] for k in ("hyp_0", "hyp_notfull", "hyp_chain")},
        "inconsistencies": inconsistencies,
        "partial": partial,
    }
