"""Strict open polyhedral cones of (Q+)^n relative to a closed ambient cone.

A :class:`Region` is a finite union of :class:`Cell` objects; each cell is the
ambient cone cut by homogeneous constraints ``f.x > 0``, ``f.x >= 0`` or
``f.x = 0``, at least one of them strict.  Regions carry no canonical form:
equality is mutual containment, decided exactly through :mod:`cevian.lp`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence

from . import lp
from .errors import ValidationError
from .ratcore import INF, Interval, RatioSet

__all__ = [
    "Constraint",
    "AmbientCone",
    "Cell",
    "Region",
    "constraint",
    "cell_is_empty",
    "cell_witness",
    "region_lattice",
    "region_subset",
    "region_equal",
    "region_difference",
    "region_to_ratioset",
    "ratioset_to_region",
    "format_form",
    "format_constraint",
    "format_region",
]

STRICT, WEAK, EQ = ">", ">=", "="
_OPS = (STRICT, WEAK, EQ)


def _primitive(coeffs: Sequence) -> tuple:
    """Scale by a positive rational to a primitive integer vector."""
    fr = [Fraction(c) for c in coeffs]
    den = 1
    for v in fr:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


@dataclass(frozen=True, order=True)
class Constraint:
    """``form . x  op  0`` with ``form`` a primitive integer vector."""

    form: tuple
    op: str

    def holds(self, point) -> bool:
        v = sum(Fraction(c) * x for c, x in zip(self.form, point))
        if self.op == STRICT:
            return v > 0
        if self.op == WEAK:
            return v >= 0
        return v == 0

    def negations(self) -> tuple:
        neg = tuple(-c for c in self.form)
        if self.op == STRICT:
            return (Constraint(neg, WEAK),)
        if self.op == WEAK:
            return (Constraint(neg, STRICT),)
        return (Constraint(self.form, STRICT), Constraint(neg, STRICT))


def constraint(coeffs: Sequence, op: str = STRICT) -> Constraint:
    if op not in _OPS:
        raise ValidationError(f"unknown constraint operator {op!r}")
    form = _primitive(coeffs)
    if op == EQ and any(form):
        lead = next(c for c in form if c)
        if lead < 0:
            form = tuple(-c for c in form)
    return Constraint(form, op)


@dataclass(frozen=True)
class AmbientCone:
    """A closed cone ``K`` inside (Q+)^n given by weak or equality constraints."""

    dimension: int
    constraints: tuple = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        cons = tuple(sorted(set(self.constraints)))
        for c in cons:
            if c.op == STRICT:
                raise ValidationError("ambient cones take only >= and = constraints")
            if len(c.form) != self.dimension:
                raise ValidationError("ambient constraint has the wrong dimension")
        object.__setattr__(self, "constraints", cons)

    @classmethod
    def trivial(cls, n: int) -> "AmbientCone":
        return cls(n, (), name=f"(Q+)^{n}")

    def contains(self, point) -> bool:
        return all(x >= 0 for x in point) and all(c.holds(point) for c in self.constraints)


@lru_cache(maxsize=None)
def _section_point(ambient: AmbientCone, constraints: frozenset) -> Optional[tuple]:
    strict, weak, eq = [], [], []
    for c in tuple(ambient.constraints) + tuple(constraints):
        (strict if c.op == STRICT else weak if c.op == WEAK else eq).append(c.form)
    return lp.section_point(ambient.dimension, strict=strict, weak=weak, eq=eq)


def _scaled(point) -> tuple:
    """Rescale a rational point of a cone to a primitive nonnegative integer vector."""
    if not any(point):
        return tuple(Fraction(0) for _ in point)
    return tuple(Fraction(v) for v in _primitive(point))


def _check_forms(ambient: AmbientCone, constraints: Iterable[Constraint]):
    for c in constraints:
        if len(c.form) != ambient.dimension:
            raise ValidationError(
                f"constraint of dimension {len(c.form)} in an ambient cone of dimension {ambient.dimension}"
            )


@dataclass(frozen=True)
class Cell:
    ambient: AmbientCone
    constraints: frozenset

    def __post_init__(self):
        cons = frozenset(self.constraints)
        _check_forms(self.ambient, cons)
        object.__setattr__(self, "constraints", cons)

    @property
    def is_strict(self) -> bool:
        return any(c.op == STRICT for c in self.constraints)

    def contains(self, point) -> bool:
        return self.ambient.contains(point) and all(c.holds(point) for c in self.constraints)

    def nonzero_point(self) -> Optional[tuple]:
        """A nonzero point of the cell (integer coordinates), or None."""
        p = _section_point(self.ambient, self.constraints)
        return None if p is None else _scaled(p)

    def sorted_constraints(self) -> list:
        return sorted(self.constraints)


def cell_is_empty(c: Cell) -> bool:
    """True iff the cell has no point at all (cells without strict constraints contain 0)."""
    if not c.is_strict:
        return False
    return _section_point(c.ambient, c.constraints) is None


def cell_witness(c: Cell) -> Optional[tuple]:
    if not c.is_strict:
        return tuple(Fraction(0) for _ in range(c.ambient.dimension))
    return c.nonzero_point()


def _has_nonzero(ambient, constraints) -> bool:
    return _section_point(ambient, constraints) is not None


@dataclass(frozen=True)
class Region:
    ambient: AmbientCone
    cells: tuple = ()

    def __post_init__(self):
        seen, cells = set(), []
        for c in self.cells:
            if not isinstance(c, Cell):
                c = Cell(self.ambient, frozenset(c))
            if c.ambient != self.ambient:
                raise ValidationError("cell lives in a different ambient cone")
            if not c.is_strict:
                raise ValidationError("every cell of a region needs a strict constraint")
            if c.constraints not in seen:
                seen.add(c.constraints)
                cells.append(c)
        object.__setattr__(self, "cells", tuple(cells))

    @classmethod
    def zero(cls, ambient: AmbientCone) -> "Region":
        return cls(ambient, ())

    @classmethod
    def unit(cls, ambient: AmbientCone) -> "Region":
        n = ambient.dimension
        cells = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            cells.append(frozenset([constraint(e, STRICT)]))
        return cls.from_constraint_sets(ambient, cells)

    @classmethod
    def half_space(cls, ambient: AmbientCone, coeffs: Sequence) -> "Region":
        return cls.from_constraint_sets(ambient, [frozenset([constraint(coeffs, STRICT)])])

    @classmethod
    def from_constraint_sets(cls, ambient: AmbientCone, sets) -> "Region":
        """Build a region from constraint sets, dropping empty cells."""
        keep = [frozenset(s) for s in sets if _has_nonzero(ambient, frozenset(s))]
        return cls(ambient, tuple(keep))

    @property
    def is_zero(self) -> bool:
        return not self.cells

    def contains(self, point) -> bool:
        return any(c.contains(point) for c in self.cells)

    def meet(self, other: "Region") -> "Region":
        return region_lattice("meet", self, other)

    def join(self, other: "Region") -> "Region":
        return region_lattice("join", self, other)

    def complement(self) -> "Region":
        return region_lattice("complement_in_unit", self)

    def __le__(self, other: "Region") -> bool:
        return region_subset(self, other)[0]


def _same_ambient(a: Region, b: Region):
    if a.ambient != b.ambient:
        raise ValidationError("regions live in different ambient cones")


def _complement_pieces(ambient: AmbientCone, cells: Sequence[Cell], start: frozenset = frozenset()):
    """Constraint sets partitioning ``start`` minus the union of ``cells``.

    Each cell is removed through the disjoint first-violated-constraint split;
    pieces without a nonzero point are pruned as soon as they appear.
    """
    pieces = [start]
    for cell in cells:
        nxt = []
        cons = cell.sorted_constraints()
        for piece in pieces:
            prefix = set()
            for c in cons:
                for neg in c.negations():
                    cand = frozenset(piece | prefix | {neg})
                    if _has_nonzero(ambient, cand):
                        nxt.append(cand)
                prefix.add(c)
        pieces = nxt
        if not pieces:
            break
    return pieces


def region_lattice(op: str, a: Region, b: Optional[Region] = None) -> Region:
    if op == "complement_in_unit":
        if b is not None:
            raise ValidationError("complement_in_unit takes one region")
        unit = Region.unit(a.ambient)
        sets = []
        for u in unit.cells:
            sets.extend(_complement_pieces(a.ambient, a.cells, u.constraints))
        return Region(a.ambient, tuple(sets))
    if b is None:
        raise ValidationError(f"{op} takes two regions")
    _same_ambient(a, b)
    if op == "meet":
        sets = [ca.constraints | cb.constraints for ca in a.cells for cb in b.cells]
        return Region.from_constraint_sets(a.ambient, sets)
    if op == "join":
        return Region(a.ambient, a.cells + b.cells)
    raise ValidationError(f"unknown lattice operation {op!r}")


def region_difference(a: Region, b: Region) -> Optional[tuple]:
    """A point of ``a`` outside ``b`` (primitive integer vector), or None."""
    _same_ambient(a, b)
    for cell in a.cells:
        pieces = _complement_pieces(a.ambient, b.cells, cell.constraints)
        if pieces:
            return _scaled(_section_point(a.ambient, pieces[0]))
    return None


def region_subset(a: Region, b: Region):
    """``(True, None)`` if a is contained in b, else ``(False, witness)``."""
    w = region_difference(a, b)
    return (w is None, w)


def region_equal(a: Region, b: Region) -> bool:
    return region_difference(a, b) is None and region_difference(b, a) is None


def _halfline_set(a: Fraction, b: Fraction, op: str) -> RatioSet:
    """Ratios t = y/x with ``a*x + b*y op 0``, over nonzero (x, y) in (Q+)^2."""
    ivs = []
    at_inf = (b > 0) if op == STRICT else (b >= 0) if op == WEAK else (b == 0)
    if b == 0:
        finite = (a > 0) if op == STRICT else (a >= 0) if op == WEAK else (a == 0)
        if finite:
            ivs.append(Interval(0, INF, True, False))
    else:
        r = -a / b
        if op == EQ:
            if r >= 0:
                ivs.append(Interval(r, r, True, True))
        elif b > 0:
            if r < 0 or (r == 0 and op == WEAK):
                ivs.append(Interval(0, INF, True, False))
            else:
                ivs.append(Interval(r, INF, op == WEAK, False))
        else:
            if r > 0 or (r == 0 and op == WEAK):
                ivs.append(Interval(0, r, True, op == WEAK))
    if at_inf:
        ivs.append(Interval(INF, INF, True, True))
    return RatioSet(ivs)


def region_to_ratioset(r: Region) -> RatioSet:
    """The set U of ratios x1^-1 x2 such that the 2-dimensional region is {ratio in U}."""
    if r.ambient.dimension != 2 or r.ambient.constraints:
        raise ValidationError("region_to_ratioset needs a region of the trivial cone (Q+)^2")
    out = RatioSet.empty()
    for cell in r.cells:
        s = RatioSet.full()
        for c in cell.constraints:
            s = s.intersect(_halfline_set(Fraction(c.form[0]), Fraction(c.form[1]), c.op))
        out = out.union(s)
    return out


def ratioset_to_region(u: RatioSet, i: int, j: int, n: int, ambient: Optional[AmbientCone] = None) -> Region:
    """The cylinder {x : (x_i, x_j) != 0 and x_i^-1 x_j in U}; indices are 1-based."""
    if i == j:
        raise ValidationError("ratioset_to_region needs two distinct coordinates")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValidationError("coordinate index out of range")
    ambient = ambient or AmbientCone.trivial(n)
    if ambient.dimension != n:
        raise ValidationError("ambient cone has the wrong dimension")

    def form(ci, cj):
        f = [Fraction(0)] * n
        f[i - 1] = Fraction(ci)
        f[j - 1] = Fraction(cj)
        return f

    sets = []
    for iv in u:
        cons = set()
        if iv.lo is INF:
            cons.add(constraint(form(1, 0), EQ))
            cons.add(constraint(form(0, 1), STRICT))
        elif iv.lo_closed:
            if iv.lo != 0:
                cons.add(constraint(form(-iv.lo, 1), WEAK))
        else:
            cons.add(constraint(form(-iv.lo, 1), STRICT))
        if iv.hi is INF:
            if not iv.hi_closed:
                cons.add(constraint(form(1, 0), STRICT))
        elif iv.hi_closed:
            cons.add(constraint(form(iv.hi, -1), WEAK))
        else:
            cons.add(constraint(form(iv.hi, -1), STRICT))
        if not any(c.op == STRICT for c in cons):
            cons.add(constraint(form(1, 1), STRICT))
        sets.append(frozenset(cons))
    return Region.from_constraint_sets(ambient, sets)


def format_form(form: Sequence, names: Optional[Sequence[str]] = None) -> str:
    names = names or [f"x{k + 1}" for k in range(len(form))]
    parts = []
    for c, name in zip(form, names):
        c = Fraction(c)
        if c == 0:
            continue
        mag = abs(c)
        term = name if mag == 1 else f"{_fmt(mag)}*{name}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def format_constraint(c: Constraint, names=None) -> str:
    return f"{format_form(c.form, names)} {c.op} 0"


def format_region(r: Region, names=None) -> str:
    if not r.cells:
        return "zero"
    return " | ".join(
        "[" + ", ".join(format_constraint(c, names) for c in cell.sorted_constraints()) + "]"
        for cell in r.cells
    )
