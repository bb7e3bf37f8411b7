"""Exact rationals, the extended ray [0, inf], and finite unions of intervals on it.

Rationals are plain :class:`fractions.Fraction` values.  The extended ray adds a
single point ``INF`` above every rational.  A :class:`RatioSet` is a canonical
finite union of intervals of the extended ray; it is closed under union,
intersection and complement, and :meth:`RatioSet.is_admissible` tells whether it
is a finite union of intervals of the shapes ``[0,x)``, ``(x,y)``, ``(y,inf]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Optional, Union

from .errors import ParseError, ValidationError

__all__ = [
    "INF",
    "ExtRat",
    "Interval",
    "RatioSet",
    "as_rat",
    "parse_rat",
    "parse_ext",
    "fmt_ext",
    "ratio",
    "ratioset_normalize",
    "ratioset_is_initial",
    "ratioset_boolean",
    "parse_interval",
    "parse_ratioset",
]


@total_ordering
class _Infinity:
    """The point at infinity of the extended positive ray."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("cevian.INF")

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtRat = Union[Fraction, _Infinity]


def as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise ValidationError(f"not an exact rational: {value!r}")


def _as_ext(value) -> ExtRat:
    if value is INF:
        return INF
    if isinstance(value, str):
        return parse_ext(value)
    return as_rat(value)


_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rat(text: str) -> Fraction:
    m = _RAT_RE.match(text)
    if not m:
        raise ParseError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def parse_ext(text: str) -> ExtRat:
    if text.strip().lower() in ("inf", "oo", "∞"):
        return INF
    return parse_rat(text)


def fmt_ext(value: ExtRat) -> str:
    if value is INF:
        return "inf"
    value = as_rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def ratio(x, y) -> ExtRat:
    """``x^-1 y`` for a nonzero pair of nonnegative rationals; ``INF`` when x = 0."""
    x, y = as_rat(x), as_rat(y)
    if x < 0 or y < 0:
        raise ValidationError("ratio() takes nonnegative arguments")
    if x == 0:
        if y == 0:
            raise ValidationError("ratio(0, 0) is undefined")
        return INF
    return y / x


@dataclass(frozen=True)
class Interval:
    lo: ExtRat
    hi: ExtRat
    lo_closed: bool
    hi_closed: bool

    def __post_init__(self):
        lo, hi = _as_ext(self.lo), _as_ext(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo is not INF and lo < 0:
            raise ValidationError(f"interval endpoint below 0: {fmt_ext(lo)}")
        if lo > hi:
            raise ValidationError(f"malformed interval: left {fmt_ext(lo)} > right {fmt_ext(hi)}")

    @property
    def is_empty(self) -> bool:
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi and self.lo_closed and self.hi_closed

    def __contains__(self, t) -> bool:
        t = _as_ext(t)
        above = t > self.lo or (self.lo_closed and t == self.lo)
        below = t < self.hi or (self.hi_closed and t == self.hi)
        return above and below

    @property
    def is_admissible(self) -> bool:
        if self.is_empty or self.is_singleton:
            return False
        if self.lo_closed and self.lo != 0:
            return False
        if self.hi_closed and self.hi is not INF:
            return False
        return True

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{fmt_ext(self.lo)},{fmt_ext(self.hi)}{right}"


def _sort_key(iv: Interval):
    return (iv.lo, 0 if iv.lo_closed else 1, iv.hi, 1 if iv.hi_closed else 0)


def _normalized(raw: Iterable[Interval]) -> tuple:
    items = sorted((iv for iv in raw if not iv.is_empty), key=_sort_key)
    out = []
    for iv in items:
        if out:
            cur = out[-1]
            touches = iv.lo < cur.hi or (iv.lo == cur.hi and (cur.hi_closed or iv.lo_closed))
            if touches:
                if iv.hi > cur.hi:
                    hi, hc = iv.hi, iv.hi_closed
                elif iv.hi == cur.hi:
                    hi, hc = cur.hi, cur.hi_closed or iv.hi_closed
                else:
                    hi, hc = cur.hi, cur.hi_closed
                out[-1] = Interval(cur.lo, hi, cur.lo_closed, hc)
                continue
        out.append(iv)
    return tuple(out)


class RatioSet:
    """A canonical finite union of intervals of [0, inf].

    Instances are immutable and hashable; two sets are equal iff they have the
    same members.
    """

    __slots__ = ("intervals", "_hash")

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.intervals = _normalized(intervals)
        self._hash = hash(self.intervals)

    @classmethod
    def empty(cls) -> "RatioSet":
        return cls(())

    @classmethod
    def full(cls) -> "RatioSet":
        return cls([Interval(0, INF, True, True)])

    @classmethod
    def initial(cls, z) -> "RatioSet":
        """``[0, z)``."""
        return cls([Interval(0, _as_ext(z), True, False)])

    @classmethod
    def parse(cls, text: str) -> "RatioSet":
        return parse_ratioset(text)

    def __eq__(self, other):
        return isinstance(other, RatioSet) and self.intervals == other.intervals

    def __hash__(self):
        return self._hash

    def __contains__(self, t) -> bool:
        return any(t in iv for iv in self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __str__(self):
        return "{" + ", ".join(str(iv) for iv in self.intervals) + "}"

    def __repr__(self):
        return f"RatioSet({self})"

    def union(self, other: "RatioSet") -> "RatioSet":
        return RatioSet(self.intervals + other.intervals)

    def intersect(self, other: "RatioSet") -> "RatioSet":
        pieces = []
        for a in self.intervals:
            for b in other.intervals:
                if a.lo > b.lo:
                    lo, lc = a.lo, a.lo_closed
                elif b.lo > a.lo:
                    lo, lc = b.lo, b.lo_closed
                else:
                    lo, lc = a.lo, a.lo_closed and b.lo_closed
                if a.hi < b.hi:
                    hi, hc = a.hi, a.hi_closed
                elif b.hi < a.hi:
                    hi, hc = b.hi, b.hi_closed
                else:
                    hi, hc = a.hi, a.hi_closed and b.hi_closed
                if lo <= hi:
                    pieces.append(Interval(lo, hi, lc, hc))
        return RatioSet(pieces)

    def complement(self) -> "RatioSet":
        gaps = []
        cur, cur_closed = Fraction(0), True
        for iv in self.intervals:
            gap = Interval(cur, iv.lo, cur_closed, not iv.lo_closed)
            if not gap.is_empty:
                gaps.append(gap)
            cur, cur_closed = iv.hi, not iv.hi_closed
        if cur is not INF or cur_closed:
            tail = Interval(cur, INF, cur_closed, True)
            if not tail.is_empty:
                gaps.append(tail)
        return RatioSet(gaps)

    def issubset(self, other: "RatioSet") -> bool:
        return not self.intersect(other.complement())

    @property
    def is_admissible(self) -> bool:
        """True iff the set lies in O([0,inf]), i.e. is a union of admissible shapes."""
        return all(iv.is_admissible for iv in self.intervals)

    def is_initial(self) -> Optional[Fraction]:
        """``z`` when the set is exactly ``[0,z)`` with ``0 < z < inf``; else None."""
        if len(self.intervals) != 1:
            return None
        iv = self.intervals[0]
        if iv.lo == 0 and iv.lo_closed and not iv.hi_closed and iv.hi is not INF and iv.hi > 0:
            return iv.hi
        return None

    def sample_points(self) -> list:
        """A few members of every interval: endpoints that belong, plus a midpoint."""
        pts = []
        for iv in self.intervals:
            if iv.lo_closed:
                pts.append(iv.lo)
            if iv.hi_closed:
                pts.append(iv.hi)
            if not iv.is_singleton:
                pts.append(_interior_point(iv))
        return pts


def _interior_point(iv: Interval) -> Fraction:
    if iv.hi is INF:
        return iv.lo + 1
    return (iv.lo + iv.hi) / 2


_IV_RE = re.compile(r"([\[(])\s*([^,\s\])]+)\s*,\s*([^,\s\])]+)\s*([\])])")


def parse_interval(text: str) -> Interval:
    m = _IV_RE.fullmatch(text.strip())
    if not m:
        raise ParseError(f"not an interval: {text!r}")
    lo, hi = parse_ext(m.group(2)), parse_ext(m.group(3))
    return Interval(lo, hi, m.group(1) == "[", m.group(4) == "]")


def parse_ratioset(text: str) -> RatioSet:
    s = text.strip()
    if not (s.startswith("{") and s.endswith("}")):
        raise ParseError(f"interval set must be enclosed in braces: {text!r}")
    body = s[1:-1]
    intervals = []
    pos = 0
    while True:
        while pos < len(body) and body[pos] in " \t,":
            pos += 1
        if pos >= len(body):
            break
        m = _IV_RE.match(body, pos)
        if not m:
            raise ParseError(f"bad interval near {body[pos:pos + 12]!r}", col=pos + 2)
        intervals.append(parse_interval(m.group(0)))
        pos = m.end()
    return RatioSet(intervals)


def ratioset_normalize(raw: Iterable[Interval]) -> RatioSet:
    return RatioSet(raw)


def ratioset_is_initial(u: RatioSet) -> Optional[Fraction]:
    return u.is_initial()


def ratioset_boolean(op: str, u: RatioSet, v: Optional[RatioSet] = None) -> RatioSet:
    if op == "complement":
        if v is not None:
            raise ValidationError("complement takes exactly one argument")
        return u.complement()
    if v is None:
        raise ValidationError(f"{op} takes two arguments")
    if op == "union":
        return u.union(v)
    if op == "intersect":
        return u.intersect(v)
    raise ValidationError(f"unknown set operation {op!r}")
