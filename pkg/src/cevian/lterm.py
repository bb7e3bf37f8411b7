"""l-terms over named generators: parsing, exact evaluation, and supports.

An l-term is built from 0, generators, ``-``, ``+``, meet ``/\\`` and join
``\\/``, with positive rational scalars as sugar.  Over a finitely presented
Abelian l-group (a :class:`Presentation`: generators plus weak homogeneous
relations), a term is a piecewise-linear homogeneous function on the relation
cone.  :func:`compile_pl` computes its linear pieces, :func:`compile_support`
the region where it is nonzero (or positive), and :func:`propto` decides the
divisibility preorder as containment of supports.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence

from . import lp
from .cones import (
    EQ,
    STRICT,
    WEAK,
    AmbientCone,
    Region,
    _has_nonzero,
    constraint,
    region_difference,
)
from .errors import ParseError, ValidationError
from .ratcore import as_rat, fmt_ext

__all__ = [
    "LTerm",
    "Zero",
    "Var",
    "Neg",
    "Add",
    "Meet",
    "Join",
    "Scale",
    "ZERO",
    "sub",
    "pos",
    "abs_",
    "meet_all",
    "join_all",
    "parse_lterm",
    "format_lterm",
    "variables",
    "substitute",
    "eval_lterm",
    "linear_form",
    "Presentation",
    "PLFun",
    "compile_pl",
    "compile_support",
    "propto",
    "asymp",
    "propto_bound",
    "UnboundVariableError",
    "RelationViolation",
]


class UnboundVariableError(ValidationError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class RelationViolation(ValidationError):
    def __init__(self, relation):
        self.relation = relation
        super().__init__(f"point violates the relation {relation}")


class LTerm:
    __slots__ = ()

    def __add__(self, other):
        return Add(self, other)

    def __sub__(self, other):
        return Add(self, Neg(other))

    def __neg__(self):
        return Neg(self)

    def __and__(self, other):
        return Meet(self, other)

    def __or__(self, other):
        return Join(self, other)

    def __rmul__(self, q):
        return Scale(as_rat(q), self)

    def __str__(self):
        return format_lterm(self)


@dataclass(frozen=True, repr=False)
class Zero(LTerm):
    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, repr=False)
class Var(LTerm):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Neg(LTerm):
    arg: LTerm

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Add(LTerm):
    left: LTerm
    right: LTerm

    def __repr__(self):
        return f"Add({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Meet(LTerm):
    left: LTerm
    right: LTerm

    def __repr__(self):
        return f"Meet({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Join(LTerm):
    left: LTerm
    right: LTerm

    def __repr__(self):
        return f"Join({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Scale(LTerm):
    q: Fraction
    arg: LTerm

    def __post_init__(self):
        q = as_rat(self.q)
        if q <= 0:
            raise ValidationError("scalars must be positive rationals; use - for negation")
        object.__setattr__(self, "q", q)

    def __repr__(self):
        return f"Scale({fmt_ext(self.q)}, {self.arg!r})"


ZERO = Zero()


def sub(t: LTerm, u: LTerm) -> LTerm:
    return Add(t, Neg(u))


def pos(t: LTerm) -> LTerm:
    return Join(t, ZERO)


def abs_(t: LTerm) -> LTerm:
    return Join(t, Neg(t))


def meet_all(terms: Sequence[LTerm]) -> LTerm:
    out = terms[0]
    for t in terms[1:]:
        out = Meet(out, t)
    return out


def join_all(terms: Sequence[LTerm]) -> LTerm:
    out = terms[0]
    for t in terms[1:]:
        out = Join(out, t)
    return out


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<join>\\/|∨)|(?P<meet>/\\|∧)|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*()]))"
)


def _tokenize(src: str):
    pos_ = 0
    toks = []
    while True:
        while pos_ < len(src) and src[pos_].isspace():
            pos_ += 1
        if pos_ >= len(src):
            break
        m = _TOKEN_RE.match(src, pos_)
        if not m or m.end() == pos_:
            raise ParseError(f"unexpected character {src[pos_]!r}", col=pos_ + 1)
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        if kind == "op":
            kind = text
        toks.append((kind, text, start + 1))
        pos_ = m.end()
    toks.append(("eof", "", len(src) + 1))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = {"eof": "end of input"}.get(kind, repr(kind))
            got = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", col=tok[2])
        self.i += 1
        return tok

    def expr(self):
        t = self.lat()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            u = self.lat()
            t = Add(t, u) if op == "+" else Add(t, Neg(u))
        return t

    def lat(self):
        t = self.meet()
        while self.peek()[0] == "join":
            self.take()
            t = Join(t, self.meet())
        return t

    def meet(self):
        t = self.unary()
        while self.peek()[0] == "meet":
            self.take()
            t = Meet(t, self.unary())
        return t

    def unary(self):
        kind, text, col = self.peek()
        if kind == "-":
            self.take()
            return Neg(self.unary())
        if kind == "num":
            self.take()
            q = Fraction(text)
            if self.peek()[0] == "*":
                self.take()
                if q == 0:
                    raise ParseError("scalar must be positive", col=col)
                return Scale(q, self.unary())
            if q == 0:
                return ZERO
            raise ParseError(f"scalar {text} must be followed by '*'", col=col)
        return self.atom()

    def atom(self):
        kind, text, col = self.peek()
        if kind == "(":
            self.take()
            t = self.expr()
            self.take(")")
            return t
        if kind == "ident":
            self.take()
            if text in ("pos", "abs") and self.peek()[0] == "(":
                self.take("(")
                t = self.expr()
                self.take(")")
                return pos(t) if text == "pos" else abs_(t)
            return Var(text)
        got = "end of input" if kind == "eof" else repr(text)
        raise ParseError(f"expected a term, found {got}", col=col)


def parse_lterm(src: str) -> LTerm:
    p = _Parser(src)
    t = p.expr()
    p.take("eof")
    return t


_SUM, _JOIN, _MEET, _UNARY = 1, 2, 3, 4


def _fmt(t: LTerm, level: int) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Join) and t.right == ZERO:
        return f"pos({_fmt(t.left, _SUM)})"
    if isinstance(t, Join) and t.right == Neg(t.left):
        return f"abs({_fmt(t.left, _SUM)})"
    if isinstance(t, Add):
        if isinstance(t.right, Neg):
            s = f"{_fmt(t.left, _SUM)} - {_fmt(t.right.arg, _JOIN)}"
        else:
            s = f"{_fmt(t.left, _SUM)} + {_fmt(t.right, _JOIN)}"
        return f"({s})" if level > _SUM else s
    if isinstance(t, Join):
        s = f"{_fmt(t.left, _JOIN)} \\/ {_fmt(t.right, _MEET)}"
        return f"({s})" if level > _JOIN else s
    if isinstance(t, Meet):
        s = f"{_fmt(t.left, _MEET)} /\\ {_fmt(t.right, _UNARY)}"
        return f"({s})" if level > _MEET else s
    if isinstance(t, Neg):
        return f"-{_fmt(t.arg, _UNARY)}"
    if isinstance(t, Scale):
        return f"{fmt_ext(t.q)}*{_fmt(t.arg, _UNARY)}"
    raise TypeError(f"not an l-term: {t!r}")


def format_lterm(t: LTerm) -> str:
    return _fmt(t, _SUM)


# ------------------------------------------------------------- evaluation


def variables(t: LTerm) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Zero):
        return frozenset()
    if isinstance(t, (Neg, Scale)):
        return variables(t.arg)
    return variables(t.left) | variables(t.right)


def substitute(t: LTerm, mapping: Mapping[str, LTerm]) -> LTerm:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Zero):
        return t
    if isinstance(t, Neg):
        return Neg(substitute(t.arg, mapping))
    if isinstance(t, Scale):
        return Scale(t.q, substitute(t.arg, mapping))
    return type(t)(substitute(t.left, mapping), substitute(t.right, mapping))


def _eval(t: LTerm, point: Mapping[str, Fraction]) -> Fraction:
    if isinstance(t, Var):
        try:
            return point[t.name]
        except KeyError:
            raise UnboundVariableError(t.name) from None
    if isinstance(t, Zero):
        return Fraction(0)
    if isinstance(t, Neg):
        return -_eval(t.arg, point)
    if isinstance(t, Scale):
        return t.q * _eval(t.arg, point)
    a, b = _eval(t.left, point), _eval(t.right, point)
    if isinstance(t, Add):
        return a + b
    if isinstance(t, Meet):
        return min(a, b)
    return max(a, b)


def eval_lterm(t: LTerm, point: Mapping, presentation: Optional["Presentation"] = None) -> Fraction:
    pt = {k: as_rat(v) for k, v in point.items()}
    if presentation is not None:
        presentation.check_point(pt)
    return _eval(t, pt)


def linear_form(t: LTerm, names: Sequence[str]) -> tuple:
    """Coefficients of a term without lattice operations, in the order of ``names``."""
    idx = {n: k for k, n in enumerate(names)}

    def go(u):
        if isinstance(u, Zero):
            return [Fraction(0)] * len(names)
        if isinstance(u, Var):
            if u.name not in idx:
                raise UnboundVariableError(u.name)
            v = [Fraction(0)] * len(names)
            v[idx[u.name]] = Fraction(1)
            return v
        if isinstance(u, Neg):
            return [-c for c in go(u.arg)]
        if isinstance(u, Scale):
            return [u.q * c for c in go(u.arg)]
        if isinstance(u, Add):
            return [x + y for x, y in zip(go(u.left), go(u.right))]
        raise ValidationError(f"not a linear term: {format_lterm(t)}")

    return tuple(go(t))


# ----------------------------------------------------------- presentations

_REL_SPLIT = re.compile(r"(<=|>=|=|≤|≥)")


@dataclass(frozen=True)
class Presentation:
    """An Abelian l-group given by generators and weak linear relations.

    The relations cut out the closed cone ``ambient`` of generator values; it
    must lie in the nonnegative orthant.
    """

    generators: tuple
    ambient: AmbientCone
    relations: tuple = field(default=(), compare=False)
    name: str = field(default="", compare=False)

    @classmethod
    def parse(cls, generators, relations: str = "", name: str = "") -> "Presentation":
        if isinstance(generators, str):
            generators = [g.strip() for g in generators.split(",") if g.strip()]
        gens = tuple(generators)
        if len(set(gens)) != len(gens):
            raise ValidationError("duplicate generator name")
        rels, cons = [], []
        for chain in [c for c in re.split(r"[;\n]", relations) if c.strip()]:
            parts = _REL_SPLIT.split(chain)
            terms = [parse_lterm(p) for p in parts[0::2]]
            ops = parts[1::2]
            if not ops:
                raise ParseError(f"relation without comparison: {chain.strip()!r}")
            for k, op in enumerate(ops):
                lhs, rhs = terms[k], terms[k + 1]
                fl, fr = linear_form(lhs, gens), linear_form(rhs, gens)
                diff = [r - l for l, r in zip(fl, fr)]
                text = f"{format_lterm(lhs)} {op} {format_lterm(rhs)}"
                if op in ("<=", "≤"):
                    c = constraint(diff, WEAK)
                elif op in (">=", "≥"):
                    c = constraint([-d for d in diff], WEAK)
                else:
                    c = constraint(diff, EQ)
                rels.append((text, c))
                cons.append(c)
        # x_i >= 0 is implicit in every ambient cone
        implicit = {constraint([1 if k == i else 0 for k in range(len(gens))], WEAK) for i in range(len(gens))}
        ambient = AmbientCone(
            len(gens), tuple(c for c in cons if any(c.form) and c not in implicit), name=name
        )
        pres = cls(gens, ambient, tuple(rels), name)
        pres._check_orthant()
        return pres

    @classmethod
    def free(cls, generators, name: str = "") -> "Presentation":
        """Generators subject only to ``0 <= g``."""
        gens = tuple(generators)
        return cls.parse(gens, "; ".join(f"0 <= {g}" for g in gens), name=name)

    def _check_orthant(self):
        # the relation cone must sit in (R+)^n: split x = p - m and look for x_i < 0
        n = len(self.generators)
        for i, g in enumerate(self.generators):
            weak, eq = [], []
            for _, c in self.relations:
                f = list(c.form) + [-v for v in c.form]
                (eq if c.op == EQ else weak).append(f)
            s = [0] * (2 * n)
            s[i], s[n + i] = -1, 1
            if lp.section_point(2 * n, strict=[s], weak=weak, eq=eq) is not None:
                raise ValidationError(f"relations do not force {g} >= 0")

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise UnboundVariableError(name) from None

    def check_point(self, point: Mapping[str, Fraction]):
        vec = []
        for g in self.generators:
            if g not in point:
                raise UnboundVariableError(g)
            vec.append(point[g])
        for text, c in self.relations:
            if not c.holds(vec):
                raise RelationViolation(text)

    def point(self, values: Sequence) -> dict:
        return {g: as_rat(v) for g, v in zip(self.generators, values)}

    def __str__(self):
        rel = "; ".join(text for text, _ in self.relations)
        return f"{self.name or 'G'}<{', '.join(self.generators)} | {rel}>"


# ------------------------------------------------------ piecewise linear


@dataclass(frozen=True)
class PLFun:
    """Linear pieces ``(constraints, form)`` covering the ambient cone."""

    presentation: Presentation
    pieces: tuple

    def __call__(self, values: Sequence) -> Fraction:
        vec = [as_rat(v) for v in values]
        amb = self.presentation.ambient
        for cons, form in self.pieces:
            if amb.contains(vec) and all(c.holds(vec) for c in cons):
                return sum(f * x for f, x in zip(form, vec))
        raise ValidationError("point outside the ambient cone")


def _combine(amb, c1, c2):
    if c1 <= c2:
        return c2
    if c2 <= c1:
        return c1
    cell = c1 | c2
    return cell if _has_nonzero(amb, cell) else None


def _pieces(t: LTerm, pres: Presentation) -> tuple:
    n = len(pres.generators)
    amb = pres.ambient
    if isinstance(t, Zero):
        return ((frozenset(), (Fraction(0),) * n),)
    if isinstance(t, Var):
        e = [Fraction(0)] * n
        e[pres.index(t.name)] = Fraction(1)
        return ((frozenset(), tuple(e)),)
    if isinstance(t, Neg):
        return tuple((c, tuple(-v for v in f)) for c, f in _pieces_cached(t.arg, pres))
    if isinstance(t, Scale):
        return tuple((c, tuple(t.q * v for v in f)) for c, f in _pieces_cached(t.arg, pres))
    left, right = _pieces_cached(t.left, pres), _pieces_cached(t.right, pres)
    out = []
    for c1, f1 in left:
        for c2, f2 in right:
            cell = _combine(amb, c1, c2)
            if cell is None:
                continue
            if isinstance(t, Add):
                out.append((cell, tuple(a + b for a, b in zip(f1, f2))))
                continue
            d = [a - b for a, b in zip(f1, f2)]
            if not any(d):
                out.append((cell, f1))
                continue
            hi, lo = (f1, f2) if isinstance(t, Join) else (f2, f1)
            ge = cell | {constraint(d, WEAK)}
            if _has_nonzero(amb, ge):
                out.append((ge, hi))
            lt = cell | {constraint([-v for v in d], STRICT)}
            if _has_nonzero(amb, lt):
                out.append((lt, lo))
    return tuple(out)


@lru_cache(maxsize=200_000)
def _pieces_cached(t: LTerm, pres: Presentation) -> tuple:
    return _pieces(t, pres)


def compile_pl(t: LTerm, pres: Presentation) -> PLFun:
    missing = variables(t) - set(pres.generators)
    if missing:
        raise UnboundVariableError(sorted(missing)[0])
    return PLFun(pres, _pieces_cached(t, pres))


@lru_cache(maxsize=200_000)
def _support(t: LTerm, pres: Presentation, mode: str) -> Region:
    pl = compile_pl(t, pres)
    sets = []
    for cons, f in pl.pieces:
        if not any(f):
            continue
        pos_c, neg_c = constraint(f, STRICT), constraint([-v for v in f], STRICT)
        sets.append((cons - {constraint(f, WEAK)}) | {pos_c})
        if mode == "nonzero":
            sets.append((cons - {constraint([-v for v in f], WEAK)}) | {neg_c})
    return Region.from_constraint_sets(pres.ambient, sets)


def compile_support(t: LTerm, pres: Presentation, mode: str = "nonzero") -> Region:
    """The region of the relation cone where ``t`` is nonzero (or positive)."""
    if mode not in ("nonzero", "positive"):
        raise ValidationError(f"unknown support mode {mode!r}")
    return _support(t, pres, mode)


def propto(s: LTerm, t: LTerm, pres: Presentation) -> bool:
    """``|s| <= n|t|`` for some n, decided as containment of supports."""
    return region_difference(compile_support(s, pres), compile_support(t, pres)) is None


def propto_witness(s: LTerm, t: LTerm, pres: Presentation):
    """A point of the relation cone where s is nonzero and t vanishes, or None."""
    return region_difference(compile_support(s, pres), compile_support(t, pres))


def asymp(s: LTerm, t: LTerm, pres: Presentation) -> bool:
    return propto(s, t, pres) and propto(t, s, pres)


def propto_bound(s: LTerm, t: LTerm, pres: Presentation, max_exp: int = 24) -> Optional[int]:
    """The least power of two n with ``|s| <= n|t|`` on the cone, or None up to 2**max_exp.

    This goes through the definition of the preorder directly (emptiness of the
    positivity region of ``|s| - n|t|``) rather than through supports.
    """
    for k in range(max_exp + 1):
        n = 2**k
        excess = Add(abs_(s), Neg(Scale(n, abs_(t))))
        if compile_support(excess, pres, "positive").is_zero:
            return n
    return None
