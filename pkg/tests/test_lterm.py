import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cevian.cones import AmbientCone, Region, region_equal, region_lattice, region_subset
from cevian.diagrams import A123
from cevian.errors import ParseError, ValidationError
from cevian.lterm import (
    ZERO,
    Add,
    Join,
    Meet,
    Neg,
    Presentation,
    RelationViolation,
    Scale,
    UnboundVariableError,
    Var,
    abs_,
    asymp,
    compile_pl,
    compile_support,
    eval_lterm,
    format_lterm,
    linear_form,
    parse_lterm,
    pos,
    propto,
    propto_bound,
    propto_witness,
    substitute,
    variables,
)
from oracles import grid, region_member

F = Fraction
a, a2, b, c = Var("a"), Var("a'"), Var("b"), Var("c")
X2 = Presentation.free(["x1", "x2"])
AB = Presentation.free(["a", "b"])


def test_parse_examples():
    assert parse_lterm("pos(a - b)") == pos(a - b)
    assert parse_lterm("a + b /\\ c") == Add(a, Meet(b, c))
    assert parse_lterm("1/2*a") == Scale(F(1, 2), a)
    assert parse_lterm("a ∧ b ∨ c") == Join(Meet(a, b), c)
    assert parse_lterm("abs(a')") == abs_(a2)
    assert parse_lterm("0") == ZERO


def test_parse_errors_carry_columns():
    with pytest.raises(ParseError) as exc:
        parse_lterm("a + * b")
    assert exc.value.col == 5
    with pytest.raises(ParseError):
        parse_lterm("2a")
    with pytest.raises(ParseError):
        parse_lterm("(a + b")
    with pytest.raises(ValidationError):
        Scale(0, a)


def test_eval_examples():
    pt = {"a": 1, "a'": 2, "b": 1, "c": 1}
    lam = mu = 1
    assert eval_lterm(pos(Scale(lam * mu, a2) - c), pt, A123) == 1
    assert eval_lterm(pos(Scale(lam, a) - b), pt, A123) == 0
    zero = {"a": 0, "a'": 0, "b": 0, "c": 0}
    assert eval_lterm(parse_lterm("pos(a - 3*b) \\/ (c /\\ a')"), zero, A123) == 0


def test_eval_errors():
    with pytest.raises(UnboundVariableError):
        eval_lterm(a + b, {"a": 1})
    with pytest.raises(RelationViolation):
        eval_lterm(a, {"a": 1, "a'": 3, "b": 0, "c": 0}, A123)


def test_linear_form():
    assert linear_form(parse_lterm("2*a - b + 1/2*b"), ["a", "b"]) == (2, F(-1, 2))
    with pytest.raises(ValidationError):
        linear_form(a | b, ["a", "b"])


def test_substitute_and_variables():
    t = substitute(pos(a - b), {"a": Var("x1"), "b": Var("x2")})
    assert t == pos(Var("x1") - Var("x2"))
    assert variables(parse_lterm("a /\\ (b - c)")) == {"a", "b", "c"}


def test_presentation_cone():
    assert A123.ambient.contains((1, 2, 0, 0))
    assert not A123.ambient.contains((1, 3, 0, 0))
    with pytest.raises(ValidationError):
        Presentation.parse(["a", "b"], "a <= b")


def test_support_examples():
    O2 = AmbientCone.trivial(2)
    x1, x2 = Var("x1"), Var("x2")
    s = compile_support(x1 & x2, X2)
    both = region_lattice("meet", Region.half_space(O2, (1, 0)), Region.half_space(O2, (0, 1)))
    assert region_equal(s, both)
    for p in grid(2, 6):
        assert region_member(s, p) == (min(p) != 0)
    assert region_equal(compile_support(x1 | x2, X2), Region.unit(O2))
    assert region_equal(compile_support(pos(a - b), AB), Region.half_space(O2, (1, -1)))


def test_support_modes():
    t = Var("x1") - Var("x2")
    nz, ps = compile_support(t, X2), compile_support(t, X2, "positive")
    for p in grid(2, 5):
        v = p[0] - p[1]
        assert region_member(nz, p) == (v != 0)
        assert region_member(ps, p) == (v > 0)
    with pytest.raises(ValidationError):
        compile_support(t, X2, "negative")


def test_propto_examples():
    assert propto(a, a2, A123) and propto(a2, a, A123) and asymp(a, a2, A123)
    assert propto(ZERO, pos(b - c), A123)
    s = pos(Scale(2, a2) - c)
    assert not propto(s, ZERO, A123)
    w = propto_witness(s, ZERO, A123)
    pt = dict(zip(A123.generators, w))
    assert eval_lterm(s, pt, A123) > 0
    assert propto_bound(a2, a, A123) == 2
    assert propto_bound(a, b, A123) is None


# ---------------------------------------------------------------- properties

names2 = ["x1", "x2"]


def terms(names, max_leaves=6):
    leaf = st.sampled_from([Var(n) for n in names] + [ZERO])

    def extend(children):
        return st.one_of(
            st.builds(Add, children, children),
            st.builds(Neg, children),
            st.builds(Meet, children, children),
            st.builds(Join, children, children),
            st.builds(Scale, st.sampled_from([F(1, 2), F(2), F(3)]), children),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


small_points = st.lists(st.fractions(min_value=0, max_value=6, max_denominator=4), min_size=2, max_size=2)


@settings(max_examples=200, deadline=None)
@given(terms(names2))
def test_format_parse_roundtrip(t):
    assert parse_lterm(format_lterm(t)) == t


@settings(max_examples=200, deadline=None)
@given(terms(names2), st.lists(small_points, min_size=5, max_size=5))
def test_pieces_agree_with_ast(t, points):
    pl = compile_pl(t, X2)
    for p in points:
        assert pl(p) == eval_lterm(t, dict(zip(names2, p)))


@settings(max_examples=200, deadline=None)
@given(terms(names2), small_points, st.fractions(min_value=0, max_value=5, max_denominator=3))
def test_homogeneity(t, p, k):
    pt = dict(zip(names2, p))
    scaled = {n: k * v for n, v in pt.items()}
    assert eval_lterm(t, scaled) == k * eval_lterm(t, pt)


@settings(max_examples=150, deadline=None)
@given(terms(names2), terms(names2))
def test_support_laws(s, t):
    ps, pt = pos(s), pos(t)
    S, T = compile_support(ps, X2), compile_support(pt, X2)
    assert region_equal(compile_support(Meet(ps, pt), X2), region_lattice("meet", S, T))
    assert region_equal(compile_support(Join(ps, pt), X2), region_lattice("join", S, T))
    assert region_equal(compile_support(Add(ps, pt), X2), region_lattice("join", S, T))
    assert region_equal(compile_support(Neg(s), X2), compile_support(s, X2))
    assert region_equal(compile_support(Scale(3, s), X2), compile_support(s, X2))


@settings(max_examples=150, deadline=None)
@given(terms(names2))
def test_support_matches_pointwise(t):
    sup = compile_support(t, X2)
    for p in grid(2, 5):
        assert region_member(sup, p) == (eval_lterm(t, dict(zip(names2, p))) != 0)


@settings(max_examples=60, deadline=None)
@given(terms(names2, 4), terms(names2, 4))
def test_propto_agrees_with_scaling_bound(s, t):
    bound = propto_bound(s, t, X2, max_exp=12)
    if propto(s, t, X2):
        assert bound is not None
    else:
        assert bound is None
        w = propto_witness(s, t, X2)
        pt = dict(zip(names2, w))
        assert eval_lterm(s, pt) != 0 and eval_lterm(t, pt) == 0


@settings(max_examples=100, deadline=None)
@given(terms(["a", "a'"], 5))
def test_support_in_relation_cone(t):
    pres = Presentation.parse(["a", "a'"], "0 <= a <= a' <= 2*a")
    sup = compile_support(t, pres)
    for p in itertools.product(range(5), repeat=2):
        if not pres.ambient.contains(p) or not any(p):
            continue
        assert region_member(sup, p) == (eval_lterm(t, dict(zip(["a", "a'"], p))) != 0)


def nonneg_terms(names):
    leaf = st.sampled_from([Var(n) for n in names])
    return st.recursive(leaf, lambda ch: st.one_of(
        st.builds(Add, ch, ch), st.builds(Meet, ch, ch), st.builds(Join, ch, ch),
        st.builds(lambda x, y: pos(Add(x, Neg(y))), ch, ch)), max_leaves=4)


X3 = Presentation.free(["x1", "x2", "x3"])


@settings(max_examples=80, deadline=None)
@given(nonneg_terms(X3.generators), nonneg_terms(X3.generators), nonneg_terms(X3.generators))
def test_support_cevian_laws(s, t, u):
    def diff(x, y):
        return compile_support(pos(Add(x, Neg(y))), X3)

    S, T = compile_support(s, X3), compile_support(t, X3)
    assert region_subset(S, region_lattice("join", T, diff(s, t)))[0]
    assert region_lattice("meet", diff(s, t), diff(t, s)).is_zero
    assert region_subset(diff(s, u), region_lattice("join", diff(s, t), diff(t, u)))[0]
