from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cevian.errors import ParseError, ValidationError
from cevian.ratcore import (
    INF,
    Interval,
    RatioSet,
    fmt_ext,
    parse_ext,
    parse_rat,
    parse_ratioset,
    ratio,
    ratioset_boolean,
    ratioset_is_initial,
    ratioset_normalize,
)
from oracles import PROBES, raw_intervals, raw_member, to_intervals

F = Fraction


def test_parse_rationals():
    assert parse_rat("3/6") == F(1, 2)
    assert parse_rat("-4") == -4
    assert parse_ext("inf") is INF
    assert fmt_ext(F(3, 2)) == "3/2" and fmt_ext(INF) == "inf"
    with pytest.raises(ParseError):
        parse_rat("1/0")


def test_infinity_order():
    assert F(10**9) < INF and not INF < F(0)
    assert sorted([INF, F(2), F(0)]) == [0, 2, INF]


def test_ratio():
    assert ratio(2, 3) == F(3, 2)
    assert ratio(0, 5) is INF
    with pytest.raises(ValidationError):
        ratio(0, 0)


def test_normalize_merges_overlap():
    u = ratioset_normalize(to_intervals([(F(0), F(1), True, False), (F(1, 2), F(2), False, False)]))
    assert u == parse_ratioset("{[0,2)}")
    for t in PROBES:
        assert (t in u) == (t is not INF and t < 2)


def test_normalize_trivial():
    assert ratioset_normalize([]) == RatioSet.empty()
    full = ratioset_normalize([Interval(F(0), INF, True, True)])
    assert full == RatioSet.full() and str(full) == "{[0,inf]}"


def test_normalize_rejects_reversed():
    with pytest.raises(ValidationError):
        Interval(F(3), F(2), False, False)
    with pytest.raises(ValidationError):
        parse_ratioset("{[0,1), (3,2)}")


def test_is_initial():
    assert ratioset_is_initial(parse_ratioset("{[0,3/2)}")) == F(3, 2)
    assert ratioset_is_initial(parse_ratioset("{[0,1), (2,3)}")) is None
    assert ratioset_is_initial(parse_ratioset("{[0,inf]}")) is None
    assert ratioset_is_initial(parse_ratioset("{[0,0]}")) is None


def test_boolean_examples():
    a, b = parse_ratioset("{[0,1)}"), parse_ratioset("{(1/2,inf]}")
    assert ratioset_boolean("intersect", a, b) == parse_ratioset("{(1/2,1)}")
    assert ratioset_boolean("union", a, RatioSet.empty()) == a
    assert ratioset_boolean("complement", RatioSet.full()) == RatioSet.empty()
    with pytest.raises(ValidationError):
        ratioset_boolean("complement", a, b)
    with pytest.raises(ValidationError):
        ratioset_boolean("union", a)


def test_admissibility_flag():
    assert parse_ratioset("{[0,1), (2,3), (5,inf]}").is_admissible
    assert not parse_ratioset("{[1,2]}").is_admissible
    assert not parse_ratioset("{[0,1)}").complement().is_admissible


def test_parse_error_column():
    with pytest.raises(ParseError) as exc:
        parse_ratioset("{[0,1}")
    assert exc.value.col == 2


def test_text_roundtrip():
    u = parse_ratioset("{[0,1/2), (2,3), (7,inf]}")
    assert parse_ratioset(str(u)) == u


@settings(max_examples=200, deadline=None)
@given(raw_intervals(), raw_intervals())
def test_boolean_matches_pointwise(ra, rb):
    u, v = ratioset_normalize(to_intervals(ra)), ratioset_normalize(to_intervals(rb))
    uni, inter, comp = u.union(v), u.intersect(v), u.complement()
    for t in PROBES[::7] + [F(1, 3), F(1, 2), F(3, 2), F(2), F(3), INF]:
        a, b = raw_member(ra, t), raw_member(rb, t)
        assert (t in u) == a
        assert (t in uni) == (a or b)
        assert (t in inter) == (a and b)
        assert (t in comp) == (not a)


@settings(max_examples=200, deadline=None)
@given(raw_intervals(), raw_intervals())
def test_de_morgan_and_idempotence(ra, rb):
    u, v = ratioset_normalize(to_intervals(ra)), ratioset_normalize(to_intervals(rb))
    assert u.union(v).complement() == u.complement().intersect(v.complement())
    assert u.intersect(v).complement() == u.complement().union(v.complement())
    assert ratioset_normalize(u.intervals) == u
    assert u.complement().complement() == u


@settings(max_examples=200, deadline=None)
@given(raw_intervals())
def test_canonical_form(ra):
    u = ratioset_normalize(to_intervals(ra))
    ivs = list(u.intervals)
    assert all(not iv.is_empty for iv in ivs)
    for a, b in zip(ivs, ivs[1:]):
        # strictly separated: no gap-free contact
        assert a.hi < b.lo or (a.hi == b.lo and not a.hi_closed and not b.lo_closed)


positive = st.fractions(min_value=0, max_value=50, max_denominator=20)


@given(positive, positive, positive)
def test_ratio_monotone(x, y, z):
    lo, hi = sorted([y, z])
    if (x, lo) != (0, 0):
        assert ratio(x, lo) <= ratio(x, hi)
    if lo > 0:
        assert ratio(hi, x) <= ratio(lo, x)
