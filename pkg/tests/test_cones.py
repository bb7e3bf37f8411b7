from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cevian.cones import (
    WEAK,
    AmbientCone,
    Cell,
    Region,
    cell_is_empty,
    cell_witness,
    constraint,
    format_region,
    ratioset_to_region,
    region_equal,
    region_lattice,
    region_subset,
    region_to_ratioset,
)
from cevian.diagrams import A123
from cevian.errors import ValidationError
from cevian.lp import fm_feasible
from cevian.ratcore import INF, RatioSet, parse_ratioset, ratio, ratioset_normalize
from oracles import fm_subset, grid, raw_intervals, random_region, region_member, to_intervals

F = Fraction
O2, O3 = AmbientCone.trivial(2), AmbientCone.trivial(3)


def half(amb, *coeffs):
    return Region.half_space(amb, coeffs)


def test_cell_nonempty_with_interior_witness():
    c = Cell(O2, frozenset([constraint([1, 0]), constraint([0, 1])]))
    assert not cell_is_empty(c)
    w = cell_witness(c)
    # the max-slack point of the simplex section is (1/2, 1/2); witnesses are scaled to integers
    assert w[0] == w[1] > 0


def test_cell_contradictory():
    c = Cell(AmbientCone.trivial(1), frozenset([constraint([1]), constraint([-1], WEAK)]))
    assert cell_is_empty(c)


def test_cell_empty_in_presentation_cone():
    K = A123.ambient
    c = Cell(K, frozenset([constraint([1, 0, 0, 0]), constraint([-2, 1, 0, 0])]))
    assert cell_is_empty(c)
    # independent check by elimination
    weak = [k.form for k in K.constraints]
    assert not fm_feasible(4, strict=[(1, 0, 0, 0), (-2, 1, 0, 0)], weak=weak)


def test_lattice_examples():
    m = region_lattice("meet", half(O2, 1, 0), half(O2, 0, 1))
    assert region_equal(m, Region.from_constraint_sets(O2, [{constraint([1, 0]), constraint([0, 1])}]))
    a = half(O2, 1, -1)
    assert region_equal(region_lattice("join", a, Region.zero(O2)), a)
    assert region_lattice("complement_in_unit", Region.unit(O2)).is_zero
    with pytest.raises(ValidationError):
        region_lattice("meet", a)


def test_subset_examples():
    m = region_lattice("meet", half(O3, 1, 0, 0), half(O3, 0, 1, 0))
    assert region_subset(m, half(O3, 1, 1, 0)) == (True, None)
    ok, w = region_subset(Region.unit(O2), half(O2, 1, 0))
    assert not ok and w[0] == 0 and w[1] > 0


def test_ceva_unit_triple_chain():
    u = parse_ratioset("{[0,1)}")
    c12, c23, c13 = (ratioset_to_region(u, i, j, 3) for i, j in ((1, 2), (2, 3), (1, 3)))
    assert region_subset(region_lattice("meet", c12, c23), c13)[0]
    # brute force over the integer grid
    for p in grid(3, 8):
        in12 = (p[0], p[1]) != (0, 0) and ratio(p[0], p[1]) < 1
        in23 = (p[1], p[2]) != (0, 0) and ratio(p[1], p[2]) < 1
        in13 = (p[0], p[2]) != (0, 0) and ratio(p[0], p[2]) < 1
        assert not (in12 and in23) or in13


def test_region_to_ratioset_examples():
    assert region_to_ratioset(half(O2, 1, -1)) == parse_ratioset("{[0,1)}")
    assert region_to_ratioset(Region.zero(O2)) == RatioSet.empty()
    assert region_to_ratioset(Region.unit(O2)) == RatioSet.full()


def test_ratioset_to_region_examples():
    r = ratioset_to_region(parse_ratioset("{[0,2)}"), 1, 2, 2)
    assert region_equal(r, half(O2, 2, -1))
    for p in grid(2, 12):
        assert region_member(r, p) == (ratio(*p) < 2)
    assert ratioset_to_region(RatioSet.empty(), 1, 3, 3).is_zero
    c13 = ratioset_to_region(parse_ratioset("{[0,1)}"), 1, 3, 3)
    assert region_equal(c13, half(O3, 1, 0, -1))


def test_format_region():
    assert format_region(half(O2, 2, -1)) == "[2*x1 - x2 > 0]"
    assert format_region(Region.zero(O2)) == "zero"


def test_region_rejects_cell_without_strict():
    with pytest.raises(ValidationError):
        Region(O2, (Cell(O2, frozenset([constraint([1, 0], WEAK)])),))


@st.composite
def region_pair(draw):
    n = draw(st.integers(2, 4))
    return draw(random_region(n)), draw(random_region(n))


@settings(max_examples=150, deadline=None)
@given(region_pair())
def test_lattice_ops_match_pointwise(pair):
    a, b = pair
    m, j, c = region_lattice("meet", a, b), region_lattice("join", a, b), region_lattice("complement_in_unit", a)
    n = a.ambient.dimension
    for p in grid(n, 3 if n < 4 else 2):
        x, y = region_member(a, p), region_member(b, p)
        assert region_member(m, p) == (x and y)
        assert region_member(j, p) == (x or y)
        assert region_member(c, p) == (not x)


@settings(max_examples=150, deadline=None)
@given(region_pair())
def test_subset_matches_oracles(pair):
    a, b = pair
    ok, w = region_subset(a, b)
    assert ok == fm_subset(a, b)
    if not ok:
        assert region_member(a, w) and not region_member(b, w)
    n = a.ambient.dimension
    if any(region_member(a, p) and not region_member(b, p) for p in grid(n, 3 if n < 4 else 2)):
        assert not ok


@settings(max_examples=200, deadline=None)
@given(raw_intervals())
def test_ratioset_region_roundtrip(raw):
    u = ratioset_normalize(to_intervals(raw))
    r = ratioset_to_region(u, 1, 2, 2)
    assert region_to_ratioset(r) == u
    for p in grid(2, 6):
        assert region_member(r, p) == (ratio(*p) in u)


@settings(max_examples=100, deadline=None)
@given(raw_intervals(), st.sampled_from([(1, 2), (2, 1), (1, 3), (3, 2)]))
def test_cylinder_membership(raw, ij):
    u = ratioset_normalize(to_intervals(raw))
    i, j = ij
    r = ratioset_to_region(u, i, j, 3)
    for p in grid(3, 3):
        xi, xj = p[i - 1], p[j - 1]
        expected = (xi, xj) != (0, 0) and ratio(xi, xj) in u
        assert region_member(r, p) == expected


def test_region_never_contains_origin():
    for r in (Region.unit(O3), half(O3, 1, -1, 0)):
        assert not r.contains((0, 0, 0))
    assert INF not in RatioSet.empty()
