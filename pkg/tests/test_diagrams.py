from fractions import Fraction

import pytest

from cevian.cones import AmbientCone, Region, region_equal
from cevian.diagrams import (
    A123,
    PRESENTATIONS,
    CevianFamilyCandidate,
    build_diagram_A,
    build_diagram_D,
    check_idc_collapse,
    eta,
    finite_restriction_D,
    lemma43_check,
    lemma43_refute_pipeline,
    lemma43_scan,
    scan_pool,
    term_pool,
    verify_diagram_A,
    verify_diagram_D,
    verify_eta,
)
from cevian.errors import ValidationError
from cevian.lterm import Var, compile_support, eval_lterm, parse_lterm, substitute
from cevian.posets import parse_index
from oracles import grid, region_member

F = Fraction
P = parse_index
O2 = AmbientCone.trivial(2)

UNIT_FAMILY = {"c12": "pos(a - b)", "c21": "pos(b - a)", "c23": "pos(b - c)", "c32": "pos(c - b)",
               "c13": "pos(a' - c)", "c31": "pos(c - a')"}


def family(**over):
    return CevianFamilyCandidate.parse({**UNIT_FAMILY, **over})


def test_homsets_of_A():
    A = build_diagram_A()
    assert [str(f) for f in A.homset(P("1"), P("13"))] == ["a -> a'"]
    assert [str(f) for f in A.homset(P("0"), P("12"))] == ["zero map"]
    (f,) = A.homset(P("2"), P("123"))
    via12 = A.compose(A.homset(P("12"), P("123"))[0], A.homset(P("2"), P("12"))[0])
    via23 = A.compose(A.homset(P("23"), P("123"))[0], A.homset(P("2"), P("23"))[0])
    assert f.mapping == via12.mapping == via23.mapping
    assert len(A.homset(P("1"), P("123"))) == 2
    assert not A.is_commutative and A.check_closure() == []


def test_verify_A():
    r = verify_diagram_A()
    assert r["ok"] and r["multi_arrow_homsets"] == ["1->123"]


def test_idc_collapse():
    r = check_idc_collapse()
    assert r["ok"] and r["zero"]
    (pair,) = r["pairs"]
    assert pair["asymp"] and pair["same_support"]
    # the supports of a and a' agree pointwise on the relation cone
    sa, sa2 = compile_support(Var("a"), A123), compile_support(Var("a'"), A123)
    for p in grid(4, 3):
        if A123.ambient.contains(p):
            assert region_member(sa, p) == region_member(sa2, p) == (p[0] != 0)


def test_diagram_D():
    D = build_diagram_D()
    assert D.is_commutative and D.check_closure() == []
    r = verify_diagram_D()
    assert r["ok"] and len(r["composites"]) == 18 and all(h["ok"] for h in r["homomorphisms"])


def test_eta_small_depth():
    r = verify_eta(1)
    assert r["ok"] and all(w["ok"] for w in r["worked"]) and r["eta12_injective"]["ok"]
    zero_squares = [s for s in r["squares"] if s["square"].startswith("0<")]
    assert zero_squares and all(s["ok"] for s in zero_squares)


def test_eta_worked_square_by_hand():
    A, D = build_diagram_A(), build_diagram_D()
    (alpha,) = A.homset(P("1"), P("13"))
    (delta,) = D.homset(P("1"), P("13"))
    x1 = Region.half_space(O2, (1, 0))
    assert region_equal(eta(P("13"), alpha(Var("a"))), x1)
    assert region_equal(delta(eta(P("1"), Var("a"))), x1)


def test_eta_123_is_support_after_substitution():
    t = parse_lterm("pos(a - 2*b) \\/ (c /\\ a')")
    r = eta(P("123"), t)
    for p in grid(3, 4):
        val = eval_lterm(t, {"a": p[0], "a'": p[0], "b": p[1], "c": p[2]})
        assert region_member(r, p) == (val != 0)
    sub = substitute(t, {"a": Var("x1"), "a'": Var("x1"), "b": Var("x2"), "c": Var("x3")})
    assert "x1" in str(sub)


def test_term_pool_distinct_supports():
    pool = term_pool(["a", "b"], 1)
    pres = PRESENTATIONS[P("12")]
    regions = [compile_support(t, pres) for t in pool[:30]]
    for i in range(len(regions)):
        for j in range(i):
            assert not region_equal(regions[i], regions[j])


def test_finite_restriction():
    elements, maps = finite_restriction_D()
    assert [len(elements[p]) for p in sorted(elements, key=lambda p: (len(p), sorted(p)))] == [1, 2, 2, 2, 5, 5, 5, 19]
    for (p, q), table in maps.items():
        assert table[0] == 0


# ---------------------------------------------------------------- Cevian families in A_123


def test_unit_family_fails_right_inclusion():
    v = lemma43_check(family())
    assert v.condition == "(iv) c13 <= c12 v c23"
    assert v.values["c13"] > 0 and v.values["c12"] == 0 and v.values["c23"] == 0
    # the hand-picked point (1,2,1,3/2) also refutes it
    pt = {"a": 1, "a'": 2, "b": 1, "c": F(3, 2)}
    c = family()
    assert eval_lterm(c[(1, 3)], pt, A123) > 0
    assert eval_lterm(c[(1, 2)], pt, A123) == 0 == eval_lterm(c[(2, 3)], pt, A123)


def test_zero_c12_fails_ii():
    v = lemma43_check(family(c12="0"))
    assert v.condition == "(ii) a1 <= a2 v c12"
    assert v.witness == (1, 1, 0, 0)


def test_join_family_fails_iii():
    v = lemma43_check(family(c12="a \\/ b", c21="a \\/ b"))
    assert v.condition == "(iii) c12 ^ c21 = 0"
    a, a2, b, c = v.witness
    assert a > 0 or b > 0
    # the point (1,1,1,0) lies in the meet as well
    assert eval_lterm(parse_lterm("a \\/ b"), {"a": 1, "b": 1}) > 0


def test_pipeline_unit_family():
    r = lemma43_refute_pipeline(family())
    assert r["route"] == "endgame" and r["lambda"] == "1" and r["mu"] == "1"
    assert r["f_point"] == ["1", "2", "1", "1"]
    assert list(r["f_values"].values()) == ["0", "1", "0"]
    assert r["own_values"] == {"c12": "0", "c23": "0", "c13": "1"}
    assert r["impossible"] == "(iv) c13 <= c12 v c23"


def test_pipeline_scaled_family():
    c = family(c12="pos(2*a - b)", c21="pos(b - 2*a)", c13="pos(2*a' - c)", c31="pos(c - 2*a')")
    r = lemma43_refute_pipeline(c)
    assert (r["lambda"], r["mu"]) == ("2", "1")
    assert r["f_point"] == ["1", "2", "2", "2"]
    assert r["f_values"]["(lam*mu*a' - c)+"] == "2"
    assert eval_lterm(c[(1, 3)], {"a": 1, "a'": 2, "b": 2, "c": 2}, A123) == 2


def test_pipeline_c3_route():
    c = family(c13="pos(a' - 3*c)", c31="pos(3*c - a')")
    r = lemma43_refute_pipeline(c)
    assert r["route"] == "C3-fails"
    w = [F(x) for x in r["witness"]]
    assert w[0] == w[1]


def test_pipeline_precondition():
    with pytest.raises(ValidationError):
        lemma43_refute_pipeline(family(c12="0"))


def test_candidate_validation():
    with pytest.raises(ValidationError):
        family(c12="pos(a - c)")
    with pytest.raises(ValidationError):
        family(c12="a - b")
    with pytest.raises(ValidationError):
        CevianFamilyCandidate.parse({"c12": "a"})


def test_scan_pool_size():
    assert len(scan_pool(["a", "b"], 0)) == 36
    assert len(scan_pool(["a", "b"], 1)) == 36 + 2 * 36 * 35 // 2


def test_scan_depth_zero():
    r = lemma43_scan(0)
    assert r["all_pass"] == 0
    assert sum(r["refuted_by"].values()) == r["passing_ii_iii"] > 0
    assert sum(r["failures"].values()) == r["candidates"]


def test_zero_family_fails_first_condition():
    v = lemma43_check(CevianFamilyCandidate.parse({k: "0" for k in UNIT_FAMILY}))
    assert v.condition == "(ii) a1 <= a2 v c12" and v.passed == []
