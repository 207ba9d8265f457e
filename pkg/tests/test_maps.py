from fractions import Fraction as F
import json

import pytest
from hypothesis import given, settings, strategies as st

from alphalim.maps import Z_CASES, IntervalPL, build_named_map, evaluate, horseshoe3, map_from_dict
from alphalim.schema import dumps
from alphalim.spaces import Pt, build_named_space

GALLERY = [
    ("interval", {}, "horseshoe", {}),
    ("interval", {}, "identity", {}),
    ("sine", {}, "sine", {}),
    ("sine", {}, "constant", {"at": "a"}),
    ("extended_sine", {}, "extended_sine", {}),
    ("chain_of_sines", {}, "chain", {"n": 1}),
    ("chain_of_sines", {}, "chain", {"n": 3}),
    ("F4", {"n_max": 6, "m_max": 8}, "F4", {}),
] + [("Z", {}, "Z:" + c, {"n": 2}) for c in Z_CASES]


def _space(kind, params, h="1/32"):
    return build_named_space(kind, 1 if kind == "F4" else h, **params)


def test_horseshoe_values():
    f = horseshoe3()
    assert f(F(-1, 3)) == 1
    assert f(F(0)) == 0
    assert f(F(1)) == 1
    assert f(F(-1)) == -1 and f(F(1, 3)) == -1


def test_sine_map_fixes_a():
    s = build_named_space("sine", "1/32")
    g = build_named_map(s, "sine")
    assert g(s.points["a"]) == s.points["a"]
    assert g(s.points["b"]) == s.points["b"]


def test_sine_map_fixes_top_of_first_piece():
    s = build_named_space("sine", "1/32")
    p = Pt("P1", F(1))
    x, y = s.xy(p)
    assert x == pytest.approx(0.6366197723675814) and y == 1
    assert evaluate(build_named_map(s, "sine"), p) == p


def test_extended_sine_collapses_bc():
    x = build_named_space("extended_sine", "1/32")
    g = build_named_map(x, "extended_sine")
    piece = x.piece("[b,c]")
    for j in range(9):
        t = piece.lo + (piece.hi - piece.lo) * F(j, 8)
        assert g(Pt("[b,c]", t)) == x.points["b"]


def test_F4_diagonal_to_origin():
    f = build_named_space("F4", 1)
    m = build_named_map(f, "F4")
    assert m(f.points["<1/2,1/2>"]) == f.points["origin"]
    assert m(f.points["<1/2,0>"]) == f.points["<1/3,0>"]
    assert m(f.points["<2,0>"]) == f.points["<1,0>"]


def test_identity_and_constant():
    s = build_named_space("sine", "1/32")
    p = Pt("P3", F(1, 5))
    assert build_named_map(s, "identity")(p) == p
    assert build_named_map(s, "constant", at="a")(p) == s.points["a"]


@pytest.mark.parametrize("kind,sp,name,mp", GALLERY, ids=[g[2] + str(g[3].get("n", "")) for g in GALLERY])
def test_boundary_consistency_and_fixed_points(kind, sp, name, mp):
    m = build_named_map(_space(kind, sp), name, **mp)
    assert m.boundary_violations() == []
    assert m.fixed_violations() == []


@pytest.mark.parametrize("kind,sp,name,mp", GALLERY[:8])
def test_map_json_round_trip(kind, sp, name, mp):
    s = _space(kind, sp)
    m = build_named_map(s, name, **mp)
    back = map_from_dict(json.loads(dumps(m.to_dict())), s)
    for p in s.pieces:
        for t in (p.lo, (p.lo + p.hi) / 2, p.hi):
            assert back(Pt(p.name, t)) == m(Pt(p.name, t))


def test_incompatible_map_rejected():
    with pytest.raises(ValueError):
        build_named_map(build_named_space("interval", "1/8"), "sine")
    with pytest.raises(ValueError):
        build_named_map(build_named_space("sine", "1/8"), "horseshoe")
    with pytest.raises(ValueError):
        build_named_map(build_named_space("chain_of_sines", "1/8"), "chain", n=9)


def test_evaluate_rejects_foreign_points():
    s = build_named_space("interval", "1/8")
    m = build_named_map(s, "identity")
    with pytest.raises(ValueError):
        m(Pt("P1", F(0)))
    with pytest.raises(ValueError):
        m(Pt("I", F(2)))


@settings(max_examples=200, deadline=None)
@given(st.fractions(-1, 1), st.fractions(-1, 1))
def test_horseshoe_lipschitz_and_range(s, t):
    f = horseshoe3()
    assert -1 <= f(s) <= 1
    assert abs(f(s) - f(t)) <= F(f.lipschitz).limit_denominator(1000) * abs(s - t) + F(1, 10**9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.fractions(-1, 1), min_size=3, max_size=6, unique=True), st.fractions(-1, 1))
def test_interval_map_hits_knot_values(ys, t):
    xs = [F(-1) + F(2 * i, len(ys) - 1) for i in range(len(ys))]
    f = IntervalPL(list(zip(xs, ys)))
    for x, y in zip(xs, ys):
        assert f(x) == y
    assert min(ys) <= f(t) <= max(ys)
