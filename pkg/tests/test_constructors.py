from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphalim.alpha import alpha_enclosure, alpha_exact
from alphalim.constructors import (NoArcError, arc_realization, random_closed_cells, random_cylinder_set,
                                   trivial_realization, verify_pointwise, verify_zero_dim, zero_dim_realization)
from alphalim.cylinder import EP, CylinderSet, CylinderSpace
from alphalim.graph import transition_graph
from alphalim.spaces import Pt, build_named_space


# ---------------------------------------------------------------- trivial

def test_whole_space_constant():
    s = build_named_space("interval", "1/16")
    r = trivial_realization(s, range(s.n_cells))
    assert r.kind == "whole" and r.map.name == "constant"
    assert len(alpha_enclosure(transition_graph(s, r.map), r.basepoint).cells) == s.n_cells


def test_empty_set_constant_elsewhere():
    s = build_named_space("interval", "1/16")
    r = trivial_realization(s, [])
    assert r.kind == "empty" and r.map(r.basepoint) != r.basepoint
    assert alpha_exact(r.map, r.basepoint, K=4).points == ()


def test_singleton_identity():
    s = build_named_space("sine", "1/16", pieces=3)
    x0 = Pt("P2", F(1, 3))
    r = trivial_realization(s, x0)
    assert r.kind == "singleton" and r.basepoint == x0
    assert alpha_exact(r.map, x0, K=4, eps=1e-6).points == (x0,)


def test_clopen_summand_collapse():
    from alphalim.combinators import sum_spaces

    s = sum_spaces([build_named_space("interval", "1/8"), build_named_space("interval", "1/8")])
    A = [c for c in range(s.n_cells) if s.pieces[int(s.cell_piece[c])].summand == 1]
    r = trivial_realization(s, A)
    assert r.kind == "clopen"
    assert all(verify_pointwise(s, r.map, A, r.basepoint).values())


def test_nontrivial_set_is_not_trivial():
    s = build_named_space("interval", "1/16")
    assert trivial_realization(s, [0, 1, 2]) is None


# ---------------------------------------------------------------- arc

@pytest.fixture(scope="module")
def left_half():
    s = build_named_space("interval", "1/32")
    A = frozenset(c for c in range(s.n_cells) if s.cell_bounds(c)[1] <= 0)
    return s, A, arc_realization(s, A)


def test_arc_left_half_pointwise(left_half):
    s, A, r = left_half
    v = verify_pointwise(s, r.map, A, r.basepoint)
    assert v == {"f(A)={a}": True, "a in A": True, "f(X-A) in X-A": True}
    assert r.basepoint == Pt("I", F(0))


def test_arc_points_of_A_go_to_a(left_half):
    s, A, r = left_half
    for t in (F(-1), F(-1, 2), F(0)):
        assert r.map(Pt("I", t)) == r.basepoint
    arc = r.map.behaviors["I"]
    assert arc.gamma(F(0)) == r.basepoint


def test_arc_distance_one_goes_to_gamma_half(left_half):
    s, A, r = left_half
    arc = r.map.behaviors["I"]
    img = r.map(s.points["1"])
    mid = arc.gamma(F(1, 2))
    assert img.piece == mid.piece and float(img.t) == pytest.approx(float(mid.t), abs=1e-12)
    assert not set(s.cells_containing(img)) & A


def test_arc_missing_raises():
    s = build_named_space("sine", "1/16")
    with pytest.raises(NoArcError):
        arc_realization(s, s.landmark("[a,b]"))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_arc_realization_property(seed):
    s = build_named_space("interval", "1/32")
    A = random_closed_cells(s, np.random.default_rng(seed))
    if not A or len(A) == s.n_cells:
        return
    r = arc_realization(s, A)
    assert all(verify_pointwise(s, r.map, A, r.basepoint).values())
    v = alpha_enclosure(transition_graph(s, r.map), r.basepoint).compare(A)
    assert v["contains_target"] and v["within_1_cell_collar"]


# ---------------------------------------------------------------- zero-dim

def test_zero_dim_single_point():
    sp = CylinderSpace(10)
    z = EP.make("", "0")
    r = zero_dim_realization(sp, CylinderSet.make(points=[z]))
    assert r.a == z
    for i in range(r.i0, 8):
        assert r.b(i) == EP.make("0" * i + "1", "0")
        assert r.block_words(i)[0] == "0" * i + "1"
    assert all(verify_zero_dim(r).values())


def test_zero_dim_cylinder_plus_point():
    sp = CylinderSpace(10)
    p = EP.make("1", "0")
    r = zero_dim_realization(sp, CylinderSet.make(words=["0"], points=[p]))
    assert r.a == p
    for i in range(max(r.i0, 2), 8):
        assert r.block_words(i)[0] == "1" + "0" * (i - 1) + "1"
    assert all(verify_zero_dim(r).values())


def test_zero_dim_rejects_clopen():
    with pytest.raises(ValueError):
        zero_dim_realization(CylinderSpace(10), CylinderSet.make(words=["0"]))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_zero_dim_property(seed):
    sp = CylinderSpace(6)
    A = random_cylinder_set(sp, np.random.default_rng(seed))
    if sp.is_clopen(A) or A.is_empty() or A.is_full():
        return
    r = zero_dim_realization(sp, A)
    assert r.a in A
    assert all(verify_zero_dim(r).values())
    for x in sp.samples(A, r.D)[:200]:
        y = r.evaluate(x)
        assert (y == r.a) == (x in A)
        assert y == r.a or y not in A
