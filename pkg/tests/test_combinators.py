from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphalim.combinators import (ProductSpace, brute_force_lines, check_chain_of_sines, enough_arcs_dichotomy,
                                  find_bichromatic_line, piece_graph, product_arc_join, quotient_collapse,
                                  sum_spaces)
from alphalim.spaces import build_named_space, is_clopen


def _summand_cells(s, k):
    return [c for c in range(s.n_cells) if s.pieces[int(s.cell_piece[c])].summand == k]


# ---------------------------------------------------------------- sums

def test_sum_of_extended_sine_and_chain_has_two_components():
    s = sum_spaces([build_named_space("extended_sine", "1/16"), build_named_space("chain_of_sines", "1/16")])
    assert len(set(s.components)) == 2
    assert len(s.landmark("0")) + len(s.landmark("1")) == s.n_cells


def test_sum_of_intervals_summands_clopen():
    s = sum_spaces([build_named_space("interval", "1/4"), build_named_space("interval", "1/4")])
    assert is_clopen(s, _summand_cells(s, 0)) and is_clopen(s, _summand_cells(s, 1))
    assert not is_clopen(s, _summand_cells(s, 0)[:3])


def test_sum_of_singletons_isolated():
    s = sum_spaces([build_named_space("point", 1) for _ in range(5)])
    assert s.n_cells == 5
    assert all(not s.adjacency[c] for c in range(5))
    assert len(set(s.components)) == 5


def test_sum_rejects_mixed_mesh():
    with pytest.raises(ValueError):
        sum_spaces([build_named_space("interval", "1/4"), build_named_space("interval", "1/8")])


def test_sum_dichotomy_exhaustive():
    s = sum_spaces([build_named_space("interval", "1/2"), build_named_space("interval", "1/2"),
                    build_named_space("point", "1/2")])
    n = s.n_cells
    summands = [frozenset(_summand_cells(s, k)) for k in range(3)]
    for r in range(1, n):
        for A in combinations(range(n), r):
            A = frozenset(A)
            union_of_summands = all(S <= A or not (S & A) for S in summands)
            assert (enough_arcs_dichotomy(s, A) == "clopen") == union_of_summands


# ---------------------------------------------------------------- products

def test_interval_square_grid():
    i = build_named_space("interval", "1/4")
    p = ProductSpace((i, i))
    assert p.n_cells == 64
    assert all(len(p.line(z, lam)) == 8 for z, lam in p.lines())


def test_two_point_square():
    two = build_named_space("finite", 1, k=2)
    assert ProductSpace((two, two)).n_cells == 4


def test_product_of_sums_has_four_components():
    X = sum_spaces([build_named_space("extended_sine", "1/8"), build_named_space("point", "1/8")])
    Y = sum_spaces([build_named_space("chain_of_sines", "1/8"), build_named_space("point", "1/8")])
    assert ProductSpace((X, Y)).n_components() == 4


def test_product_limits():
    i = build_named_space("interval", "1/4")
    with pytest.raises(ValueError):
        ProductSpace((i,))
    with pytest.raises(ValueError):
        ProductSpace((i, i, i), budget=100)


def test_line_corner_of_two_point_square():
    two = build_named_space("finite", 1, k=2)
    p = ProductSpace((two, two))
    z, lam = find_bichromatic_line(p, [p.flat((0, 0))])
    assert z == (0, 0) and lam == 0
    assert p.flat((1, 0)) in p.line(z, lam)


def test_line_left_half_plane():
    i = build_named_space("interval", "1/8")
    p = ProductSpace((i, i))
    A = frozenset(p.flat((x, y)) for x in range(8) for y in range(16))
    z, lam = find_bichromatic_line(p, A)
    assert z[0] == 7 and lam == 0
    assert (z, lam) in brute_force_lines(p, A)


def test_line_full_minus_hole():
    i = build_named_space("interval", "1/8")
    p = ProductSpace((i, i))
    hole = p.flat((5, 9))
    A = frozenset(range(p.n_cells)) - {hole}
    z, lam = find_bichromatic_line(p, A)
    assert hole in p.line(z, lam)
    assert hole in p.neighbors(p.flat(z))


def _random_set(n, rng):
    mask = rng.random(n) < rng.uniform(0.05, 0.95)
    cells = frozenset(np.flatnonzero(mask).tolist())
    return cells if cells and len(cells) < n else frozenset([0])


@pytest.mark.parametrize("factors", [("interval", "interval"), ("finite4", "finite4", "finite4")])
def test_line_walk_matches_brute_force(factors):
    spaces = tuple(build_named_space("finite", 1, k=4) if f == "finite4" else build_named_space(f, "1/8")
                   for f in factors)
    p = ProductSpace(spaces)
    rng = np.random.default_rng(11)
    for _ in range(100):
        A = _random_set(p.n_cells, rng)
        z, lam = find_bichromatic_line(p, A)
        assert p.flat(z) in A
        assert any(c not in A for c in p.line(z, lam))
        assert (z, lam) in brute_force_lines(p, A)


def test_product_arc_join_on_random_sets():
    i = build_named_space("interval", "1/8")
    p = ProductSpace((i, i))
    rng = np.random.default_rng(12)
    for _ in range(100):
        A = _random_set(p.n_cells, rng)
        c_in, c_out = product_arc_join(p, A)
        assert c_in in A and c_out not in A
        assert c_out in p.neighbors(c_in)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_line_output_verifies(data):
    three = build_named_space("finite", 1, k=3)
    p = ProductSpace((three, three, three))
    A = frozenset(data.draw(st.sets(st.integers(0, p.n_cells - 1), min_size=1, max_size=p.n_cells - 1)))
    z, lam = find_bichromatic_line(p, A)
    assert p.flat(z) in A and any(c not in A for c in p.line(z, lam))


# ---------------------------------------------------------------- quotient

def test_quotient_of_W_is_chain():
    W = build_named_space("W", "1/32")
    q = quotient_collapse(W, W.landmark("S_inf"), "s_inf")
    res = check_chain_of_sines(q)
    assert all(v for k, v in res.items() if k != "distances")


def test_single_cell_collapse_is_isomorphic():
    for kind in ("interval", "sine"):
        s = build_named_space(kind, "1/8")
        c = next(iter(s.cells_of_piece(s.pieces[0].name))) + 2
        q = quotient_collapse(s, [c], "m")
        assert nx.is_isomorphic(piece_graph(s), piece_graph(q))
        assert len(q.accumulations) == len(s.accumulations)


def test_collapse_bc_gives_sine_curve():
    x = build_named_space("extended_sine", "1/16")
    q = quotient_collapse(x, x.landmark("[b,c]"), "bq")
    s = build_named_space("sine", "1/16")
    for name in s.landmarks:
        assert len(q.landmark(name)) == len(s.landmark(name))
    assert q.canon(q.points["b"]) == q.canon(q.points["c"])
    assert nx.is_isomorphic(piece_graph(q), piece_graph(s))
    assert len(q.accumulations) == len(s.accumulations)


def test_chain_checker_accepts_built_chain_and_rejects_sine():
    ch = build_named_space("chain_of_sines", "1/32")
    assert all(v for k, v in check_chain_of_sines(ch).items() if k != "distances")
    with pytest.raises(ValueError):
        check_chain_of_sines(build_named_space("sine", "1/32"))
