"""Recipes producing a map and basepoint whose alpha-limit set is a prescribed closed set.

Every recipe aims at the same shape: a map with f(A) = {a}, a in A, and
f(X \\ A) inside X \\ A. Preimages of a are then exactly A at every depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cylinder import EP, CylinderSet, CylinderSpace
from .maps import Constant, DistanceArc, Identity, MapSpec
from .spaces import F, Pt, Space, arc_join, as_cells, distance_array, is_clopen


class NoArcError(ValueError):
    pass


@dataclass
class Realization:
    kind: str
    map: object
    basepoint: object
    target: object
    verdicts: dict = field(default_factory=dict)

    def certificate(self) -> dict:
        m = self.map.to_dict() if hasattr(self.map, "to_dict") else str(self.map)
        b = self.basepoint
        return {"kind": self.kind, "map": m,
                "basepoint": [b.piece, str(b.t)] if isinstance(b, Pt) else str(b),
                "verdict": {k: bool(v) if isinstance(v, (bool, np.bool_)) else v for k, v in self.verdicts.items()}}


# ------------------------------------------------------------------ trivial

def _first_point(space: Space, cells) -> Pt:
    c = min(cells)
    p = space.pieces[int(space.cell_piece[c])]
    lo, _ = space.cell_bounds(c)
    return space.canon(Pt(p.name, lo))


def trivial_realization(space: Space, A) -> Realization | None:
    """Whole space, empty set, a single point, or a proper clopen set; otherwise None."""
    if isinstance(A, Pt):
        x0 = space.canon(A)
        return Realization("singleton", MapSpec(space, {p.name: Identity() for p in space.pieces}, "identity"),
                           x0, A)
    cells = as_cells(A)
    n = space.n_cells
    if len(cells) == n:
        a = _first_point(space, cells)
        return Realization("whole", _constant(space, a), a, A)
    if not cells:
        a = _first_point(space, range(n))
        b = next(q for q in space.cloud() if q != a)
        return Realization("empty", _constant(space, a), b, A)
    if len(cells) == 1:
        (c,) = cells
        p = space.pieces[int(space.cell_piece[c])]
        if p.kind == "point":
            x0 = Pt(p.name, p.lo)
            return Realization("singleton", MapSpec(space, {q.name: Identity() for q in space.pieces}, "identity"),
                               x0, A)
    if is_clopen(space, cells):
        e = _first_point(space, cells)
        inside = {space.pieces[int(space.cell_piece[c])].name for c in cells}
        beh = {p.name: (Constant(e) if p.name in inside else Identity()) for p in space.pieces}
        return Realization("clopen", MapSpec(space, beh, "clopen-collapse", fixed=(e,)), e, A)
    return None


def _constant(space: Space, a: Pt) -> MapSpec:
    return MapSpec(space, {p.name: Constant(a) for p in space.pieces}, "constant", fixed=(a,))


# ---------------------------------------------------------------------- arc

def _cell_ends(space: Space, c: int) -> tuple[Pt, Pt]:
    p = space.pieces[int(space.cell_piece[c])]
    lo, hi = space.cell_bounds(c)
    return Pt(p.name, lo), Pt(p.name, hi)


def _shared_end(space: Space, c: int, d: int) -> tuple[Pt, Pt]:
    """Common boundary point of adjacent cells, as an end of c and of d."""
    for u in _cell_ends(space, c):
        for v in _cell_ends(space, d):
            if space.canon(u) == space.canon(v):
                return u, v
    raise ValueError(f"cells {c} and {d} share no boundary point")


def _phi(d):
    return d / (d + 1)


def arc_realization(space: Space, A) -> Realization:
    """f(x) = gamma(d(x,A) / (d(x,A) + 1)) along a short arc leaving A.

    The arc starts at a boundary point a of A and runs through the adjacent
    outside cell c1 into a second outside cell c2; cells of the complement
    that do not touch A are sent into the interior of c2.
    """
    cells = as_cells(A)
    path = arc_join(space, cells)
    if path is None:
        raise NoArcError("no arc joins A to its complement")
    near = _fatten1(space, cells)
    h = space.h
    best = None
    for c_in in sorted(cells):
        for c1 in sorted(space.adjacency[c_in]):
            if c1 in cells:
                continue
            for c2 in sorted(space.adjacency[c1]):
                if c2 not in near and c2 != c1:
                    best = (c_in, c1, c2)
                    break
            if best:
                break
        if best:
            break
    far = sorted(set(range(space.n_cells)) - near)
    if far:
        P = np.concatenate([_cell_samples(space, c) for c in far])
        summ = np.concatenate([np.full(len(_cell_samples(space, c)), space.pieces[int(space.cell_piece[c])].summand)
                               for c in far])
        # sampled minimum, shrunk to stay below the true one
        delta0 = Fraction(0.9 * float(distance_array(space, P, summ, cells).min())).limit_denominator(1 << 20)
    else:
        delta0 = h
    if best is None:
        c_in, c1 = path
        _, a = _shared_end(space, c_in, c1)
        lo, hi = _cell_ends(space, c1)
        mid = (lo.t + hi.t) / 2
        knots = ((F(0), a.piece, a.t), (F(1), a.piece, mid))
    else:
        c_in, c1, c2 = best
        _, a = _shared_end(space, c_in, c1)
        m1_in_c1, m1_in_c2 = _shared_end(space, c1, c2)
        lo2, hi2 = _cell_ends(space, c2)
        sign = 1 if m1_in_c2.t == lo2.t else -1
        m2 = m1_in_c2.t + sign * h / 4
        m3 = (lo2.t + hi2.t) / 2
        s2 = _phi(delta0)
        sigma = s2 / 2
        knots = ((F(0), a.piece, a.t), (sigma, m1_in_c1.piece, m1_in_c1.t),
                 (sigma, m1_in_c2.piece, m1_in_c2.t), (s2, c2_piece(space, c2), m2), (F(1), c2_piece(space, c2), m3))
    regions = tuple(_cell_region(space, c) for c in sorted(cells))
    arc = DistanceArc(regions, knots)
    a_pt = space.canon(a)
    fmap = MapSpec(space, {p.name: arc for p in space.pieces}, "arc", {"path": list(path)}, (a_pt,))
    return Realization("arc", fmap, a_pt, A)


def _cell_samples(space: Space, c: int) -> np.ndarray:
    p = space.pieces[int(space.cell_piece[c])]
    if p.kind == "sine":
        return p.xy_array(space.cell_params(c, 33))
    return space.cell_polyline(c)


def c2_piece(space: Space, c: int) -> str:
    return space.pieces[int(space.cell_piece[c])].name


def _cell_region(space: Space, c: int):
    from .spaces import Region

    lo, hi = space.cell_bounds(c)
    return Region(c2_piece(space, c), lo, hi)


def _fatten1(space: Space, cells) -> set:
    out = set(cells)
    for c in cells:
        out |= space.adjacency[c]
    return out


def verify_pointwise(space: Space, fmap: MapSpec, A, a: Pt) -> dict:
    """f(A) = {a}, a in A and f(X \\ A) inside X \\ A, on every cloud point."""
    cells = as_cells(A)
    ok_A = ok_out = True
    for q in space.cloud():
        inside = bool(set(space.cells_containing(q)) & cells)
        img = fmap.evaluate(q)
        if inside:
            ok_A &= img == a
        else:
            ok_out &= not (set(space.cells_containing(_snap(space, img))) & cells)
    return {"f(A)={a}": ok_A, "a in A": bool(set(space.cells_containing(a)) & cells),
            "f(X-A) in X-A": ok_out}


def _snap(space: Space, p: Pt) -> Pt:
    q = space.piece(p.piece)
    t = p.t if isinstance(p.t, Fraction) else Fraction(p.t)
    return Pt(p.piece, min(max(t, q.lo), q.hi))


# ------------------------------------------------------------ zero-dim

@dataclass
class ZeroDimRealization:
    space: CylinderSpace
    A: CylinderSet
    a: EP
    i0: int
    D: int
    extra: frozenset  # words of length D placed in B_{i0}
    others: tuple  # points of A other than a
    verdicts: dict = field(default_factory=dict)

    kind = "zero-dim"

    def b(self, i: int) -> EP:
        return self.a.flip(i)

    def block_words(self, i: int) -> list[str]:
        """Cylinders making up B_i = U_i plus V_i."""
        if i < self.i0:
            return []
        words = [self.a.head(i) + ("1" if self.a.bit(i) == "0" else "0")]
        if i == self.i0:
            words += sorted(self.extra)
        if i >= self.D:
            for p in self.others:
                words.append(p.head(i) + ("1" if p.bit(i) == "0" else "0"))
        return words

    def block_of(self, x: EP) -> int | None:
        """Index i with x in B_i, or None for x in A."""
        if x in self.A:
            return None
        i = x.first_diff(self.a)
        if i is not None and i >= self.i0:
            return i
        for p in self.others:
            j = x.first_diff(p)
            if j is not None and j >= self.D:
                return j
        if x.head(self.D) in self.extra:
            return self.i0
        raise AssertionError(f"{x} lies in no block")

    def evaluate(self, x: EP) -> EP:
        i = self.block_of(x)
        return self.a if i is None else self.b(i)

    def to_dict(self) -> dict:
        return {"a": str(self.a), "i0": self.i0, "D": self.D, "extra": sorted(self.extra),
                "others": [str(p) for p in self.others]}

    @property
    def map(self):
        return self

    @property
    def basepoint(self):
        return self.a

    def certificate(self) -> dict:
        return {"kind": self.kind, "map": self.to_dict(), "basepoint": str(self.a),
                "verdict": dict(self.verdicts)}


def zero_dim_realization(space: CylinderSpace, A: CylinderSet) -> ZeroDimRealization:
    """Collapse A to a point a and each clopen block B_i to a point b_i -> a."""
    space.check(A)
    if A.is_empty() or A.is_full():
        raise ValueError("A must be nonempty and proper")
    if space.is_clopen(A):
        raise ValueError("A is clopen; use trivial_realization")
    n = max(p.horizon(q) for p in A.points for q in A.points) + 1
    a = min(A.points, key=lambda p: p.key(n))
    others = tuple(sorted((p for p in A.points if p != a), key=str))
    L = max((len(w) for w in A.words), default=0)
    i0 = max([L] + [a.first_diff(q) + 1 for q in others])
    D = max([i0, space.depth] + [p.first_diff(q) + 1 for p in others for q in others if p != q])
    extra = []
    from itertools import product

    ahead = a.head(i0)
    for bits in product("01", repeat=D):
        u = "".join(bits)
        if u[:i0] == ahead or A.contains_cylinder(u) or any(p.head(D) == u for p in others):
            continue
        extra.append(u)
    return ZeroDimRealization(space, A, a, i0, D, frozenset(extra), others)


def verify_zero_dim(r: ZeroDimRealization, max_len: int | None = None) -> dict:
    """Independent checks of the block decomposition and the preimage layers."""
    A = r.A
    space = r.space
    L = max_len or r.D
    samples = space.samples(A, L) + [r.a] + list(r.others) + [r.b(i) for i in range(r.i0, r.D + 4)]
    refs = [r.a, *r.others]
    horizon = max(r.D + 4, max((x.first_diff(p) or 0) for x in samples for p in refs) + 2)
    blocks = {i: r.block_words(i) for i in range(r.i0, horizon + 1)}
    by_len = {i: {} for i in blocks}
    for i, ws in blocks.items():
        for w in ws:
            by_len[i].setdefault(len(w), set()).add(w)
    exactly_one = True
    for x in samples:
        hits = int(x in A)
        for i, groups in by_len.items():
            hits += any(x.head(n) in ws for n, ws in groups.items())
        exactly_one &= hits == 1
    disjoint = True
    words_all = [(i, w) for i, ws in blocks.items() for w in ws]
    for i, w in words_all:
        if A.contains_cylinder(w) or any(v.startswith(w) for v in A.words) or any(p.head(len(w)) == w for p in A.points):
            disjoint = False
    # prefix-freeness across blocks: sort words, a prefix sorts right before its extensions
    ordered = sorted(words_all, key=lambda iw: iw[1])
    for (i, w), (j, v) in zip(ordered, ordered[1:]):
        if v.startswith(w):
            disjoint = False
    # symbolic layers: f^{-1}(a) = A, f^{-1}(b_i) = B_i, others empty
    b_in_A = any(r.b(i) in A for i in range(r.i0, horizon + 1))
    layers_equal_A = (r.a in A) and not b_in_A and r.evaluate(r.a) == r.a
    maps_ok = all((r.evaluate(x) == r.a) == (x in A) for x in samples)
    r.verdicts.update({"blocks partition samples": bool(exactly_one), "blocks clopen and disjoint": disjoint,
                       "f(A)={a}, f(B_i)={b_i}": maps_ok, "layers f^-k(a) = A": layers_equal_A,
                       "alpha(a) = A": layers_equal_A and maps_ok})
    return r.verdicts


# ------------------------------------------------------------- sampling

def random_closed_cells(space: Space, rng: np.random.Generator, max_runs: int = 4) -> frozenset:
    """Nonempty proper union of random runs of consecutive cells."""
    n = space.n_cells
    while True:
        cells = set()
        for _ in range(int(rng.integers(1, max_runs + 1))):
            start = int(rng.integers(0, n))
            length = int(rng.integers(1, max(2, n // 4)))
            cells.update(range(start, min(n, start + length)))
        if 0 < len(cells) < n:
            return frozenset(cells)


def random_cylinder_set(space: CylinderSpace, rng: np.random.Generator, max_points: int = 3) -> CylinderSet:
    """Random words plus eventually periodic points, not clopen and not full."""
    while True:
        words = []
        for _ in range(int(rng.integers(0, 3))):
            ln = int(rng.integers(2, space.depth + 1))
            words.append("".join(rng.choice(["0", "1"], ln)))
        pts = []
        for _ in range(int(rng.integers(1, max_points + 1))):
            pre = "".join(rng.choice(["0", "1"], int(rng.integers(0, space.depth))))
            per = "".join(rng.choice(["0", "1"], int(rng.integers(1, 4))))
            pts.append(EP.make(pre, per))
        A = CylinderSet.make(words, pts)
        if A.points and not A.is_full():
            return A
