"""Finite-resolution spaces: arcs, sine curves, chains of sine curves, point sets.

A space is a list of *pieces*. Every piece is an injective parametrization of
an arc (``seg`` or ``sine``) or a single point (``point``). Pieces meet only at
named *nodes*. Each arc piece is cut into closed cells of parameter length
``h``; a point piece is one singleton cell.

Points are ``Pt(piece, t)`` pairs. Parameters are exact ``Fraction`` values
whenever possible, so landmark points and fixed points compare exactly.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

F = Fraction


class Pt(NamedTuple):
    piece: str
    t: Fraction | float


@dataclass(frozen=True)
class Region:
    """Closed parameter interval ``[lo, hi]`` on one piece."""

    piece: str
    lo: Fraction
    hi: Fraction


@dataclass(frozen=True)
class Piece:
    name: str
    kind: str  # "seg" | "sine" | "point"
    lo: Fraction
    hi: Fraction
    start: str
    end: str
    p0: tuple = (F(0), F(0))
    p1: tuple = (F(0), F(0))
    base_lo: Fraction = F(-1)
    base_hi: Fraction = F(1)
    n: int = 0
    # diagonal affine image x -> sx*x + ox, y -> sy*y + oy (sine pieces)
    affine: tuple = (1, F(0), 1, F(0))
    summand: int = 0

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def xy(self, t):
        """Planar point at parameter ``t``; exact for seg/point pieces and rational ``t``."""
        if self.kind == "point":
            return self.p0
        if self.kind == "seg":
            s = (t - self.base_lo) / (self.base_hi - self.base_lo)
            return (self.p0[0] + s * (self.p1[0] - self.p0[0]),
                    self.p0[1] + s * (self.p1[1] - self.p0[1]))
        sx, ox, sy, oy = self.affine
        u = self.n * math.pi + (-1) ** self.n * math.asin(float(t))
        return (ox + sx / u, oy + sy * t)

    def xy_array(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "point":
            return np.tile(np.array([float(self.p0[0]), float(self.p0[1])]), (t.size, 1))
        if self.kind == "seg":
            s = (t - float(self.base_lo)) / float(self.base_hi - self.base_lo)
            p0 = np.array([float(c) for c in self.p0])
            p1 = np.array([float(c) for c in self.p1])
            return p0 + s[:, None] * (p1 - p0)
        sx, ox, sy, oy = (float(c) for c in self.affine)
        u = self.n * math.pi + (-1) ** self.n * np.arcsin(np.clip(t, -1.0, 1.0))
        return np.column_stack([ox + sx / u, oy + sy * t])

    @property
    def speed(self) -> float:
        """Bound on planar speed per unit parameter (infinite for sine pieces)."""
        if self.kind == "point":
            return 0.0
        if self.kind == "seg":
            dx = float(self.p1[0] - self.p0[0])
            dy = float(self.p1[1] - self.p0[1])
            return math.hypot(dx, dy) / float(self.base_hi - self.base_lo)
        return math.inf


@dataclass(frozen=True)
class ClosedSet:
    """A union of closed cells of one space, optionally carrying a landmark name."""

    cells: frozenset
    name: str | None = None

    def __len__(self):
        return len(self.cells)

    def __contains__(self, c):
        return c in self.cells


def as_cells(A) -> frozenset:
    if isinstance(A, ClosedSet):
        return A.cells
    return frozenset(A)


def parse_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(1 << 30)
    return Fraction(str(value))


@dataclass(eq=False)
class Space:
    kind: str
    pieces: tuple[Piece, ...]
    h: Fraction
    points: dict[str, Pt] = field(default_factory=dict)
    landmarks: dict[str, tuple[Region, ...]] = field(default_factory=dict)
    accumulations: tuple = ()
    description: dict = field(default_factory=dict)
    summands: tuple[str, ...] = ("0",)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"mesh must be positive, got {self.h}")
        for p in self.pieces:
            if p.kind != "point" and (p.length / self.h).denominator != 1:
                raise ValueError(f"piece {p.name} of length {p.length} is not a multiple of h={self.h}")
        names = [p.name for p in self.pieces]
        if len(set(names)) != len(names):
            raise ValueError("duplicate piece names")

    # ------------------------------------------------------------------ cells
    @cached_property
    def index(self) -> dict[str, int]:
        return {p.name: i for i, p in enumerate(self.pieces)}

    def piece(self, name: str) -> Piece:
        return self.pieces[self.index[name]]

    @cached_property
    def counts(self) -> np.ndarray:
        return np.array([1 if p.kind == "point" else int(p.length / self.h) for p in self.pieces])

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.counts)]).astype(int)

    @property
    def n_cells(self) -> int:
        return int(self.offsets[-1])

    @cached_property
    def cell_piece(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.pieces)), self.counts)

    def cell_bounds(self, c: int) -> tuple[Fraction, Fraction]:
        pi = int(self.cell_piece[c])
        p = self.pieces[pi]
        if p.kind == "point":
            return F(0), F(0)
        j = c - int(self.offsets[pi])
        return p.lo + j * self.h, p.lo + (j + 1) * self.h

    @cached_property
    def cell_lo(self) -> np.ndarray:
        return np.array([float(self.cell_bounds(c)[0]) for c in range(self.n_cells)])

    def cell_label(self, c: int) -> str:
        p = self.pieces[int(self.cell_piece[c])]
        lo, hi = self.cell_bounds(c)
        if p.kind == "point":
            return p.name
        return f"{p.name}[{lo},{hi}]"

    def cells_of_piece(self, name: str) -> range:
        i = self.index[name]
        return range(int(self.offsets[i]), int(self.offsets[i + 1]))

    def cells_in_region(self, r: Region) -> list[int]:
        p = self.piece(r.piece)
        if p.kind == "point":
            return [int(self.offsets[self.index[p.name]])]
        base = int(self.offsets[self.index[p.name]])
        j0 = math.ceil((r.lo - p.lo) / self.h)
        j1 = math.floor((r.hi - p.lo) / self.h)
        return [base + j for j in range(max(j0, 0), min(j1, int(self.counts[self.index[p.name]])))]

    def landmark(self, name: str) -> ClosedSet:
        if name not in self.landmarks:
            raise KeyError(f"no landmark {name!r} in {self.kind} space")
        cells = set()
        for r in self.landmarks[name]:
            cells.update(self.cells_in_region(r))
        return ClosedSet(frozenset(cells), name)

    def all_cells(self) -> ClosedSet:
        return ClosedSet(frozenset(range(self.n_cells)), "all")

    def complement(self, A) -> ClosedSet:
        """Cells not in ``A`` (its closure at resolution)."""
        return ClosedSet(frozenset(range(self.n_cells)) - as_cells(A))

    # ------------------------------------------------------------------ nodes
    @cached_property
    def node_reps(self) -> dict[str, list[tuple[str, Fraction]]]:
        reps: dict[str, list] = defaultdict(list)
        for p in self.pieces:
            if p.kind == "point":
                reps[p.name].insert(0, (p.name, F(0)))
                continue
            reps[p.start].append((p.name, p.lo))
            reps[p.end].append((p.name, p.hi))
        return dict(reps)

    def node_of(self, pt: Pt) -> str | None:
        p = self.piece(pt.piece)
        if p.kind == "point":
            return p.name
        if pt.t == p.lo:
            return p.start
        if pt.t == p.hi:
            return p.end
        return None

    def canon(self, pt: Pt) -> Pt:
        """Canonical representative: node points resolve to one fixed (piece, t)."""
        node = self.node_of(pt)
        if node is None:
            return pt
        name, t = self.node_reps[node][0]
        return Pt(name, t)

    def node_cells(self, node: str) -> list[int]:
        out = []
        for name, t in self.node_reps[node]:
            i = self.index[name]
            p = self.pieces[i]
            if p.kind == "point" or t == p.lo:
                out.append(int(self.offsets[i]))
            else:
                out.append(int(self.offsets[i + 1]) - 1)
        return sorted(set(out))

    def cells_containing(self, pt: Pt) -> list[int]:
        node = self.node_of(pt)
        if node is not None:
            return self.node_cells(node)
        i = self.index[pt.piece]
        p = self.pieces[i]
        if not p.lo <= pt.t <= p.hi:
            raise ValueError(f"{pt} outside piece range [{p.lo},{p.hi}]")
        q = (pt.t - p.lo) / self.h
        base = int(self.offsets[i])
        j = math.floor(q)
        if q == j:
            return [base + j - 1, base + j]
        return [base + j]

    def xy(self, pt: Pt):
        return self.piece(pt.piece).xy(pt.t)

    def summand_of(self, pt_or_piece) -> int:
        name = pt_or_piece.piece if isinstance(pt_or_piece, Pt) else pt_or_piece
        return self.piece(name).summand

    # -------------------------------------------------------------- adjacency
    @cached_property
    def adjacency(self) -> list[frozenset]:
        """Arc-adjacency: cells sharing a boundary point along a piece or at a node."""
        adj = [set() for _ in range(self.n_cells)]
        for i, p in enumerate(self.pieces):
            a, b = int(self.offsets[i]), int(self.offsets[i + 1])
            for c in range(a, b - 1):
                adj[c].add(c + 1)
                adj[c + 1].add(c)
        for node in self.node_reps:
            cs = self.node_cells(node)
            for c in cs:
                adj[c].update(d for d in cs if d != c)
        return [frozenset(s) for s in adj]

    @cached_property
    def accumulation_edges(self) -> list[tuple[int, int]]:
        edges = []
        for src, dst in self.accumulations:
            s_cells = [c for r in src for c in self.cells_in_region(r)]
            d_cells = [c for r in dst for c in self.cells_in_region(r)]
            if not s_cells or not d_cells:
                continue
            for k, c in enumerate(s_cells):
                edges.append((c, d_cells[k * len(d_cells) // len(s_cells)]))
        return edges

    @cached_property
    def links(self) -> list[frozenset]:
        """Arc-adjacency together with accumulation relations (undirected)."""
        adj = [set(s) for s in self.adjacency]
        for a, b in self.accumulation_edges:
            adj[a].add(b)
            adj[b].add(a)
        return [frozenset(s) for s in adj]

    @cached_property
    def components(self) -> list[int]:
        return _label_components(self.links)

    @cached_property
    def arc_components(self) -> list[int]:
        return _label_components(self.adjacency)

    # --------------------------------------------------------------- geometry
    def cell_params(self, c: int, k: int) -> np.ndarray:
        lo, hi = self.cell_bounds(c)
        return np.linspace(float(lo), float(hi), k)

    def cell_polyline(self, c: int) -> np.ndarray:
        p = self.pieces[int(self.cell_piece[c])]
        k = {"point": 1, "seg": 2}.get(p.kind, 9)
        return p.xy_array(self.cell_params(c, k))

    def cloud(self) -> list[Pt]:
        """Cell vertices and midpoints, canonicalized, in cell order."""
        seen, out = set(), []
        for c in range(self.n_cells):
            p = self.pieces[int(self.cell_piece[c])]
            lo, hi = self.cell_bounds(c)
            cand = [Pt(p.name, lo)] if p.kind == "point" else [
                Pt(p.name, lo), Pt(p.name, (lo + hi) / 2), Pt(p.name, hi)]
            for q in cand:
                q = self.canon(q)
                if q not in seen:
                    seen.add(q)
                    out.append(q)
        return out

    def refine(self, factor: int) -> "Space":
        if factor < 2:
            raise ValueError("refinement factor must be >= 2")
        desc = dict(self.description)
        desc["h"] = str(self.h / factor)
        return Space(self.kind, self.pieces, self.h / factor, dict(self.points),
                     dict(self.landmarks), self.accumulations, desc, self.summands, dict(self.meta))


def _label_components(adj: Sequence[Iterable[int]]) -> list[int]:
    label = [-1] * len(adj)
    k = 0
    for s in range(len(adj)):
        if label[s] >= 0:
            continue
        label[s] = k
        q = deque([s])
        while q:
            c = q.popleft()
            for d in adj[c]:
                if label[d] < 0:
                    label[d] = k
                    q.append(d)
        k += 1
    return label


# ====================================================================== queries

def is_clopen(space: Space, A) -> bool:
    """True iff ``A`` is a union of components (arc-adjacency plus accumulation)."""
    if not isinstance(space, Space):
        raise TypeError("is_clopen expects a cell-based Space")
    cells = as_cells(A)
    comp = space.components
    inside = {comp[c] for c in cells}
    return all((comp[c] in inside) == (c in cells) for c in range(space.n_cells))


def arc_join(space: Space, A) -> list[int] | None:
    """Shortest arc path from a cell of ``A`` to a cell outside ``A``.

    Any such path must cross an adjacent (in, out) pair, so the shortest paths
    are exactly those pairs; the lexicographically smallest one is returned.
    """
    cells = as_cells(A)
    if not cells or len(cells) == space.n_cells:
        raise ValueError("arc_join needs a nonempty proper subset")
    for c in sorted(cells):
        out = sorted(d for d in space.adjacency[c] if d not in cells)
        if out:
            return [c, out[0]]
    return None


def _segment_distances(P: np.ndarray, polylines: list[np.ndarray]) -> np.ndarray:
    """Distance from each row of ``P`` to the union of the polylines."""
    starts, ends = [], []
    for pl in polylines:
        if len(pl) == 1:
            starts.append(pl)
            ends.append(pl)
        else:
            starts.append(pl[:-1])
            ends.append(pl[1:])
    S = np.concatenate(starts)
    E = np.concatenate(ends)
    D = E - S
    L2 = np.einsum("ij,ij->i", D, D)
    best = np.full(len(P), np.inf)
    # blocks of at most 2**21 point-segment pairs keep temporaries small
    step = max(1, (1 << 21) // min(len(S), 2048))
    for lo in range(0, len(S), 2048):
        s, d, l2 = S[lo:lo + 2048], D[lo:lo + 2048], L2[lo:lo + 2048]
        for plo in range(0, len(P), step):
            W = P[plo:plo + step, None, :] - s[None, :, :]
            with np.errstate(invalid="ignore", divide="ignore"):
                u = np.where(l2 > 0, np.einsum("ijk,jk->ij", W, d) / np.where(l2 > 0, l2, 1), 0.0)
            u = np.clip(u, 0.0, 1.0)
            R = W - u[:, :, None] * d[None, :, :]
            near = np.sqrt(np.einsum("ijk,ijk->ij", R, R)).min(axis=1)
            best[plo:plo + step] = np.minimum(best[plo:plo + step], near)
    return best


def distance_array(space: Space, P: np.ndarray, summands: np.ndarray, A) -> np.ndarray:
    """Vectorized ``d(p, A)``; distinct summands sit at distance 1."""
    key = as_cells(A)
    if not key:
        raise ValueError("distance to an empty set")
    cache = space.__dict__.setdefault("_polyline_cache", {})
    if key not in cache:
        groups = defaultdict(list)
        for c in sorted(key):
            groups[space.pieces[int(space.cell_piece[c])].summand].append(space.cell_polyline(c))
        cache.clear()
        cache[key] = groups
    by_summand = cache[key]
    out = np.ones(len(P))
    for s, pls in by_summand.items():
        mask = summands == s
        if mask.any():
            out[mask] = _segment_distances(P[mask], pls)
    if len(by_summand) == 1:
        (only,) = by_summand
        out[summands != only] = 1.0
    return out


def distance_to_set(space: Space, p, A) -> float:
    """Distance from a point (``Pt``) or a cell (``int``) to a closed cell set.

    ``A`` may also be a ``Pt`` or a collection of them, measured exactly to those points.
    """
    if isinstance(A, Pt):
        A = [A]
    if not isinstance(A, ClosedSet) and A and all(isinstance(q, Pt) for q in A):
        P = np.array([[float(v) for v in space.xy(p)]]) if isinstance(p, Pt) else space.cell_polyline(p)
        s_p = space.summand_of(p) if isinstance(p, Pt) else space.pieces[int(space.cell_piece[p])].summand
        ds = [float(np.hypot(*(P - np.array([float(v) for v in space.xy(q)])).T).min())
              for q in A if space.summand_of(q) == s_p]
        # other summands sit at distance 1
        return min(ds) if ds else 1.0
    cells = as_cells(A)
    if not cells:
        raise ValueError("distance to an empty set")
    if isinstance(p, Pt):
        if set(space.cells_containing(p)) & cells:
            return 0.0
        P = np.array([[float(v) for v in space.xy(p)]])
        summ = np.array([space.summand_of(p)])
    else:
        if p in cells:
            return 0.0
        P = space.cell_polyline(p)
        summ = np.full(len(P), space.pieces[int(space.cell_piece[p])].summand)
    return float(distance_array(space, P, summ, cells).min())


# ===================================================================== builders

def _sine_pieces(k: int, prefix: str, affine: tuple, nodes: dict, summand: int = 0) -> list[Piece]:
    """Pieces P_1..P_k of the sine curve, each parametrized by the base height y."""
    out = []
    for j in range(1, k + 1):
        q_j, q_next = nodes["q"](j), nodes["q"](j + 1)
        # the node with height -1 sits at the parameter start
        start, end = (q_j, q_next) if j % 2 == 0 else (q_next, q_j)
        out.append(Piece(f"{prefix}P{j}", "sine", F(-1), F(1), start, end, n=j,
                         affine=affine, summand=summand))
    return out


def _affine_point(affine, x, y):
    sx, ox, sy, oy = affine
    return (ox + sx * x, oy + sy * y)


def _sine_core(k: int, prefix: str = "", affine=(1, F(0), 1, F(0)), names=None, summand=0):
    names = names or {}
    a, b = names.get("a", "a"), names.get("b", "b")
    q = names.get("q", lambda j: f"{prefix}q{j}")
    pieces = _sine_pieces(k, prefix, affine, {"q": q}, summand)
    pa = _affine_point(affine, F(0), F(1))
    pb = _affine_point(affine, F(0), F(-1))
    ab = names.get("ab", "[a,b]")
    pieces.append(Piece(ab, "seg", F(-1), F(1), b, a, p0=pb, p1=pa, summand=summand))
    return pieces


def _check(h, *counts):
    h = parse_fraction(h)
    if h <= 0:
        raise ValueError(f"mesh must be positive, got {h}")
    for c in counts:
        if int(c) < 1:
            raise ValueError(f"truncation counts must be >= 1, got {c}")
    return h


def _build_interval(h):
    h = _check(h)
    I = Piece("I", "seg", F(-1), F(1), "-1", "1", p0=(F(-1), F(0)), p1=(F(1), F(0)))
    return Space("interval", (I,), h, {"-1": Pt("I", F(-1)), "1": Pt("I", F(1))},
                 {"I": (Region("I", F(-1), F(1)),), "-1": (Region("I", F(-1), F(-1) + h),),
                  "1": (Region("I", F(1) - h, F(1)),)})


def _sine_landmarks(pieces, k):
    lm = {"[a,b]": (Region("[a,b]", F(-1), F(1)),),
          "S": tuple(Region(f"P{j}", F(-1), F(1)) for j in range(1, k + 1))}
    for j in range(1, k + 1):
        lm[f"P{j}"] = (Region(f"P{j}", F(-1), F(1)),)
    lm["Sbar"] = lm["S"] + lm["[a,b]"]
    return lm


def _sine_points(k):
    pts = {"a": Pt("[a,b]", F(1)), "b": Pt("[a,b]", F(-1))}
    for j in range(1, k + 1):
        # q_j: the end of P_j with height (-1)^(j+1)
        pts[f"q{j}"] = Pt(f"P{j}", F(1) if j % 2 else F(-1))
    pts[f"q{k + 1}"] = Pt(f"P{k}", F(-1) if k % 2 else F(1))
    return pts


def _build_sine(h, pieces=6):
    h = _check(h, pieces)
    ps = _sine_core(pieces)
    acc = (((Region(f"P{pieces}", F(-1), F(1)),), (Region("[a,b]", F(-1), F(1)),)),)
    return Space("sine", tuple(ps), h, _sine_points(pieces), _sine_landmarks(ps, pieces), acc)


def _extended_parts(pieces):
    ps = _sine_core(pieces)
    ps.append(Piece("[b,c]", "seg", F(-1), F(0), "c", "b", p0=(F(-1), F(-1)), p1=(F(0), F(-1)),
                    base_lo=F(-1), base_hi=F(0)))
    lm = _sine_landmarks(ps, pieces)
    lm["[b,c]"] = (Region("[b,c]", F(-1), F(0)),)
    lm["[a,c]"] = lm["[a,b]"] + lm["[b,c]"]
    lm["X"] = lm["Sbar"] + lm["[b,c]"]
    pts = _sine_points(pieces)
    pts["c"] = Pt("[b,c]", F(-1))
    acc = (((Region(f"P{pieces}", F(-1), F(1)),), (Region("[a,b]", F(-1), F(1)),)),)
    return ps, lm, pts, acc


def _build_extended(h, pieces=6):
    h = _check(h, pieces)
    ps, lm, pts, acc = _extended_parts(pieces)
    return Space("extended_sine", tuple(ps), h, pts, lm, acc)


def chain_affine(i: int) -> tuple:
    """Diagonal affine map placing the i-th sine curve of a chain (x scale is pi/2 / 2^i)."""
    return (-(math.pi / 2) / 2 ** i, F(-2) - F(1, 2 ** i), (-1) ** (i + 1), F(0))


def _chain_parts(curves: int, pieces: int, limit: str):
    """Curves S̄_1..S̄_m; ``limit`` is "point" (s_inf) or "segment" (S_inf)."""
    ps, lm, pts, acc = [], {}, {}, []
    for i in range(1, curves + 1):
        aff = chain_affine(i)

        def q(j, i=i):
            if j == 1 and i > 1:
                return f"b{i - 1}"
            return f"q{i}_{j}"

        ps_i = _sine_core(pieces, prefix=f"S{i}.", affine=aff,
                          names={"a": f"a{i}", "b": f"b{i}", "q": q, "ab": f"[a{i},b{i}]"})
        ps.extend(ps_i)
        s_regions = tuple(Region(f"S{i}.P{j}", F(-1), F(1)) for j in range(1, pieces + 1))
        arc = (Region(f"[a{i},b{i}]", F(-1), F(1)),)
        lm[f"S{i}"] = s_regions
        lm[f"[a{i},b{i}]"] = arc
        lm[f"Sbar{i}"] = s_regions + arc
        pts[f"a{i}"] = Pt(f"[a{i},b{i}]", F(1))
        pts[f"b{i}"] = Pt(f"[a{i},b{i}]", F(-1))
        acc.append(((Region(f"S{i}.P{pieces}", F(-1), F(1)),), arc))
    if limit == "point":
        ps.append(Piece("s_inf", "point", F(0), F(0), "s_inf", "s_inf", p0=(F(-2), F(0))))
        lim_name, lim_region = "s_inf", (Region("s_inf", F(0), F(0)),)
        pts["s_inf"] = Pt("s_inf", F(0))
    else:
        ps.append(Piece("S_inf", "seg", F(-1), F(1), "s_lo", "s_hi", p0=(F(-2), F(-1)), p1=(F(-2), F(1))))
        lim_name, lim_region = "S_inf", (Region("S_inf", F(-1), F(1)),)
        pts["w"] = Pt("S_inf", F(0))
        pts["s_lo"] = Pt("S_inf", F(-1))
        pts["s_hi"] = Pt("S_inf", F(1))
    lm[lim_name] = lim_region
    acc.append((lm[f"Sbar{curves}"], lim_region))
    for n in range(1, curves + 1):
        tail = tuple(r for i in range(n + 1, curves + 1) for r in lm[f"Sbar{i}"])
        lm[f"A{n}"] = lm[f"[a{n},b{n}]"] + tail + lim_region
    lm["W"] = tuple(r for i in range(1, curves + 1) for r in lm[f"Sbar{i}"]) + lim_region
    return ps, lm, pts, tuple(acc)


def _build_chain(h, curves=4, pieces=6):
    h = _check(h, curves, pieces)
    ps, lm, pts, acc = _chain_parts(curves, pieces, "point")
    lm["Y"] = lm.pop("W")
    # the limit point stands for the collapsed vertical segment x = -2
    return Space("chain_of_sines", tuple(ps), h, pts, lm, acc,
                 meta={"curves": curves, "pieces": pieces, "limit": "s_inf",
                       "limit_geometry": np.array([[-2.0, -1.0], [-2.0, 1.0]])})


def _build_W(h, curves=4, pieces=6):
    h = _check(h, curves, pieces)
    ps, lm, pts, acc = _chain_parts(curves, pieces, "segment")
    return Space("W", tuple(ps), h, pts, lm, acc,
                 meta={"curves": curves, "pieces": pieces, "limit": "S_inf"})


def _build_Z(h, curves=4, pieces=6):
    h = _check(h, curves, pieces)
    wps, wlm, wpts, wacc = _chain_parts(curves, pieces, "segment")
    xps, xlm, xpts, xacc = _extended_parts(pieces)
    lm = {**wlm, **xlm}
    return Space("Z", tuple(wps + xps), h, {**wpts, **xpts}, lm, wacc + xacc,
                 meta={"curves": curves, "pieces": pieces, "limit": "S_inf"})


def _ptname(x: Fraction, y: Fraction) -> str:
    return f"<{x},{y}>"


def _build_F4(h=F(1), n_max=10, m_max=60):
    """Truncated countable plane set {<0,0>} ∪ A ∪ B ∪ C."""
    h = _check(h, n_max, m_max)
    groups: dict[str, list] = {"origin": [(F(0), F(0))], "A": [], "B": [], "C": []}
    groups["A"] = [(F(1, n), F(0)) for n in range(1, n_max + 1)] + [(F(n), F(0)) for n in range(2, n_max + 1)]
    # B is closed under the map when n <= m <= m_max
    groups["B"] = [(F(1, n), F(1, m)) for m in range(1, m_max + 1) for n in range(1, m + 1)]
    groups["C"] = [(F(n), 1 + F(1, m)) for n in range(2, n_max + 1) for m in range(1, m_max + 1)]
    ps, pts, lm = [], {}, {}
    for g, coords in groups.items():
        regs = []
        for x, y in coords:
            nm = _ptname(x, y)
            ps.append(Piece(nm, "point", F(0), F(0), nm, nm, p0=(x, y)))
            pts[nm] = Pt(nm, F(0))
            regs.append(Region(nm, F(0), F(0)))
        lm[g] = tuple(regs)
    pts["origin"] = pts[_ptname(F(0), F(0))]
    # points whose preimages were cut off by the truncation
    edge = tuple(_ptname(F(n_max), 1 + F(1, m)) for m in range(1, m_max + 1))
    return Space("F4", tuple(ps), h, pts, lm, meta={"n_max": n_max, "m_max": m_max, "edge": edge})


def _build_finite(h=F(1), k=2):
    h = _check(h, k)
    ps = tuple(Piece(f"p{i}", "point", F(0), F(0), f"p{i}", f"p{i}", p0=(F(i), F(0))) for i in range(k))
    return Space("finite", ps, h, {p.name: Pt(p.name, F(0)) for p in ps},
                 {p.name: (Region(p.name, F(0), F(0)),) for p in ps})


def _build_point(h=F(1)):
    h = _check(h)
    p = Piece("p", "point", F(0), F(0), "p", "p")
    return Space("point", (p,), h, {"p": Pt("p", F(0))}, {"p": (Region("p", F(0), F(0)),)})


_BUILDERS = {
    "interval": (_build_interval, ()),
    "sine": (_build_sine, ("pieces",)),
    "extended_sine": (_build_extended, ("pieces",)),
    "chain_of_sines": (_build_chain, ("curves", "pieces")),
    "W": (_build_W, ("curves", "pieces")),
    "Z": (_build_Z, ("curves", "pieces")),
    "F4": (_build_F4, ("n_max", "m_max")),
    "finite": (_build_finite, ("k",)),
    "point": (_build_point, ()),
}

NAMED_SPACES = tuple(_BUILDERS) + ("cantor",)


def build_named_space(name: str, h=F(1, 8), **params):
    """Build one of the gallery spaces. ``cantor`` returns a :class:`CylinderSpace`."""
    if name == "cantor":
        from .cylinder import CylinderSpace

        return CylinderSpace(int(params.get("depth", params.get("N", 10))))
    if name not in _BUILDERS:
        raise ValueError(f"unknown space {name!r}; expected one of {NAMED_SPACES}")
    fn, keys = _BUILDERS[name]
    unknown = set(params) - set(keys)
    if unknown:
        raise ValueError(f"unexpected parameters for {name}: {sorted(unknown)}")
    space = fn(h, **{k: int(v) for k, v in params.items()})
    space.description = {"kind": name, "h": str(space.h), **{k: int(v) for k, v in params.items()}}
    return space
