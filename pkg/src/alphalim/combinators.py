"""Topological sums, finite products with the line walk, and one-set quotients."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

import numpy as np

from .spaces import F, Piece, Pt, Region, Space, _segment_distances, arc_join, as_cells


# ------------------------------------------------------------------- sums

def sum_spaces(spaces: list[Space]) -> Space:
    """Disjoint union; summand k is tagged ``k:`` and sits at distance 1 from the others."""
    if len(spaces) < 2:
        raise ValueError("a sum needs at least two spaces")
    h = spaces[0].h
    if any(s.h != h for s in spaces):
        raise ValueError("summands must share the mesh h")
    pieces, points, landmarks, acc = [], {}, {}, []
    for k, s in enumerate(spaces):
        tag = f"{k}:"

        def ren(r: Region, tag=tag) -> Region:
            return Region(tag + r.piece, r.lo, r.hi)

        for p in s.pieces:
            pieces.append(Piece(tag + p.name, p.kind, p.lo, p.hi, tag + p.start, tag + p.end, p.p0, p.p1,
                                p.base_lo, p.base_hi, p.n, p.affine, k))
        points.update({tag + n: Pt(tag + q.piece, q.t) for n, q in s.points.items()})
        landmarks.update({tag + n: tuple(ren(r) for r in rs) for n, rs in s.landmarks.items()})
        landmarks[f"{k}"] = tuple(Region(tag + p.name, p.lo, p.hi) for p in s.pieces)
        acc.extend((tuple(ren(r) for r in src), tuple(ren(r) for r in dst)) for src, dst in s.accumulations)
    desc = {"kind": "sum", "h": str(h), "summands": [s.description for s in spaces]}
    return Space("sum", tuple(pieces), h, points, landmarks, tuple(acc), desc,
                 tuple(s.kind for s in spaces), {"summands": len(spaces)})


# --------------------------------------------------------------- products

@dataclass(eq=False)
class ProductSpace:
    """Finite product; cells are tuples of factor cells, stored as flat indices."""

    factors: tuple
    budget: int = 200_000

    def __post_init__(self):
        if not 2 <= len(self.factors) <= 3:
            raise ValueError("products take 2 or 3 factors at desk scale")
        if self.n_cells > self.budget:
            raise ValueError(f"cell budget exceeded: {self.n_cells} > {self.budget}")

    kind = "product"

    @property
    def shape(self) -> tuple:
        return tuple(f.n_cells for f in self.factors)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def description(self) -> dict:
        return {"kind": "product", "factors": [f.description for f in self.factors]}

    def cell(self, flat: int) -> tuple:
        return tuple(int(v) for v in np.unravel_index(flat, self.shape))

    def flat(self, z) -> int:
        return int(np.ravel_multi_index(tuple(z), self.shape))

    def neighbors(self, flat: int) -> list[int]:
        z = self.cell(flat)
        out = []
        for lam, f in enumerate(self.factors):
            for d in f.adjacency[z[lam]]:
                w = list(z)
                w[lam] = d
                out.append(self.flat(w))
        return out

    def line(self, z, lam: int) -> list[int]:
        """Cells of L(z, lam): coordinate ``lam`` free, the others fixed."""
        z = list(self.cell(z) if isinstance(z, (int, np.integer)) else z)
        out = []
        for c in range(self.shape[lam]):
            z[lam] = c
            out.append(self.flat(z))
        return out

    def lines(self):
        for lam in range(len(self.factors)):
            others = [range(n) for i, n in enumerate(self.shape) if i != lam]
            for rest in iproduct(*others):
                z = list(rest)
                z.insert(lam, 0)
                yield tuple(z), lam

    @cached_property
    def components(self) -> list[int]:
        """Products of factor components (link components of the factors)."""
        comps = [f.components for f in self.factors]
        sizes = [max(c) + 1 for c in comps]
        return [int(np.ravel_multi_index(tuple(comps[i][z[i]] for i in range(len(z))), sizes))
                for z in (self.cell(f) for f in range(self.n_cells))]

    def n_components(self) -> int:
        return len(set(self.components))


def find_bichromatic_line(prod: ProductSpace, A) -> tuple[tuple, int]:
    """A cell z of A and a coordinate lam whose line L(z, lam) leaves A.

    Lines through a = min(A) are tried first; otherwise walk from a to some b
    outside A one coordinate at a time, touching only coordinates where they
    differ. z is then slid along its line next to the colour change when the
    factor has arcs.
    """
    cells = as_cells(A)
    if not cells or len(cells) == prod.n_cells:
        raise ValueError("A must be nonempty and proper")
    a = prod.cell(min(cells))
    found = None
    for lam in range(len(a)):
        if any(c not in cells for c in prod.line(a, lam)):
            found = (a, lam)
            break
    if found is None:
        b = prod.cell(min(set(range(prod.n_cells)) - cells))
        c = list(a)
        for lam in (i for i in range(len(a)) if a[i] != b[i]):
            nxt = list(c)
            nxt[lam] = b[lam]
            if prod.flat(nxt) not in cells:
                found = (tuple(c), lam)
                break
            c = nxt
        if found is None:
            raise AssertionError("walk ended inside A although b is outside")
    z, lam = found
    line = prod.line(z, lam)
    pair = arc_join(prod.factors[lam], frozenset(i for i, c in enumerate(line) if c in cells))
    if pair is not None:
        z = prod.cell(line[pair[0]])
    return tuple(z), lam


def brute_force_lines(prod: ProductSpace, A) -> list[tuple[tuple, int]]:
    """Every (z, lam) with z in A whose line leaves A."""
    cells = as_cells(A)
    out = []
    for z in sorted(cells):
        for lam in range(len(prod.factors)):
            if any(c not in cells for c in prod.line(z, lam)):
                out.append((prod.cell(z), lam))
    return out


def product_arc_join(prod: ProductSpace, A) -> list[int]:
    """Adjacent (inside, outside) product cells found on a bichromatic line."""
    cells = as_cells(A)
    z, lam = find_bichromatic_line(prod, cells)
    factor = prod.factors[lam]
    line = prod.line(z, lam)
    trace = frozenset(i for i, c in enumerate(line) if c in cells)
    pair = arc_join(factor, trace)
    if pair is None:
        raise ValueError("factor lacks an arc for this trace")
    return [line[pair[0]], line[pair[1]]]


# -------------------------------------------------------------- quotient

def quotient_collapse(space: Space, Q, new_name: str = "q") -> Space:
    """Identify the closed cell set Q to a single point piece ``new_name``."""
    qcells = as_cells(Q)
    if not qcells:
        raise ValueError("cannot collapse an empty set")
    if new_name in space.index:
        raise ValueError(f"piece name {new_name!r} already used")
    q_nodes = set()
    for node in space.node_reps:
        if set(space.node_cells(node)) & qcells:
            q_nodes.add(node)
    first = min(qcells)
    fp = space.pieces[int(space.cell_piece[first])]
    anchor = fp.xy(space.cell_bounds(first)[0]) if fp.kind != "sine" else tuple(
        F(v).limit_denominator(1 << 20) for v in fp.xy(float(space.cell_bounds(first)[0])))
    geometry = np.concatenate([space.cell_polyline(c) for c in sorted(qcells)])

    rename = lambda node: new_name if node in q_nodes else node  # noqa: E731
    pieces: list[Piece] = []
    splits: dict[str, list[Piece]] = {}
    for pi, p in enumerate(space.pieces):
        cells = list(space.cells_of_piece(p.name))
        keep = [c for c in cells if c not in qcells]
        if not keep:
            splits[p.name] = []
            continue
        if len(keep) == len(cells):
            np_ = Piece(p.name, p.kind, p.lo, p.hi, rename(p.start), rename(p.end), p.p0, p.p1,
                        p.base_lo, p.base_hi, p.n, p.affine, p.summand)
            pieces.append(np_)
            splits[p.name] = [np_]
            continue
        runs, run = [], [keep[0]]
        for c in keep[1:]:
            if c == run[-1] + 1:
                run.append(c)
            else:
                runs.append(run)
                run = [c]
        runs.append(run)
        subs = []
        for j, r in enumerate(runs):
            lo, hi = space.cell_bounds(r[0])[0], space.cell_bounds(r[-1])[1]
            start = rename(p.start) if lo == p.lo else new_name
            end = rename(p.end) if hi == p.hi else new_name
            sub = Piece(f"{p.name}[{j}]", p.kind, lo, hi, start, end, p.p0, p.p1, p.base_lo, p.base_hi,
                        p.n, p.affine, p.summand)
            subs.append(sub)
        pieces.extend(subs)
        splits[p.name] = subs
    pieces.append(Piece(new_name, "point", F(0), F(0), new_name, new_name, p0=anchor, summand=fp.summand))

    def retarget(r: Region) -> tuple:
        out = []
        for sub in splits[r.piece]:
            lo, hi = max(r.lo, sub.lo), min(r.hi, sub.hi)
            if lo < hi or (lo == hi and sub.kind == "point"):
                out.append(Region(sub.name, lo, hi))
        if any(c in qcells for c in space.cells_in_region(r)) or (
                space.piece(r.piece).kind == "point" and not splits[r.piece]):
            out.append(Region(new_name, F(0), F(0)))
        return tuple(out)

    def retarget_all(rs) -> tuple:
        out = []
        for r in rs:
            for x in retarget(r):
                if x not in out:
                    out.append(x)
        return tuple(out)

    landmarks = {n: retarget_all(rs) for n, rs in space.landmarks.items()}
    points = {}
    for n, p in space.points.items():
        if set(space.cells_containing(p)) <= qcells or space.node_of(p) in q_nodes:
            points[n] = Pt(new_name, F(0))
        else:
            sub = next(s for s in splits[p.piece] if s.lo <= p.t <= s.hi)
            points[n] = Pt(sub.name, p.t)
    points[new_name] = Pt(new_name, F(0))
    acc = []
    for src, dst in space.accumulations:
        s2, d2 = retarget_all(src), retarget_all(dst)
        if s2 and d2:
            acc.append((s2, d2))
    meta = dict(space.meta)
    meta["collapsed"] = new_name
    meta["limit_geometry"] = geometry
    desc = {"kind": "quotient", "base": space.description, "collapsed": new_name}
    return Space("quotient", tuple(pieces), space.h, points, landmarks, tuple(acc), desc, space.summands, meta)


def check_chain_of_sines(space: Space, limit: str | None = None) -> dict:
    """Structural checks: consecutive curves meet exactly at b_i, others are disjoint,
    each curve is a sine curve, and the curves accumulate on the limit point."""
    m = space.meta.get("curves")
    if not m:
        raise ValueError("space records no chain of curves")
    limit = limit or space.meta.get("collapsed") or space.meta.get("limit")
    res: dict = {}
    nodes = {}
    for i in range(1, m + 1):
        names = {r.piece for r in space.landmarks[f"Sbar{i}"]}
        ns = set()
        for n in names:
            p = space.piece(n)
            ns |= {p.start, p.end}
        nodes[i] = ns
        sines = [n for n in names if space.piece(n).kind == "sine"]
        segs = [n for n in names if space.piece(n).kind == "seg"]
        acc_ok = any(src and {r.piece for r in src} <= set(sines) and {r.piece for r in dst} == set(segs)
                     for src, dst in space.accumulations)
        res[f"curve {i} is a sine curve"] = bool(sines) and len(segs) == 1 and acc_ok
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            common = nodes[i] & nodes[j]
            if j == i + 1:
                b = space.node_of(space.points[f"b{i}"])
                res[f"S{i} meets S{j} at b{i} only"] = common == {b}
            elif common:
                res[f"S{i} and S{j} disjoint"] = False
    lim = space.piece(limit)
    res["limit is a point"] = lim.kind == "point"
    res["limit attached only by accumulation"] = all(limit not in (p.start, p.end) or p.name == limit
                                                    for p in space.pieces)
    res["tail accumulates on limit"] = any(any(r.piece == limit for r in dst) for _, dst in space.accumulations)
    geom = space.meta.get("limit_geometry")
    if geom is None:
        geom = np.array([[float(v) for v in lim.p0]])
    dists = []
    for i in range(1, m + 1):
        pts = np.concatenate([space.cell_polyline(c) for c in space.landmark(f"Sbar{i}").cells])
        dists.append(float(_segment_distances(pts, [geom]).max()))
    res["curves converge to limit"] = all(b < a for a, b in zip(dists, dists[1:]))
    res["distances"] = dists
    return res


def enough_arcs_dichotomy(space: Space, A) -> str:
    """'arc' when some boundary pair joins A to its complement, 'clopen' otherwise."""
    return "arc" if arc_join(space, A) is not None else "clopen"


def product_from_names(names: list[str], h) -> ProductSpace:
    from .spaces import build_named_space

    return ProductSpace(tuple(build_named_space(n, h) for n in names))


def line_report(prod: ProductSpace, A) -> dict:
    z, lam = find_bichromatic_line(prod, A)
    cells = as_cells(A)
    line = prod.line(z, lam)
    return {"z": z, "lambda": lam, "z in A": prod.flat(z) in cells,
            "line leaves A": any(c not in cells for c in line), "line": line}



def piece_graph(space: Space):
    """Multigraph with nodes as vertices and arc pieces as edges, degree-2 vertices smoothed.

    Two spaces with isomorphic smoothed graphs (and no accumulation records)
    are homeomorphic finite graphs.
    """
    import networkx as nx

    g = nx.MultiGraph()
    for p in space.pieces:
        if p.kind == "point":
            g.add_node(p.name)
        else:
            g.add_edge(p.start, p.end)
    changed = True
    while changed:
        changed = False
        for v in list(g.nodes):
            nbrs = [u for _, u in g.edges(v)]
            if len(nbrs) == 2 and v not in nbrs:
                g.remove_node(v)
                g.add_edge(*nbrs)
                changed = True
                break
    return g
