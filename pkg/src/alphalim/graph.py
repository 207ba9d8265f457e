"""Outer-approximation transition graphs on cells and their SCC structure."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .maps import MapSpec
from .spaces import Pt, Space


@dataclass(frozen=True, eq=False)
class CellGraph:
    """Directed graph on the cells of ``space``; ``succ[c]`` is a sorted tuple."""

    space: Space
    map_name: str
    rho: float
    k: int
    succ: tuple

    @cached_property
    def pred(self) -> tuple:
        pred = [[] for _ in self.succ]
        for c, ds in enumerate(self.succ):
            for d in ds:
                pred[d].append(c)
        return tuple(tuple(p) for p in pred)

    @property
    def n(self) -> int:
        return len(self.succ)

    @cached_property
    def scc(self) -> list[int]:
        return tarjan_scc(self.succ)

    @cached_property
    def cyclic(self) -> list[bool]:
        """Per-SCC flag: two or more cells, or a self-loop."""
        comp = self.scc
        size = np.bincount(comp, minlength=max(comp) + 1 if comp else 0)
        flag = [bool(s >= 2) for s in size]
        for c, ds in enumerate(self.succ):
            if c in ds:
                flag[comp[c]] = True
        return flag

    def condensation(self) -> dict[int, set]:
        comp = self.scc
        dag = {i: set() for i in range(len(self.cyclic))}
        for c, ds in enumerate(self.succ):
            for d in ds:
                if comp[c] != comp[d]:
                    dag[comp[c]].add(comp[d])
        return dag

    def restrict(self, cells) -> "CellGraph":
        """Subgraph on ``cells`` (edges leaving the set are dropped, indices kept)."""
        keep = frozenset(cells)
        succ = tuple(tuple(d for d in ds if d in keep) if c in keep else () for c, ds in enumerate(self.succ))
        return CellGraph(self.space, self.map_name + "|restricted", self.rho, self.k, succ)

    def edges_csv(self) -> str:
        buf = io.StringIO()
        buf.write("source,target\n")
        for c, ds in enumerate(self.succ):
            for d in ds:
                buf.write(f"{c},{d}\n")
        return buf.getvalue()


def tarjan_scc(succ) -> list[int]:
    """Iterative Tarjan; returns the component label of every vertex."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    label = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            ds = succ[v]
            if i < len(ds):
                work[-1] = (v, i + 1)
                w = ds[i]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    label[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return label


def admissible_rho(space: Space, fmap: MapSpec, k: int) -> float:
    """Smallest padding that covers every image between consecutive samples.

    Samples are h/(k-1) apart, so any parameter lies within h/(2(k-1)) of one;
    its image lies within L times that of the sampled image.
    """
    L = fmap.lipschitz()
    if math.isinf(L):
        return math.inf
    return L * float(space.h) / (2 * (k - 1))


def _cells_on_piece(space: Space, pi: int, lo: float, hi: float, out: set, seen: set) -> None:
    """Add cells of piece ``pi`` meeting the closed parameter window, walking past its ends."""
    if (pi, lo, hi) in seen:
        return
    seen.add((pi, lo, hi))
    p = space.pieces[pi]
    base = int(space.offsets[pi])
    if p.kind == "point":
        out.add(base)
        return
    plo, phi, h = float(p.lo), float(p.hi), float(space.h)
    count = int(space.counts[pi])
    j0 = max(math.ceil((lo - plo) / h) - 1, 0)
    j1 = min(math.floor((hi - plo) / h), count - 1)
    out.update(range(base + j0, base + j1 + 1))
    for node, excess in ((p.start, plo - lo), (p.end, hi - phi)):
        if excess < 0:
            continue
        for name, t in space.node_reps[node]:
            qi = space.index[name]
            if qi == pi and t == (p.lo if node == p.start else p.hi):
                continue
            q = space.pieces[qi]
            if q.kind == "point":
                out.add(int(space.offsets[qi]))
            elif t == q.lo:
                _cells_on_piece(space, qi, float(q.lo), float(q.lo) + excess, out, seen)
            else:
                _cells_on_piece(space, qi, float(q.hi) - excess, float(q.hi), out, seen)


def transition_graph(space: Space, fmap: MapSpec, k: int = 8, rho: float | None = None) -> CellGraph:
    """Outer approximation of ``fmap`` on the cells of ``space``.

    Each cell is sampled at ``k`` parameters; successors are the cells meeting
    the ``rho``-fattened parameter hull of the sampled images on each target
    piece. Padding below :func:`admissible_rho` is refused.
    """
    if k < 2:
        raise ValueError("samples_per_cell must be >= 2")
    bound = admissible_rho(space, fmap, k)
    if math.isinf(bound):
        raise ValueError("map has no finite parameter Lipschitz bound on some piece; graph would not cover")
    if rho is None:
        rho = bound
    if rho < bound * (1 - 1e-12):
        raise ValueError(f"padding {rho} below the admissible bound {bound}")
    succ = []
    for pi, p in enumerate(space.pieces):
        beh = fmap.behaviors[p.name]
        cells = space.cells_of_piece(p.name)
        if p.kind == "point":
            ts = np.zeros((1, 1))
        else:
            lo = np.array([float(space.cell_bounds(c)[0]) for c in cells])
            ts = lo[:, None] + np.linspace(0.0, float(space.h), k)[None, :]
        idx, tt = beh.apply_array(space, p, ts.ravel())
        idx = idx.reshape(ts.shape)
        tt = tt.reshape(ts.shape)
        for row in range(ts.shape[0]):
            out: set = set()
            seen: set = set()
            for qi in np.unique(idx[row]):
                vals = tt[row][idx[row] == qi]
                _cells_on_piece(space, int(qi), float(vals.min()) - rho, float(vals.max()) + rho, out, seen)
            succ.append(tuple(sorted(out)))
    return CellGraph(space, fmap.name, float(rho), k, tuple(succ))


def verify_covering(graph: CellGraph, fmap: MapSpec, samples_per_cell: int = 200, seed: int = 0) -> list[tuple]:
    """Fresh random samples whose image cell is missing from the successors."""
    space = graph.space
    rng = np.random.default_rng(seed)
    bad = []
    for pi, p in enumerate(space.pieces):
        beh = fmap.behaviors[p.name]
        for c in space.cells_of_piece(p.name):
            if p.kind == "point":
                ts = np.zeros(1)
            else:
                lo, hi = space.cell_bounds(c)
                ts = rng.uniform(float(lo), float(hi), samples_per_cell)
            idx, tt = beh.apply_array(space, p, ts)
            allowed = set(graph.succ[c])
            for qi, t in zip(idx, tt):
                q = space.pieces[int(qi)]
                t = min(max(t, float(q.lo)), float(q.hi))
                img = space.cells_containing(Pt(q.name, q.lo if q.kind == "point" else Fraction(t)))
                if not allowed & set(img):
                    bad.append((c, q.name, t))
    return bad

