"""Two alpha-limit engines: exact preimage layers and graph enclosures."""

from __future__ import annotations

import io
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .graph import CellGraph
from .maps import Conjugate, Constant, DistanceArc, Identity, MapSpec, Transport
from .spaces import ClosedSet, Pt, Space, as_cells, distance_array


class InexactMapError(ValueError):
    pass


class LayerCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PreimageLayers:
    basepoint: Pt
    K: int
    layers: tuple  # frozensets of Pt

    def tail(self, n: int) -> frozenset:
        out: set = set()
        for layer in self.layers[n:]:
            out |= layer
        return frozenset(out)


@dataclass
class AlphaReport:
    method: str
    space: Space
    basepoint: Pt
    params: dict
    cells: frozenset
    points: tuple | None = None
    verdicts: dict = field(default_factory=dict)

    @property
    def members(self) -> ClosedSet:
        return ClosedSet(self.cells, f"alpha({self.basepoint.piece}:{self.basepoint.t})")

    def compare(self, A, collar: int = 1) -> dict:
        """Record whether A is enclosed and whether the members stay in A's collar."""
        A = as_cells(A)
        fat = fatten(self.space, A, collar)
        self.verdicts["contains_target"] = A <= self.cells
        if self.points is None:
            self.verdicts[f"within_{collar}_cell_collar"] = self.cells <= fat
            return self.verdicts
        # an eps-ball is planar, so near accumulating branches it reaches far along arcs
        self.verdicts[f"cells_outside_{collar}_cell_collar"] = len(self.cells - fat)
        eps = self.params["eps"]
        far = [p for p in self.points if not set(self.space.cells_containing(p)) & A]
        if far and A:
            summ = np.array([self.space.summand_of(p) for p in far])
            d = distance_array(self.space, _xy(self.space, far), summ, A)
            self.verdicts["within_eps_of_target"] = bool(d.max() <= eps * (1 + 1e-9))
        else:
            self.verdicts["within_eps_of_target"] = not far
        return self.verdicts

    def text_block(self) -> str:
        lines = [f"method: {self.method}",
                 f"basepoint: {self.basepoint.piece} {self.basepoint.t}",
                 "params: " + ", ".join(f"{k}={v}" for k, v in sorted(self.params.items())),
                 f"member_cells: {len(self.cells)} of {self.space.n_cells}"]
        if self.points is not None:
            lines.append(f"member_points: {len(self.points)}")
        for k in sorted(self.verdicts):
            v = self.verdicts[k]
            lines.append(f"verdict.{k}: {'pass' if v is True else 'fail' if v is False else v}")
        lines.append("note: finite-resolution estimate; no exactness claim at this mesh")
        return "\n".join(lines) + "\n"

    def cells_csv(self) -> str:
        buf = io.StringIO()
        buf.write("cell,label\n")
        for c in sorted(self.cells):
            buf.write(f"{c},{self.space.cell_label(c)}\n")
        return buf.getvalue()


def fatten(space: Space, cells, r: int = 1) -> frozenset:
    """Cells within ``r`` arc-adjacency steps of ``cells``."""
    out = set(as_cells(cells))
    frontier = set(out)
    for _ in range(r):
        frontier = {d for c in frontier for d in space.adjacency[c]} - out
        out |= frontier
    return frozenset(out)


# ------------------------------------------------------------ exact engine

def _reps(space: Space, y: Pt) -> list[tuple[str, Fraction]]:
    node = space.node_of(y)
    if node is None:
        return [(y.piece, y.t)]
    return list(space.node_reps[node])


class _Inverter:
    """Preimages of single points, piece by piece."""

    def __init__(self, fmap: MapSpec, cloud: list[Pt]):
        self.fmap = fmap
        space = fmap.space
        self.space = space
        self.by_target = defaultdict(list)  # target piece -> (source piece, behavior)
        self.constant = defaultdict(list)  # canonical target -> source pieces
        self.cloud_by_piece = defaultdict(list)
        for q in cloud:
            for name, t in _reps(space, q):
                self.cloud_by_piece[name].append(q)
        self.arc_images = defaultdict(list)
        for p in space.pieces:
            b = fmap.behaviors[p.name]
            if isinstance(b, Identity):
                self.by_target[p.name].append((p, b))
            elif isinstance(b, (Conjugate,)):
                self.by_target[b.target or p.name].append((p, b))
            elif isinstance(b, Transport):
                self.by_target[b.target].append((p, b))
            elif isinstance(b, Constant):
                self.constant[space.canon(b.target)].append(p)
            elif isinstance(b, DistanceArc):
                # not invertible in closed form: invert over the point cloud
                for q in self.cloud_by_piece[p.name]:
                    if q.piece == p.name or space.node_of(q) is not None:
                        self.arc_images[fmap.evaluate(q)].append(q)
            else:
                raise InexactMapError(f"no inversion rule for {type(b).__name__}")

    def preimages(self, y: Pt) -> set[Pt]:
        space = self.space
        out: set[Pt] = set()
        for p in self.constant.get(y, ()):
            out.update(self.cloud_by_piece[p.name])
        out.update(self.arc_images.get(y, ()))
        for name, t in _reps(space, y):
            for p, b in self.by_target.get(name, ()):
                if isinstance(b, Identity):
                    xs = [t]
                elif isinstance(b, Conjugate):
                    xs = interval_preimages(b.pl, t)
                else:
                    xs = [(t - b.offset) / b.scale]
                for x in xs:
                    if p.lo <= x <= p.hi:
                        out.add(space.canon(Pt(p.name, x)))
        return out


def interval_preimages(pl, y) -> list:
    xs = []
    ks = pl.knots
    for (x0, y0), (x1, y1) in zip(ks, ks[1:]):
        if y0 == y1:
            if y == y0:
                raise InexactMapError("flat branch has a continuum of preimages")
            continue
        if min(y0, y1) <= y <= max(y0, y1):
            xs.append(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
    return sorted(set(xs))


def preimage_layers(fmap: MapSpec, x: Pt, K: int, cap: int = 300_000) -> PreimageLayers:
    """Layers f^{-k}(x), k = 0..K, by exact inversion of each behavior piece.

    Constant pieces contribute their whole point cloud; pieces without a
    closed-form inverse are inverted over the point cloud.
    """
    space = fmap.space
    x = space.canon(x)
    # layers are immutable, so repeated engine calls on one map share them
    cache = fmap.__dict__.setdefault("_layer_cache", {})
    if (x, K, cap) in cache:
        return cache[(x, K, cap)]
    inv = _Inverter(fmap, space.cloud())
    layers = [frozenset([x])]
    memo: dict = {}
    total = 1
    for _ in range(K):
        nxt: set = set()
        for y in layers[-1]:
            if y not in memo:
                memo[y] = inv.preimages(y)
            nxt |= memo[y]
        total += len(nxt)
        if total > cap:
            raise LayerCapExceeded(f"preimage layers exceed {cap} points")
        layers.append(frozenset(nxt))
    cache[(x, K, cap)] = PreimageLayers(x, K, tuple(layers))
    return cache[(x, K, cap)]


def _xy(space: Space, pts) -> np.ndarray:
    return np.array([[float(v) for v in space.xy(p)] for p in pts]).reshape(-1, 2)


def near_points(space: Space, candidates: list[Pt], targets, eps: float) -> list[Pt]:
    """Candidates within ``eps`` of some target (summands are 1 apart)."""
    by_summand = defaultdict(list)
    for q in targets:
        by_summand[space.summand_of(q)].append(q)
    trees = {s: cKDTree(_xy(space, qs)) for s, qs in by_summand.items()}
    out = []
    for s, tree in trees.items():
        cands = [c for c in candidates if space.summand_of(c) == s]
        if not cands:
            continue
        d, _ = tree.query(_xy(space, cands), k=1)
        out.extend(c for c, di in zip(cands, d) if di <= eps)
    return out


def alpha_exact(fmap: MapSpec, x: Pt, K: int = 12, eps: float | None = None, cap: int = 300_000) -> AlphaReport:
    """Cloud and tail points whose eps-ball meets every tail union of the layers, n <= K/2.

    Tails are nested, so only the tail from K//2 needs to be tested.
    """
    space = fmap.space
    eps = 2 * float(space.h) if eps is None else eps
    L = preimage_layers(fmap, x, K, cap)
    tail = L.tail(K // 2)
    pts: list[Pt] = []
    if tail:
        # tail points are members themselves; cloud points stand in for their neighbourhoods
        pts = near_points(space, list(set(space.cloud()) | tail), tail, eps)
    pts = sorted(set(pts), key=lambda p: (space.index[p.piece], p.t))
    cells = frozenset(c for p in pts for c in space.cells_containing(p))
    return AlphaReport("exact-truncated", space, L.basepoint,
                       {"K": K, "eps": eps, "h": str(space.h)}, cells, tuple(pts))


# ------------------------------------------------------------ graph engine

def _reverse_reach(graph: CellGraph, sources) -> set:
    seen = set(sources)
    q = deque(seen)
    pred = graph.pred
    while q:
        c = q.popleft()
        for d in pred[c]:
            if d not in seen:
                seen.add(d)
                q.append(d)
    return seen


def alpha_enclosure(graph: CellGraph, x: Pt) -> AlphaReport:
    """Cells with a path c -> s -> cell(x) through a cyclic SCC s.

    In a finite graph these are exactly the cells admitting arbitrarily long
    paths into cell(x).
    """
    space = graph.space
    x = space.canon(x)
    target = space.cells_containing(x)
    reach = _reverse_reach(graph, target)
    comp, cyc = graph.scc, graph.cyclic
    hubs = [c for c in reach if cyc[comp[c]]]
    cells = frozenset(_reverse_reach(graph, hubs)) if hubs else frozenset()
    return AlphaReport("graph-enclosure", space, x,
                       {"rho": graph.rho, "k": graph.k, "h": str(space.h)}, cells)


def exactness_test(graph: CellGraph, n_max: int = 20) -> bool:
    """True iff every cell's forward image fills all cells within n_max steps."""
    n = graph.n
    rows = [c for c, ds in enumerate(graph.succ) for _ in ds]
    cols = [d for ds in graph.succ for d in ds]
    A = sparse.csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(n, n))
    R = sparse.identity(n, dtype=np.int32, format="csr")
    done = np.zeros(n, dtype=bool)
    for _ in range(n_max + 1):
        done |= np.asarray(R.getnnz(axis=1) == n)
        if done.all():
            return True
        R = R @ A
        R.data[:] = 1
    return bool(done.all())


def closed_backward(graph: CellGraph, cells) -> list[tuple[int, int]]:
    """Edges c' -> c with c in ``cells`` and c' outside (should be none for enclosures)."""
    s = as_cells(cells)
    return [(d, c) for c in s for d in graph.pred[c] if d not in s]


def exact_in_enclosure(exact: AlphaReport, enclosure: AlphaReport) -> list[Pt]:
    """Exact members lying neither in an enclosure cell nor within eps of one."""
    space = exact.space
    E = enclosure.cells
    loose = [p for p in exact.points if not set(space.cells_containing(p)) & E]
    if not loose or not E:
        return loose
    anchors = [q for q in space.cloud() if set(space.cells_containing(q)) & E]
    near = set(near_points(space, loose, anchors, exact.params["eps"]))
    return [p for p in loose if p not in near]


def refinement_violations(coarse: AlphaReport, fine: AlphaReport) -> list[int]:
    """Fine enclosure cells whose parent lies outside the coarse one-cell fattening."""
    sc, sf = coarse.space, fine.space
    ratio = int(sc.h / sf.h)
    fat = fatten(sc, coarse.cells, 1)
    bad = []
    for c in fine.cells:
        pi = int(sf.cell_piece[c])
        parent = int(sc.offsets[pi]) + (c - int(sf.offsets[pi])) // ratio if sc.pieces[pi].kind != "point" \
            else int(sc.offsets[pi])
        if parent not in fat:
            bad.append(c)
    return bad


# ------------------------------------------------------------------ facts

@dataclass
class FactRow:
    basepoint: str
    fact: str
    verdict: str
    detail: str = ""


def _image_cells(fmap: MapSpec, cells) -> frozenset:
    space = fmap.space
    pts = [q for q in space.cloud() if set(space.cells_containing(q)) & cells]
    return frozenset(c for q in pts for c in space.cells_containing(fmap.evaluate(q)))


def check_facts(fmap: MapSpec, graph: CellGraph | None, basepoints, engine: str = "graph",
                K: int = 12, eps: float | None = None, n_max: int = 20) -> list[FactRow]:
    """Verdict table for the six basic facts on each basepoint."""
    space = fmap.space
    rows: list[FactRow] = []
    if engine == "graph" and graph is None:
        raise ValueError("graph engine needs a transition graph")
    surjective = None
    exact_map = None
    if graph is not None:
        surjective = all(graph.pred[c] for c in range(graph.n))
        exact_map = exactness_test(graph, n_max)
    for x in basepoints:
        x = space.canon(x)
        tag = f"{x.piece}:{x.t}"
        if engine == "exact":
            rep = alpha_exact(fmap, x, K, eps)
            pts = set(rep.points)
            rows.append(FactRow(tag, "F1", "pass", "finite member set is closed"))
            rows.append(FactRow(tag, "F2", "pass" if pts else "n/a", f"{len(pts)} members"))
            rows.append(FactRow(tag, "F3", "n/a", "exactness is tested on graphs"))
            img = {fmap.evaluate(p) for p in pts}
            outside = sorted(img - pts, key=str)
            edge = set(space.meta.get("edge", ()))
            missing = sorted((p for p in pts - img if p.piece not in edge), key=str)
            if outside:
                v = "violated"
            else:
                v = "strict inclusion" if missing else "equal"
            rows.append(FactRow(tag, "F4", v, "not in image: " + "; ".join(p.piece for p in missing[:6])))
            rows.append(FactRow(tag, "F5", "n/a", "surjectivity is tested on graphs"))
            interior = False
            rows.append(FactRow(tag, "F6", "n/a" if not interior else "pass", "point sets have empty interior"))
            continue
        rep = alpha_enclosure(graph, x)
        E = rep.cells
        rows.append(FactRow(tag, "F1", "pass" if not closed_backward(graph, E) else "fail",
                            "cell unions are closed; backward closure checked"))
        if surjective:
            rows.append(FactRow(tag, "F2", "pass" if E else "fail", f"{len(E)} cells"))
        else:
            rows.append(FactRow(tag, "F2", "n/a", "graph not onto all cells"))
        if exact_map:
            rows.append(FactRow(tag, "F3", "pass" if len(E) == space.n_cells else "fail", "exact map"))
        else:
            rows.append(FactRow(tag, "F3", "n/a", "exactness test negative"))
        img = _image_cells(fmap, E) if E else frozenset()
        fat_E = fatten(space, E, 1)
        if not img <= fat_E:
            v = "violated"
        else:
            v = "strict inclusion" if E - fatten(space, img, 1) else "equal"
        rows.append(FactRow(tag, "F4", v, "image compared up to a one-cell collar"))
        if surjective:
            rows.append(FactRow(tag, "F5", "pass" if v == "equal" else "fail", "onto map"))
        else:
            rows.append(FactRow(tag, "F5", "n/a", "graph not onto all cells"))
        interior = [c for c in E if space.adjacency[c] <= E and space.adjacency[c]]
        if interior:
            ok = bool(set(space.cells_containing(x)) & E)
            rows.append(FactRow(tag, "F6", "pass" if ok else "fail", f"{len(interior)} interior cells"))
        else:
            rows.append(FactRow(tag, "F6", "n/a", "empty interior"))
    return rows


def facts_text(rows: list[FactRow]) -> str:
    return "".join(f"{r.basepoint}\t{r.fact}\t{r.verdict}\t{r.detail}\n" for r in rows)


# ------------------------------------------------------------------ survey

@dataclass
class SurveyRow:
    name: str
    method: str
    realized: bool
    certificate: dict


def special_constructions(space: Space) -> dict:
    """Landmark expression -> (map name, params, basepoint) for the named map families."""
    from .maps import Z_CASES, z_target

    kind = space.kind
    if kind == "sine":
        return {"[a,b]": ("sine", {}, "b")}
    if kind == "extended_sine":
        return {"[a,c]": ("extended_sine", {}, "b"), "[a,b]": ("sine", {}, "b")}
    if kind in ("chain_of_sines", "W"):
        return {f"A{n}": ("chain", {"n": n}, f"b{n}") for n in range(1, space.meta["curves"] + 1)}
    if kind == "Z":
        out = {}
        for n in range(1, space.meta["curves"] + 1):
            for case in Z_CASES:
                if "A_n" in case or n == 2:
                    out.setdefault(z_target(case, n), ("Z:" + case, {"n": n}, None))
        return out
    return {}


def landmark_cells(space: Space, expr: str) -> frozenset:
    """Cells of a '+'-separated union of landmark names."""
    return frozenset().union(*(space.landmark(e).cells for e in expr.split("+")))


def _verify_graph(fmap: MapSpec, base: Pt, A) -> dict:
    from .graph import transition_graph

    g = transition_graph(fmap.space, fmap, 8)
    rep = alpha_enclosure(g, base)
    return {**rep.compare(A), "engine": "graph-enclosure"}


def _verify_exact(fmap: MapSpec, base: Pt, A, K: int = 6) -> dict:
    rep = alpha_exact(fmap, base, K, eps=float(fmap.space.h) / 2)
    return {**rep.compare(A), "engine": "exact-truncated"}


def af_survey(space: Space, family: dict) -> list[SurveyRow]:
    """Try trivial, then arc, then the registered special constructions on each closed set."""
    from .constructors import NoArcError, arc_realization, trivial_realization, verify_pointwise
    from .maps import build_named_map

    specials = special_constructions(space)
    rows = []
    for name, A in family.items():
        A = as_cells(A)
        r = trivial_realization(space, A)
        if r is not None and A and len(A) < space.n_cells:
            v = {**verify_pointwise(space, r.map, A, r.basepoint), **_verify_exact(r.map, r.basepoint, A)}
            r.verdicts = v
            rows.append(SurveyRow(name, "trivial:" + r.kind, verdicts_pass(v), r.certificate()))
            continue
        if r is not None:
            rows.append(SurveyRow(name, "trivial:" + r.kind, True, r.certificate()))
            continue
        try:
            r = arc_realization(space, A)
        except NoArcError:
            r = None
        if r is not None:
            v = verify_pointwise(space, r.map, A, r.basepoint)
            try:
                v.update(_verify_graph(r.map, r.basepoint, A))
            except ValueError:
                v.update(_verify_exact(r.map, r.basepoint, A))
            r.verdicts = v
            rows.append(SurveyRow(name, "arc", verdicts_pass(v), r.certificate()))
            continue
        match = next((expr for expr in specials if landmark_cells(space, expr) == A), None)
        if match is None:
            rows.append(SurveyRow(name, "none", False, {"reason": "no construction applies"}))
            continue
        mname, params, bname = specials[match]
        fmap = build_named_map(space, mname, **params)
        base = space.points[bname] if bname else fmap.fixed[0]
        v = _verify_graph(fmap, base, A)
        rows.append(SurveyRow(name, "special:" + mname, verdicts_pass(v),
                              {"map": mname, "params": params, "basepoint": [base.piece, str(base.t)],
                               "verdict": v}))
    return rows


def verdicts_pass(v: dict) -> bool:
    """True iff every boolean verdict holds; counts and labels are informational."""
    return all(x for x in v.values() if isinstance(x, (bool, np.bool_)))
