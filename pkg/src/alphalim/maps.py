"""Continuous self-maps described piece by piece, evaluated exactly on rationals."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .spaces import F, Pt, Region, Space, distance_array, parse_fraction


@dataclass(frozen=True)
class IntervalPL:
    """Continuous piecewise-linear map of [-1, 1] given by its breakpoints."""

    knots: tuple

    def __post_init__(self):
        xs = [x for x, _ in self.knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        if any(not -1 <= v <= 1 for kv in self.knots for v in kv):
            raise ValueError("domain and range must lie in [-1, 1]")

    def __call__(self, t):
        ks = self.knots
        if not ks[0][0] <= t <= ks[-1][0]:
            raise ValueError(f"{t} outside the domain")
        for (x0, y0), (x1, y1) in zip(ks, ks[1:]):
            if t <= x1:
                return y0 + (y1 - y0) * (t - x0) / (x1 - x0)
        raise AssertionError

    def apply_array(self, t: np.ndarray) -> np.ndarray:
        xs = np.array([float(x) for x, _ in self.knots])
        ys = np.array([float(y) for _, y in self.knots])
        return np.interp(t, xs, ys)

    @property
    def lipschitz(self) -> float:
        ks = self.knots
        return float(max(abs((y1 - y0) / (x1 - x0)) for (x0, y0), (x1, y1) in zip(ks, ks[1:])))


def horseshoe3() -> IntervalPL:
    """Three-branch map through (-1,-1), (-1/3,1), (1/3,-1), (1,1)."""
    return IntervalPL(((F(-1), F(-1)), (F(-1, 3), F(1)), (F(1, 3), F(-1)), (F(1), F(1))))


# ------------------------------------------------------------------ behaviors

@dataclass(frozen=True)
class Identity:
    def apply(self, space, piece, t):
        return Pt(piece.name, t)

    def apply_array(self, space, piece, t):
        return np.full(t.shape, space.index[piece.name]), t

    def lipschitz(self, space, piece):
        return 1.0

    def to_dict(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class Constant:
    """Collapse the piece onto one point."""

    target: Pt

    def apply(self, space, piece, t):
        return self.target

    def apply_array(self, space, piece, t):
        return np.full(t.shape, space.index[self.target.piece]), np.full(t.shape, float(self.target.t))

    def lipschitz(self, space, piece):
        return 0.0

    def to_dict(self):
        return {"kind": "constant", "target": [self.target.piece, str(self.target.t)]}


@dataclass(frozen=True)
class Conjugate:
    """Interval map acting on the parameter: t -> (target, pl(t)).

    Sine pieces are parametrized by height, so this is the conjugation of an
    interval map by the second-coordinate projection.
    """

    pl: IntervalPL
    target: str | None = None

    def apply(self, space, piece, t):
        return Pt(self.target or piece.name, self.pl(t))

    def apply_array(self, space, piece, t):
        return np.full(t.shape, space.index[self.target or piece.name]), self.pl.apply_array(t)

    def lipschitz(self, space, piece):
        return self.pl.lipschitz

    def to_dict(self):
        return {"kind": "conjugate", "knots": [[str(x), str(y)] for x, y in self.pl.knots],
                "target": self.target}


@dataclass(frozen=True)
class Transport:
    """Affine transport t -> (target, scale*t + offset); scale -1 is the orientation flip."""

    target: str
    scale: int = 1
    offset: Fraction = F(0)

    def apply(self, space, piece, t):
        return Pt(self.target, self.scale * t + self.offset)

    def apply_array(self, space, piece, t):
        return np.full(t.shape, space.index[self.target]), self.scale * t + float(self.offset)

    def lipschitz(self, space, piece):
        return float(abs(self.scale))

    def to_dict(self):
        return {"kind": "transport", "target": self.target, "scale": self.scale, "offset": str(self.offset)}


@dataclass(frozen=True)
class DistanceArc:
    """x -> gamma(d(x,A) / (d(x,A) + 1)) along a piecewise-linear arc gamma.

    ``knots`` lists (s, piece, t) with consecutive knots on a common piece;
    gamma(0) is the basepoint ``a`` in A.
    """

    A: tuple  # Regions
    knots: tuple  # (s, piece, t)

    def _cells(self, space):
        cache = space.__dict__.setdefault("_region_cache", {})
        if self.A not in cache:
            cells = set()
            for r in self.A:
                cells.update(space.cells_in_region(r))
            cache[self.A] = frozenset(cells)
        return cache[self.A]

    def _segments(self):
        ks = self.knots
        # equal consecutive s values only switch the piece representing a node
        return [(a, b) for a, b in zip(ks, ks[1:]) if b[0] > a[0]]

    def gamma(self, s) -> Pt:
        segs = self._segments()
        for (s0, p, t0), (s1, _, t1) in segs:
            if s <= s1:
                return Pt(p, t0 + (s - s0) * (t1 - t0) / (s1 - s0))
        (_, _, _), (_, p, t1) = segs[-1]
        return Pt(p, t1)

    @property
    def basepoint(self) -> Pt:
        return Pt(self.knots[0][1], self.knots[0][2])

    def apply(self, space, piece, t):
        pt = Pt(piece.name, t)
        cells = self._cells(space)
        if set(space.cells_containing(pt)) & cells:
            return self.basepoint
        P = np.array([[float(v) for v in space.xy(pt)]])
        d = float(distance_array(space, P, np.array([piece.summand]), cells)[0])
        return self.gamma(d / (d + 1))

    def apply_array(self, space, piece, t):
        cells = self._cells(space)
        d = distance_array(space, piece.xy_array(t), np.full(len(t), piece.summand), cells)
        s = d / (d + 1)
        segs = self._segments()
        ends = np.array([float(b[0]) for _, b in segs])
        k = np.minimum(np.searchsorted(ends, s), len(segs) - 1)
        s0 = np.array([float(a[0]) for a, _ in segs])[k]
        t0 = np.array([float(a[2]) for a, _ in segs])[k]
        t1 = np.array([float(b[2]) for _, b in segs])[k]
        u = np.clip((s - s0) / (ends[k] - s0), 0.0, 1.0)
        idx = np.array([space.index[a[1]] for a, _ in segs])[k]
        return idx, t0 + u * (t1 - t0)

    def lipschitz(self, space, piece):
        slope = max(abs(float(t1 - t0) / float(s1 - s0)) for (s0, _, t0), (s1, _, t1) in self._segments())
        # d(., A) is 1-Lipschitz in the plane and s = d/(d+1) is 1-Lipschitz in d
        return slope * piece.speed if piece.speed else 0.0

    def to_dict(self):
        return {"kind": "distance_arc", "A": [[r.piece, str(r.lo), str(r.hi)] for r in self.A],
                "knots": [[str(s), p, str(t)] for s, p, t in self.knots]}


def behavior_from_dict(d: dict):
    kind = d["kind"]
    if kind == "identity":
        return Identity()
    if kind == "constant":
        return Constant(Pt(d["target"][0], parse_fraction(d["target"][1])))
    if kind == "conjugate":
        return Conjugate(IntervalPL(tuple((parse_fraction(x), parse_fraction(y)) for x, y in d["knots"])),
                         d.get("target"))
    if kind == "transport":
        return Transport(d["target"], int(d.get("scale", 1)), parse_fraction(d.get("offset", "0")))
    if kind == "distance_arc":
        return DistanceArc(tuple(Region(p, parse_fraction(lo), parse_fraction(hi)) for p, lo, hi in d["A"]),
                           tuple((parse_fraction(s), p, parse_fraction(t)) for s, p, t in d["knots"]))
    raise ValueError(f"unknown behavior kind {kind!r}")


# -------------------------------------------------------------------- MapSpec

@dataclass(eq=False)
class MapSpec:
    space: Space
    behaviors: dict
    name: str = "custom"
    params: dict = field(default_factory=dict)
    fixed: tuple = ()

    def __post_init__(self):
        missing = [p.name for p in self.space.pieces if p.name not in self.behaviors]
        if missing:
            raise ValueError(f"behavior pieces do not cover the space: {missing[:5]}")

    def evaluate(self, pt: Pt) -> Pt:
        if pt.piece not in self.space.index:
            raise ValueError(f"point {pt} is not in the space")
        piece = self.space.piece(pt.piece)
        if not piece.lo <= pt.t <= piece.hi:
            raise ValueError(f"point {pt} outside piece {piece.name}")
        return self.space.canon(self.behaviors[pt.piece].apply(self.space, piece, pt.t))

    __call__ = evaluate

    @property
    def exact(self) -> bool:
        return not any(isinstance(b, DistanceArc) for b in self.behaviors.values())

    def lipschitz(self) -> float:
        return max(self.behaviors[p.name].lipschitz(self.space, p) for p in self.space.pieces)

    def boundary_violations(self) -> list[tuple[str, list]]:
        """Nodes where incident pieces disagree on the image."""
        bad = []
        for node, reps in self.space.node_reps.items():
            images = {self.evaluate(Pt(p, t)) for p, t in reps}
            if len(images) > 1:
                bad.append((node, sorted(images, key=str)))
        return bad

    def fixed_violations(self) -> list[Pt]:
        return [p for p in self.fixed if self.evaluate(p) != self.space.canon(p)]

    def to_dict(self) -> dict:
        return {"name": self.name, "params": self.params, "space": self.space.description,
                "fixed": [[p.piece, str(p.t)] for p in self.fixed],
                "behaviors": {k: v.to_dict() for k, v in self.behaviors.items()}}


def map_from_dict(d: dict, space: Space) -> MapSpec:
    return MapSpec(space, {k: behavior_from_dict(v) for k, v in d["behaviors"].items()},
                   d.get("name", "custom"), d.get("params", {}),
                   tuple(Pt(p, parse_fraction(t)) for p, t in d.get("fixed", [])))


def evaluate(m: MapSpec, p: Pt) -> Pt:
    return m.evaluate(p)


# --------------------------------------------------------------- named maps

def _curve_pieces(space: Space, i: int) -> list[str]:
    k = space.meta["pieces"]
    return [f"S{i}.P{j}" for j in range(1, k + 1)] + [f"[a{i},b{i}]"]


def _x_pieces(space: Space) -> list[str]:
    k = space.meta.get("pieces") or sum(1 for p in space.pieces if p.name.startswith("P"))
    return [f"P{j}" for j in range(1, k + 1)] + ["[a,b]"]


def _sine_behaviors(names) -> dict:
    hs = Conjugate(horseshoe3())
    return {n: hs for n in names}


def _chain_behaviors(space: Space, n: int) -> dict:
    """Sine map on curve n, earlier curves to b_{n-1}, the rest to b_n."""
    m = space.meta["curves"]
    if not 1 <= n <= m:
        raise ValueError(f"curve index {n} outside truncation 1..{m}")
    beh = {}
    for i in range(1, m + 1):
        for name in _curve_pieces(space, i):
            if i == n:
                beh[name] = Conjugate(horseshoe3())
            elif i < n:
                beh[name] = Constant(space.canon(space.points[f"b{n - 1}"]))
            else:
                beh[name] = Constant(space.canon(space.points[f"b{n}"]))
    beh[space.meta["limit"]] = Constant(space.canon(space.points[f"b{n}"]))
    return beh


def _w_sine_copies(space: Space) -> dict:
    """Conjugate copy of the sine map on every curve, full horseshoe on S_inf."""
    beh = {}
    for i in range(1, space.meta["curves"] + 1):
        beh.update(_sine_behaviors(_curve_pieces(space, i)))
    beh["S_inf"] = Conjugate(horseshoe3())
    return beh


def _x_extended(space: Space) -> dict:
    beh = _sine_behaviors(_x_pieces(space))
    beh["[b,c]"] = Constant(space.canon(space.points["b"]))
    return beh


def _all(space: Space, b) -> dict:
    return {p.name: b for p in space.pieces}


def _w_names(space: Space) -> list[str]:
    return [n for i in range(1, space.meta["curves"] + 1) for n in _curve_pieces(space, i)] + ["S_inf"]


def _x_names(space: Space) -> list[str]:
    return _x_pieces(space) + ["[b,c]"]


def _z_map(space: Space, case: str, n: int) -> tuple[dict, Pt]:
    P = lambda name: space.canon(space.points[name])  # noqa: E731
    beh: dict = {}
    if case == "A_n":
        beh.update({k: Identity() for k in _x_names(space)})
        beh.update(_chain_behaviors(space, n))
        return beh, P(f"b{n}")
    if case == "S_inf":
        beh.update({k: Identity() for k in _x_names(space)})
        beh.update(_w_sine_copies(space))
        return beh, P("w")
    if case == "[a,c]":
        beh.update(_x_extended(space))
        beh.update({k: Identity() for k in _w_names(space)})
        return beh, P("b")
    if case == "W+[a,c]":
        beh.update(_x_extended(space))
        beh.update({k: Constant(P("b")) for k in _w_names(space)})
        return beh, P("b")
    if case == "A_n+X":
        beh.update(_chain_behaviors(space, n))
        beh.update({k: Constant(P(f"b{n}")) for k in _x_names(space)})
        return beh, P(f"b{n}")
    if case == "A_n+[a,c]":
        m = space.meta["curves"]
        if not 1 <= n <= m:
            raise ValueError(f"curve index {n} outside truncation 1..{m}")
        beh.update(_x_extended(space))
        flip = (-1) ** (n + 1)
        k = space.meta["pieces"]
        # S̄_n -> S̄ by the inverse placement map
        for j in range(1, k + 1):
            beh[f"S{n}.P{j}"] = Transport(f"P{j}")
        beh[f"[a{n},b{n}]"] = Transport("[a,b]")
        # A_n -> [a,b] by horizontal projection; planar height of curve i is (-1)^(i+1) t
        for i in range(n + 1, m + 1):
            for name in _curve_pieces(space, i):
                beh[name] = Transport("[a,b]", flip * (-1) ** (i + 1))
        beh["S_inf"] = Transport("[a,b]", flip)
        for i in range(1, n):
            for name in _curve_pieces(space, i):
                beh[name] = Constant(P("q1"))
        return beh, P("b")
    if case == "S_inf+X":
        beh.update(_w_sine_copies(space))
        beh.update({k: Constant(P("w")) for k in _x_names(space)})
        return beh, P("w")
    if case == "S_inf+[a,c]":
        m, k = space.meta["curves"], space.meta["pieces"]
        if m > k:
            raise ValueError("S_inf+[a,c] needs at least as many sine pieces as curves")
        beh.update(_x_extended(space))
        for i in range(1, m + 1):
            for name in _curve_pieces(space, i):
                beh[name] = Transport(f"P{i}", (-1) ** (i + 1))
        beh["S_inf"] = Transport("[a,b]")
        return beh, P("b")
    raise ValueError(f"unknown Z construction {case!r}")


Z_CASES = ("A_n", "S_inf", "[a,c]", "W+[a,c]", "A_n+X", "A_n+[a,c]", "S_inf+X", "S_inf+[a,c]")


def z_target(case: str, n: int) -> str:
    """Landmark-union expression realized by a Z construction."""
    return case.replace("A_n", f"A{n}")


def build_named_map(space: Space, name: str, **params) -> MapSpec:
    """Assemble one of the gallery maps and check it at shared nodes."""
    kind = space.kind
    fixed: list[Pt] = []
    if name == "identity":
        beh = _all(space, Identity())
    elif name == "constant":
        at = params.get("at")
        target = space.points[at] if isinstance(at, str) else (at or space.canon(Pt(space.pieces[0].name, space.pieces[0].lo)))
        beh = _all(space, Constant(space.canon(target)))
        fixed = [target]
    elif name == "horseshoe":
        if kind != "interval":
            raise ValueError("horseshoe acts on the interval space")
        beh = {"I": Conjugate(horseshoe3())}
        fixed = [space.points["-1"], space.points["1"]]
    elif name in ("sine", "extended_sine"):
        if kind not in ("sine", "extended_sine", "Z"):
            raise ValueError(f"{name} map needs a sine curve space, got {kind}")
        if kind == "Z":
            beh = _x_extended(space)
            beh.update({k: Identity() for k in _w_names(space)})
        else:
            beh = _sine_behaviors(_x_pieces(space))
            if kind == "extended_sine":
                beh["[b,c]"] = Constant(space.canon(space.points["b"]))
            elif name == "extended_sine":
                raise ValueError("extended sine map needs the extended sine space")
        fixed = [space.points[k] for k in space.points if k in ("a", "b") or k.startswith("q")]
    elif name == "chain":
        if kind not in ("chain_of_sines", "W"):
            raise ValueError("chain map needs a chain of sine curves")
        n = int(params.get("n", 1))
        beh = _chain_behaviors(space, n)
        fixed = [space.points[f"b{n}"]] + ([space.points[f"b{n - 1}"]] if n >= 2 else [])
    elif name == "F4":
        if kind != "F4":
            raise ValueError("F4 map needs the F4 space")
        beh = _f4_table(space)
        fixed = [space.points["origin"]]
    elif name.startswith("Z:"):
        if kind != "Z":
            raise ValueError("Z constructions need the Z space")
        beh, base = _z_map(space, name[2:], int(params.get("n", 2)))
        fixed = [base]
    else:
        raise ValueError(f"unknown map {name!r}")
    m = MapSpec(space, beh, name, dict(params), tuple(fixed))
    bad = m.boundary_violations()
    if bad:
        raise ValueError(f"inconsistent piece boundary values at {bad[:3]}")
    return m


def _f4_table(space: Space) -> dict:
    """Point table of the countable counterexample, truncated without new preimages."""
    n_max, m_max = space.meta["n_max"], space.meta["m_max"]
    nm = lambda x, y: f"<{x},{y}>"  # noqa: E731
    tgt = lambda x, y: Constant(Pt(nm(x, y), F(0)))  # noqa: E731
    beh = {nm(F(0), F(0)): tgt(F(0), F(0))}
    for n in range(1, n_max + 1):
        # the last point of the 1/n chain is held fixed instead of being sent to the origin
        beh[nm(F(1, n), F(0))] = tgt(F(1, n + 1), F(0)) if n < n_max else tgt(F(1, n), F(0))
    for n in range(2, n_max + 1):
        beh[nm(F(n), F(0))] = tgt(F(n - 1), F(0))
    for m in range(1, m_max + 1):
        for n in range(1, m + 1):
            beh[nm(F(1, n), F(1, m))] = tgt(F(0), F(0)) if n == m else tgt(F(1, n + 1), F(1, m))
        for n in range(2, n_max + 1):
            beh[nm(F(n), 1 + F(1, m))] = tgt(F(1), F(1, m)) if n == 2 else tgt(F(n - 1), 1 + F(1, m))
    return beh
