"""JSON configs and artifacts. Rationals travel as strings like "1/128"."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .spaces import NAMED_SPACES, Piece, Pt, Region, Space, build_named_space


class ConfigError(ValueError):
    pass


def _num(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    return v


def _parse_num(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------------ spaces

def space_to_dict(space: Space) -> dict:
    def reg(r: Region):
        return [r.piece, str(r.lo), str(r.hi)]

    meta = {}
    for k, v in space.meta.items():
        meta[k] = v.tolist() if isinstance(v, np.ndarray) else list(v) if isinstance(v, tuple) else v
    return {
        "kind": space.kind,
        "h": str(space.h),
        "description": space.description,
        "summands": list(space.summands),
        "meta": meta,
        "pieces": [{"name": p.name, "kind": p.kind, "lo": str(p.lo), "hi": str(p.hi), "start": p.start,
                    "end": p.end, "p0": [_num(c) for c in p.p0], "p1": [_num(c) for c in p.p1],
                    "base": [str(p.base_lo), str(p.base_hi)], "n": p.n,
                    "affine": [_num(c) for c in p.affine], "summand": p.summand} for p in space.pieces],
        "points": {k: [q.piece, str(q.t)] for k, q in sorted(space.points.items())},
        "landmarks": {k: [reg(r) for r in rs] for k, rs in sorted(space.landmarks.items())},
        "accumulations": [[[reg(r) for r in s], [reg(r) for r in d]] for s, d in space.accumulations],
    }


def space_from_dict(d: dict) -> Space:
    def reg(x):
        return Region(x[0], Fraction(x[1]), Fraction(x[2]))

    pieces = tuple(Piece(p["name"], p["kind"], Fraction(p["lo"]), Fraction(p["hi"]), p["start"], p["end"],
                         tuple(_parse_num(c) for c in p["p0"]), tuple(_parse_num(c) for c in p["p1"]),
                         Fraction(p["base"][0]), Fraction(p["base"][1]), p["n"],
                         tuple(_parse_num(c) for c in p["affine"]), p["summand"]) for p in d["pieces"])
    meta = dict(d.get("meta", {}))
    if "limit_geometry" in meta:
        meta["limit_geometry"] = np.array(meta["limit_geometry"])
    if "edge" in meta:
        meta["edge"] = tuple(meta["edge"])
    return Space(d["kind"], pieces, Fraction(d["h"]),
                 {k: Pt(v[0], Fraction(v[1])) for k, v in d["points"].items()},
                 {k: tuple(reg(r) for r in rs) for k, rs in d["landmarks"].items()},
                 tuple((tuple(reg(r) for r in s), tuple(reg(r) for r in t)) for s, t in d["accumulations"]),
                 d.get("description", {}), tuple(d.get("summands", ("0",))), meta)


# ------------------------------------------------------------------ config

_SPACE_PARAMS = {"pieces", "curves", "n_max", "m_max", "k", "depth"}


@dataclass
class Config:
    space: dict
    map: dict | None = None
    graph: dict = field(default_factory=lambda: {"k": 8})
    basepoint: str | None = None
    seed: int = 0


def _err(path: str, msg: str):
    raise ConfigError(f"{path}: {msg}")


def parse_config(text: str, source: str = "<config>") -> Config:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        _err(source, "top level must be an object")
    unknown = set(raw) - {"space", "map", "graph", "basepoint", "seed"}
    if unknown:
        _err(source, f"unknown fields {sorted(unknown)}")
    sp = raw.get("space")
    if not isinstance(sp, dict):
        _err("space", "required object")
    kind = sp.get("kind")
    if kind not in NAMED_SPACES:
        _err("space.kind", f"expected one of {list(NAMED_SPACES)}, got {kind!r}")
    if kind != "cantor":
        try:
            h = Fraction(str(sp.get("h", "1/8")))
        except (ValueError, ZeroDivisionError):
            _err("space.h", f"not a rational number: {sp.get('h')!r}")
        if h <= 0:
            _err("space.h", f"mesh must be positive, got {h}")
    for k in set(sp) - {"kind", "h"}:
        if k not in _SPACE_PARAMS:
            _err(f"space.{k}", "unknown parameter")
        if not isinstance(sp[k], int) or sp[k] < 1:
            _err(f"space.{k}", f"must be a positive integer, got {sp[k]!r}")
    mp = raw.get("map")
    if mp is not None:
        if not isinstance(mp, dict) or not isinstance(mp.get("name"), str):
            _err("map.name", "required string")
        if not isinstance(mp.get("params", {}), dict):
            _err("map.params", "must be an object")
    gr = raw.get("graph", {"k": 8})
    if not isinstance(gr, dict) or not isinstance(gr.get("k", 8), int) or gr.get("k", 8) < 2:
        _err("graph.k", "samples per cell must be an integer >= 2")
    if "rho" in gr and gr["rho"] is not None and not isinstance(gr["rho"], (int, float)):
        _err("graph.rho", "must be a number")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        _err("seed", "must be an integer")
    return Config(sp, mp, gr, raw.get("basepoint"), seed)


def load_config(path) -> Config:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    return parse_config(p.read_text(), str(p))


def build_space(cfg: Config):
    sp = dict(cfg.space)
    kind = sp.pop("kind")
    h = sp.pop("h", "1/8")
    try:
        return build_named_space(kind, h, **sp)
    except ValueError as e:
        raise ConfigError(f"space: {e}") from None
